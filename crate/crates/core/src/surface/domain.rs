use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{SlotUse, Surface, SurfaceError};

/// A connected union of Y-pieces bounded by glued geodesics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDomain {
    /// Sorted piece indices.
    pub piece_set: Vec<usize>,
    /// Gluing ids with exactly one side inside, sorted.
    pub boundary_geodesics: Vec<usize>,
    pub boundary_lengths: Vec<f64>,
    pub boundary_length: f64,
    /// `p`, cusps on pieces of the domain.
    pub enclosed_cusps: usize,
    /// `m`, number of boundary geodesics.
    pub boundary_count: usize,
    pub genus: usize,
    pub area: f64,
}

impl GeodesicDomain {
    /// `m + p - 2 + 2g`, which equals the number of pieces.
    pub fn euler_index(&self) -> i64 {
        self.boundary_count as i64 + self.enclosed_cusps as i64 - 2 + 2 * self.genus as i64
    }

    pub fn ratio(&self) -> f64 {
        self.boundary_length / self.area
    }
}

pub fn domain_from_pieces(
    surface: &Surface,
    piece_set: &[usize],
) -> Result<GeodesicDomain, SurfaceError> {
    if piece_set.is_empty() {
        return Err(SurfaceError::EmptyPieceSet);
    }
    let set: BTreeSet<usize> = piece_set.iter().copied().collect();
    if let Some(&p) = set.iter().find(|&&p| p >= surface.piece_count()) {
        return Err(SurfaceError::NoSuchPiece(p));
    }
    let mut inside = vec![false; surface.piece_count()];
    for &p in &set {
        inside[p] = true;
    }
    if !connected_within(surface, &set, &inside) {
        return Err(SurfaceError::Disconnected);
    }
    Ok(build_domain(surface, set.into_iter().collect(), &inside))
}

fn connected_within(surface: &Surface, set: &BTreeSet<usize>, inside: &[bool]) -> bool {
    let start = *set.iter().next().expect("non-empty");
    let mut seen = vec![false; inside.len()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(p) = stack.pop() {
        for &(q, _) in surface.neighbors(p) {
            if inside[q] && !seen[q] {
                seen[q] = true;
                count += 1;
                stack.push(q);
            }
        }
    }
    count == set.len()
}

/// Builds the domain record; `inside` must mark exactly `pieces`, which must be
/// sorted and connected.
pub(crate) fn build_domain(surface: &Surface, pieces: Vec<usize>, inside: &[bool]) -> GeodesicDomain {
    let mut boundary = Vec::new();
    let mut cusps = 0;
    for &p in &pieces {
        for slot in surface.piece_slots(p) {
            match *slot {
                SlotUse::Cusp { .. } => cusps += 1,
                SlotUse::Glued { gluing, other } => {
                    if !inside[other.piece()] {
                        boundary.push(gluing);
                    }
                }
            }
        }
    }
    boundary.sort_unstable();
    let boundary_lengths: Vec<f64> = boundary.iter().map(|&g| surface.gluings()[g].length).collect();
    let boundary_length = boundary_lengths.iter().sum();
    let k = pieces.len();
    let m = boundary.len();
    // m + p - 2 + 2g = k
    let twice_genus = k as i64 + 2 - m as i64 - cusps as i64;
    assert!(
        twice_genus >= 0 && twice_genus % 2 == 0,
        "Euler characteristic mismatch for pieces {pieces:?}"
    );
    let genus = (twice_genus / 2) as usize;
    GeodesicDomain {
        piece_set: pieces,
        boundary_geodesics: boundary,
        boundary_lengths,
        boundary_length,
        enclosed_cusps: cusps,
        boundary_count: m,
        genus,
        area: 2.0 * PI * k as f64,
    }
}
