use serde::{Deserialize, Serialize};

use super::{SlotRef, Surface, SurfaceError};
use crate::hypmath::{self, MargulisParam};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspCollar {
    pub cusp: usize,
    pub slot: SlotRef,
    pub lambda: f64,
    pub boundary_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinCollar {
    pub geodesic: usize,
    pub core_length: f64,
    pub half_width: f64,
    pub boundary_lengths: [f64; 2],
    pub area: f64,
    pub is_separating: bool,
}

/// Collar inventory of the thin part at a fixed Margulis parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickThin {
    pub eps: MargulisParam,
    pub cusp_collars: Vec<CuspCollar>,
    /// Ordered by geodesic id.
    pub thin_collars: Vec<ThinCollar>,
}

impl ThickThin {
    pub fn thin_collar(&self, geodesic: usize) -> Option<&ThinCollar> {
        self.thin_collars
            .binary_search_by_key(&geodesic, |c| c.geodesic)
            .ok()
            .map(|i| &self.thin_collars[i])
    }
}

pub fn thick_thin(surface: &Surface, eps: MargulisParam) -> Result<ThickThin, SurfaceError> {
    let cusp = hypmath::cusp_collar(eps);
    let cusp_collars = surface
        .cusps()
        .iter()
        .enumerate()
        .map(|(i, &slot)| CuspCollar {
            cusp: i,
            slot,
            lambda: cusp.lambda,
            boundary_length: cusp.boundary_length,
        })
        .collect();
    let mut thin_collars = Vec::new();
    for (i, g) in surface.gluings().iter().enumerate() {
        if g.length >= 2.0 * eps.get() {
            continue;
        }
        let boundary = hypmath::thin_boundary_length(g.length, eps)?;
        thin_collars.push(ThinCollar {
            geodesic: i,
            core_length: g.length,
            half_width: hypmath::thin_half_width(g.length, eps)?,
            boundary_lengths: [boundary, boundary],
            area: hypmath::thin_collar_area(g.length, eps)?,
            is_separating: surface.is_separating(i),
        });
    }
    Ok(ThickThin {
        eps,
        cusp_collars,
        thin_collars,
    })
}

/// Infimum of the lengths of non-separating geodesics shorter than `2 delta`;
/// `+inf` when there are none.
pub fn lambda_x(surface: &Surface, eps: MargulisParam, delta: f64) -> Result<f64, SurfaceError> {
    let limit = hypmath::delta1(eps);
    if !(delta > 0.0 && delta < limit) {
        return Err(SurfaceError::Parameter(format!(
            "delta must lie in (0, delta1 = {limit}), got {delta}"
        )));
    }
    Ok(surface
        .gluings()
        .iter()
        .enumerate()
        .filter(|(i, g)| g.length < 2.0 * delta && !surface.is_separating(*i))
        .map(|(_, g)| g.length)
        .fold(f64::INFINITY, f64::min))
}
