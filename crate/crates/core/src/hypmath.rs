//! Closed-form hyperbolic trigonometry for collars and the thick-thin split.
//!
//! Everything here works in curvature -1. Lengths are hyperbolic lengths,
//! `l` always denotes the full length of a closed geodesic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypError {
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },
}

fn domain<T>(op: &'static str, reason: impl Into<String>) -> Result<T, HypError> {
    Err(HypError::Domain {
        op,
        reason: reason.into(),
    })
}

fn require_positive(op: &'static str, name: &str, x: f64) -> Result<(), HypError> {
    if !x.is_finite() || x <= 0.0 {
        return domain(op, format!("{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

/// `arccosh(x)` for `x >= 1`.
///
/// Writes `x = 1 + t` and evaluates `ln(1 + t + sqrt(t(2 + t)))` through
/// `ln_1p`, which keeps full relative precision as `x -> 1`.
pub fn arccosh_stable(x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let t = x - 1.0;
    if t < 1.0 {
        (t + (t * (2.0 + t)).sqrt()).ln_1p()
    } else {
        x.acosh()
    }
}

/// Margulis parameter `0 < eps < arcsinh(1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MargulisParam(f64);

impl MargulisParam {
    pub fn new(eps: f64) -> Result<Self, HypError> {
        if !eps.is_finite() || eps <= 0.0 || eps >= 1f64.asinh() {
            return domain(
                "margulis",
                format!("eps must lie in (0, arcsinh 1), got {eps}"),
            );
        }
        Ok(Self(eps))
    }

    /// `arcsinh(1) / 2`, strictly inside every constraint used downstream.
    pub fn default_value() -> Self {
        Self(1f64.asinh() / 2.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn sinh(self) -> f64 {
        self.0.sinh()
    }
}

impl TryFrom<f64> for MargulisParam {
    type Error = HypError;
    fn try_from(eps: f64) -> Result<Self, Self::Error> {
        Self::new(eps)
    }
}

impl From<MargulisParam> for f64 {
    fn from(eps: MargulisParam) -> f64 {
        eps.0
    }
}

/// A collar `C(gamma, w)` about a closed geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarGeometry {
    pub core_length: f64,
    pub half_width: f64,
    /// Length of each of the two boundary curves.
    pub boundary_component_length: f64,
    pub area: f64,
}

impl CollarGeometry {
    pub fn new(core_length: f64, half_width: f64) -> Result<Self, HypError> {
        require_positive("collar", "core_length", core_length)?;
        if !half_width.is_finite() || half_width < 0.0 {
            return domain("collar", format!("half_width must be >= 0, got {half_width}"));
        }
        Ok(Self {
            core_length,
            half_width,
            boundary_component_length: core_length * half_width.cosh(),
            area: 2.0 * core_length * half_width.sinh(),
        })
    }
}

/// Horocyclic collar around a cusp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspCollarGeometry {
    pub lambda: f64,
    pub boundary_length: f64,
    pub area: f64,
}

/// Width `w` of the standard collar: `cosh w = coth(l/2)`.
pub fn collar_width(l: f64) -> Result<f64, HypError> {
    require_positive("collar_width", "l", l)?;
    let coth = 1.0 / (l / 2.0).tanh();
    Ok(arccosh_stable(coth))
}

fn require_thin(op: &'static str, l: f64, eps: MargulisParam) -> Result<(), HypError> {
    require_positive(op, "l", l)?;
    if l > 2.0 * eps.get() {
        return domain(
            op,
            format!("geodesic not eps-thin: l = {l} > 2 eps = {}", 2.0 * eps.get()),
        );
    }
    Ok(())
}

fn thin_cosh_ratio(l: f64, eps: MargulisParam) -> f64 {
    // Exactly 1 at l = 2 eps, never below it on the admissible range.
    (eps.sinh() / (l / 2.0).sinh()).max(1.0)
}

/// Half width of the component of `{inj < eps}` around a geodesic of length `l`.
pub fn thin_half_width(l: f64, eps: MargulisParam) -> Result<f64, HypError> {
    require_thin("thin_half_width", l, eps)?;
    Ok(arccosh_stable(thin_cosh_ratio(l, eps)))
}

/// Length of each boundary curve of the thin collar, `l sinh(eps) / sinh(l/2)`.
pub fn thin_boundary_length(l: f64, eps: MargulisParam) -> Result<f64, HypError> {
    require_thin("thin_boundary_length", l, eps)?;
    Ok(l * eps.sinh() / (l / 2.0).sinh())
}

/// Area of the thin collar, `(2l / sinh(l/2)) sqrt(sinh^2 eps - sinh^2(l/2))`.
pub fn thin_collar_area(l: f64, eps: MargulisParam) -> Result<f64, HypError> {
    require_thin("thin_collar_area", l, eps)?;
    let se = eps.sinh();
    let sl = (l / 2.0).sinh();
    let radicand = ((se - sl) * (se + sl)).max(0.0);
    Ok(2.0 * l / sl * radicand.sqrt())
}

/// Lower bound `(4d / sinh d) sqrt(sinh^2 eps - sinh^2 d)` on the thin collar
/// area, valid whenever `l/2 <= d < eps`.
pub fn thin_collar_area_floor(d: f64, eps: MargulisParam) -> f64 {
    let se = eps.sinh();
    let sd = d.sinh();
    4.0 * d / sd * ((se - sd) * (se + sd)).max(0.0).sqrt()
}

/// `arcsinh((sqrt 3 / 4) sinh eps)`; the largest half length for which a
/// thin collar keeps more than half its area after shrinking by `ln(4/3)`.
pub fn area_halving_radius(eps: MargulisParam) -> f64 {
    (3f64.sqrt() / 4.0 * eps.sinh()).asinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrunkCollar {
    pub half_width: f64,
    pub area_shrunk: f64,
    pub full_area: f64,
    /// `(2d / sinh d) sqrt(sinh^2 eps - sinh^2 d)` with `d = area_halving_radius(eps)`.
    pub floor: f64,
    pub holds: bool,
}

/// Area of `C(gamma, h - delta0)` together with the half-area comparison.
pub fn shrunk_collar_area_bound(
    l: f64,
    eps: MargulisParam,
    delta0: f64,
) -> Result<ShrunkCollar, HypError> {
    const OP: &str = "shrunk_collar_area_bound";
    require_positive(OP, "l", l)?;
    if !delta0.is_finite() || delta0 < 0.0 || delta0 > (4.0f64 / 3.0).ln() {
        return domain(OP, format!("delta0 must lie in [0, ln(4/3)], got {delta0}"));
    }
    let d = area_halving_radius(eps);
    if l > 2.0 * d {
        return domain(
            OP,
            format!("l = {l} exceeds 2 arcsinh((sqrt 3/4) sinh eps) = {}", 2.0 * d),
        );
    }
    let h = thin_half_width(l, eps)?;
    let full_area = thin_collar_area(l, eps)?;
    let area_shrunk = 2.0 * l * (h - delta0).sinh();
    let floor = thin_collar_area_floor(d, eps) / 2.0;
    let holds = delta0 < h && area_shrunk > full_area / 2.0 && full_area / 2.0 >= floor * (1.0 - 1e-12);
    Ok(ShrunkCollar {
        half_width: h,
        area_shrunk,
        full_area,
        floor,
        holds,
    })
}

/// Cusp collar at the Margulis level: `lambda = 2 sinh eps`.
pub fn cusp_collar(eps: MargulisParam) -> CuspCollarGeometry {
    let lambda = 2.0 * eps.sinh();
    CuspCollarGeometry {
        lambda,
        boundary_length: lambda,
        area: lambda,
    }
}

/// Distance from the thin collar to the boundary of the standard collar,
/// `collar_width(l) - thin_half_width(l, eps)`.
pub fn thin_separation(l: f64, eps: MargulisParam) -> Result<f64, HypError> {
    require_thin("thin_separation", l, eps)?;
    if l == 2.0 * eps.get() {
        return domain("thin_separation", "requires l < 2 eps");
    }
    Ok(collar_width(l)? - thin_half_width(l, eps)?)
}

/// `ln(1 / sinh eps)`, the infimum of [`thin_separation`] as `l -> 0`.
pub fn separation_floor(eps: MargulisParam) -> f64 {
    -eps.sinh().ln()
}

fn require_radius(op: &'static str, r: f64) -> Result<(), HypError> {
    require_positive(op, "r", r)
}

/// Area of an embedded hyperbolic disk of radius `r`.
pub fn ball_area(r: f64) -> Result<f64, HypError> {
    require_radius("ball_area", r)?;
    let s = (r / 2.0).sinh();
    Ok(4.0 * PI * s * s)
}

/// Circumference of an embedded hyperbolic disk of radius `r`.
pub fn ball_circumference(r: f64) -> Result<f64, HypError> {
    require_radius("ball_circumference", r)?;
    Ok(2.0 * PI * r.sinh())
}

/// Trirectangle relation `sinh alpha = sinh a cosh beta`, solved for `alpha`.
pub fn quad_relation(a: f64, beta: f64) -> Result<f64, HypError> {
    if !a.is_finite() || !beta.is_finite() {
        return domain("quad_relation", "inputs must be finite");
    }
    if a <= 0.0 || beta < 0.0 {
        return domain("quad_relation", format!("need a > 0, beta >= 0; got a = {a}, beta = {beta}"));
    }
    Ok((a.sinh() * beta.cosh()).asinh())
}

/// Upper limit `delta1` for the net spacing.
pub fn delta1(eps: MargulisParam) -> f64 {
    separation_floor(eps).min(area_halving_radius(eps))
}
