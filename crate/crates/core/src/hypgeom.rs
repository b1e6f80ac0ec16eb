//! Geometry of the unit disc.
//!
//! Distances follow the curvature −4 normalization: the hyperbolic distance
//! is `ρ_h = ½·log((1+ρ_p)/(1−ρ_p)) = atanh(ρ_p)`, where `ρ_p` is the
//! pseudo-hyperbolic distance `|φ_{z1}(z2)|` and
//! `φ_a(z) = (a − z)/(1 − ā z)`. Many references omit the factor ½;
//! every bound in this crate is stated with it.
//!
//! The hyperbolic midpoint and the geodesic parametrization are computed by
//! transporting the first point to the origin, moving along the radius, and
//! transporting back. This construction is exact and Möbius-equivariant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Points with `|z| ≥ 1 − BOUNDARY_EPS` are treated as boundary points.
pub const BOUNDARY_EPS: f64 = 1e-15;

/// A point of the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint {
    pub re: f64,
    pub im: f64,
    /// Set when the point is allowed to sit on the unit circle.
    #[serde(default)]
    pub boundary: bool,
}

impl DiscPoint {
    /// An interior point; fails when `|z| ≥ 1 − BOUNDARY_EPS`.
    pub fn interior(z: Complex64) -> Result<Self> {
        check_interior(z)?;
        Ok(Self { re: z.re, im: z.im, boundary: false })
    }

    /// A point of the closed disc, flagged as boundary when it is on the circle.
    pub fn closed(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if r > 1.0 + BOUNDARY_EPS || !r.is_finite() {
            return Err(Error::OutsideDisc(z));
        }
        Ok(Self { re: z.re, im: z.im, boundary: r >= 1.0 - BOUNDARY_EPS })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<DiscPoint> for Complex64 {
    fn from(p: DiscPoint) -> Self {
        p.z()
    }
}

pub fn is_interior(z: Complex64) -> bool {
    z.norm() < 1.0 - BOUNDARY_EPS
}

pub fn check_interior(z: Complex64) -> Result<()> {
    if is_interior(z) && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisc(z))
    }
}

/// The disc automorphism `φ_a(z) = (a − z)/(1 − ā z)`. It is an involution.
pub fn mobius_phi(a: Complex64, z: Complex64) -> Result<Complex64> {
    check_interior(a)?;
    if z.norm() > 1.0 + BOUNDARY_EPS {
        return Err(Error::OutsideDisc(z));
    }
    Ok((a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z))
}

/// Derivative of `φ_a` at `z`: `(|a|² − 1)/(1 − ā z)²`.
pub fn mobius_phi_derivative(a: Complex64, z: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - a.conj() * z;
    Complex64::new(a.norm_sqr() - 1.0, 0.0) / (d * d)
}

/// `1 − ρ_p(z1, z2)²`, computed without cancellation:
/// `(1 − |z1|²)(1 − |z2|²)/|1 − z̄1 z2|²`.
fn one_minus_rho_p_sq(z1: Complex64, z2: Complex64) -> f64 {
    let d = (Complex64::new(1.0, 0.0) - z1.conj() * z2).norm_sqr();
    (1.0 - z1.norm_sqr()) * (1.0 - z2.norm_sqr()) / d
}

/// Pseudo-hyperbolic distance `|φ_{z1}(z2)|`.
pub fn rho_p(z1: Complex64, z2: Complex64) -> Result<f64> {
    check_interior(z1)?;
    check_interior(z2)?;
    Ok(mobius_phi(z1, z2)?.norm().min(1.0))
}

/// Hyperbolic distance `½·log((1+ρ_p)/(1−ρ_p))`.
pub fn rho_h(z1: Complex64, z2: Complex64) -> Result<f64> {
    let p = rho_p(z1, z2)?;
    if p < 0.5 {
        return Ok(p.atanh());
    }
    // log(1+ρ) − ½ log(1−ρ²) keeps precision when ρ_p is close to 1.
    Ok((1.0 + p).ln() - 0.5 * one_minus_rho_p_sq(z1, z2).ln())
}

/// Hyperbolic distance between `(1 − g1)e^{iθ1}` and `(1 − g2)e^{iθ2}`,
/// computed from the gaps so that points closer to the circle than the
/// resolution of `f64` coordinates keep a finite, accurate distance.
pub fn rho_h_polar(g1: f64, t1: f64, g2: f64, t2: f64) -> Result<f64> {
    for g in [g1, g2] {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::ParameterConstraint(format!("boundary gap {g} outside (0, 1]")));
        }
    }
    // 1 − z̄1 z2 = (1 − e^{iφ}) + s·e^{iφ} with s = g1 + g2 − g1 g2.
    let phi = t2 - t1;
    let s = g1 + g2 - g1 * g2;
    let e = Complex64::from_polar(1.0, phi);
    let one_minus_e = Complex64::new(0.0, -2.0 * (phi / 2.0).sin()) * Complex64::from_polar(1.0, phi / 2.0);
    let d = (one_minus_e + e * s).norm();
    if d == 0.0 {
        return Ok(0.0);
    }
    let log_one_minus_sq = (g1 * (2.0 - g1)).ln() + (g2 * (2.0 - g2)).ln() - 2.0 * d.ln();
    let one_minus_sq = log_one_minus_sq.exp();
    let p = (1.0 - one_minus_sq).max(0.0).sqrt();
    Ok((1.0 + p).ln() - 0.5 * log_one_minus_sq.min(0.0))
}

/// Point at signed hyperbolic arc-length fraction `t` along the geodesic
/// from `z1` through `z2`; any real `t` is allowed.
pub(crate) fn geodesic_point_extended(z1: Complex64, z2: Complex64, t: f64) -> Result<Complex64> {
    check_interior(z1)?;
    check_interior(z2)?;
    let w = mobius_phi(z1, z2)?;
    let p = w.norm();
    if p == 0.0 {
        return Err(Error::Degenerate("coincident points"));
    }
    let d = rho_h(z1, z2)?;
    let s = (t * d).tanh();
    mobius_phi(z1, w * (s / p))
}

/// Point on the geodesic segment from `z1` to `z2` with
/// `ρ_h(z1, result) = t·ρ_h(z1, z2)`.
pub fn geodesic_point(z1: Complex64, z2: Complex64, t: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterConstraint(format!("geodesic parameter {t} outside [0, 1]")));
    }
    geodesic_point_extended(z1, z2, t)
}

/// Hyperbolic midpoint `ξ_h(z1, z2)`.
pub fn hyp_midpoint(z1: Complex64, z2: Complex64) -> Result<Complex64> {
    geodesic_point(z1, z2, 0.5)
}

/// Pseudo-hyperbolic disc `Δ_p(a, r) = {z : ρ_p(z, a) < r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoHyperbolicDisc {
    pub center: Complex64,
    pub radius: f64,
}

impl PseudoHyperbolicDisc {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        check_interior(center)?;
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::ParameterConstraint(format!("pseudo-hyperbolic radius {radius} outside (0, 1)")));
        }
        Ok(Self { center, radius })
    }

    /// The same disc with a hyperbolic radius `R`, i.e. `Δ_h(a, R)`.
    pub fn from_hyperbolic_radius(center: Complex64, hyperbolic_radius: f64) -> Result<Self> {
        Self::new(center, hyperbolic_radius.tanh())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        rho_p(z, self.center).map(|p| p < self.radius).unwrap_or(false)
    }
}

/// Euclidean center and radius of a pseudo-hyperbolic disc.
pub fn pseudo_disc_to_euclidean(d: &PseudoHyperbolicDisc) -> (Complex64, f64) {
    let a2 = d.center.norm_sqr();
    let r2 = d.radius * d.radius;
    let den = 1.0 - r2 * a2;
    (d.center * ((1.0 - r2) / den), d.radius * (1.0 - a2) / den)
}

/// The disc `D(e^{iθ}·C/(1+C), 1/(1+C))`, internally tangent to the circle at `e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horodisc {
    pub direction: f64,
    pub parameter: f64,
}

impl Horodisc {
    pub fn new(direction: f64, parameter: f64) -> Result<Self> {
        if !(parameter >= 0.0) || !parameter.is_finite() || !direction.is_finite() {
            return Err(Error::ParameterConstraint(format!("horodisc parameter {parameter} must be finite and ≥ 0")));
        }
        Ok(Self { direction, parameter })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::from_polar(self.parameter / (1.0 + self.parameter), self.direction)
    }

    pub fn radius(&self) -> f64 {
        1.0 / (1.0 + self.parameter)
    }
}

/// Open-disc membership `|z − e^{iθ}C/(1+C)| < 1/(1+C)`.
pub fn horodisc_contains(h: &Horodisc, z: Complex64) -> bool {
    (z - h.center()).norm() < h.radius()
}

/// Carleson square over the arc centered at `arc_center` of normalized
/// length `length` (arc length divided by 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub arc_center: f64,
    pub length: f64,
}

impl CarlesonSquare {
    pub fn new(arc_center: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) {
            return Err(Error::ParameterConstraint(format!("Carleson square length {length} outside (0, 1]")));
        }
        Ok(Self { arc_center, length })
    }

    /// Half-width of the base arc in radians.
    pub fn half_angle(&self) -> f64 {
        PI * self.length
    }

    /// Membership given the polar angle and the boundary gap `1 − |z|`.
    /// The gap form keeps points extremely close to the circle classifiable.
    pub fn contains_polar(&self, angle: f64, gap: f64) -> bool {
        if !(gap > 0.0) || gap > self.length {
            return false;
        }
        if self.length >= 1.0 {
            return true;
        }
        angular_distance(angle, self.arc_center) <= self.half_angle()
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn carleson_contains(q: &CarlesonSquare, z: Complex64) -> bool {
    let r = z.norm();
    q.contains_polar(z.arg(), 1.0 - r)
}

/// The four-arc Jordan domain bounded by `∂𝔻`, `∂D(1+ρ, 1)` and `∂D(c±, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaDomain {
    pub tau: f64,
    pub rho: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub small_radius: f64,
    pub gamma_plus: Complex64,
    pub gamma_minus: Complex64,
}

impl OmegaDomain {
    /// Corner points in boundary order: `e^{iτ}`, `γ+`, `γ−`, `e^{−iτ}`.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::from_polar(1.0, self.tau),
            self.gamma_plus,
            self.gamma_minus,
            Complex64::from_polar(1.0, -self.tau),
        ]
    }
}

pub fn omega_domain(tau: f64, rho: f64) -> Result<OmegaDomain> {
    if !(tau > 0.0 && tau < 1.0 && rho > 0.0 && rho < 1.0 && 2.0 * tau + rho <= 1.0) {
        return Err(Error::ParameterConstraint(format!(
            "need τ, ρ ∈ (0,1) with 2τ + ρ ≤ 1, got τ = {tau}, ρ = {rho}"
        )));
    }
    let half = (1.0 + rho) / 2.0;
    let c_plus = Complex64::new(half, half * tau.tan());
    let c_minus = c_plus.conj();
    let e_tau = Complex64::from_polar(1.0, tau);
    let small_radius = (e_tau - c_plus).norm();
    // reflection across Re z = (1+ρ)/2
    let gamma_plus = Complex64::new(2.0 * half - e_tau.re, e_tau.im);
    Ok(OmegaDomain {
        tau,
        rho,
        c_plus,
        c_minus,
        small_radius,
        gamma_plus,
        gamma_minus: gamma_plus.conj(),
    })
}

/// Membership in the open Jordan domain. Its boundary follows the outer
/// arcs of the small circles, so the domain is the part of the lens
/// `𝔻 ∩ D(1+ρ, 1)` inside the strip `|Im z| < sin τ` together with the two
/// small discs; the lens tips beyond them are excluded.
pub fn omega_contains(d: &OmegaDomain, z: Complex64) -> bool {
    z.norm() < 1.0
        && (z - Complex64::new(1.0 + d.rho, 0.0)).norm() < 1.0
        && (z.im.abs() < d.tau.sin()
            || (z - d.c_plus).norm() < d.small_radius
            || (z - d.c_minus).norm() < d.small_radius)
}
