//! Empirical checks of the oscillation bounds.
//!
//! Every check returns a [`BoundReport`]: a verdict, a margin with the
//! convention "≥ 0 means the bound holds", witness points, and the grid or
//! search parameters used. Verdicts are empirical statements about finite
//! grids and computed zeros, never proofs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::analytic::{nehari_functional, nehari_functional_polar, CoefficientFamily};
use crate::error::{Error, Result};
use crate::hypgeom::{
    check_interior, geodesic_point_extended, hyp_midpoint, rho_h, CarlesonSquare, DiscPoint,
};
use crate::ode::{BasisAtlas, InitialConditions, SolutionFn, SolutionHandle};
use crate::quadrature::integrate_adaptive;
use crate::zeros::{count_zeros, locate_zeros, ZeroSequence};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

/// A point, pair or tuple of points with the value computed there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Complex64>,
    pub value: f64,
    pub note: String,
}

impl Witness {
    pub fn new(points: Vec<Complex64>, value: f64, note: impl Into<String>) -> Self {
        Self { points, value, note: note.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub verdict: Verdict,
    /// Smallest slack over checked instances; `None` when nothing was checked.
    pub margin: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub params: BTreeMap<String, Value>,
}

impl BoundReport {
    fn new(theorem: &str, verdict: Verdict, margin: Option<f64>) -> Self {
        let mut params = BTreeMap::new();
        params.insert("basis".into(), json!("empirical"));
        Self { theorem: theorem.into(), verdict, margin, witnesses: Vec::new(), params }
    }

    fn param(mut self, key: &str, v: Value) -> Self {
        self.params.insert(key.into(), v);
        self
    }

    fn witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl BoundReport {
    /// Combines reports of one theorem over several solutions: violated if
    /// any is, holds if any holds, and the smallest margin with its witnesses.
    pub fn merge(theorem: &str, reports: Vec<BoundReport>) -> BoundReport {
        let n = reports.len();
        let verdict = if reports.iter().any(|r| r.verdict == Verdict::Violated) {
            Verdict::Violated
        } else if reports.iter().any(|r| r.verdict == Verdict::Holds) {
            Verdict::Holds
        } else {
            Verdict::NotApplicable
        };
        let worst = reports
            .into_iter()
            .filter(|r| verdict == Verdict::NotApplicable || r.verdict == verdict)
            .min_by(|a, b| a.margin.unwrap_or(f64::INFINITY).total_cmp(&b.margin.unwrap_or(f64::INFINITY)));
        let mut out = match worst {
            Some(w) => BoundReport { verdict, ..w },
            None => BoundReport::new(theorem, Verdict::NotApplicable, None).param("reason", json!("no solutions")),
        };
        out.theorem = theorem.into();
        out.params.insert("solutions".into(), json!(n));
        out
    }
}

fn verdict_from_margin(m: f64) -> Verdict {
    if m >= 0.0 {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

/// Polar grid `(1 − 2^{−j})e^{2πia/angles}`, `j = 1..=levels`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub angles: usize,
    pub levels: u32,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { angles: 256, levels: 40 }
    }
}

impl PolarGrid {
    pub fn new(angles: usize, levels: u32) -> Result<Self> {
        if angles == 0 || levels == 0 || levels > 1000 {
            return Err(Error::ParameterConstraint(format!("grid {angles}×{levels} is empty or too deep")));
        }
        Ok(Self { angles, levels })
    }

    pub fn gap(&self, j: u32) -> f64 {
        0.5f64.powi(j as i32)
    }

    pub fn angle(&self, a: usize) -> f64 {
        2.0 * PI * a as f64 / self.angles as f64
    }

    /// `(gap, angle)` for every node.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..=self.levels).flat_map(move |j| (0..self.angles).map(move |a| (self.gap(j), self.angle(a))))
    }

    fn to_json(self) -> Value {
        json!({"angles": self.angles, "levels": self.levels, "radii": "1 - 2^-j"})
    }
}

fn grid_sup_nehari(fam: &CoefficientFamily, grid: &PolarGrid) -> Result<(f64, f64, f64)> {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for (g, t) in grid.nodes() {
        let n = nehari_functional_polar(fam, g, t)?;
        if n > best.0 {
            best = (n, g, t);
        }
    }
    Ok(best)
}

fn polar_point(gap: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(1.0 - gap, angle)
}

/// `sup N_A ≤ 1` on the grid.
pub fn check_nehari(fam: &CoefficientFamily, grid: &PolarGrid) -> Result<BoundReport> {
    let (sup, g, t) = grid_sup_nehari(fam, grid)?;
    let margin = 1.0 - sup;
    Ok(BoundReport::new("nehari", verdict_from_margin(margin), Some(margin))
        .param("family", json!(fam.to_string()))
        .param("grid", grid.to_json())
        .param("sup", json!(sup))
        .witness(Witness::new(vec![polar_point(g, t)], sup, "argmax of N_A")))
}

/// Largest zero count in `|z| < r_max` over a deterministic net of `size`
/// combinations `cos φ·U + sin φ·e^{iψ}·V` of the canonical basis.
pub fn sampled_max_zero_count(fam: &CoefficientFamily, size: usize, r_max: f64) -> Result<usize> {
    let atlas = BasisAtlas::new(fam.clone())?;
    let side = (size as f64).sqrt().ceil() as usize;
    let mut best = 0;
    let mut done = 0;
    'outer: for i in 0..side {
        for j in 0..side {
            if done == size {
                break 'outer;
            }
            let phi = PI * (i as f64 + 0.5) / side as f64;
            let psi = 2.0 * PI * j as f64 / side as f64;
            let ic = InitialConditions::new(c(phi.cos()), Complex64::from_polar(phi.sin(), psi));
            let s = SolutionHandle::with_atlas(atlas.clone(), ic).with_radius_cap(r_max.max(0.99999))?;
            best = best.max(count_zeros(&s, c(0.0), r_max)?);
            done += 1;
        }
    }
    Ok(best)
}

/// `sup N_A ≤ 3` whenever every sampled solution vanishes at most once.
pub fn check_kraus(fam: &CoefficientFamily, grid: &PolarGrid, max_zero_count: usize) -> Result<BoundReport> {
    let (sup, g, t) = grid_sup_nehari(fam, grid)?;
    let w = Witness::new(vec![polar_point(g, t)], sup, "argmax of N_A");
    let report = if max_zero_count <= 1 {
        let margin = 3.0 - sup;
        BoundReport::new("kraus", verdict_from_margin(margin), Some(margin))
    } else {
        BoundReport::new("kraus", Verdict::NotApplicable, None)
            .param("reason", json!("sampled solutions vanish more than once"))
    };
    Ok(report
        .param("family", json!(fam.to_string()))
        .param("grid", grid.to_json())
        .param("sup", json!(sup))
        .param("max_zero_count", json!(max_zero_count))
        .witness(w))
}

/// Least `C` with `N_A(z) ≤ 1 + C(1 − |z|)` on the grid, or `+∞` when the
/// running supremum over the first `J` radial levels keeps doubling.
pub fn estimate_cs_constant(fam: &CoefficientFamily, grid: &PolarGrid) -> Result<f64> {
    let mut running = Vec::with_capacity(grid.levels as usize);
    let mut sup = 0.0f64;
    for j in 1..=grid.levels {
        let g = grid.gap(j);
        for a in 0..grid.angles {
            let n = nehari_functional_polar(fam, g, grid.angle(a))?;
            sup = sup.max((n - 1.0).max(0.0) / g);
        }
        running.push(sup);
    }
    let last = running.len() - 1;
    if last >= 5 && running[last] > 2.0 * running[last - 5] {
        return Ok(f64::INFINITY);
    }
    Ok(sup)
}

pub fn cs_constant_report(fam: &CoefficientFamily, grid: &PolarGrid) -> Result<BoundReport> {
    let cc = estimate_cs_constant(fam, grid)?;
    let r = if cc.is_finite() {
        BoundReport::new("cs-constant", Verdict::Holds, Some(0.0))
    } else {
        BoundReport::new("cs-constant", Verdict::NotApplicable, None)
            .param("reason", json!("N_A − 1 is not O(1 − |z|) on the grid"))
    };
    Ok(r.param("family", json!(fam.to_string()))
        .param("grid", grid.to_json())
        .param("C", json!(cc))
        .param("C_kind", json!("empirical")))
}

/// The separation bound and its weaker logarithmic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationBound {
    pub strong: f64,
    pub weak: f64,
}

/// Lower bound for `ρ_h(z1, z2)` given `C` and the gap `1 − |ξ_h|` of the
/// hyperbolic midpoint.
pub fn separation_lower_bound_gap(cc: f64, gap: f64) -> Result<SeparationBound> {
    if !(cc > 0.0 && cc.is_finite()) {
        return Err(Error::ParameterConstraint(format!("C = {cc} must be positive and finite")));
    }
    if !(gap >= 0.0 && gap * cc < 1.0) {
        return Err(Error::Applicability(format!("1 − |ξ| = {gap} is not below 1/C = {}", 1.0 / cc)));
    }
    let s = (cc * gap).sqrt();
    Ok(SeparationBound { strong: ((2.0 - s) / s).ln(), weak: 0.5 * (1.0 / cc).ln() + 0.5 * (1.0 / gap).ln() })
}

pub fn separation_lower_bound(cc: f64, abs_xi: f64) -> Result<SeparationBound> {
    separation_lower_bound_gap(cc, 1.0 - abs_xi)
}

fn interior_zeros(zs: &ZeroSequence) -> (Vec<Complex64>, usize) {
    let mut pts = Vec::new();
    let mut skipped = 0;
    for z in &zs.zeros {
        if check_interior(z.z()).is_ok() {
            pts.push(z.z());
        } else {
            skipped += 1;
        }
    }
    (pts, skipped)
}

/// `ρ_h(z1, z2) ≥ separation_lower_bound(C, |ξ_h|)` for every pair of zeros
/// whose midpoint satisfies `1 − |ξ_h| < 1/C`.
pub fn check_separation(zs: &ZeroSequence, cc: f64) -> Result<BoundReport> {
    if !(cc > 0.0 && cc.is_finite()) {
        return Ok(BoundReport::new("separation", Verdict::NotApplicable, None)
            .param("C", json!(cc))
            .param("reason", json!("the bound needs a finite C > 0")));
    }
    let (pts, unrepresentable) = interior_zeros(zs);
    let mut margin: Option<f64> = None;
    let mut worst: Option<Witness> = None;
    let mut applicable = 0usize;
    let mut skipped = 0usize;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let xi = hyp_midpoint(pts[i], pts[j])?;
            let bound = match separation_lower_bound_gap(cc, 1.0 - xi.norm()) {
                Ok(b) => b.strong,
                Err(Error::Applicability(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            applicable += 1;
            let d = rho_h(pts[i], pts[j])?;
            let slack = d - bound;
            if margin.is_none_or(|m| slack < m) {
                margin = Some(slack);
                worst = Some(Witness::new(vec![pts[i], pts[j], xi], d, format!("rho_h; bound {bound}")));
            }
        }
    }
    let verdict = margin.map_or(Verdict::Holds, verdict_from_margin);
    let mut r = BoundReport::new("separation", verdict, margin)
        .param("C", json!(cc))
        .param("zeros", json!(zs.len()))
        .param("applicable_pairs", json!(applicable))
        .param("skipped_pairs", json!(skipped))
        .param("unrepresentable_zeros", json!(unrepresentable));
    if let Some(w) = worst {
        r = r.witness(w);
    }
    Ok(r)
}

/// Rescaling radii and the limit functions of the proofs. Components are
/// `None` outside their applicability windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofRadii {
    pub r_a: Option<f64>,
    pub big_r_a: Option<f64>,
    pub psi_sep: Option<f64>,
    pub psi_horo: Option<f64>,
}

/// `r_a = 1 − √(C(1 − |a|))`, for `1 − |a| < 1/C`.
pub fn r_a(cc: f64, abs_a: f64) -> Result<f64> {
    let g = 1.0 - abs_a;
    if !(cc > 0.0 && g > 0.0 && cc * g < 1.0) {
        return Err(Error::Applicability(format!("r_a needs 0 < C(1 − |a|) < 1, got C = {cc}, |a| = {abs_a}")));
    }
    Ok(1.0 - (cc * g).sqrt())
}

/// `R_a = 1 − (8C)^{1/3}(1 − |a|)^{1/3}`, for `1 − |a| < 1/(8C)`.
pub fn big_r_a(cc: f64, abs_a: f64) -> Result<f64> {
    let g = 1.0 - abs_a;
    if !(cc > 0.0 && g > 0.0 && 8.0 * cc * g < 1.0) {
        return Err(Error::Applicability(format!("R_a needs 0 < 8C(1 − |a|) < 1, got C = {cc}, |a| = {abs_a}")));
    }
    Ok(1.0 - (8.0 * cc * g).cbrt())
}

/// `(8C)^{1/3}(1 + R_a)/R_a²`, tending to `2(8C)^{1/3}` as `|a| → 1`.
pub fn psi_sep(cc: f64, abs_a: f64) -> Result<f64> {
    let big = big_r_a(cc, abs_a)?;
    Ok((8.0 * cc).cbrt() * (1.0 + big) / (big * big))
}

/// `(C/(1+C))(1 + |a|)/(|a| − C/(1+C))`, tending to `2C` as `|a| → 1`.
pub fn psi_horo(cc: f64, abs_a: f64) -> Result<f64> {
    let s = cc / (1.0 + cc);
    if !(cc >= 0.0 && abs_a > s && abs_a < 1.0) {
        return Err(Error::Applicability(format!("psi_horo needs C/(1+C) < |a| < 1, got C = {cc}, |a| = {abs_a}")));
    }
    Ok(s * (1.0 + abs_a) / (abs_a - s))
}

pub fn proof_radii(cc: f64, abs_a: f64) -> ProofRadii {
    ProofRadii {
        r_a: r_a(cc, abs_a).ok(),
        big_r_a: big_r_a(cc, abs_a).ok(),
        psi_sep: psi_sep(cc, abs_a).ok(),
        psi_horo: psi_horo(cc, abs_a).ok(),
    }
}

/// `μ(t) = (1 + C(1 − t))(1 − t²)^{−2}`.
pub fn mu(cc: f64, t: f64) -> f64 {
    let w = 1.0 - t * t;
    (1.0 + cc * (1.0 - t)) / (w * w)
}

fn mu_derivative_sign(cc: f64, t: f64) -> f64 {
    // μ'(t)·(1 − t²)³ = −3Ct² + 4(1 + C)t − C
    -3.0 * cc * t * t + 4.0 * (1.0 + cc) * t - cc
}

/// The minimizer of `μ` on `(0, 1)`: the smaller root of
/// `3Ct² − 4(1+C)t + C = 0`, written without cancellation.
pub fn t_c(cc: f64) -> Result<f64> {
    if !(cc > 0.0 && cc.is_finite()) {
        return Err(Error::ParameterConstraint(format!("C = {cc} must be positive and finite")));
    }
    let b = 4.0 * (1.0 + cc);
    let t = 2.0 * cc / (b + (b * b - 12.0 * cc * cc).sqrt());
    let h = 1e-6 * t.max(1e-300);
    if !(t > 0.0 && t < 1.0 / 3.0) || mu_derivative_sign(cc, t - h) >= 0.0 || mu_derivative_sign(cc, t + h) <= 0.0 {
        return Err(Error::Applicability(format!("t_C = {t} failed the minimizer check for C = {cc}")));
    }
    Ok(t)
}

/// `min_{|ζ| ≤ s} max(|z1 − ζ|, |z2 − ζ|)`, solved exactly: the midpoint if
/// admissible, else the best of the circle candidates (the two nearest
/// points to `z1`, `z2` and the bisector crossings).
pub fn horodisc_pair_distance(z1: Complex64, z2: Complex64, s: f64) -> f64 {
    let cost = |q: Complex64| (z1 - q).norm().max((z2 - q).norm());
    let m = (z1 + z2) * 0.5;
    if m.norm() <= s {
        return (z1 - z2).norm() * 0.5;
    }
    if s == 0.0 {
        return cost(c(0.0));
    }
    let mut best = f64::INFINITY;
    for z in [z1, z2] {
        let q = if z.norm() > 0.0 { z * (s / z.norm()) } else { c(s) };
        best = best.min(cost(q));
    }
    let d = z1 - z2;
    if d.norm() > 0.0 {
        let u = Complex64::new(0.0, 1.0) * d / d.norm();
        // |m + t u|² = s²
        let b = (m * u.conj()).re;
        let disc = b * b - (m.norm_sqr() - s * s);
        if disc >= 0.0 {
            for t in [-b - disc.sqrt(), -b + disc.sqrt()] {
                best = best.min(cost(m + u * t));
            }
        }
    }
    best
}

fn horodisc_fine_search(z1: Complex64, z2: Complex64, s: f64) -> f64 {
    const N: usize = 100_000;
    let cost = |q: Complex64| (z1 - q).norm().max((z2 - q).norm());
    (0..N).map(|k| cost(Complex64::from_polar(s, 2.0 * PI * k as f64 / N as f64))).fold(f64::INFINITY, f64::min)
}

/// No admissible disc `D(ζ, 1/(1+C))`, `|ζ| ≤ C/(1+C)`, contains two zeros.
pub fn check_horodisc(zs: &ZeroSequence, cc: f64) -> Result<BoundReport> {
    if !(cc >= 0.0 && cc.is_finite()) {
        return Ok(BoundReport::new("horodisc", Verdict::NotApplicable, None)
            .param("C", json!(cc))
            .param("reason", json!("the bound needs a finite C ≥ 0")));
    }
    let s = cc / (1.0 + cc);
    let rho = 1.0 / (1.0 + cc);
    let pts: Vec<Complex64> = zs.points();
    let mut margin: Option<f64> = None;
    let mut worst = None;
    let mut fallbacks = 0usize;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let mut d = horodisc_pair_distance(pts[i], pts[j], s);
            if (d - rho).abs() < 1e-9 && s > 0.0 && (pts[i] + pts[j]).norm() * 0.5 > s {
                d = d.min(horodisc_fine_search(pts[i], pts[j], s));
                fallbacks += 1;
            }
            let slack = d - rho;
            if margin.is_none_or(|m| slack < m) {
                margin = Some(slack);
                worst = Some(Witness::new(vec![pts[i], pts[j]], d, "min over admissible centers of the larger distance"));
            }
        }
    }
    // An infeasible pair has min-max distance ≥ 1/(1+C), so slack ≥ 0 means it holds.
    let verdict = margin.map_or(Verdict::Holds, verdict_from_margin);
    let mut r = BoundReport::new("horodisc", verdict, margin)
        .param("C", json!(cc))
        .param("disc_radius", json!(rho))
        .param("center_radius", json!(s))
        .param("zeros", json!(pts.len()))
        .param("fine_searches", json!(fallbacks));
    if let Some(w) = worst {
        r = r.witness(w);
    }
    Ok(r)
}

/// Squares centered at `angle` with lengths `2^{−j}`, `j = 0..=levels`.
pub fn dyadic_squares_at(angle: f64, levels: u32) -> Vec<CarlesonSquare> {
    (0..=levels)
        .map(|j| CarlesonSquare { arc_center: angle, length: 0.5f64.powi(j as i32) })
        .filter(|q| q.length > 0.0)
        .collect()
}

/// `max_Q S(Q)/ℓ(Q)^{1/2}` with `S(Q) = Σ_{z ∈ Q} (1 − |z|)^{1/2}`.
pub fn carleson_constant(zs: &ZeroSequence, squares: &[CarlesonSquare]) -> (f64, Option<(CarlesonSquare, f64)>) {
    let mut best = 0.0;
    let mut arg = None;
    for q in squares {
        let sum: f64 = zs.zeros.iter().filter(|z| q.contains_polar(z.angle(), z.gap)).map(|z| z.gap.sqrt()).sum();
        let ratio = sum / q.length.sqrt();
        if ratio > best {
            best = ratio;
            arg = Some((*q, sum));
        }
    }
    (best, arg)
}

pub fn check_carleson(zs: &ZeroSequence, squares: &[CarlesonSquare]) -> Result<BoundReport> {
    if squares.is_empty() {
        return Err(Error::EmptyInput("Carleson squares"));
    }
    let (k, arg) = carleson_constant(zs, squares);
    let verdict = if k.is_finite() { Verdict::Holds } else { Verdict::Violated };
    let mut r = BoundReport::new("carleson", verdict, k.is_finite().then_some(0.0))
        .param("K", json!(k))
        .param("K_kind", json!("empirical"))
        .param("squares", json!(squares.len()))
        .param("zeros", json!(zs.len()));
    if let Some((q, sum)) = arg {
        r = r.witness(Witness::new(
            vec![Complex64::from_polar(1.0, q.arc_center)],
            sum / q.length.sqrt(),
            format!("square of length {}; S(Q) = {sum}", q.length),
        ));
    }
    Ok(r)
}

/// `θ(r) = arccos((C − 1 + r²(1+C))/(2rC))`, from `1 − cos θ = g(2 − g(1+C))/(2rC)`.
pub fn theta_of_r(cc: f64, r: f64) -> Result<f64> {
    let g = 1.0 - r;
    if !(cc > 0.0 && g > 0.0 && g < 2.0 / (1.0 + cc)) {
        return Err(Error::Applicability(format!("θ(r) needs 0 < 1 − r < 2/(1+C), got C = {cc}, r = {r}")));
    }
    let x = g * (2.0 - g * (1.0 + cc)) / (2.0 * r * cc);
    if x > 2.0 {
        return Err(Error::Applicability(format!("θ(r) undefined: cosine below −1 at C = {cc}, r = {r}")));
    }
    Ok(2.0 * (x / 2.0).sqrt().asin())
}

/// `(√(1+K) − 1)/2`.
pub fn growth_exponent(k: f64) -> f64 {
    ((1.0 + k).sqrt() - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Diverging,
    Undecided,
}

/// Running suprema of `|f|(1 − |z|²)^p` over `|z| ≤ r` for each `r` in the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrend {
    pub r_grid: Vec<f64>,
    pub sups: Vec<f64>,
    pub trend: Trend,
}

/// Grid suprema for increasing `r_max`. Bounded when the last relative
/// increment is below 1%; diverging when all increments are positive and
/// the last is at least half the first.
pub fn growth_trend<F>(f: F, p: f64, r_grid: &[f64], angles: usize) -> Result<GrowthTrend>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::ParameterConstraint("r grid must increase inside (0, 1) with at least two entries".into()));
    }
    let mut sups = Vec::with_capacity(r_grid.len());
    let mut sup = 0.0f64;
    let mut lo_gap = 1.0f64;
    for &r in r_grid {
        let hi_gap = 1.0 - r;
        // eight radii per decade between the previous and current radius
        let decades = (lo_gap / hi_gap).log10();
        let steps = (decades * 8.0).ceil().max(1.0) as usize;
        for s in 1..=steps {
            let g = lo_gap * (hi_gap / lo_gap).powf(s as f64 / steps as f64);
            let w = (g * (2.0 - g)).powf(p);
            for a in 0..angles {
                let z = Complex64::from_polar(1.0 - g, 2.0 * PI * a as f64 / angles as f64);
                sup = sup.max(f(z)?.norm() * w);
            }
        }
        lo_gap = hi_gap;
        sups.push(sup);
    }
    let inc: Vec<f64> = sups.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *inc.last().expect("two entries");
    let trend = if last <= 1e-2 * sups[sups.len() - 2].abs() {
        Trend::Bounded
    } else if inc.iter().all(|&d| d > 0.0) && last >= 0.5 * inc[0] {
        Trend::Diverging
    } else {
        Trend::Undecided
    };
    Ok(GrowthTrend { r_grid: r_grid.to_vec(), sups, trend })
}

/// Growth of the canonical basis in `H^∞_p`. Bounded trends are predicted
/// for `p` above the growth exponent of `K`; for smaller `p` the report is
/// not applicable.
pub fn check_growth(fam: &CoefficientFamily, k: f64, p: f64, r_grid: &[f64]) -> Result<BoundReport> {
    let r_top = r_grid.iter().cloned().fold(0.0, f64::max);
    // leave room for rounding of the outermost ring
    let cap = 1.0 - 0.5 * (1.0 - r_top);
    let atlas = BasisAtlas::new(fam.clone())?;
    let mut trends = Vec::new();
    for ic in [InitialConditions::real(1.0, 0.0), InitialConditions::real(0.0, 1.0)] {
        let s = SolutionHandle::with_atlas(atlas.clone(), ic).with_radius_cap(cap.max(0.5))?;
        trends.push(growth_trend(|z| s.eval(z), p, r_grid, 64)?);
    }
    let grid = PolarGrid::default();
    let mut excess = 0.0f64;
    for (g, t) in grid.nodes() {
        if 1.0 - g > r_top {
            continue;
        }
        excess = excess.max(nehari_functional_polar(fam, g, t)? - k);
    }
    let exponent = growth_exponent(k);
    let all_bounded = trends.iter().all(|t| t.trend == Trend::Bounded);
    let any_diverging = trends.iter().any(|t| t.trend == Trend::Diverging);
    let (verdict, margin) = if p > exponent {
        if all_bounded {
            (Verdict::Holds, Some(0.0))
        } else if any_diverging {
            (Verdict::Violated, Some(-1.0))
        } else {
            (Verdict::NotApplicable, None)
        }
    } else {
        (Verdict::NotApplicable, None)
    };
    Ok(BoundReport::new("growth", verdict, margin)
        .param("family", json!(fam.to_string()))
        .param("K", json!(k))
        .param("p", json!(p))
        .param("exponent", json!(exponent))
        .param("sup_excess_over_K", json!(excess.max(0.0)))
        .param("trends", serde_json::to_value(&trends).expect("serializable")))
}

/// `(1 − r²)^p ∫_δ^r (r − s)(1 − s²)^{−p−2} ds`, the iterated integral
/// `∫_δ^r ∫_δ^t` written as a single one. Integrated in `log(1 − s)`.
pub fn integral_limit(p: f64, delta: f64, r: f64) -> Result<f64> {
    if !(p > 0.0 && delta >= 0.0 && delta <= r && r < 1.0) {
        return Err(Error::ParameterConstraint(format!("need p > 0 and 0 ≤ δ ≤ r < 1, got p = {p}, δ = {delta}, r = {r}")));
    }
    if delta == r {
        return Ok(0.0);
    }
    let gr = 1.0 - r;
    let wr = gr * (2.0 - gr);
    // s = 1 − σ, σ = e^v: (σ − g_r)·(σ(2 − σ))^{−p−2}·σ dv, scaled by (1 − r²)^p
    let integrand = |v: f64| {
        let sigma = v.exp();
        let ws = sigma * (2.0 - sigma);
        (sigma - gr) * sigma * (wr / ws).powf(p) / (ws * ws)
    };
    integrate_adaptive(integrand, gr.ln(), (1.0 - delta).ln(), 1e-11)
}

/// `integral_limit(p, 0, r)` against its limit `1/(4p(p+1))`; the margin
/// is the slack below a 1% relative deviation.
pub fn integral_limit_report(p: f64, r: f64) -> Result<BoundReport> {
    let v = integral_limit(p, 0.0, r)?;
    let target = 1.0 / (4.0 * p * (p + 1.0));
    let margin = 0.01 - (v - target).abs() / target;
    Ok(BoundReport::new("integral-limit", verdict_from_margin(margin), Some(margin))
        .param("p", json!(p))
        .param("r", json!(r))
        .param("value", json!(v))
        .param("limit", json!(target)))
}

/// A geodesic point where `N_A > 1`, or the best point found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicWitness {
    pub found: bool,
    pub point: DiscPoint,
    pub value: f64,
}

/// Samples the full geodesic through `z1` and `z2`, first between them and
/// then beyond both ends, for a point with `N_A(w) > 1`.
pub fn geodesic_witness(fam: &CoefficientFamily, z1: Complex64, z2: Complex64, samples: usize) -> Result<GeodesicWitness> {
    if (z1 - z2).norm() == 0.0 {
        return Err(Error::Degenerate("coincident points"));
    }
    let samples = samples.max(2);
    let mut best = (f64::NEG_INFINITY, z1);
    for (lo, hi) in [(0.0, 1.0), (-8.0, 9.0)] {
        for k in 0..=samples {
            let t = lo + (hi - lo) * k as f64 / samples as f64;
            let w = geodesic_point_extended(z1, z2, t)?;
            if check_interior(w).is_err() {
                continue;
            }
            let n = nehari_functional(fam, w)?;
            if n > best.0 {
                best = (n, w);
            }
        }
        if best.0 > 1.0 {
            break;
        }
    }
    Ok(GeodesicWitness { found: best.0 > 1.0, point: DiscPoint { re: best.1.re, im: best.1.im, boundary: false }, value: best.0 })
}

/// Geodesic witnesses for every pair of zeros.
pub fn check_geodesic_witness(fam: &CoefficientFamily, zs: &ZeroSequence, samples: usize) -> Result<BoundReport> {
    let (pts, _) = interior_zeros(zs);
    if pts.len() < 2 {
        return Ok(BoundReport::new("geodesic-witness", Verdict::NotApplicable, None)
            .param("reason", json!("fewer than two zeros")));
    }
    let mut margin = f64::INFINITY;
    let mut worst = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let w = geodesic_witness(fam, pts[i], pts[j], samples)?;
            if w.value - 1.0 < margin {
                margin = w.value - 1.0;
                worst = Some(Witness::new(vec![pts[i], pts[j], w.point.z()], w.value, "max N_A on the geodesic"));
            }
        }
    }
    // Strict inequality is required: a pair with max N_A = 1 is an anomaly.
    let verdict = if margin > 0.0 { Verdict::Holds } else { Verdict::Violated };
    let mut r = BoundReport::new("geodesic-witness", verdict, Some(margin)).param("samples", json!(samples));
    if let Some(w) = worst {
        r = r.witness(w);
    }
    Ok(r)
}

/// One radius of the accumulation scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationEntry {
    pub delta: f64,
    /// Parameter of the first solution with two zeros in `D(ζ, δ)`.
    pub parameter: Option<f64>,
    pub pair: Option<[Complex64; 2]>,
    /// Largest `N_A` on the geodesic through the pair.
    pub geodesic_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationReport {
    pub boundary_angle: f64,
    pub entries: Vec<AccumulationEntry>,
    /// `(w_n, N_A(w_n))` along the radius to `ζ`.
    pub radial: Vec<(Complex64, f64)>,
    /// Parameters tried per radius before giving up.
    pub budget: usize,
}

impl AccumulationReport {
    pub fn all_found(&self) -> bool {
        self.entries.iter().all(|e| e.parameter.is_some())
    }

    pub fn to_bound_report(&self) -> BoundReport {
        let found: Vec<f64> = self.entries.iter().filter_map(|e| e.geodesic_max).collect();
        let mut r = if !self.all_found() {
            BoundReport::new("accumulation", Verdict::NotApplicable, None)
                .param("reason", json!("no solution with two zeros near the boundary point for some δ"))
        } else {
            let m = found.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
            BoundReport::new("accumulation", verdict_from_margin(m), Some(m))
        };
        r = r
            .param("boundary_angle", json!(self.boundary_angle))
            .param("entries", serde_json::to_value(&self.entries).expect("serializable"))
            .param("budget", json!(self.budget));
        if let Some(&(w, n)) = self.radial.last() {
            r = r.witness(Witness::new(vec![w], n, "N_A at the radial point closest to ζ"));
        }
        r
    }
}

/// For each `δ`, the first parameter in `params` whose solution has two
/// zeros in `D(ζ, δ) ∩ 𝔻`, `ζ = e^{i·angle}`; also `N_A` along the radius.
pub fn accumulation_scan<S, G>(
    fam: &CoefficientFamily,
    angle: f64,
    solutions: G,
    params: &[f64],
    deltas: &[f64],
) -> Result<AccumulationReport>
where
    S: SolutionFn,
    G: Fn(f64) -> Result<S>,
{
    let zeta = Complex64::from_polar(1.0, angle);
    let mut entries = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if !(delta > 0.0 && delta < 2.0) {
            return Err(Error::ParameterConstraint(format!("δ = {delta} outside (0, 2)")));
        }
        let r_max = (1.0 - 1e-2 * delta).min(0.99999);
        let mut entry = AccumulationEntry { delta, parameter: None, pair: None, geodesic_max: None };
        for &k in params {
            let s = solutions(k)?;
            let zs = match locate_zeros(&s, r_max, 1e-12) {
                Ok(zs) => zs,
                Err(Error::ZeroOnContour(_)) | Err(Error::QuadratureFailure(_)) => continue,
                Err(e) => return Err(e),
            };
            let near: Vec<Complex64> = zs.points().into_iter().filter(|z| (z - zeta).norm() < delta).collect();
            if near.len() >= 2 {
                let w = geodesic_witness(fam, near[0], near[1], 400)?;
                entry.parameter = Some(k);
                entry.pair = Some([near[0], near[1]]);
                entry.geodesic_max = Some(w.value);
                break;
            }
        }
        entries.push(entry);
    }
    let radial = (1..=30)
        .map(|n| {
            let g = 0.5f64.powi(n);
            (Complex64::from_polar(1.0 - g, angle), nehari_functional_polar(fam, g, angle))
        })
        .map(|(w, v)| v.map(|v| (w, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AccumulationReport { boundary_angle: angle, entries, radial, budget: params.len() })
}

/// The reference-basis family `k ↦ f₁ + k f₂` as numeric solutions sharing
/// one atlas.
pub fn reference_pencil(fam: &CoefficientFamily) -> Result<impl Fn(f64) -> Result<SolutionHandle>> {
    let (f1, f2) = crate::ode::reference_basis(fam)
        .ok_or_else(|| Error::Applicability(format!("{fam} has no explicit solution basis")))?;
    let a = crate::ode::closed_form_solution(f1).initial_conditions()?;
    let b = crate::ode::closed_form_solution(f2).initial_conditions()?;
    let atlas: Arc<BasisAtlas> = BasisAtlas::new(fam.clone())?;
    Ok(move |k: f64| {
        let ic = InitialConditions::combine(c(1.0), &a, c(k), &b);
        Ok(SolutionHandle::with_atlas(atlas.clone(), ic))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{closed_form_solution, ClosedForm};
    use crate::zeros::oracle_zeros;

    fn small_grid() -> PolarGrid {
        PolarGrid::new(64, 40).unwrap()
    }

    #[test]
    fn nehari_examples() {
        let r = check_nehari(&CoefficientFamily::constant(0.0), &small_grid()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.params["sup"], json!(0.0));
        let r = check_nehari(&CoefficientFamily::Hille { a: -8.0 }, &small_grid()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.params["sup"].as_f64().unwrap() >= 8.0);
        let r = check_nehari(&CoefficientFamily::SchwarzSin { gamma: 1.0 }, &small_grid()).unwrap();
        assert!((r.params["sup"].as_f64().unwrap() - 5.0).abs() < 1e-6);
    }

    #[test]
    fn kraus_examples() {
        let r = check_kraus(&CoefficientFamily::NehariSharp, &small_grid(), 1).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margin.unwrap() < 1e-9);
        let r = check_kraus(&CoefficientFamily::Hille { a: -15.0 }, &small_grid(), 2).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert!((r.params["sup"].as_f64().unwrap() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn cs_constant_examples() {
        assert_eq!(estimate_cs_constant(&CoefficientFamily::constant(0.0), &small_grid()).unwrap(), 0.0);
        let c2 = estimate_cs_constant(&CoefficientFamily::Legendre { n: 2 }, &small_grid()).unwrap();
        assert!((c2 - 12.0).abs() < 1e-6, "{c2}");
        assert!(estimate_cs_constant(&CoefficientFamily::SchwarzSin { gamma: 1.0 }, &small_grid()).unwrap().is_infinite());
    }

    #[test]
    fn separation_bound_examples() {
        assert!((separation_lower_bound(1.0, 0.75).unwrap().strong - 3f64.ln()).abs() < 1e-15);
        assert!((separation_lower_bound_gap(4.0, 1e-4).unwrap().strong - 99f64.ln()).abs() < 1e-12);
        assert!(separation_lower_bound(1.0, 1.0 - 1e-300).unwrap().strong > 300.0);
        assert!(matches!(separation_lower_bound(1.0, 0.0), Err(Error::Applicability(_))));
    }

    #[test]
    fn separation_and_horodisc_for_legendre() {
        let zs = oracle_zeros(&closed_form_solution(ClosedForm::LegendreP { n: 3 }), 0.999).unwrap();
        assert_eq!(check_separation(&zs, 24.0).unwrap().verdict, Verdict::Holds);
        assert_eq!(check_horodisc(&zs, 24.0).unwrap().verdict, Verdict::Holds);
        let single = ZeroSequence::new(vec![zs.zeros[0]], 0.9, "one");
        assert_eq!(check_separation(&single, 24.0).unwrap().verdict, Verdict::Holds);
        let s = oracle_zeros(&closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }), 0.99).unwrap();
        assert_eq!(check_separation(&s, 0.0).unwrap().verdict, Verdict::NotApplicable);
        // C = 0: the admissible disc is the unit disc itself
        assert_eq!(check_horodisc(&s, 0.0).unwrap().verdict, Verdict::Violated);
    }

    #[test]
    fn horodisc_pair_geometry() {
        // far apart: infeasible for any center
        let d = horodisc_pair_distance(c(0.9), c(-0.9), 0.5);
        assert!(d >= 2.0 / 3.0);
        // exact candidate search agrees with brute force
        let (z1, z2) = (Complex64::new(0.8, 0.3), Complex64::new(0.7, -0.5));
        let exact = horodisc_pair_distance(z1, z2, 0.4);
        let brute = horodisc_fine_search(z1, z2, 0.4);
        assert!(exact <= brute + 1e-12 && brute - exact < 1e-5, "{exact} {brute}");
    }

    #[test]
    fn proof_constant_examples() {
        assert!((r_a(1.0, 0.99).unwrap() - 0.9).abs() < 1e-15);
        assert!((big_r_a(0.125, 0.999).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(mu(2.0, 0.0), 3.0);
        let t = t_c(1.0).unwrap();
        assert!((t - (8.0 - 52f64.sqrt()) / 6.0).abs() < 1e-15);
        assert!(mu(1.0, t) < mu(1.0, 0.01) && mu(1.0, t) < mu(1.0, 0.3));
        assert!(psi_horo(1.0, 0.4).is_err());
    }

    #[test]
    fn theta_examples() {
        for r in [0.2, 0.5, 0.9] {
            assert!((theta_of_r(1.0, r).unwrap() - r.acos()).abs() < 1e-14);
        }
        let ratio = theta_of_r(1.0, 0.9999).unwrap() / (2f64.sqrt() * 0.01);
        assert!((0.99..=1.01).contains(&ratio));
        assert!(theta_of_r(1.0, 1.0).is_err());
    }

    #[test]
    fn growth_exponents() {
        assert_eq!(growth_exponent(0.0), 0.0);
        assert_eq!(growth_exponent(3.0), 0.5);
        assert_eq!(growth_exponent(8.0), 1.0);
    }

    #[test]
    fn integral_limit_examples() {
        let v = integral_limit(1.0, 0.0, 0.9999).unwrap();
        assert!((v - 0.125).abs() < 0.01 * 0.125, "{v}");
        assert_eq!(integral_limit(1.0, 0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_witness_examples() {
        let fam = CoefficientFamily::Hille { a: -8.0 };
        let z = Complex64::new(0.0, 1.0 / 3f64.sqrt());
        let w = geodesic_witness(&fam, z, z.conj(), 100).unwrap();
        assert!(w.found && w.value >= 8.0 - 1e-9);
        let s = geodesic_witness(&CoefficientFamily::SchwarzSin { gamma: 1.0 }, c(0.0), c((PI / 2.0).tanh()), 10).unwrap();
        assert!(s.found && (s.value - 5.0).abs() < 1e-9);
        let none = geodesic_witness(&CoefficientFamily::constant(0.0), c(0.1), c(0.2), 10).unwrap();
        assert!(!none.found);
    }
}
