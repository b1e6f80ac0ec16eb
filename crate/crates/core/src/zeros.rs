//! Counting, locating and certifying zeros of solutions, and closed-form
//! zero oracles for the explicit solutions.
//!
//! Counting uses the argument principle: `(1/2πi)∮ f'/f dz` by composite
//! Gauss–Legendre quadrature, doubling the node count until two successive
//! estimates settle on the same integer. Location subdivides the search disc
//! into annular sectors until every cell holds one zero, takes the first
//! moment `(1/2πi)∮ z f'/f dz` of the cell as a starting point, and polishes
//! it by Newton's method.
//!
//! Radial edges are parametrized by `log(1 − |z|)` and arcs get panels in
//! proportion to their length measured against the distance to the circle,
//! because solutions vary on the scale `1 − |z|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::hypgeom::{check_interior, rho_h_polar, DiscPoint};
use crate::ode::{ClosedForm, ClosedFormSolution, SolutionFn};
use crate::quadrature::{legendre_p, legendre_roots, GaussLegendre};

const PANEL_NODES: usize = 16;
const MAX_LEVEL: u32 = 12;
const JITTER_ATTEMPTS: usize = 8;
const RADIUS_JITTER: f64 = 1e-4;
const MAX_DEPTH: usize = 60;
/// A node with `|f/f'|` below this fraction of its local length scale is
/// treated as a zero on the contour.
const ON_CONTOUR: f64 = 1e-7;
const SPLIT_FRACTIONS: [f64; 8] = [0.5, 0.46, 0.54, 0.42, 0.58, 0.37, 0.63, 0.33];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// How a zero was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroMethod {
    /// Argument-principle cell followed by Newton refinement.
    ArgumentPrinciple,
    /// Closed-form formula.
    Oracle,
}

impl ZeroMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ArgumentPrinciple => "argument-principle",
            Self::Oracle => "oracle",
        }
    }
}

/// A located zero. `gap = 1 − |z|` is carried separately so that zeros too
/// close to the circle for `f64` coordinates keep their exact position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: DiscPoint,
    pub gap: f64,
    /// `|f|` at the refined point (NaN for oracle zeros that cannot be evaluated).
    pub residual: f64,
    pub derivative_modulus: f64,
    pub method: ZeroMethod,
}

impl ZeroRecord {
    pub fn z(&self) -> Complex64 {
        self.location.z()
    }

    pub fn angle(&self) -> f64 {
        self.location.im.atan2(self.location.re)
    }
}

/// A region of the disc used by the subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Cell {
    Disc { center: Complex64, radius: f64 },
    /// `{r e^{iθ} : r0 < r < r1, t0 < θ < t1}` around the origin.
    Sector { r0: f64, r1: f64, t0: f64, t1: f64 },
}

/// A cell whose zeros could not be isolated or refined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedCell {
    pub cell: Cell,
    pub count: usize,
    pub reason: String,
}

/// Zeros ordered by increasing modulus, then argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSequence {
    pub zeros: Vec<ZeroRecord>,
    /// Requested search radius.
    pub r_max: f64,
    /// Radius of the contour actually used (differs after jitter).
    pub search_radius: f64,
    pub solution: String,
    pub unresolved: Vec<UnresolvedCell>,
}

impl ZeroSequence {
    pub fn new(mut zeros: Vec<ZeroRecord>, r_max: f64, solution: impl Into<String>) -> Self {
        sort_zeros(&mut zeros);
        Self { zeros, r_max, search_radius: r_max, solution: solution.into(), unresolved: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.zeros.iter().map(ZeroRecord::z).collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.solution = label.into();
        self
    }
}

fn sort_zeros(zs: &mut [ZeroRecord]) {
    zs.sort_by(|a, b| b.gap.total_cmp(&a.gap).then(a.angle().total_cmp(&b.angle())));
}

#[derive(Debug, Clone, Copy)]
enum Edge {
    Arc { center: Complex64, radius: f64, from: f64, to: f64 },
    /// Along the ray at `angle`, parametrized by `u = log(1 − r)`.
    Radial { angle: f64, from_gap: f64, to_gap: f64 },
}

impl Edge {
    fn base_panels(&self) -> usize {
        let n = match *self {
            Edge::Arc { center, radius, from, to } => {
                let span = (to - from).abs();
                let clearance = (1.0 - center.norm() - radius).max(1e-300);
                let by_angle = 4.0 * span / FRAC_PI_2;
                let by_scale = span * radius / (4.0 * clearance.min(radius));
                by_angle.max(by_scale).ceil()
            }
            Edge::Radial { from_gap, to_gap, .. } => (2.0 * (from_gap.ln() - to_gap.ln()).abs()).ceil().max(2.0),
        };
        n.clamp(1.0, (1 << 18) as f64) as usize
    }

    /// `(z, dz-weight, local length scale)` for each quadrature node.
    fn nodes(&self, panels: usize, rule: &GaussLegendre) -> Vec<(Complex64, Complex64, f64)> {
        let mut out = Vec::with_capacity(panels * rule.nodes.len());
        let (lo, hi) = match *self {
            Edge::Arc { from, to, .. } => (from, to),
            Edge::Radial { from_gap, to_gap, .. } => (from_gap.ln(), to_gap.ln()),
        };
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + width * p as f64;
            for (t, w) in rule.mapped(a, a + width) {
                out.push(match *self {
                    Edge::Arc { center, radius, .. } => {
                        let e = Complex64::from_polar(1.0, t);
                        let z = center + e * radius;
                        let scale = (1.0 - z.norm()).min(radius);
                        (z, Complex64::new(0.0, radius) * e * w, scale)
                    }
                    Edge::Radial { angle, .. } => {
                        let g = t.exp();
                        let e = Complex64::from_polar(1.0, angle);
                        (e * (1.0 - g), -e * g * w, g)
                    }
                });
            }
        }
        out
    }
}

fn cell_edges(cell: &Cell) -> Vec<Edge> {
    match *cell {
        Cell::Disc { center, radius } => vec![Edge::Arc { center, radius, from: 0.0, to: 2.0 * PI }],
        Cell::Sector { r0, r1, t0, t1 } => vec![
            Edge::Arc { center: c(0.0), radius: r1, from: t0, to: t1 },
            Edge::Radial { angle: t1, from_gap: 1.0 - r1, to_gap: 1.0 - r0 },
            Edge::Arc { center: c(0.0), radius: r0, from: t1, to: t0 },
            Edge::Radial { angle: t0, from_gap: 1.0 - r0, to_gap: 1.0 - r1 },
        ],
    }
}

/// Winding number and first moment of a cell.
#[derive(Debug, Clone, Copy)]
struct Winding {
    count: usize,
    moment: Complex64,
}

fn integrate_level<F: SolutionFn>(f: &F, edges: &[Edge], level: u32) -> Result<(Complex64, Complex64, f64)> {
    let rule = GaussLegendre::cached(PANEL_NODES);
    let nodes: Vec<_> = edges.iter().flat_map(|e| e.nodes(e.base_panels() << level, &rule)).collect();
    let values: Vec<Result<(Complex64, Complex64)>> = nodes.par_iter().map(|(z, _, _)| f.eval_pair(*z)).collect();
    let mut sum = c(0.0);
    let mut moment = c(0.0);
    let mut nearest = f64::INFINITY;
    for ((z, dz, scale), v) in nodes.iter().zip(values) {
        let (fv, fp) = v?;
        if fv.norm() == 0.0 {
            return Ok((sum, moment, 0.0));
        }
        let q = fp / fv;
        nearest = nearest.min(1.0 / (q.norm() * scale));
        sum += q * dz;
        moment += q * z * dz;
    }
    Ok((sum, moment, nearest))
}

fn winding<F: SolutionFn>(f: &F, cell: &Cell) -> Result<Winding> {
    let edges = cell_edges(cell);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut prev: Option<f64> = None;
    let mut last = f64::NAN;
    for level in 0..=MAX_LEVEL {
        let (sum, moment, nearest) = integrate_level(f, &edges, level)?;
        if nearest < ON_CONTOUR {
            return Err(Error::ZeroOnContour(0));
        }
        let n = sum / two_pi_i;
        last = n.re;
        if !n.re.is_finite() || !n.im.is_finite() {
            return Err(Error::QuadratureFailure(last));
        }
        let k = n.re.round();
        if let Some(p) = prev {
            if (p - k).abs() < 0.25 && (n.re - k).abs() < 1e-2 && n.im.abs() < 1e-2 && k >= 0.0 {
                return Ok(Winding { count: k as usize, moment: moment / two_pi_i });
            }
        }
        prev = Some(n.re);
    }
    Err(Error::QuadratureFailure(last))
}

/// Winding count of a cell, with the on-contour failure mapped to an error
/// carrying no attempt count.
pub fn count_zeros_in<F: SolutionFn>(f: &F, cell: &Cell) -> Result<usize> {
    Ok(winding(f, cell)?.count)
}

fn jitter_factor(attempt: usize) -> f64 {
    // 1 − δ, 1 + δ, 1 − 2δ, 1 + 2δ, …
    let m = (attempt + 1).div_ceil(2) as f64;
    if attempt % 2 == 1 {
        1.0 - m * RADIUS_JITTER
    } else {
        1.0 + m * RADIUS_JITTER
    }
}

/// Winding over a disc, jittering the radius when a zero sits on the contour.
fn disc_winding<F: SolutionFn>(f: &F, center: Complex64, radius: f64) -> Result<(Winding, f64)> {
    let mut r = radius;
    for attempt in 0..=JITTER_ATTEMPTS {
        if attempt > 0 {
            r = radius * jitter_factor(attempt);
        }
        if center.norm() + r >= 1.0 {
            continue;
        }
        match winding(f, &Cell::Disc { center, radius: r }) {
            Ok(w) => return Ok((w, r)),
            Err(Error::ZeroOnContour(_)) | Err(Error::QuadratureFailure(_)) if attempt < JITTER_ATTEMPTS => {}
            Err(Error::ZeroOnContour(_)) => return Err(Error::ZeroOnContour(JITTER_ATTEMPTS)),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroOnContour(JITTER_ATTEMPTS))
}

/// Number of zeros of `f` in `D(center, radius)`.
pub fn count_zeros<F: SolutionFn>(f: &F, center: Complex64, radius: f64) -> Result<usize> {
    if !(radius > 0.0) || center.norm() + radius >= 1.0 {
        return Err(Error::ParameterConstraint(format!(
            "disc D({center}, {radius}) must lie inside the unit disc"
        )));
    }
    Ok(disc_winding(f, center, radius)?.0.count)
}

fn cell_contains(cell: &Cell, z: Complex64, slack: f64) -> bool {
    match *cell {
        Cell::Disc { center, radius } => (z - center).norm() <= radius * (1.0 + slack),
        Cell::Sector { r0, r1, t0, t1 } => {
            let r = z.norm();
            let width = t1 - t0;
            let t = t0 + (z.arg() - t0).rem_euclid(2.0 * PI);
            let radial_slack = slack * (r1 - r0);
            r >= r0 - radial_slack
                && r <= r1 + radial_slack
                && (t <= t1 + slack * width || t - 2.0 * PI >= t0 - slack * width)
        }
    }
}

/// Candidate partitions of a cell; each is tried until child counts add up.
fn split(cell: &Cell, attempt: usize) -> Vec<Cell> {
    let frac = SPLIT_FRACTIONS[attempt % SPLIT_FRACTIONS.len()];
    match *cell {
        Cell::Disc { center, radius } => {
            // inner disc plus three annular sectors; only origin discs are split
            debug_assert!(center.norm() == 0.0);
            let inner = radius * frac;
            let offset = 0.1 + 0.37 * attempt as f64;
            let mut cells = vec![Cell::Disc { center, radius: inner }];
            for k in 0..3 {
                let t0 = offset + 2.0 * PI * k as f64 / 3.0;
                cells.push(Cell::Sector { r0: inner, r1: radius, t0, t1: t0 + 2.0 * PI / 3.0 });
            }
            cells
        }
        Cell::Sector { r0, r1, t0, t1 } => {
            let (g0, g1) = (1.0 - r0, 1.0 - r1);
            let radial = (g0 / g1).ln();
            let g_mid = (g0 * g1).sqrt();
            let angular = (t1 - t0) * (1.0 - g_mid) / g_mid;
            if radial >= angular {
                let rm = 1.0 - g0 * (g1 / g0).powf(frac);
                vec![Cell::Sector { r0, r1: rm, t0, t1 }, Cell::Sector { r0: rm, r1, t0, t1 }]
            } else {
                let tm = t0 + frac * (t1 - t0);
                vec![Cell::Sector { r0, r1, t0, t1: tm }, Cell::Sector { r0, r1, t0: tm, t1 }]
            }
        }
    }
}

fn newton<F: SolutionFn>(f: &F, start: Complex64, tol: f64) -> Result<(Complex64, Complex64, Complex64)> {
    let mut z = start;
    for _ in 0..80 {
        check_interior(z).map_err(|_| Error::NewtonFailure(start))?;
        let (fv, fp) = f.eval_pair(z)?;
        if fp.norm() == 0.0 {
            return Err(Error::NewtonFailure(z));
        }
        let step = fv / fp;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NewtonFailure(start));
        }
        let gap = 1.0 - z.norm();
        if step.norm() <= tol * gap.max(0.0) || step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            check_interior(z).map_err(|_| Error::NewtonFailure(start))?;
            let (fv, fp) = f.eval_pair(z)?;
            return Ok((z, fv, fp));
        }
    }
    Err(Error::NewtonFailure(start))
}

type Found = (Vec<ZeroRecord>, Vec<UnresolvedCell>);

fn resolve<F: SolutionFn>(f: &F, cell: Cell, w: Winding, tol: f64, depth: usize) -> Found {
    if w.count == 0 {
        return (Vec::new(), Vec::new());
    }
    let unresolved = |reason: String| (Vec::new(), vec![UnresolvedCell { cell, count: w.count, reason }]);
    if w.count == 1 {
        match newton(f, w.moment, tol) {
            Ok((z, fv, fp)) if cell_contains(&cell, z, 1e-6) => {
                let rec = ZeroRecord {
                    location: DiscPoint { re: z.re, im: z.im, boundary: false },
                    gap: 1.0 - z.norm(),
                    residual: fv.norm(),
                    derivative_modulus: fp.norm(),
                    method: ZeroMethod::ArgumentPrinciple,
                };
                return (vec![rec], Vec::new());
            }
            Ok((z, _, _)) if depth >= MAX_DEPTH => {
                return unresolved(format!("Newton left the cell, converging to {z}"));
            }
            Err(e) if depth >= MAX_DEPTH => return unresolved(e.to_string()),
            // fall through to subdivision for a better starting point
            _ => {}
        }
    }
    if depth >= MAX_DEPTH {
        return unresolved(format!("subdivision depth {MAX_DEPTH} reached"));
    }
    let mut last_err = String::new();
    for attempt in 0..SPLIT_FRACTIONS.len() {
        let children = split(&cell, attempt);
        let counted: Vec<Result<Winding>> = children.par_iter().map(|ch| winding(f, ch)).collect();
        let mut ok = Vec::with_capacity(children.len());
        let mut total = 0usize;
        let mut failed = false;
        for (ch, r) in children.iter().zip(counted) {
            match r {
                Ok(cw) => {
                    total += cw.count;
                    ok.push((*ch, cw));
                }
                Err(e) => {
                    last_err = e.to_string();
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        if total != w.count {
            last_err = format!("child counts sum to {total}, parent has {}", w.count);
            continue;
        }
        let parts: Vec<Found> = ok.into_par_iter().map(|(ch, cw)| resolve(f, ch, cw, tol, depth + 1)).collect();
        let mut zeros = Vec::new();
        let mut bad = Vec::new();
        for (z, u) in parts {
            zeros.extend(z);
            bad.extend(u);
        }
        return (zeros, bad);
    }
    unresolved(format!("no consistent subdivision: {last_err}"))
}

/// Zeros of `f` in `|z| ≤ r_max`, refined by Newton until the step is below
/// `tol·(1 − |z|)`. Every zero counted by the argument principle is either
/// returned or reported in `unresolved`.
pub fn locate_zeros<F: SolutionFn>(f: &F, r_max: f64, tol: f64) -> Result<ZeroSequence> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::ParameterConstraint(format!("search radius {r_max} outside (0, 1)")));
    }
    if !(tol > 0.0) {
        return Err(Error::ParameterConstraint(format!("tolerance {tol} must be positive")));
    }
    let (w, radius) = disc_winding(f, c(0.0), r_max)?;
    let cell = Cell::Disc { center: c(0.0), radius };
    let (zeros, unresolved) = resolve(f, cell, w, tol, 0);
    let mut seq = ZeroSequence::new(zeros, r_max, "");
    seq.search_radius = radius;
    seq.unresolved = unresolved;
    Ok(seq)
}

/// `1 − |z|` computed from `1 − z = e` without cancellation.
fn gap_from_one_minus(e: Complex64) -> f64 {
    let z = c(1.0) - e;
    let one_minus_sq = 2.0 * e.re - e.norm_sqr();
    one_minus_sq / (1.0 + z.norm())
}

/// `1 − |tanh(w)|` without cancellation for large real parts.
fn tanh_gap(w: Complex64) -> (Complex64, f64) {
    let z = w.tanh();
    if w.im == 0.0 {
        let e = (-2.0 * w.re.abs()).exp();
        return (z, 2.0 * e / (1.0 + e));
    }
    let one_minus_sq = 1.0 - z.norm_sqr();
    (z, one_minus_sq / (1.0 + z.norm()))
}

fn oracle_record(sol: &ClosedFormSolution, z: Complex64, gap: f64) -> ZeroRecord {
    let boundary = !(gap > crate::hypgeom::BOUNDARY_EPS);
    let (residual, derivative_modulus) = match sol.eval_pair(z) {
        Ok((f, fp)) if !boundary => (f.norm(), fp.norm()),
        _ => (f64::NAN, f64::NAN),
    };
    ZeroRecord { location: DiscPoint { re: z.re, im: z.im, boundary }, gap, residual, derivative_modulus, method: ZeroMethod::Oracle }
}

/// Solutions `t` of `α sin t + β cos t = 0`, as `t₀ + kπ`.
fn trig_root_base(alpha: Complex64, beta: Complex64) -> Option<Complex64> {
    if alpha.norm() == 0.0 {
        return Some(c(FRAC_PI_2));
    }
    let r = -beta / alpha;
    // tan t = ±i has no solution
    if (r - Complex64::i()).norm() < 1e-15 || (r + Complex64::i()).norm() < 1e-15 {
        return None;
    }
    Some(r.atan())
}

/// Weights `(α, β)` of `sol` on its family's reference basis.
fn reference_weights(sol: &ClosedFormSolution) -> Result<(Complex64, Complex64)> {
    let (f1, f2) = crate::ode::reference_basis(sol.family())
        .ok_or_else(|| Error::Applicability(format!("{} has no explicit basis", sol.family())))?;
    let mut alpha = c(0.0);
    let mut beta = c(0.0);
    for (w, cf) in sol.parts() {
        if *cf == f1 {
            alpha += w;
        } else if *cf == f2 {
            beta += w;
        } else {
            return Err(Error::Applicability(format!("{cf:?} is not in the reference basis")));
        }
    }
    Ok((alpha, beta))
}

/// Closed-form zeros of an explicit solution with `|z| < r_max`. `r_max = 1`
/// keeps every zero whose gap `1 − |z|` is representable.
pub fn oracle_zeros(sol: &ClosedFormSolution, r_max: f64) -> Result<ZeroSequence> {
    if !(r_max > 0.0 && r_max <= 1.0) {
        return Err(Error::ParameterConstraint(format!("search radius {r_max} outside (0, 1]")));
    }
    let min_gap = 1.0 - r_max;
    let mut found: Vec<(Complex64, f64)> = Vec::new();
    let mut keep = |z: Complex64, gap: f64| {
        if gap > min_gap && gap > 0.0 {
            found.push((z, gap));
        }
    };
    let growth = sol.parts().iter().any(|(_, cf)| matches!(cf, ClosedForm::Growth { .. }));
    if growth {
        // (1−z)^{−β} log(e/(1−z)) never vanishes: Re log(e/(1−z)) > 1 − log 2.
        return Ok(ZeroSequence::new(Vec::new(), r_max, "oracle"));
    }
    let (alpha, beta) = reference_weights(sol)?;
    if alpha.norm() == 0.0 && beta.norm() == 0.0 {
        return Err(Error::Degenerate("trivial solution"));
    }
    match sol.family().clone() {
        crate::analytic::CoefficientFamily::NehariSharp => {
            if alpha.norm() > 0.0 && beta.norm() > 0.0 {
                // (1−z)² = −α/β, the root with Re(1−z) > 0
                let mut e = (-alpha / beta).sqrt();
                if e.re < 0.0 {
                    e = -e;
                }
                keep(c(1.0) - e, gap_from_one_minus(e));
            }
        }
        crate::analytic::CoefficientFamily::Hille { a } => {
            if alpha.norm() > 0.0 && beta.norm() > 0.0 {
                // ((1−z)/(1+z))^s = −β/α with |arg((1−z)/(1+z))| < π/2
                let s = (1.0 - a).sqrt();
                let q = -beta / alpha;
                let (rho, phi) = q.to_polar();
                let m_lo = ((-s * FRAC_PI_2 - phi) / (2.0 * PI)).ceil() as i64;
                let m_hi = ((s * FRAC_PI_2 - phi) / (2.0 * PI)).floor() as i64;
                for m in m_lo..=m_hi {
                    let theta = (phi + 2.0 * PI * m as f64) / s;
                    if theta.abs() >= FRAC_PI_2 {
                        continue;
                    }
                    let w = Complex64::from_polar(rho.powf(1.0 / s), theta);
                    let z = (c(1.0) - w) / (c(1.0) + w);
                    let one_minus_sq = 4.0 * w.re / (c(1.0) + w).norm_sqr();
                    keep(z, one_minus_sq / (1.0 + z.norm()));
                }
            }
        }
        crate::analytic::CoefficientFamily::Legendre { n } => {
            if beta.norm() == 0.0 {
                for x in legendre_roots(n as usize) {
                    debug_assert!(legendre_p(n as usize, x).0.abs() < 1e-13);
                    keep(c(x), 1.0 - x.abs());
                }
            } else if n == 0 {
                // α + β log((1+z)/(1−z)) = 0
                let l = -alpha / beta;
                if l.im.abs() < FRAC_PI_2 {
                    let (z, gap) = tanh_gap(l * 0.5);
                    keep(z, gap);
                }
            } else {
                return Err(Error::Applicability(format!(
                    "no closed-form zeros for legendre:n={n} combinations involving Q_n"
                )));
            }
        }
        crate::analytic::CoefficientFamily::SchwarzSin { gamma } => {
            if let Some(t0) = trig_root_base(alpha, beta) {
                // γ·log((1+z)/(1−z)) = t₀ + kπ; |tanh(w)| ≥ tanh|Re w| bounds k
                let limit = 2.0 * r_max.min(1.0 - 1e-300).atanh() + 1.0;
                let kmax = ((limit * gamma + t0.re.abs()) / PI).ceil() as i64 + 1;
                for k in -kmax..=kmax {
                    let l = (t0 + c(PI * k as f64)) / gamma;
                    if l.im.abs() >= FRAC_PI_2 {
                        continue;
                    }
                    let (z, gap) = tanh_gap(l * 0.5);
                    keep(z, gap);
                }
            }
        }
        crate::analytic::CoefficientFamily::LogLog => {
            if let Some(t0) = trig_root_base(alpha, beta) {
                // log L = t₀ + kπ with L = e − log(1−z), so 1 − z = exp(e − L)
                for k in -40i64..=40 {
                    let l = (t0 + c(PI * k as f64)).exp();
                    if l.im.abs() >= FRAC_PI_2 {
                        continue;
                    }
                    let e = (c(std::f64::consts::E) - l).exp();
                    let z = c(1.0) - e;
                    if z.norm() < 1.0 || e.norm() < 1.0 {
                        keep(z, gap_from_one_minus(e));
                    }
                }
            }
        }
        crate::analytic::CoefficientFamily::PowLog { q } => {
            if let Some(t0) = trig_root_base(alpha, beta) {
                // M^q = t₀ + kπ with M = 1 − log(1−z)
                for k in -40i64..=100_000 {
                    let p = t0 + c(PI * k as f64);
                    if p.norm() == 0.0 || (p.arg() / q).abs() >= FRAC_PI_2 {
                        continue;
                    }
                    let m = Complex64::from_polar(p.norm().powf(1.0 / q), p.arg() / q);
                    if (1.0 - m.re).abs() > 800.0 && m.re > 0.0 {
                        break;
                    }
                    if m.im.abs() >= FRAC_PI_2 {
                        continue;
                    }
                    let e = (c(1.0) - m).exp();
                    keep(c(1.0) - e, gap_from_one_minus(e));
                }
            }
        }
        crate::analytic::CoefficientFamily::Growth { .. } | crate::analytic::CoefficientFamily::Series { .. } => {
            unreachable!("no reference basis")
        }
    }
    let records = found.into_iter().map(|(z, g)| oracle_record(sol, z, g)).collect();
    Ok(ZeroSequence::new(records, r_max, "oracle"))
}

/// Smallest hyperbolic distance between two distinct zeros; `+∞` for a
/// single zero.
pub fn min_pairwise_rho_h(zs: &ZeroSequence) -> Result<f64> {
    if zs.is_empty() {
        return Err(Error::EmptyInput("zero sequence"));
    }
    let mut best = f64::INFINITY;
    for (i, a) in zs.zeros.iter().enumerate() {
        for b in &zs.zeros[i + 1..] {
            best = best.min(rho_h_polar(a.gap, a.angle(), b.gap, b.angle())?);
        }
    }
    Ok(best)
}

/// Smallest hyperbolic distance between a zero of `a` and a zero of `b`.
pub fn cross_min_rho_h(a: &ZeroSequence, b: &ZeroSequence) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("zero sequence"));
    }
    let mut best = f64::INFINITY;
    for x in &a.zeros {
        for y in &b.zeros {
            best = best.min(rho_h_polar(x.gap, x.angle(), y.gap, y.angle())?);
        }
    }
    Ok(best)
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    re: f64,
    im: f64,
    abs: f64,
    residual: f64,
    derivative_modulus: f64,
    method: ZeroMethod,
}

/// Writes `re, im, abs, residual, derivative_modulus, method`.
pub fn write_zeros_csv<W: Write>(zs: &ZeroSequence, out: W) -> Result<()> {
    // header written by hand so an empty sequence still yields a readable file
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["re", "im", "abs", "residual", "derivative_modulus", "method"])?;
    for z in &zs.zeros {
        w.serialize(CsvRow {
            re: z.location.re,
            im: z.location.im,
            abs: 1.0 - z.gap,
            residual: z.residual,
            derivative_modulus: z.derivative_modulus,
            method: z.method,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_zeros_csv`]; gaps are recovered as `1 − abs`.
pub fn read_zeros_csv<R: Read>(input: R) -> Result<ZeroSequence> {
    let mut r = csv::Reader::from_reader(input);
    let mut zeros = Vec::new();
    for row in r.deserialize() {
        let row: CsvRow = row?;
        let z = Complex64::new(row.re, row.im);
        let gap = 1.0 - row.abs;
        if !(gap > 0.0) && !(z.norm() <= 1.0) {
            return Err(Error::OutsideDisc(z));
        }
        zeros.push(ZeroRecord {
            location: DiscPoint { re: row.re, im: row.im, boundary: !(gap > crate::hypgeom::BOUNDARY_EPS) },
            gap,
            residual: row.residual,
            derivative_modulus: row.derivative_modulus,
            method: row.method,
        });
    }
    let r_max = zeros.iter().map(|z| 1.0 - z.gap).fold(0.0, f64::max);
    Ok(ZeroSequence::new(zeros, r_max, "csv"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::CoefficientFamily;
    use crate::ode::{closed_form_solution, FnSolution, InitialConditions, SolutionHandle};

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn counts_identity_and_schwarz() {
        let id = FnSolution(|w: Complex64| Ok((w, c(1.0))));
        assert_eq!(count_zeros(&id, c(0.0), 0.5).unwrap(), 1);
        let s = closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 });
        assert_eq!(count_zeros(&s, c(0.0), 0.95).unwrap(), 3);
        let h = ClosedFormSolution::combination(&CoefficientFamily::Hille { a: -8.0 }, c(1.0), c(1.0)).unwrap();
        assert_eq!(count_zeros(&h, c(0.0), 0.9).unwrap(), 2);
    }

    #[test]
    fn zero_on_contour_is_jittered_away() {
        // a zero exactly on the circle is counted on whichever side the jitter lands
        let f = FnSolution(|w: Complex64| Ok((w - 0.5, c(1.0))));
        assert!(count_zeros(&f, c(0.0), 0.5).unwrap() <= 1);
        let g = FnSolution(|w: Complex64| Ok(((w - z(0.0, 0.3)) * (w + 0.1), w * 2.0 + z(0.1, -0.3))));
        assert!((1..=2).contains(&count_zeros(&g, c(0.0), 0.3).unwrap()));
        assert_eq!(count_zeros(&g, c(0.0), 0.2).unwrap(), 1);
    }

    #[test]
    fn locate_examples() {
        let f = SolutionHandle::new(CoefficientFamily::constant(0.0), InitialConditions::real(0.0, 1.0)).unwrap();
        let zs = locate_zeros(&f, 0.9, 1e-12).unwrap();
        assert_eq!(zs.len(), 1);
        assert!(zs.zeros[0].z().norm() < 1e-14);

        let leg = closed_form_solution(ClosedForm::LegendreP { n: 3 }).to_handle().unwrap();
        let zs = locate_zeros(&leg, 0.99, 1e-12).unwrap();
        assert_eq!(zs.len(), 3, "{zs:?}");
        let r = 0.6f64.sqrt();
        let pts = zs.points();
        assert!(pts[0].norm() < 1e-12);
        assert!(pts.iter().skip(1).all(|p| (p.norm() - r).abs() < 1e-10 && p.im.abs() < 1e-10));

        let h = ClosedFormSolution::combination(&CoefficientFamily::Hille { a: -8.0 }, c(1.0), c(1.0)).unwrap();
        let zs = locate_zeros(&h.to_handle().unwrap(), 0.95, 1e-12).unwrap();
        assert_eq!(zs.len(), 2);
        for p in zs.points() {
            assert!((p.im.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-10 && p.re.abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_examples() {
        let ll = oracle_zeros(&closed_form_solution(ClosedForm::LogLogSin), 1.0).unwrap();
        let expect = (std::f64::consts::E - PI.exp()).exp();
        assert!((ll.zeros[0].gap - expect).abs() < 1e-12 * expect);
        assert_eq!(ll.len(), 2);

        let leg0 = ClosedFormSolution::combination(&CoefficientFamily::Legendre { n: 0 }, c(1.0), c(-0.5)).unwrap();
        let zs = oracle_zeros(&leg0, 0.99).unwrap();
        assert!((zs.zeros[0].z() - c(0.7615941559557649)).norm() < 1e-15);

        let s = oracle_zeros(&closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }), 0.995).unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], c(0.0));
        assert!((pts[1].norm() - (PI / 2.0).tanh()).abs() < 1e-15);

        let h = ClosedFormSolution::combination(&CoefficientFamily::Hille { a: -8.0 }, c(1.0), c(1.0)).unwrap();
        let pts = oracle_zeros(&h, 0.99).unwrap().points();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].im.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-15);

        let g = closed_form_solution(ClosedForm::Growth { k: 3.0 });
        assert!(oracle_zeros(&g, 0.999).unwrap().is_empty());
        let n = closed_form_solution(ClosedForm::NehariFirst);
        assert!(oracle_zeros(&n, 0.999).unwrap().is_empty());
    }

    #[test]
    fn distances_between_zeros() {
        let s = oracle_zeros(&closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }), 0.95).unwrap();
        assert!((min_pairwise_rho_h(&s).unwrap() - PI / 2.0).abs() < 1e-12);
        let single = ZeroSequence::new(vec![s.zeros[0]], 0.95, "x");
        assert_eq!(min_pairwise_rho_h(&single).unwrap(), f64::INFINITY);
        let empty = ZeroSequence::new(vec![], 0.95, "x");
        assert!(matches!(min_pairwise_rho_h(&empty), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn csv_round_trip() {
        let s = oracle_zeros(&closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }), 0.95).unwrap();
        let mut buf = Vec::new();
        write_zeros_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("re,im,abs,residual,derivative_modulus,method\n"));
        let back = read_zeros_csv(&buf[..]).unwrap();
        assert_eq!(back.points(), s.points());
    }
}
