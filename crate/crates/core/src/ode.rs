//! Solutions of `f'' + A f = 0` in the unit disc.
//!
//! Two independent evaluation routes are provided.
//!
//! The basis atlas covers the disc with expansion centers on rings
//! `|c| = 1 − 0.6^k`, angularly spaced `0.5·0.6^k` apart. Each center holds
//! the Taylor series of the canonical basis `U` (`U(0) = 1, U'(0) = 0`) and
//! `V` (`V(0) = 0, V'(0) = 1`), obtained by evaluating the series of its
//! parent center on the previous ring and rerunning the coefficient
//! recursion. A point is evaluated from the nearest center at or inside its
//! ring; the expansion variable then never exceeds about half the radius
//! of convergence. Centers are built lazily and shared by every solution of
//! the same equation, so any solution is just `f0·U + f1·V`.
//!
//! The path integrator runs Gragg–Bulirsch–Stoer extrapolation of the
//! modified midpoint rule on the first-order system `(f, f')' = (f', −A f)`
//! along straight segments, with steps tied to `|A|` and to the distance
//! from the singular boundary points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::analytic::{eval_jet, loglog_p_jet, powlog_p_jet, CoefficientFamily, Jet3};
use crate::error::{Error, Result};
use crate::hypgeom::check_interior;
use crate::series::{ode_recursion, Series};

pub const DEFAULT_TAYLOR_ORDER: usize = 120;
pub const MAX_TAYLOR_ORDER: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_RADIUS_CAP: f64 = 0.99999;
/// Paths must stay this far from the unit circle.
pub const PATH_CLEARANCE: f64 = 1e-12;

const ATLAS_ORDER: usize = 64;
const RING_RATIO: f64 = 0.6;
const ANGULAR_SPACING: f64 = 0.5;
const MAX_RING: u32 = 66;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(f(0), f'(0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub f0: Complex64,
    pub f1: Complex64,
}

impl InitialConditions {
    pub fn new(f0: Complex64, f1: Complex64) -> Self {
        Self { f0, f1 }
    }

    pub fn real(f0: f64, f1: f64) -> Self {
        Self::new(c(f0), c(f1))
    }

    pub fn is_trivial(&self) -> bool {
        self.f0.norm() == 0.0 && self.f1.norm() == 0.0
    }

    /// Initial data of `α·f + β·g`.
    pub fn combine(alpha: Complex64, a: &Self, beta: Complex64, b: &Self) -> Self {
        Self::new(alpha * a.f0 + beta * b.f0, alpha * a.f1 + beta * b.f1)
    }
}

/// A polyline starting at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    points: Vec<Complex64>,
}

impl PathSpec {
    /// Every vertex must keep `PATH_CLEARANCE` from the circle; segments then
    /// do too, since `|z|` is convex along a segment.
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        match points.first() {
            None => return Err(Error::EmptyInput("path")),
            Some(p) if p.norm() != 0.0 => {
                return Err(Error::ParameterConstraint("paths start at the origin".into()))
            }
            _ => {}
        }
        for &p in &points {
            if !(p.norm() <= 1.0 - PATH_CLEARANCE) || !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::OutsideDisc(p));
            }
        }
        Ok(Self { points })
    }

    /// The radius from 0 to `z`.
    pub fn straight(z: Complex64) -> Result<Self> {
        Self::new(vec![c(0.0), z])
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn endpoint(&self) -> Complex64 {
        *self.points.last().expect("paths are nonempty")
    }
}

/// Taylor coefficients at 0 of the solution with the given initial data.
pub fn solve_taylor(fam: &CoefficientFamily, ic: InitialConditions, order: usize) -> Result<Series> {
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::OrderOverflow(order));
    }
    fam.validate()?;
    let a = fam.series_at(c(0.0), order)?;
    Ok(Series::from_coeffs(ode_recursion(a.coeffs(), ic.f0, ic.f1, order), order))
}

struct Node {
    center: Complex64,
    u: Series,
    v: Series,
}

/// Lazily built expansion centers for the canonical basis of one equation.
pub struct BasisAtlas {
    family: CoefficientFamily,
    order: usize,
    nodes: RwLock<HashMap<(u32, u32), Arc<Node>>>,
}

impl std::fmt::Debug for BasisAtlas {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BasisAtlas")
            .field("family", &self.family)
            .field("order", &self.order)
            .field("nodes", &self.len())
            .finish()
    }
}

fn ring_gap(k: u32) -> f64 {
    RING_RATIO.powi(k as i32)
}

fn ring_count(k: u32) -> u32 {
    if k == 0 {
        return 1;
    }
    let d = ring_gap(k);
    (2.0 * PI * (1.0 - d) / (ANGULAR_SPACING * d)).ceil() as u32
}

/// Ring `k` with `1 − 0.6^k ≤ |z| < 1 − 0.6^{k+1}`.
fn ring_of(gap: f64) -> u32 {
    if gap > RING_RATIO {
        return 0;
    }
    let mut k = (gap.ln() / RING_RATIO.ln()).floor().max(1.0) as u32;
    while k > 1 && ring_gap(k) < gap {
        k -= 1;
    }
    while k < MAX_RING && ring_gap(k + 1) >= gap {
        k += 1;
    }
    k
}

fn nearest_index(angle: f64, count: u32) -> u32 {
    let j = (angle.rem_euclid(2.0 * PI) * count as f64 / (2.0 * PI)).round() as u64;
    (j % count as u64) as u32
}

fn center_of(k: u32, j: u32) -> Complex64 {
    if k == 0 {
        return c(0.0);
    }
    Complex64::from_polar(1.0 - ring_gap(k), 2.0 * PI * j as f64 / ring_count(k) as f64)
}

impl BasisAtlas {
    pub fn new(family: CoefficientFamily) -> Result<Arc<Self>> {
        family.validate()?;
        Ok(Arc::new(Self { family, order: ATLAS_ORDER, nodes: RwLock::new(HashMap::new()) }))
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    /// Number of centers built so far.
    pub fn len(&self) -> usize {
        self.nodes.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn node(&self, k: u32, j: u32) -> Result<Arc<Node>> {
        if let Some(n) = self.nodes.read().unwrap_or_else(|e| e.into_inner()).get(&(k, j)) {
            return Ok(n.clone());
        }
        let center = center_of(k, j);
        let (ud, vd) = if k == 0 {
            ([c(1.0), c(0.0)], [c(0.0), c(1.0)])
        } else {
            let angle = 2.0 * PI * j as f64 / ring_count(k) as f64;
            let parent = self.node(k - 1, nearest_index(angle, ring_count(k - 1)))?;
            let h = center - parent.center;
            (parent.u.eval_derivatives::<2>(h), parent.v.eval_derivatives::<2>(h))
        };
        let a = self.family.series_at(center, self.order)?;
        let node = Arc::new(Node {
            center,
            u: Series::from_coeffs(ode_recursion(a.coeffs(), ud[0], ud[1], self.order), self.order),
            v: Series::from_coeffs(ode_recursion(a.coeffs(), vd[0], vd[1], self.order), self.order),
        });
        // A concurrent builder computes the identical node, so either copy is fine.
        let mut guard = self.nodes.write().unwrap_or_else(|e| e.into_inner());
        Ok(guard.entry((k, j)).or_insert(node).clone())
    }

    /// `([U(z), U'(z)], [V(z), V'(z)])`.
    pub fn basis(&self, z: Complex64) -> Result<([Complex64; 2], [Complex64; 2])> {
        check_interior(z)?;
        let k = ring_of(1.0 - z.norm());
        let j = if k == 0 { 0 } else { nearest_index(z.arg(), ring_count(k)) };
        let node = self.node(k, j)?;
        let h = z - node.center;
        Ok((node.u.eval_derivatives::<2>(h), node.v.eval_derivatives::<2>(h)))
    }
}

/// A solution of `f'' + A f = 0` fixed by its initial data at the origin.
pub struct SolutionHandle {
    family: CoefficientFamily,
    ic: InitialConditions,
    atlas: Arc<BasisAtlas>,
    radius_cap: f64,
    taylor: OnceLock<Result<Series>>,
    continuation: Mutex<HashMap<(u64, u64), (Complex64, Complex64)>>,
}

impl Clone for SolutionHandle {
    fn clone(&self) -> Self {
        let cache = self.continuation.lock().unwrap_or_else(|e| e.into_inner()).clone();
        Self {
            family: self.family.clone(),
            ic: self.ic,
            atlas: self.atlas.clone(),
            radius_cap: self.radius_cap,
            taylor: self.taylor.clone(),
            continuation: Mutex::new(cache),
        }
    }
}

impl std::fmt::Debug for SolutionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionHandle")
            .field("family", &self.family)
            .field("ic", &self.ic)
            .field("radius_cap", &self.radius_cap)
            .finish()
    }
}

impl SolutionHandle {
    pub fn new(family: CoefficientFamily, ic: InitialConditions) -> Result<Self> {
        Ok(Self::with_atlas(BasisAtlas::new(family)?, ic))
    }

    /// A solution sharing an existing atlas, so centers are built once.
    pub fn with_atlas(atlas: Arc<BasisAtlas>, ic: InitialConditions) -> Self {
        Self {
            family: atlas.family().clone(),
            ic,
            atlas,
            radius_cap: DEFAULT_RADIUS_CAP,
            taylor: OnceLock::new(),
            continuation: Mutex::new(HashMap::new()),
        }
    }

    /// Changes the radius beyond which evaluation is refused.
    pub fn with_radius_cap(mut self, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap < 1.0) {
            return Err(Error::ParameterConstraint(format!("radius cap {cap} outside (0, 1)")));
        }
        self.radius_cap = cap;
        Ok(self)
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    pub fn ic(&self) -> InitialConditions {
        self.ic
    }

    pub fn atlas(&self) -> &Arc<BasisAtlas> {
        &self.atlas
    }

    pub fn radius_cap(&self) -> f64 {
        self.radius_cap
    }

    fn check_cap(&self, z: Complex64) -> Result<()> {
        check_interior(z)?;
        if z.norm() > self.radius_cap {
            return Err(Error::BeyondRadiusCap { z, cap: self.radius_cap });
        }
        Ok(())
    }

    /// `(f(z), f'(z))` from the basis atlas.
    pub fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.check_cap(z)?;
        let (u, v) = self.atlas.basis(z)?;
        Ok((self.ic.f0 * u[0] + self.ic.f1 * v[0], self.ic.f0 * u[1] + self.ic.f1 * v[1]))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_pair(z)?.0)
    }

    /// `f, f', f'' = −A f, f''' = −A' f − A f'`.
    pub fn jet(&self, z: Complex64) -> Result<Jet3> {
        let (f, f1) = self.eval_pair(z)?;
        let a = eval_jet(&self.family, z)?;
        Ok(Jet3::new(f, f1, -a.f * f, -a.f1 * f - a.f * f1))
    }

    /// Taylor series at the origin of order `DEFAULT_TAYLOR_ORDER`.
    pub fn taylor(&self) -> Result<&Series> {
        self.taylor
            .get_or_init(|| solve_taylor(&self.family, self.ic, DEFAULT_TAYLOR_ORDER))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `(f(z), f'(z))` from the origin series; accurate well inside `|z| < 1`.
    pub fn eval_taylor(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        check_interior(z)?;
        let d = self.taylor()?.eval_derivatives::<2>(z);
        Ok((d[0], d[1]))
    }

    /// Path integration to the endpoint of `path`; endpoint values are cached.
    pub fn continue_along(&self, path: &PathSpec, tol: f64) -> Result<(Complex64, Complex64)> {
        let end = path.endpoint();
        self.check_cap(end)?;
        let key = (end.re.to_bits(), end.im.to_bits());
        if let Some(v) = self.continuation.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        let v = continue_along_path(&self.family, self.ic, path, tol)?;
        self.continuation.lock().unwrap_or_else(|e| e.into_inner()).insert(key, v);
        Ok(v)
    }
}

/// The canonical basis `(U, V)` with initial data `(1, 0)` and `(0, 1)`.
pub fn solution_basis(fam: &CoefficientFamily) -> Result<(SolutionHandle, SolutionHandle)> {
    let atlas = BasisAtlas::new(fam.clone())?;
    Ok((
        SolutionHandle::with_atlas(atlas.clone(), InitialConditions::real(1.0, 0.0)),
        SolutionHandle::with_atlas(atlas, InitialConditions::real(0.0, 1.0)),
    ))
}

/// `f₁ f₂' − f₁' f₂` at `z`.
pub fn wronskian(s1: &SolutionHandle, s2: &SolutionHandle, z: Complex64) -> Result<Complex64> {
    if s1.family != s2.family {
        return Err(Error::MismatchedFamilies);
    }
    let (f, fp) = s1.eval_pair(z)?;
    let (g, gp) = s2.eval_pair(z)?;
    Ok(f * gp - fp * g)
}

fn rhs(fam: &CoefficientFamily, z: Complex64, y: [Complex64; 2]) -> Result<[Complex64; 2]> {
    let a = fam.eval(z)?;
    Ok([y[1], -a * y[0]])
}

fn axpy(y: [Complex64; 2], h: Complex64, f: [Complex64; 2]) -> [Complex64; 2] {
    [y[0] + h * f[0], y[1] + h * f[1]]
}

const GBS_SEQUENCE: [usize; 8] = [2, 4, 6, 8, 10, 12, 14, 16];

/// One extrapolated step of complex length `big`; returns the new state and
/// the difference between the two highest extrapolation orders.
fn gbs_step(fam: &CoefficientFamily, z: Complex64, y: [Complex64; 2], big: Complex64) -> Result<([Complex64; 2], f64)> {
    let f_start = rhs(fam, z, y)?;
    let mut table: Vec<[Complex64; 2]> = Vec::with_capacity(GBS_SEQUENCE.len());
    let mut err = f64::INFINITY;
    for (j, &n) in GBS_SEQUENCE.iter().enumerate() {
        let h = big / n as f64;
        let mut prev = y;
        let mut cur = axpy(y, h, f_start);
        for m in 1..n {
            let fm = rhs(fam, z + h * m as f64, cur)?;
            let next = axpy(prev, h * 2.0, fm);
            prev = cur;
            cur = next;
        }
        let f_end = rhs(fam, z + big, cur)?;
        let tail = axpy(cur, h, f_end);
        let mut row = vec![[(prev[0] + tail[0]) * 0.5, (prev[1] + tail[1]) * 0.5]];
        for k in 1..=j {
            let ratio = (n as f64 / GBS_SEQUENCE[j - k] as f64).powi(2);
            let a = row[k - 1];
            let b = table[k - 1];
            row.push([a[0] + (a[0] - b[0]) / (ratio - 1.0), a[1] + (a[1] - b[1]) / (ratio - 1.0)]);
        }
        if j > 0 {
            let top = row[j];
            let below = row[j - 1];
            let scale = top[0].norm().max(top[1].norm()).max(1.0);
            err = (top[0] - below[0]).norm().max((top[1] - below[1]).norm()) / scale;
        }
        table = row;
    }
    Ok((table[GBS_SEQUENCE.len() - 1], err))
}

fn singular_distance(fam: &CoefficientFamily, z: Complex64) -> f64 {
    fam.singular_points().iter().map(|&s| (z - c(s)).norm()).fold(f64::INFINITY, f64::min)
}

/// `(f, f')` at the end of `path` for the solution with data `ic`, by
/// extrapolated midpoint steps with relative local error at most `tol`.
pub fn continue_along_path(
    fam: &CoefficientFamily,
    ic: InitialConditions,
    path: &PathSpec,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    const MAX_STEPS: usize = 1_000_000;
    if !(tol > 0.0) {
        return Err(Error::ParameterConstraint(format!("tolerance {tol} must be positive")));
    }
    fam.validate()?;
    let mut y = [ic.f0, ic.f1];
    let mut steps = 0usize;
    let mut last_err = 0.0;
    for seg in path.points().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let dir = (b - a) / len;
        let mut s = 0.0;
        let mut h = f64::INFINITY;
        while s < len {
            let z = a + dir * s;
            let cap = (0.5 / (fam.eval(z)?.norm() + 1.0).sqrt()).min(0.3 * singular_distance(fam, z));
            h = h.min(cap).min(len - s);
            loop {
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::ToleranceNotMet { tol, err: last_err });
                }
                if h < 1e-14 * (1.0 - z.norm()).max(1e-300) || h < 1e-300 {
                    return Err(Error::StepUnderflow(z));
                }
                let (next, err) = gbs_step(fam, z, y, dir * h)?;
                last_err = err;
                if err <= tol {
                    y = next;
                    s = if len - s <= h { len } else { s + h };
                    let grow = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(1.0 / 15.0)).min(2.0) };
                    h *= grow.max(1.0);
                    break;
                }
                h *= (0.9 * (tol / err).powf(1.0 / 15.0)).clamp(0.2, 0.7);
            }
        }
    }
    Ok((y[0], y[1]))
}

/// The explicit solutions known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `√(1−z²)·sin(γ log((1+z)/(1−z)))`.
    SchwarzSin { gamma: f64 },
    /// `√(1−z²)·cos(γ log((1+z)/(1−z)))`.
    SchwarzCos { gamma: f64 },
    /// `(1−z)^{−1/2}`.
    NehariFirst,
    /// `(1−z)^{3/2}`.
    NehariSecond,
    /// `√(1−z²)·((1−z)/(1+z))^{s/2}`, `s = √(1−a)`.
    HilleFirst { a: f64 },
    /// `√(1−z²)·((1−z)/(1+z))^{−s/2}`.
    HilleSecond { a: f64 },
    /// `(1−z)^{−β}·log(e/(1−z))`, `β = (√(1+K) − 1)/2`.
    Growth { k: f64 },
    /// `P_n(z)·√(1−z²)`.
    LegendreP { n: u32 },
    /// `2Q_n(z)·√(1−z²)`, with `Q₀ = ½ log((1+z)/(1−z))`.
    LegendreQ { n: u32 },
    /// `(p')^{−1/2} sin p` for `p = log log(e^e/(1−z))`.
    LogLogSin,
    LogLogCos,
    /// `(p')^{−1/2} sin p` for `p = (log(e/(1−z)))^q`.
    PowLogSin { q: f64 },
    PowLogCos { q: f64 },
}

/// `(P_n, P_n')` or `(Q_n, Q_n')` by Bonnet's recursion, with
/// `(1 − z²) y_n' = n (y_{n−1} − z y_n)` for the derivative.
fn legendre_pair(n: u32, z: Complex64, second_kind: bool) -> (Complex64, Complex64) {
    let one = c(1.0);
    let (y0, d0) = if second_kind {
        (((one + z) / (one - z)).ln() * 0.5, (one - z * z).inv())
    } else {
        (one, c(0.0))
    };
    if n == 0 {
        return (y0, d0);
    }
    let mut prev = y0;
    let mut cur = if second_kind { z * y0 - one } else { z };
    for k in 2..=n {
        let kf = k as f64;
        let next = (z * cur * (2.0 * kf - 1.0) - prev * (kf - 1.0)) / kf;
        prev = cur;
        cur = next;
    }
    let d = (prev - z * cur) * n as f64 / (one - z * z);
    (cur, d)
}

/// `f = (p')^{−1/2}·trig(p)` and its derivative, from the jet of `p`.
fn trig_of_p(p: &Jet3, cosine: bool) -> (Complex64, Complex64) {
    let (s, co) = (p.f.sin(), p.f.cos());
    let (t, dt) = if cosine { (co, -s) } else { (s, co) };
    let root = p.f1.sqrt();
    let f = t / root;
    let fp = -t * p.f2 * 0.5 / (root * p.f1) + dt * root;
    (f, fp)
}

impl ClosedForm {
    /// The coefficient this function solves.
    pub fn family(&self) -> CoefficientFamily {
        match *self {
            Self::SchwarzSin { gamma } | Self::SchwarzCos { gamma } => CoefficientFamily::SchwarzSin { gamma },
            Self::NehariFirst | Self::NehariSecond => CoefficientFamily::NehariSharp,
            Self::HilleFirst { a } | Self::HilleSecond { a } => CoefficientFamily::Hille { a },
            Self::Growth { k } => CoefficientFamily::Growth { k },
            Self::LegendreP { n } | Self::LegendreQ { n } => CoefficientFamily::Legendre { n },
            Self::LogLogSin | Self::LogLogCos => CoefficientFamily::LogLog,
            Self::PowLogSin { q } | Self::PowLogCos { q } => CoefficientFamily::PowLog { q },
        }
    }

    /// `(f(z), f'(z))`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.family().validate()?;
        check_interior(z)?;
        let one = c(1.0);
        let omz = one - z;
        let opz = one + z;
        let w = (omz * opz).sqrt();
        let power_pair = |alpha: f64, beta: f64| {
            let f = omz.powf(alpha) * opz.powf(beta);
            (f, f * (-alpha / omz + beta / opz))
        };
        Ok(match *self {
            Self::SchwarzSin { gamma } | Self::SchwarzCos { gamma } => {
                let arg = (opz / omz).ln() * gamma;
                let (s, co) = (arg.sin(), arg.cos());
                let cosine = matches!(self, Self::SchwarzCos { .. });
                let (t, dt) = if cosine { (co, -s) } else { (s, co) };
                (w * t, (-z * t + dt * 2.0 * gamma) / w)
            }
            Self::NehariFirst => power_pair(-0.5, 0.0),
            Self::NehariSecond => power_pair(1.5, 0.0),
            Self::HilleFirst { a } => {
                let s = (1.0 - a).sqrt();
                power_pair((1.0 + s) / 2.0, (1.0 - s) / 2.0)
            }
            Self::HilleSecond { a } => {
                let s = (1.0 - a).sqrt();
                power_pair((1.0 - s) / 2.0, (1.0 + s) / 2.0)
            }
            Self::Growth { k } => {
                let beta = ((1.0 + k).sqrt() - 1.0) / 2.0;
                let m = one - omz.ln();
                let base = omz.powf(-beta);
                (base * m, base / omz * (m * beta + 1.0))
            }
            Self::LegendreP { n } | Self::LegendreQ { n } => {
                let second = matches!(self, Self::LegendreQ { .. });
                let (y, dy) = legendre_pair(n, z, second);
                let scale = if second { 2.0 } else { 1.0 };
                ((y * w) * scale, (dy * w - y * z / w) * scale)
            }
            Self::LogLogSin => trig_of_p(&loglog_p_jet(z)?, false),
            Self::LogLogCos => trig_of_p(&loglog_p_jet(z)?, true),
            Self::PowLogSin { q } => trig_of_p(&powlog_p_jet(q, z)?, false),
            Self::PowLogCos { q } => trig_of_p(&powlog_p_jet(q, z)?, true),
        })
    }
}

/// The pair of explicit solutions that `--sol α,β` combinations refer to,
/// or `None` when the family has no explicit basis.
pub fn reference_basis(fam: &CoefficientFamily) -> Option<(ClosedForm, ClosedForm)> {
    match *fam {
        CoefficientFamily::NehariSharp => Some((ClosedForm::NehariFirst, ClosedForm::NehariSecond)),
        CoefficientFamily::Hille { a } => Some((ClosedForm::HilleFirst { a }, ClosedForm::HilleSecond { a })),
        CoefficientFamily::Legendre { n } => Some((ClosedForm::LegendreP { n }, ClosedForm::LegendreQ { n })),
        CoefficientFamily::SchwarzSin { gamma } => {
            Some((ClosedForm::SchwarzSin { gamma }, ClosedForm::SchwarzCos { gamma }))
        }
        CoefficientFamily::LogLog => Some((ClosedForm::LogLogSin, ClosedForm::LogLogCos)),
        CoefficientFamily::PowLog { q } => Some((ClosedForm::PowLogSin { q }, ClosedForm::PowLogCos { q })),
        CoefficientFamily::Growth { .. } | CoefficientFamily::Series { .. } => None,
    }
}

/// A linear combination of closed-form solutions of one equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    family: CoefficientFamily,
    parts: Vec<(Complex64, ClosedForm)>,
}

/// The explicit solution `cf` as a callable.
pub fn closed_form_solution(cf: ClosedForm) -> ClosedFormSolution {
    ClosedFormSolution { family: cf.family(), parts: vec![(c(1.0), cf)] }
}

impl ClosedFormSolution {
    /// `α f₁ + β f₂` over the reference basis of `fam`.
    pub fn combination(fam: &CoefficientFamily, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let (f1, f2) = reference_basis(fam)
            .ok_or_else(|| Error::Applicability(format!("{fam} has no explicit solution basis")))?;
        Ok(Self { family: fam.clone(), parts: vec![(alpha, f1), (beta, f2)] })
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    pub fn parts(&self) -> &[(Complex64, ClosedForm)] {
        &self.parts
    }

    pub fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut f = c(0.0);
        let mut fp = c(0.0);
        for (w, cf) in &self.parts {
            if w.norm() == 0.0 {
                continue;
            }
            let (g, gp) = cf.eval(z)?;
            f += w * g;
            fp += w * gp;
        }
        Ok((f, fp))
    }

    pub fn initial_conditions(&self) -> Result<InitialConditions> {
        let (f0, f1) = self.eval_pair(c(0.0))?;
        Ok(InitialConditions::new(f0, f1))
    }

    /// The numeric solution with the same initial data.
    pub fn to_handle(&self) -> Result<SolutionHandle> {
        SolutionHandle::new(self.family.clone(), self.initial_conditions()?)
    }
}

/// Anything that yields `(f(z), f'(z))`: the input of the zero finder.
pub trait SolutionFn: Sync {
    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)>;
}

impl SolutionFn for SolutionHandle {
    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        SolutionHandle::eval_pair(self, z)
    }
}

impl SolutionFn for ClosedFormSolution {
    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        ClosedFormSolution::eval_pair(self, z)
    }
}

/// Adapter for closures returning `(f, f')`.
pub struct FnSolution<F>(pub F);

impl<F> SolutionFn for FnSolution<F>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)> + Sync,
{
    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        (self.0)(z)
    }
}

impl<T: SolutionFn + ?Sized> SolutionFn for &T {
    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        (**self).eval_pair(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn taylor_examples() {
        let zero = CoefficientFamily::constant(0.0);
        let s = solve_taylor(&zero, InitialConditions::real(0.0, 1.0), 10).unwrap();
        assert_eq!(s.eval(z(0.3, 0.2)), z(0.3, 0.2));
        let unit = CoefficientFamily::constant(1.0);
        let s = solve_taylor(&unit, InitialConditions::real(0.0, 1.0), 60).unwrap();
        assert!((s.eval(z(0.5, 0.0)) - z(0.5f64.sin(), 0.0)).norm() < 1e-15);
        let leg = CoefficientFamily::Legendre { n: 1 };
        let s = solve_taylor(&leg, InitialConditions::real(0.0, 1.0), 120).unwrap();
        assert!((s.eval(z(0.5, 0.0)) - z(0.5 * 0.75f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(matches!(solve_taylor(&leg, InitialConditions::real(0.0, 1.0), 10_000), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn rings_partition_the_disc() {
        for gap in [0.9, 0.6, 0.5, 0.36, 0.3, 1e-3, 1e-7, 1e-12] {
            let k = ring_of(gap);
            assert!(ring_gap(k) >= gap && (k == 0 || gap > ring_gap(k + 1)) || k == 0 && gap > RING_RATIO, "gap {gap}");
        }
        assert_eq!(ring_count(1), 9);
    }

    #[test]
    fn atlas_matches_sine() {
        let (u, v) = solution_basis(&CoefficientFamily::constant(1.0)).unwrap();
        for p in [z(0.1, 0.2), z(-0.7, 0.5), z(0.99, 0.0), z(0.0, -0.999)] {
            let (f, fp) = v.eval_pair(p).unwrap();
            assert!((f - p.sin()).norm() < 1e-13, "{p}");
            assert!((fp - p.cos()).norm() < 1e-13);
            assert!((u.eval(p).unwrap() - p.cos()).norm() < 1e-13);
        }
    }

    #[test]
    fn continuation_matches_sine_and_is_path_independent() {
        let unit = CoefficientFamily::constant(1.0);
        let ic = InitialConditions::real(0.0, 1.0);
        let (f, fp) = continue_along_path(&unit, ic, &PathSpec::straight(z(0.5, 0.0)).unwrap(), 1e-12).unwrap();
        assert!((f - z(0.5f64.sin(), 0.0)).norm() < 1e-11);
        assert!((fp - z(0.5f64.cos(), 0.0)).norm() < 1e-11);
        let fam = CoefficientFamily::Hille { a: -8.0 };
        let end = z(0.3, 0.4);
        let p1 = PathSpec::straight(end).unwrap();
        let p2 = PathSpec::new(vec![z(0.0, 0.0), z(-0.4, 0.1), z(0.1, 0.6), end]).unwrap();
        let tol = 1e-12;
        let a = continue_along_path(&fam, ic, &p1, tol).unwrap();
        let b = continue_along_path(&fam, ic, &p2, tol).unwrap();
        assert!((a.0 - b.0).norm() < 10.0 * tol * a.0.norm().max(1.0));
    }

    #[test]
    fn closed_forms_solve_the_equation() {
        let forms = [
            ClosedForm::SchwarzSin { gamma: 1.0 },
            ClosedForm::SchwarzCos { gamma: 0.7 },
            ClosedForm::NehariFirst,
            ClosedForm::NehariSecond,
            ClosedForm::HilleFirst { a: -8.0 },
            ClosedForm::HilleSecond { a: -2.5 },
            ClosedForm::Growth { k: 3.0 },
            ClosedForm::LegendreP { n: 3 },
            ClosedForm::LegendreQ { n: 2 },
            ClosedForm::LegendreQ { n: 0 },
            ClosedForm::LogLogSin,
            ClosedForm::LogLogCos,
            ClosedForm::PowLogSin { q: 0.5 },
            ClosedForm::PowLogCos { q: 0.3 },
        ];
        for cf in forms {
            let fam = cf.family();
            for p in [z(0.2, 0.1), z(-0.5, 0.3), z(0.7, -0.2)] {
                // f'' from a central difference of f', compared with −A f.
                let h = 1e-5;
                let (f, _) = cf.eval(p).unwrap();
                let d2 = (cf.eval(p + h).unwrap().1 - cf.eval(p - h).unwrap().1) / (2.0 * h);
                let res = (d2 + fam.eval(p).unwrap() * f).norm();
                assert!(res < 1e-7 * (1.0 + f.norm()), "{cf:?} at {p}: {res}");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }).eval_pair(z(0.0, 0.0)).unwrap().0, z(0.0, 0.0));
        let p2 = closed_form_solution(ClosedForm::LegendreP { n: 2 }).eval_pair(z(0.0, 0.0)).unwrap().0;
        assert!((p2 - z(-0.5, 0.0)).norm() < 1e-16);
        let hille = ClosedFormSolution::combination(&CoefficientFamily::Hille { a: -8.0 }, z(1.0, 0.0), z(1.0, 0.0)).unwrap();
        assert!((hille.eval_pair(z(0.0, 0.0)).unwrap().0 - z(2.0, 0.0)).norm() < 1e-15);
        assert!(ClosedFormSolution::combination(&CoefficientFamily::Growth { k: 1.0 }, z(1.0, 0.0), z(0.0, 0.0)).is_err());
    }

    #[test]
    fn wronskian_of_canonical_basis() {
        let (u, v) = solution_basis(&CoefficientFamily::Legendre { n: 2 }).unwrap();
        let w1 = wronskian(&u, &v, z(0.1, 0.0)).unwrap();
        let w2 = wronskian(&u, &v, Complex64::from_polar(0.9, 1.0)).unwrap();
        assert!((w1 - z(1.0, 0.0)).norm() < 1e-12);
        assert!((w1 - w2).norm() < 1e-9);
        assert_eq!(wronskian(&u, &u, z(0.3, 0.3)).unwrap(), z(0.0, 0.0));
        let (x, _) = solution_basis(&CoefficientFamily::NehariSharp).unwrap();
        assert_eq!(wronskian(&u, &x, z(0.0, 0.0)), Err(Error::MismatchedFamilies));
    }

    #[test]
    fn radius_cap_is_enforced() {
        let (u, _) = solution_basis(&CoefficientFamily::NehariSharp).unwrap();
        assert!(matches!(u.eval(z(0.999999, 0.0)), Err(Error::BeyondRadiusCap { .. })));
        let u = u.with_radius_cap(1.0 - 1e-8).unwrap();
        assert!(u.eval(z(0.999999, 0.0)).is_ok());
    }
}
