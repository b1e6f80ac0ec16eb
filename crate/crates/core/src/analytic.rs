//! Coefficient families, jets, the Schwarzian derivative, and the Nehari
//! functional `N_A(z) = |A(z)|(1 − |z|²)²`.
//!
//! Every closed-form family is analytic in the disc with singularities only
//! at `±1`. Powers and logarithms of `1 ± z` use principal branches: for
//! `z` in the disc their arguments lie in the right half-plane, so the
//! branches are unambiguous.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::Series;

/// A coefficient `A` of `f'' + A f = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CoefficientFamily {
    /// `−3/(4(1−z)²)`.
    NehariSharp,
    /// `a/(1−z²)²` with `a < 0`.
    Hille { a: f64 },
    /// `−(K + 4√(1+K)/log(e/(1−z)))/(4(1−z)²)` with `K ≥ 0`.
    Growth { k: f64 },
    /// `(1 + n(n+1)(1−z²))/(1−z²)²`.
    Legendre { n: u32 },
    /// `(1 + 4γ²)/(1−z²)²` with `γ > 0`.
    SchwarzSin { gamma: f64 },
    /// `(p')² + S_p/2` for `p(z) = log log(e^e/(1−z))`.
    LogLog,
    /// `(p')² + S_p/2` for `p(z) = (log(e/(1−z)))^q`, `0 < q < 1`.
    PowLog { q: f64 },
    /// A polynomial `Σ a_k z^k`.
    Series { coeffs: Vec<Complex64> },
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn one() -> Complex64 {
    c(1.0)
}

impl CoefficientFamily {
    pub fn constant(value: f64) -> Self {
        Self::Series { coeffs: vec![c(value)] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParameterConstraint(msg));
        match self {
            Self::Hille { a } if !(*a < 0.0 && a.is_finite()) => bad(format!("hille needs a < 0, got {a}")),
            Self::Growth { k } if !(*k >= 0.0 && k.is_finite()) => bad(format!("growth needs K ≥ 0, got {k}")),
            Self::SchwarzSin { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => {
                bad(format!("schwarz-sin needs γ > 0, got {gamma}"))
            }
            Self::PowLog { q } if !(*q > 0.0 && *q < 1.0) => bad(format!("powlog needs 0 < q < 1, got {q}")),
            Self::Series { coeffs } if coeffs.is_empty() => bad("series needs at least one coefficient".into()),
            Self::Series { coeffs } if coeffs.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) => {
                bad("series coefficients must be finite".into())
            }
            _ => Ok(()),
        }
    }

    /// Boundary points where the coefficient blows up.
    pub fn singular_points(&self) -> &'static [f64] {
        match self {
            Self::NehariSharp | Self::Growth { .. } | Self::LogLog | Self::PowLog { .. } => &[1.0],
            Self::Hille { .. } | Self::Legendre { .. } | Self::SchwarzSin { .. } => &[1.0, -1.0],
            Self::Series { .. } => &[],
        }
    }

    /// Whether `A` has real Taylor coefficients at the origin.
    pub fn is_real(&self) -> bool {
        match self {
            Self::Series { coeffs } => coeffs.iter().all(|a| a.im == 0.0),
            _ => true,
        }
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        for &s in self.singular_points() {
            if (z - c(s)).norm() == 0.0 {
                return Err(Error::Singularity(z));
            }
        }
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisc(z));
        }
        Ok(())
    }

    /// Closed-form value `A(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let omz = one() - z;
        let one_minus_sq = one() - z * z;
        match self {
            Self::NehariSharp => c(-0.75) / (omz * omz),
            Self::Hille { a } => c(*a) / (one_minus_sq * one_minus_sq),
            Self::Growth { k } => {
                let m = one() - omz.ln();
                -(c(*k) + c(4.0 * (1.0 + k).sqrt()) / m) / (omz * omz * 4.0)
            }
            Self::Legendre { n } => {
                let nn = (*n as f64) * (*n as f64 + 1.0);
                (one() + one_minus_sq * nn) / (one_minus_sq * one_minus_sq)
            }
            Self::SchwarzSin { gamma } => c(1.0 + 4.0 * gamma * gamma) / (one_minus_sq * one_minus_sq),
            Self::LogLog => {
                let l = c(E) - omz.ln();
                let l2 = l * l;
                (l2 + 5.0) / (l2 * omz * omz * 4.0)
            }
            Self::PowLog { q } => {
                let m = one() - omz.ln();
                let bracket = c(0.25) + m.powf(-2.0 * (1.0 - q)) * (q * q) + (m * m).inv() * ((1.0 - q * q) / 4.0);
                bracket / (omz * omz)
            }
            Self::Series { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a),
        }
    }

    /// Taylor expansion of `A(center + h)` in `h` to the given order, by
    /// power-series arithmetic on the closed form.
    pub fn series_at(&self, center: Complex64, order: usize) -> Result<Series> {
        self.check_point(center)?;
        let omz = Series::affine(one() - center, c(-1.0), order);
        // Rational families use closed-form pole expansions, O(order) each.
        let p1 = |k| pole_series(one() - center, -1.0, k, order);
        let m1 = |k| pole_series(one() + center, 1.0, k, order);
        // 1/(1−z²) = ½(1/(1−z) + 1/(1+z)); 1/(1−z²)² = ¼(1/(1−z)² + 1/(1+z)² + 1/(1−z) + 1/(1+z))
        let inv_sq = || (&p1(1) + &m1(1)).scale(c(0.5));
        let inv_sq_sq = || (&(&p1(2) + &m1(2)) + &(&p1(1) + &m1(1))).scale(c(0.25));
        let s = match self {
            Self::NehariSharp => p1(2).scale(c(-0.75)),
            Self::Hille { a } => inv_sq_sq().scale(c(*a)),
            Self::SchwarzSin { gamma } => inv_sq_sq().scale(c(1.0 + 4.0 * gamma * gamma)),
            Self::Legendre { n } => {
                let nn = (*n as f64) * (*n as f64 + 1.0);
                &inv_sq_sq() + &inv_sq().scale(c(nn))
            }
            Self::Growth { k } => {
                let m = (-&omz.ln()?).add_constant(one());
                let inner = m.recip()?.scale(c(4.0 * (1.0 + k).sqrt())).add_constant(c(*k));
                (&inner * &omz.powf(-2.0)?).scale(c(-0.25))
            }
            Self::LogLog => {
                let l = (-&omz.ln()?).add_constant(c(E));
                let inv_l = l.recip()?;
                let bracket = (&inv_l * &inv_l).scale(c(1.25)).add_constant(c(0.25));
                &bracket * &omz.powf(-2.0)?
            }
            Self::PowLog { q } => {
                let m = (-&omz.ln()?).add_constant(one());
                let inv_m = m.recip()?;
                let bracket = &m.powf(-2.0 * (1.0 - q))?.scale(c(q * q))
                    + &(&inv_m * &inv_m).scale(c((1.0 - q * q) / 4.0)).add_constant(c(0.25));
                &bracket * &omz.powf(-2.0)?
            }
            Self::Series { coeffs } => {
                let shift = Series::affine(center, one(), order);
                let mut acc = Series::zeros(order);
                for a in coeffs.iter().rev() {
                    acc = (&acc * &shift).add_constant(*a);
                }
                acc
            }
        };
        Ok(s)
    }
}

/// Taylor coefficients in `h` of `(a + σh)^{−k}` for `k ∈ {1, 2}`.
fn pole_series(a: Complex64, sigma: f64, k: u32, order: usize) -> Series {
    let ratio = -sigma / a;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut t = if k == 2 { (a * a).inv() } else { a.inv() };
    for n in 0..=order {
        let mult = if k == 2 { (n + 1) as f64 } else { 1.0 };
        coeffs.push(t * mult);
        t *= ratio;
    }
    Series::from_coeffs(coeffs, order)
}

fn parse_real(key: &str, v: Option<&str>) -> Result<f64> {
    let v = v.ok_or_else(|| Error::Parse(format!("missing parameter {key}")))?;
    v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {v:?} for {key}")))
}

/// Parses a complex literal: `1.5`, `-2i`, `i`, `0.3+0.4i`, `1e-3-2e-2i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let imag = |txt: &str| -> Result<f64> {
            match txt {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => txt.parse::<f64>().map_err(|_| bad()),
            }
        };
        return match split {
            Some(idx) => {
                let re = body[..idx].parse::<f64>().map_err(|_| bad())?;
                Ok(Complex64::new(re, imag(&body[idx..])?))
            }
            None => Ok(Complex64::new(0.0, imag(body)?)),
        };
    }
    t.parse::<f64>().map(c).map_err(|_| bad())
}

fn format_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl FromStr for CoefficientFamily {
    type Err = Error;

    /// Grammar: `name[:key=value,...]`, e.g. `hille:a=-8`, `legendre:n=3`,
    /// `powlog:q=0.5`, `series:1,0,0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim().to_ascii_lowercase(), Some(r)),
            None => (s.to_ascii_lowercase(), None),
        };
        let params = |allowed: &[&str]| -> Result<Vec<(String, String)>> {
            let mut out = Vec::new();
            if let Some(r) = rest {
                for part in r.split(',').filter(|p| !p.trim().is_empty()) {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
                    let k = k.trim().to_string();
                    if !allowed.iter().any(|a| a.eq_ignore_ascii_case(&k)) {
                        return Err(Error::Parse(format!("unknown parameter {k:?} for {name}")));
                    }
                    out.push((k.to_ascii_lowercase(), v.trim().to_string()));
                }
            }
            Ok(out)
        };
        let get = |ps: &[(String, String)], key: &str| ps.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let fam = match name.as_str() {
            "nehari-sharp" | "nehari" => {
                params(&[])?;
                Self::NehariSharp
            }
            "hille" => {
                let ps = params(&["a"])?;
                Self::Hille { a: parse_real("a", get(&ps, "a").as_deref())? }
            }
            "growth" => {
                let ps = params(&["k"])?;
                Self::Growth { k: parse_real("K", get(&ps, "k").as_deref())? }
            }
            "legendre" => {
                let ps = params(&["n"])?;
                let v = get(&ps, "n").ok_or_else(|| Error::Parse("missing parameter n".into()))?;
                let n = v.parse::<u32>().map_err(|_| Error::Parse(format!("bad degree {v:?}")))?;
                Self::Legendre { n }
            }
            "schwarz-sin" | "schwarz" => {
                let ps = params(&["gamma"])?;
                Self::SchwarzSin { gamma: parse_real("gamma", get(&ps, "gamma").as_deref())? }
            }
            "loglog" => {
                params(&[])?;
                Self::LogLog
            }
            "powlog" => {
                let ps = params(&["q"])?;
                Self::PowLog { q: parse_real("q", get(&ps, "q").as_deref())? }
            }
            "series" => {
                let r = rest.ok_or_else(|| Error::Parse("series needs coefficients".into()))?;
                let coeffs = r.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                Self::Series { coeffs }
            }
            other => return Err(Error::Parse(format!("unknown coefficient family {other:?}"))),
        };
        fam.validate()?;
        Ok(fam)
    }
}

impl fmt::Display for CoefficientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NehariSharp => write!(f, "nehari-sharp"),
            Self::Hille { a } => write!(f, "hille:a={a}"),
            Self::Growth { k } => write!(f, "growth:K={k}"),
            Self::Legendre { n } => write!(f, "legendre:n={n}"),
            Self::SchwarzSin { gamma } => write!(f, "schwarz-sin:gamma={gamma}"),
            Self::LogLog => write!(f, "loglog"),
            Self::PowLog { q } => write!(f, "powlog:q={q}"),
            Self::Series { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(format_complex).collect();
                write!(f, "series:{}", parts.join(","))
            }
        }
    }
}

impl From<CoefficientFamily> for String {
    fn from(f: CoefficientFamily) -> Self {
        f.to_string()
    }
}

impl TryFrom<String> for CoefficientFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Value and first three derivatives of an analytic function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub f: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
}

impl Jet3 {
    pub fn new(f: Complex64, f1: Complex64, f2: Complex64, f3: Complex64) -> Self {
        Self { f, f1, f2, f3 }
    }

    /// Jet of the identity map at `z`.
    pub fn identity(z: Complex64) -> Self {
        Self::new(z, one(), c(0.0), c(0.0))
    }

    /// Jet of `(a z + b)/(c z + d)` at `z`.
    pub fn mobius(a: Complex64, b: Complex64, cc: Complex64, d: Complex64, z: Complex64) -> Self {
        let den = cc * z + d;
        let det = a * d - b * cc;
        Self::new(
            (a * z + b) / den,
            det / (den * den),
            -det * cc * 2.0 / (den * den * den),
            det * cc * cc * 6.0 / (den * den * den * den),
        )
    }

    /// Jet of `outer ∘ inner`, where `outer` is the jet of the outer map
    /// taken at `inner.f`.
    pub fn compose(outer: &Jet3, inner: &Jet3) -> Self {
        let h1 = inner.f1;
        let h2 = inner.f2;
        let h3 = inner.f3;
        Self::new(
            outer.f,
            outer.f1 * h1,
            outer.f2 * h1 * h1 + outer.f1 * h2,
            outer.f3 * h1 * h1 * h1 + outer.f2 * h1 * h2 * 3.0 + outer.f1 * h3,
        )
    }

    /// Jet of the quotient `self / other`.
    pub fn quotient(&self, other: &Jet3) -> Self {
        // q = u/v, q' = (u' − q v')/v, and so on by Leibniz on u = q v.
        let v = other;
        let q0 = self.f / v.f;
        let q1 = (self.f1 - q0 * v.f1) / v.f;
        let q2 = (self.f2 - q1 * v.f1 * 2.0 - q0 * v.f2) / v.f;
        let q3 = (self.f3 - q2 * v.f1 * 3.0 - q1 * v.f2 * 3.0 - q0 * v.f3) / v.f;
        Self::new(q0, q1, q2, q3)
    }

    pub fn is_finite(&self) -> bool {
        [self.f, self.f1, self.f2, self.f3].iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

/// Schwarzian derivative `w'''/w' − (3/2)(w''/w')²`.
pub fn schwarzian(j: &Jet3) -> Result<Complex64> {
    if j.f1.norm() == 0.0 {
        return Err(Error::LocalUnivalence(j.f));
    }
    let r = j.f2 / j.f1;
    Ok(j.f3 / j.f1 - r * r * 1.5)
}

/// Exact jet of the coefficient itself, from its local Taylor expansion.
pub fn eval_jet(fam: &CoefficientFamily, z: Complex64) -> Result<Jet3> {
    let s = fam.series_at(z, 3)?;
    let a = s.coeffs();
    Ok(Jet3::new(a[0], a[1], a[2] * 2.0, a[3] * 6.0))
}

/// Jet of an arbitrary analytic callable by Richardson-extrapolated central
/// differences along the real direction. Returns the jet and an error
/// estimate (largest last-column correction over the three derivatives).
///
/// The initial step is `1e−3·(1 − |z|)`, which keeps every stencil point
/// inside the disc.
pub fn numeric_jet<F>(f: F, z: Complex64) -> Result<(Jet3, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    const LEVELS: usize = 6;
    let gap = 1.0 - z.norm();
    if !(gap > 0.0) {
        return Err(Error::OutsideDisc(z));
    }
    let h0 = 1e-3 * gap;
    if h0 < 1e-12 {
        return Err(Error::StepUnderflow(z));
    }
    let f0 = f(z)?;
    let mut tables: [Vec<Vec<Complex64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for level in 0..LEVELS {
        let h = h0 / 2f64.powi(level as i32);
        let hc = c(h);
        let fp = f(z + hc)?;
        let fm = f(z - hc)?;
        let fp2 = f(z + hc * 2.0)?;
        let fm2 = f(z - hc * 2.0)?;
        let raw = [
            (fp - fm) / (2.0 * h),
            (fp - f0 * 2.0 + fm) / (h * h),
            (fp2 - fp * 2.0 + fm * 2.0 - fm2) / (2.0 * h * h * h),
        ];
        for (d, table) in tables.iter_mut().enumerate() {
            let mut row = vec![raw[d]];
            if let Some(prev) = table.last() {
                for m in 1..=level {
                    let factor = 4f64.powi(m as i32);
                    let val = (row[m - 1] * factor - prev[m - 1]) / (factor - 1.0);
                    row.push(val);
                }
            }
            table.push(row);
        }
    }
    // Pick, per derivative, the diagonal entry with the smallest correction.
    let mut best = [c(0.0); 3];
    let mut err = 0.0f64;
    for (d, table) in tables.iter().enumerate() {
        let mut chosen = table[0][0];
        let mut chosen_err = f64::INFINITY;
        for k in 1..table.len() {
            let e = (table[k][k] - table[k - 1][k - 1]).norm();
            if e < chosen_err {
                chosen_err = e;
                chosen = table[k][k];
            }
        }
        best[d] = chosen;
        err = err.max(chosen_err);
    }
    Ok((Jet3::new(f0, best[0], best[1], best[2]), err))
}

/// `N_A(z) = |A(z)|(1 − |z|²)²`.
pub fn nehari_functional(fam: &CoefficientFamily, z: Complex64) -> Result<f64> {
    let a = fam.eval(z)?;
    let w = 1.0 - z.norm_sqr();
    Ok(a.norm() * w * w)
}

/// `N_A` at `(1 − gap)·e^{iθ}`, with `1 − |z|²` formed from the gap.
pub fn nehari_functional_polar(fam: &CoefficientFamily, gap: f64, angle: f64) -> Result<f64> {
    let z = Complex64::from_polar(1.0 - gap, angle);
    let a = fam.eval(z)?;
    let w = gap * (2.0 - gap);
    Ok(a.norm() * w * w)
}

/// The coefficient `A = (p')² + S_p/2` induced by a locally univalent `p`,
/// for which `(p')^{−1/2} sin p` and `(p')^{−1/2} cos p` solve the equation.
pub fn coefficient_from_p<P>(p_jet: P) -> impl Fn(Complex64) -> Result<Complex64>
where
    P: Fn(Complex64) -> Result<Jet3>,
{
    move |z| {
        let j = p_jet(z)?;
        Ok(j.f1 * j.f1 + schwarzian(&j)? * 0.5)
    }
}

/// Hand-differentiated jet of `p₁(z) = log L`, `L = log(e^e/(1−z)) = e − log(1−z)`.
pub fn loglog_p_jet(z: Complex64) -> Result<Jet3> {
    CoefficientFamily::LogLog.check_point(z)?;
    let u = (one() - z).inv();
    let l = c(E) - (one() - z).ln();
    let p1 = u / l;
    let p2 = u * u * (l - 1.0) / (l * l);
    let p3 = u * u * u * (l * l * 2.0 - l * 3.0 + 2.0) / (l * l * l);
    Ok(Jet3::new(l.ln(), p1, p2, p3))
}

/// Hand-differentiated jet of `p₂(z) = M^q`, `M = log(e/(1−z)) = 1 − log(1−z)`.
pub fn powlog_p_jet(q: f64, z: Complex64) -> Result<Jet3> {
    CoefficientFamily::PowLog { q }.check_point(z)?;
    let u = (one() - z).inv();
    let m = one() - (one() - z).ln();
    let p0 = m.powf(q);
    let p1 = m.powf(q - 1.0) * u * q;
    let p2 = m.powf(q - 2.0) * u * u * (m + (q - 1.0)) * q;
    let p3 = m.powf(q - 3.0) * u * u * u * (m * m * 2.0 + m * (3.0 * q - 3.0) + (q - 1.0) * (q - 2.0)) * q;
    Ok(Jet3::new(p0, p1, p2, p3))
}

/// Grid maximum of `|f(z)|(1 − |z|²)^p` over `radii × angles`.
pub fn growth_norm_estimate<F>(f: F, p: f64, radii: &[f64], angles: &[f64]) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut best = 0.0f64;
    for &r in radii {
        let w = (1.0 - r * r).powf(p);
        for &t in angles {
            let v = f(Complex64::from_polar(r, t))?.norm() * w;
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}
