//! Truncated power series in a local variable `h`, used for Taylor
//! expansions of coefficients and solutions about a center.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<Complex64>,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Series {
    /// Zero series holding coefficients `0..=order`.
    pub fn zeros(order: usize) -> Self {
        Self { coeffs: vec![czero(); order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = c;
        s
    }

    /// `a + b·h`.
    pub fn affine(a: Complex64, b: Complex64, order: usize) -> Self {
        let mut s = Self::constant(a, order);
        if order >= 1 {
            s.coeffs[1] = b;
        }
        s
    }

    /// Takes the given coefficients, padded or truncated to `order`.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, czero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = Self::zeros(n);
        for k in 1..=n {
            out.coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::Degenerate("reciprocal of a series with zero constant term"));
        }
        let n = self.order();
        let mut b = vec![czero(); n + 1];
        b[0] = a0.inv();
        for k in 1..=n {
            let mut acc = czero();
            for j in 1..=k {
                acc += self.coeffs[j] * b[k - j];
            }
            b[k] = -acc * b[0];
        }
        Ok(Self { coeffs: b })
    }

    /// Principal logarithm; the constant term must avoid the branch cut of `ln`.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::Degenerate("logarithm of a series with zero constant term"));
        }
        let n = self.order();
        // (log s)' = s'/s, integrated term by term.
        let mut b = vec![czero(); n + 1];
        b[0] = a0.ln();
        for k in 1..=n {
            let mut acc = self.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= b[j] * (j as f64) * self.coeffs[k - j];
            }
            b[k] = acc / (a0 * k as f64);
        }
        Ok(Self { coeffs: b })
    }

    /// Principal power `s^α`, via the recurrence from `s·g' = α·s'·g`.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::Degenerate("power of a series with zero constant term"));
        }
        let n = self.order();
        let mut g = vec![czero(); n + 1];
        g[0] = a0.powf(alpha);
        for k in 1..=n {
            let mut acc = czero();
            for j in 1..=k {
                acc += self.coeffs[j] * g[k - j] * ((alpha + 1.0) * j as f64 - k as f64);
            }
            g[k] = acc / (a0 * k as f64);
        }
        Ok(Self { coeffs: g })
    }

    /// Value at `h` (Horner).
    pub fn eval(&self, h: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(czero(), |acc, c| acc * h + c)
    }

    /// Value and derivatives up to order `D − 1` at `h`.
    pub fn eval_derivatives<const D: usize>(&self, h: Complex64) -> [Complex64; D] {
        let mut out = [czero(); D];
        let n = self.order();
        // Horner on each derivative, coefficient k contributes k!/(k−d)! h^{k−d}.
        for (d, slot) in out.iter_mut().enumerate() {
            if d > n {
                break;
            }
            let mut acc = czero();
            for k in (d..=n).rev() {
                let mut falling = 1.0;
                for m in 0..d {
                    falling *= (k - m) as f64;
                }
                acc = acc * h + self.coeffs[k] * falling;
            }
            *slot = acc;
        }
        out
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        debug_assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        Series { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        debug_assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        Series { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let mut out = vec![czero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}

/// Taylor coefficients of the solution of `f'' + A f = 0` with `f(0) = f0`,
/// `f'(0) = f1`, given the coefficients `a` of `A` in the same local variable:
/// `c_{n+2} = −(Σ_{j=0}^{n} a_j c_{n−j}) / ((n+1)(n+2))`.
pub fn ode_recursion(a: &[Complex64], f0: Complex64, f1: Complex64, order: usize) -> Vec<Complex64> {
    let mut c = vec![czero(); order + 1];
    c[0] = f0;
    if order >= 1 {
        c[1] = f1;
    }
    for n in 0..order.saturating_sub(1) {
        let mut acc = czero();
        for j in 0..=n.min(a.len().saturating_sub(1)) {
            acc += a[j] * c[n - j];
        }
        c[n + 2] = -acc / ((n + 1) * (n + 2)) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn geometric_reciprocal() {
        // 1/(1 − h) = Σ h^k
        let s = Series::affine(c(1.0), c(-1.0), 10).recip().unwrap();
        for k in 0..=10 {
            assert!((s.coeffs()[k] - c(1.0)).norm() < 1e-15);
        }
        assert!(Series::zeros(3).recip().is_err());
    }

    #[test]
    fn log_and_power_match_closed_forms() {
        let h = Complex64::new(0.1, 0.05);
        let base = Series::affine(Complex64::new(0.7, 0.2), c(-1.0), 40);
        let l = base.ln().unwrap();
        assert!((l.eval(h) - (Complex64::new(0.7, 0.2) - h).ln()).norm() < 1e-13);
        let p = base.powf(-1.5).unwrap();
        assert!((p.eval(h) - (Complex64::new(0.7, 0.2) - h).powf(-1.5)).norm() < 1e-12);
    }

    #[test]
    fn product_and_derivatives() {
        let a = Series::affine(c(1.0), c(2.0), 4);
        let sq = &a * &a; // 1 + 4h + 4h²
        assert_eq!(sq.coeffs()[..3], [c(1.0), c(4.0), c(4.0)]);
        let d: [Complex64; 3] = sq.eval_derivatives(c(0.5));
        assert_eq!(d, [c(4.0), c(8.0), c(8.0)]);
    }

    #[test]
    fn recursion_for_constant_coefficient() {
        // A ≡ 1, f(0) = 0, f'(0) = 1 gives sin.
        let coeffs = ode_recursion(&[c(1.0)], c(0.0), c(1.0), 30);
        let s = Series::from_coeffs(coeffs, 30);
        assert!((s.eval(c(0.5)) - c(0.5f64.sin())).norm() < 1e-15);
    }
}
