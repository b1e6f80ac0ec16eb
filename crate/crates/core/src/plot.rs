//! Static SVG figures of the disc.
//!
//! Curves are emitted as sampled polylines with fixed-precision numbers, so
//! identical inputs give byte-identical files.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write;

use crate::error::Result;
use crate::hypgeom::{omega_domain, CarlesonSquare, Horodisc};

const ARC_SAMPLES: usize = 96;

/// Overlays drawn on top of the unit circle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub zeros: Vec<Complex64>,
    /// Horodisc parameter `C` and the number of equally spaced directions.
    pub horodiscs: Option<(f64, usize)>,
    pub carleson: Vec<CarlesonSquare>,
    /// `(τ, ρ)` of the four-arc domain.
    pub omega: Option<(f64, f64)>,
    pub size: Option<u32>,
}

struct Canvas {
    half: f64,
    scale: f64,
    out: String,
}

impl Canvas {
    fn x(&self, z: Complex64) -> f64 {
        self.half + self.scale * z.re
    }

    fn y(&self, z: Complex64) -> f64 {
        self.half - self.scale * z.im
    }

    fn polyline(&mut self, pts: &[Complex64], closed: bool, class: &str) {
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.4},{:.4}", if i == 0 { "M" } else { " L" }, self.x(p), self.y(p));
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(self.out, r#"  <path class="{class}" d="{d}"/>"#);
    }

    fn circle(&mut self, center: Complex64, radius: f64, class: &str) {
        let _ = writeln!(
            self.out,
            r#"  <circle class="{class}" cx="{:.4}" cy="{:.4}" r="{:.4}"/>"#,
            self.x(center),
            self.y(center),
            self.scale * radius
        );
    }
}

/// Points on the circle `D(center, |from − center|)` from `from` to `to`,
/// travelling in the direction that passes through `via`.
fn arc_through(center: Complex64, from: Complex64, to: Complex64, via: Complex64) -> Vec<Complex64> {
    let r = (from - center).norm();
    let a0 = (from - center).arg();
    let ccw = |b: f64| (b - a0).rem_euclid(2.0 * PI);
    let (span_to, span_via) = (ccw((to - center).arg()), ccw((via - center).arg()));
    let sweep = if span_via <= span_to { span_to } else { span_to - 2.0 * PI };
    (0..=ARC_SAMPLES)
        .map(|k| center + Complex64::from_polar(r, a0 + sweep * k as f64 / ARC_SAMPLES as f64))
        .collect()
}

/// Closed boundary of the four-arc domain, counter-clockwise from `e^{−iτ}`.
pub fn omega_boundary(tau: f64, rho: f64) -> Result<Vec<Complex64>> {
    let d = omega_domain(tau, rho)?;
    let [e_plus, g_plus, g_minus, e_minus] = d.corners();
    let i = Complex64::new(0.0, 1.0);
    let mut pts = arc_through(Complex64::new(0.0, 0.0), e_minus, e_plus, Complex64::new(1.0, 0.0));
    pts.extend(arc_through(d.c_plus, e_plus, g_plus, d.c_plus + i * d.small_radius).into_iter().skip(1));
    let big = Complex64::new(1.0 + rho, 0.0);
    pts.extend(arc_through(big, g_plus, g_minus, Complex64::new(rho, 0.0)).into_iter().skip(1));
    pts.extend(arc_through(d.c_minus, g_minus, e_minus, d.c_minus - i * d.small_radius).into_iter().skip(1));
    pts.pop();
    Ok(pts)
}

fn carleson_outline(q: &CarlesonSquare) -> Vec<Complex64> {
    if q.length >= 1.0 {
        return (0..ARC_SAMPLES).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / ARC_SAMPLES as f64)).collect();
    }
    let (lo, hi) = (q.arc_center - q.half_angle(), q.arc_center + q.half_angle());
    let inner = 1.0 - q.length;
    let at = |r: f64, k: usize| Complex64::from_polar(r, lo + (hi - lo) * k as f64 / ARC_SAMPLES as f64);
    let mut pts: Vec<Complex64> = (0..=ARC_SAMPLES).map(|k| at(1.0, k)).collect();
    pts.extend((0..=ARC_SAMPLES).rev().map(|k| at(inner, k)));
    pts
}

pub fn render_svg(fig: &Figure) -> Result<String> {
    let size = fig.size.unwrap_or(600).max(64);
    let half = size as f64 / 2.0;
    let mut cv = Canvas { half, scale: 0.95 * half, out: String::new() };
    let _ = writeln!(
        cv.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    cv.out.push_str(
        "  <style>.disc{fill:none;stroke:#000;stroke-width:1}.horo{fill:none;stroke:#2a7;stroke-width:0.6}\
         .carleson{fill:#48c;fill-opacity:0.15;stroke:#48c;stroke-width:0.6}.omega{fill:none;stroke:#c33;stroke-width:2}\
         .zero{fill:#000}</style>\n",
    );
    cv.circle(Complex64::new(0.0, 0.0), 1.0, "disc");
    if let Some((cc, n)) = fig.horodiscs {
        for k in 0..n {
            let h = Horodisc::new(2.0 * PI * k as f64 / n as f64, cc)?;
            cv.circle(h.center(), h.radius(), "horo");
        }
    }
    for q in &fig.carleson {
        cv.polyline(&carleson_outline(q), true, "carleson");
    }
    if let Some((tau, rho)) = fig.omega {
        cv.polyline(&omega_boundary(tau, rho)?, true, "omega");
    }
    for &z in &fig.zeros {
        let _ = writeln!(cv.out, r#"  <circle class="zero" cx="{:.4}" cy="{:.4}" r="2.5"/>"#, cv.x(z), cv.y(z));
    }
    cv.out.push_str("</svg>\n");
    Ok(cv.out)
}
