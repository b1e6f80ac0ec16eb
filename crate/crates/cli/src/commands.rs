use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use disc_lab::analytic::{nehari_functional, parse_complex, CoefficientFamily};
use disc_lab::hypgeom::{rho_h, CarlesonSquare};
use disc_lab::ode::{
    closed_form_solution, BasisAtlas, ClosedForm, ClosedFormSolution, InitialConditions,
    SolutionHandle,
};
use disc_lab::plot::{render_svg, Figure};
use disc_lab::theorems::{self as th, BoundReport, PolarGrid, Verdict};
use disc_lab::zeros::{locate_zeros, oracle_zeros, read_zeros_csv, write_zeros_csv, ZeroSequence};
use disc_lab::Complex64;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{ExampleArgs, Failure, PlotArgs};

const DEFAULT_RMAX: f64 = 0.99;
const DEFAULT_TOL: f64 = 1e-12;
const DEFAULT_SAMPLES: usize = 8;
const THEOREMS: [&str; 9] =
    ["nehari", "kraus", "cs-constant", "separation", "horodisc", "carleson", "growth", "integral-limit", "accumulation"];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn family(cfg: &RunConfig) -> Result<CoefficientFamily, Failure> {
    let spec = cfg.coef.as_deref().ok_or_else(|| Failure::Usage("missing --coef".into()))?;
    let fam: CoefficientFamily = spec.parse()?;
    fam.validate()?;
    Ok(fam)
}

fn complex_pair(s: &str, what: &str) -> Result<(Complex64, Complex64), Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| Failure::Usage(format!("{what} expects two values, got {s:?}")))?;
    Ok((parse_complex(a)?, parse_complex(b)?))
}

fn handle_cap(rmax: f64) -> f64 {
    (1.0 - 0.5 * (1.0 - rmax)).max(0.99999)
}

/// The solution named by `--sol` or `--ic`, if any.
fn explicit_solution(cfg: &RunConfig, fam: &CoefficientFamily, atlas: &std::sync::Arc<BasisAtlas>) -> Result<Option<(String, SolutionHandle)>, Failure> {
    let rmax = cfg.rmax.unwrap_or(DEFAULT_RMAX);
    let ic = if let Some(s) = &cfg.sol {
        let (alpha, beta) = complex_pair(s, "--sol")?;
        let combo = ClosedFormSolution::combination(fam, alpha, beta)
            .map_err(|_| Failure::Usage(format!("{fam} has no reference basis; use --ic")))?;
        (format!("sol={s}"), combo.initial_conditions()?)
    } else if let Some(s) = &cfg.ic {
        let (f0, f1) = complex_pair(s, "--ic")?;
        let ic = InitialConditions::new(f0, f1);
        if ic.is_trivial() {
            return Err(Failure::Usage("initial data must not both vanish".into()));
        }
        (format!("ic={s}"), ic)
    } else {
        return Ok(None);
    };
    let h = SolutionHandle::with_atlas(atlas.clone(), ic.1).with_radius_cap(handle_cap(rmax))?;
    Ok(Some((ic.0, h)))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

pub fn zeros(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = family(cfg)?;
    let atlas = BasisAtlas::new(fam.clone())?;
    let (label, h) = explicit_solution(cfg, &fam, &atlas)?.ok_or_else(|| Failure::Usage("zeros needs --sol or --ic".into()))?;
    let zs = locate_zeros(&h, cfg.rmax.unwrap_or(DEFAULT_RMAX), cfg.tol.unwrap_or(DEFAULT_TOL))?;
    let mut buf = Vec::new();
    write_zeros_csv(&zs, &mut buf)?;
    write_output(cfg.out.as_deref(), &buf)?;
    if !zs.unresolved.is_empty() {
        return Err(Failure::Numeric(format!("{fam} {label}: {} cells left unresolved", zs.unresolved.len())));
    }
    Ok(())
}

/// Solutions examined by the zero-based checks: the one requested, or a
/// deterministic net `cos φ·U + sin φ·V` of the canonical basis.
fn solution_set(cfg: &RunConfig, fam: &CoefficientFamily) -> Result<Vec<(String, SolutionHandle)>, Failure> {
    let atlas = BasisAtlas::new(fam.clone())?;
    if let Some(one) = explicit_solution(cfg, fam, &atlas)? {
        return Ok(vec![one]);
    }
    let n = cfg.samples.unwrap_or(DEFAULT_SAMPLES).max(1);
    let cap = handle_cap(cfg.rmax.unwrap_or(DEFAULT_RMAX));
    (0..n)
        .map(|k| {
            let phi = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let ic = InitialConditions::real(phi.cos(), phi.sin());
            let h = SolutionHandle::with_atlas(atlas.clone(), ic).with_radius_cap(cap)?;
            Ok((format!("ic={:.6},{:.6}", phi.cos(), phi.sin()), h))
        })
        .collect()
}

struct Verifier<'a> {
    cfg: &'a RunConfig,
    fam: CoefficientFamily,
    grid: PolarGrid,
    zero_sets: Option<Vec<ZeroSequence>>,
    cs: Option<f64>,
}

impl Verifier<'_> {
    fn zero_sets(&mut self) -> Result<&[ZeroSequence], Failure> {
        if self.zero_sets.is_none() {
            let rmax = self.cfg.rmax.unwrap_or(DEFAULT_RMAX);
            let tol = self.cfg.tol.unwrap_or(DEFAULT_TOL);
            let mut sets = Vec::new();
            for (label, h) in solution_set(self.cfg, &self.fam)? {
                sets.push(locate_zeros(&h, rmax, tol)?.with_label(label));
            }
            self.zero_sets = Some(sets);
        }
        Ok(self.zero_sets.as_deref().unwrap_or_default())
    }

    fn cs_constant(&mut self) -> Result<f64, Failure> {
        if let Some(v) = self.cfg.c {
            return Ok(v);
        }
        if self.cs.is_none() {
            self.cs = Some(th::estimate_cs_constant(&self.fam, &self.grid)?);
        }
        Ok(self.cs.unwrap_or(f64::INFINITY))
    }

    fn per_solution<F>(&mut self, name: &str, check: F) -> Result<BoundReport, Failure>
    where
        F: Fn(&ZeroSequence, f64) -> disc_lab::Result<BoundReport>,
    {
        let cc = self.cs_constant()?;
        let reports = self.zero_sets()?.iter().map(|zs| check(zs, cc)).collect::<disc_lab::Result<Vec<_>>>()?;
        Ok(BoundReport::merge(name, reports))
    }

    fn report(&mut self, theorem: &str) -> Result<BoundReport, Failure> {
        let fam = self.fam.clone();
        let grid = self.grid;
        Ok(match theorem {
            "nehari" => th::check_nehari(&fam, &grid)?,
            "kraus" => {
                let max_count = self.zero_sets()?.iter().map(ZeroSequence::len).max().unwrap_or(0);
                th::check_kraus(&fam, &grid, max_count)?
            }
            "cs-constant" => th::cs_constant_report(&fam, &grid)?,
            "separation" => self.per_solution("separation", th::check_separation)?,
            "horodisc" => self.per_solution("horodisc", th::check_horodisc)?,
            "carleson" => {
                let levels = grid.levels.min(64);
                let squares: Vec<CarlesonSquare> = (0..grid.angles.min(64))
                    .flat_map(|a| th::dyadic_squares_at(2.0 * std::f64::consts::PI * a as f64 / grid.angles.min(64) as f64, levels))
                    .collect();
                let reports =
                    self.zero_sets()?.iter().map(|zs| th::check_carleson(zs, &squares)).collect::<disc_lab::Result<Vec<_>>>()?;
                BoundReport::merge("carleson", reports)
            }
            "growth" => {
                let k = match self.cfg.k {
                    Some(k) => k,
                    None => grid.nodes().try_fold(0.0f64, |m, (g, t)| {
                        disc_lab::analytic::nehari_functional_polar(&fam, g, t).map(|v| m.max(v))
                    })?,
                };
                let p = self.cfg.p.unwrap_or(th::growth_exponent(k) + 0.1);
                let r_grid: Vec<f64> = (2..=6).map(|j| 1.0 - 10f64.powi(-j)).collect();
                th::check_growth(&fam, k, p, &r_grid)?
            }
            "integral-limit" => th::integral_limit_report(self.cfg.p.unwrap_or(1.0), 1.0 - 1e-5)?,
            "accumulation" => match th::reference_pencil(&fam) {
                Ok(pencil) => {
                    let params: Vec<f64> = (0..=16).map(|m| 10f64.powf(-(m as f64) / 2.0)).collect();
                    let angle = self.cfg.zeta.unwrap_or(0.0);
                    th::accumulation_scan(&fam, angle, pencil, &params, &[0.5, 0.2, 0.1])?.to_bound_report()
                }
                Err(disc_lab::Error::Applicability(reason)) => {
                    let mut r = BoundReport::merge("accumulation", Vec::new());
                    r.params.insert("reason".into(), json!(reason));
                    r
                }
                Err(e) => return Err(e.into()),
            },
            other => return Err(Failure::Usage(format!("unknown theorem {other:?}"))),
        })
    }
}

pub fn verify(cfg: &RunConfig) -> Result<bool, Failure> {
    let fam = family(cfg)?;
    let names: Vec<String> = match &cfg.theorems {
        Some(t) if !t.is_empty() => t.iter().map(|s| s.trim().to_ascii_lowercase()).collect(),
        _ => return Err(Failure::Usage("verify needs --theorems".into())),
    };
    if let Some(bad) = names.iter().find(|n| !THEOREMS.contains(&n.as_str())) {
        return Err(Failure::Usage(format!("unknown theorem {bad:?}; expected one of {}", THEOREMS.join(", "))));
    }
    let grid = PolarGrid::new(cfg.angles.unwrap_or(256), cfg.levels.unwrap_or(40))?;
    let mut v = Verifier { cfg, fam, grid, zero_sets: None, cs: None };
    let mut reports = Vec::with_capacity(names.len());
    for n in &names {
        reports.push(v.report(n)?);
    }
    let text = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Numeric(e.to_string()))? + "\n";
    write_output(cfg.out.as_deref(), text.as_bytes())?;
    Ok(reports.iter().all(|r| r.verdict != Verdict::Violated))
}

fn parse_pair_f64(s: &str, sep: char, what: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("{what} expects two numbers separated by {sep:?}, got {s:?}"));
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn plot(args: &PlotArgs) -> Result<(), Failure> {
    let zeros = match &args.zeros {
        Some(p) => {
            let f = File::open(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            read_zeros_csv(f)?.points()
        }
        None => Vec::new(),
    };
    let carleson = args
        .carleson
        .iter()
        .map(|s| {
            let (angle, len) = parse_pair_f64(s, ':', "--carleson")?;
            Ok(CarlesonSquare::new(angle, len)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let omega = args.omega.as_deref().map(|s| parse_pair_f64(s, ',', "--omega")).transpose()?;
    if let Some((tau, rho)) = omega {
        disc_lab::hypgeom::omega_domain(tau, rho)?;
    }
    let fig = Figure { zeros, horodiscs: args.horodisc.map(|cc| (cc, args.directions)), carleson, omega, size: args.size };
    let svg = render_svg(&fig)?;
    write_output(args.out.as_deref(), svg.as_bytes())
}

fn zero_table(found: &ZeroSequence, expected: &ZeroSequence) -> Value {
    let err = expected
        .points()
        .iter()
        .map(|e| found.points().iter().map(|f| (f - e).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0f64, f64::max);
    json!({
        "found": found.len(),
        "expected": expected.len(),
        "max_error": if expected.is_empty() { json!(0.0) } else { json!(err) },
        "zeros": found.points().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    })
}

fn solver_vs_oracle(sol: &ClosedFormSolution, rmax: f64) -> Result<Value, Failure> {
    let found = locate_zeros(&sol.to_handle()?, rmax, DEFAULT_TOL)?;
    let oracle = oracle_zeros(sol, rmax)?;
    Ok(zero_table(&found, &oracle))
}

fn example_bundle(id: &str) -> Result<Value, Failure> {
    let grid = PolarGrid::default();
    Ok(match id {
        "1" => {
            let fam = CoefficientFamily::NehariSharp;
            let values: Vec<Value> = [0.0, 0.5, 0.999]
                .iter()
                .map(|&x| nehari_functional(&fam, c(x)).map(|n| json!({"x": x, "N": n, "closed_form": 0.75 * (1.0 + x) * (1.0 + x)})))
                .collect::<disc_lab::Result<_>>()?;
            let max_count = th::sampled_max_zero_count(&fam, 25, 0.99)?;
            json!({
                "example": 1,
                "family": fam.to_string(),
                "nehari_values": values,
                "max_zero_count_over_net": max_count,
                "kraus": th::check_kraus(&fam, &grid, max_count)?,
            })
        }
        "2" => {
            let fam = CoefficientFamily::Hille { a: -8.0 };
            let mut rows = Vec::new();
            for k in [1.0, 0.1, 0.01] {
                let sol = ClosedFormSolution::combination(&fam, c(1.0), c(k))?;
                let mut row = solver_vs_oracle(&sol, 0.999)?;
                let pts = oracle_zeros(&sol, 0.999)?.points();
                if pts.len() == 2 {
                    row["rho_h"] = json!(rho_h(pts[0], pts[1])?);
                    row["distance_to_one"] = json!((pts[0] - c(1.0)).norm());
                    row["geodesic_witness"] = serde_json::to_value(th::geodesic_witness(&fam, pts[0], pts[1], 200)?)
                        .map_err(|e| Failure::Numeric(e.to_string()))?;
                }
                row["k"] = json!(k);
                rows.push(row);
            }
            json!({"example": 2, "family": fam.to_string(), "pairs": rows})
        }
        "3" => {
            let k = 3.0;
            let fam = CoefficientFamily::Growth { k };
            let r_grid: Vec<f64> = (2..=6).map(|j| 1.0 - 10f64.powi(-j)).collect();
            let f = ClosedForm::Growth { k };
            let beta = th::growth_exponent(k);
            let trend = th::growth_trend(|z| f.eval(z).map(|p| p.0), beta, &r_grid, 64)?;
            json!({
                "example": 3,
                "family": fam.to_string(),
                "exponent": beta,
                "closed_form_at_exponent": trend,
                "basis_above_exponent": th::check_growth(&fam, k, beta + 0.1, &r_grid)?,
            })
        }
        "4" => {
            let mut rows = Vec::new();
            for n in 0..=5u32 {
                let sol = closed_form_solution(ClosedForm::LegendreP { n });
                let mut row = solver_vs_oracle(&sol, 0.999)?;
                row["n"] = json!(n);
                row["cs_constant"] = json!(th::estimate_cs_constant(&CoefficientFamily::Legendre { n }, &grid)?);
                rows.push(row);
            }
            json!({"example": 4, "solutions": rows})
        }
        "5" => {
            let loglog = oracle_zeros(&closed_form_solution(ClosedForm::LogLogSin), 1.0)?;
            let powlog = oracle_zeros(&closed_form_solution(ClosedForm::PowLogSin { q: 0.5 }), 1.0)?;
            let squares: Vec<CarlesonSquare> = [64u32, 256, 1024].iter().flat_map(|&j| th::dyadic_squares_at(0.0, j)).collect();
            let gaps = |zs: &ZeroSequence| zs.zeros.iter().map(|z| json!({"re": z.location.re, "im": z.location.im, "gap": z.gap})).collect::<Vec<_>>();
            let carleson_levels: Vec<Value> = [64u32, 256, 1024]
                .iter()
                .map(|&j| json!({"levels": j, "K": th::carleson_constant(&loglog, &th::dyadic_squares_at(0.0, j)).0}))
                .collect();
            json!({
                "example": 5,
                "loglog_zeros": gaps(&loglog),
                "powlog_zeros": gaps(&powlog),
                "carleson": carleson_levels,
                "carleson_report": th::check_carleson(&loglog, &squares)?,
            })
        }
        "schwarz" => {
            let fam = CoefficientFamily::SchwarzSin { gamma: 1.0 };
            let sol = closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 });
            json!({
                "example": "schwarz",
                "family": fam.to_string(),
                "zeros": solver_vs_oracle(&sol, 0.995)?,
                "nehari": th::check_nehari(&fam, &PolarGrid::new(2, 40)?)?,
            })
        }
        other => return Err(Failure::Usage(format!("unknown example {other:?}; expected 1-5 or schwarz"))),
    })
}

pub fn examples(args: &ExampleArgs) -> Result<(), Failure> {
    let bundle = example_bundle(&args.id)?;
    let path = args.out_dir.join(format!("example-{}.json", args.id));
    let text = serde_json::to_string_pretty(&bundle).map_err(|e| Failure::Numeric(e.to_string()))? + "\n";
    write_output(Some(&path), text.as_bytes())?;
    println!("{}", path.display());
    Ok(())
}
