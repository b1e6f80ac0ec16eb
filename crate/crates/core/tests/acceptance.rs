//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Reference values come from closed-form oracles written here, independent
//! of the library code paths being checked.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use disc_lab::analytic::{nehari_functional, CoefficientFamily};
use disc_lab::hypgeom::{hyp_midpoint, mobius_phi, pseudo_disc_to_euclidean, rho_h, rho_p, PseudoHyperbolicDisc};
use disc_lab::ode::{
    closed_form_solution, reference_basis, wronskian, BasisAtlas, ClosedForm, ClosedFormSolution, InitialConditions,
    SolutionHandle,
};
use disc_lab::theorems::{
    carleson_constant, check_growth, check_horodisc, check_nehari, check_separation, dyadic_squares_at,
    growth_trend, integral_limit, psi_horo, psi_sep, sampled_max_zero_count, t_c, PolarGrid, Trend, Verdict,
};
use disc_lab::zeros::{locate_zeros, oracle_zeros, ZeroSequence};
use disc_lab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Largest distance from an expected zero to its nearest found zero, after
/// checking the counts agree.
fn match_zeros(found: &[Complex64], expected: &[Complex64]) -> std::result::Result<f64, String> {
    ensure(found.len() == expected.len(), || format!("found {} zeros, expected {}", found.len(), expected.len()))?;
    let mut worst = 0.0f64;
    for e in expected {
        let d = found.iter().map(|f| (f - e).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

fn hille_example_zeros(k: f64) -> Vec<Complex64> {
    let w = Complex64::from_polar(k.cbrt(), PI / 3.0);
    let z1 = (c(1.0) - w) / (c(1.0) + w);
    vec![z1, z1.conj()]
}

/// Roots of `P_n` by Newton from the standard cosine guesses.
fn legendre_roots(n: u32) -> Vec<f64> {
    let eval = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        if n == 0 {
            return (1.0, 0.0);
        }
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
    };
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = eval(x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
            x
        })
        .collect()
}

fn crit_hille() -> Outcome {
    let fam = CoefficientFamily::Hille { a: -8.0 };
    let mut worst = 0.0f64;
    for k in [1.0, 0.5, 0.1] {
        let h = ClosedFormSolution::combination(&fam, c(1.0), c(k)).map_err(|e| e.to_string())?.to_handle().map_err(|e| e.to_string())?;
        let zs = locate_zeros(&h, 0.99, 1e-12).map_err(|e| e.to_string())?;
        let err = match_zeros(&zs.points(), &hille_example_zeros(k)).map_err(|e| format!("k = {k}: {e}"))?;
        ensure(err < 1e-8, || format!("k = {k}: zero error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("2 zeros for each k, max error {worst:.1e}"))
}

fn crit_legendre() -> Outcome {
    let mut worst = 0.0f64;
    for n in 0..=5u32 {
        let h = closed_form_solution(ClosedForm::LegendreP { n }).to_handle().map_err(|e| e.to_string())?;
        let zs = locate_zeros(&h, 0.999, 1e-12).map_err(|e| e.to_string())?;
        let roots: Vec<Complex64> = legendre_roots(n).into_iter().map(c).collect();
        let err = match_zeros(&zs.points(), &roots).map_err(|e| format!("n = {n}: {e}"))?;
        ensure(err < 1e-8, || format!("n = {n}: zero error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("n zeros for n = 0..5, max error {worst:.1e}"))
}

fn crit_schwarz() -> Outcome {
    let h = closed_form_solution(ClosedForm::SchwarzSin { gamma: 1.0 }).to_handle().map_err(|e| e.to_string())?;
    let zs = locate_zeros(&h, 0.995, 1e-12).map_err(|e| e.to_string())?;
    let expected: Vec<Complex64> =
        (-3i32..=3).map(|k| c((k as f64 * PI / 2.0).tanh())).filter(|z| z.norm() <= 0.995).collect();
    let err = match_zeros(&zs.points(), &expected)?;
    ensure(err < 1e-7, || format!("zero error {err:e}"))?;
    let real_axis = PolarGrid::new(2, 40).map_err(|e| e.to_string())?;
    let r = check_nehari(&CoefficientFamily::SchwarzSin { gamma: 1.0 }, &real_axis).map_err(|e| e.to_string())?;
    let sup = r.params["sup"].as_f64().ok_or("missing sup")?;
    ensure((sup - 5.0).abs() < 1e-6 && r.verdict == Verdict::Violated, || format!("sup N = {sup}"))?;
    Ok(format!("{} zeros, error {err:.1e}; sup N = {sup}", zs.len()))
}

fn crit_nehari_sharp() -> Outcome {
    let fam = CoefficientFamily::NehariSharp;
    for x in [0.0, 0.5, 0.999] {
        let n = nehari_functional(&fam, c(x)).map_err(|e| e.to_string())?;
        let want = 0.75 * (1.0 + x) * (1.0 + x);
        ensure((n - want).abs() < 1e-12, || format!("N({x}) = {n}, want {want}"))?;
    }
    let m = sampled_max_zero_count(&fam, 100, 0.99).map_err(|e| e.to_string())?;
    ensure(m <= 1, || format!("a sampled solution has {m} zeros"))?;
    Ok(format!("N_A matches 0.75(1+x)^2; max zeros over 100-point net = {m}"))
}

/// Zero sets of 50 random combinations per Legendre family, shared by the
/// separation and horodisc criteria.
fn legendre_samples() -> std::result::Result<Vec<(u32, Vec<ZeroSequence>)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for n in [2u32, 3, 4] {
        let fam = CoefficientFamily::Legendre { n };
        let (f1, f2) = reference_basis(&fam).ok_or("no basis")?;
        let ic1 = closed_form_solution(f1).initial_conditions().map_err(|e| e.to_string())?;
        let ic2 = closed_form_solution(f2).initial_conditions().map_err(|e| e.to_string())?;
        let atlas = BasisAtlas::new(fam).map_err(|e| e.to_string())?;
        let mut sets = Vec::new();
        for _ in 0..50 {
            let alpha = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let beta = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let h = SolutionHandle::with_atlas(atlas.clone(), InitialConditions::combine(alpha, &ic1, beta, &ic2));
            sets.push(locate_zeros(&h, 0.99, 1e-12).map_err(|e| e.to_string())?);
        }
        out.push((n, sets));
    }
    Ok(out)
}

fn crit_separation(samples: &[(u32, Vec<ZeroSequence>)]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut pairs = 0u64;
    for (n, sets) in samples {
        let cc = 2.0 * (*n as f64) * (*n as f64 + 1.0);
        for zs in sets {
            let r = check_separation(zs, cc).map_err(|e| e.to_string())?;
            pairs += r.params["applicable_pairs"].as_u64().unwrap_or(0);
            if let Some(m) = r.margin {
                worst = worst.min(m);
            }
            ensure(r.verdict == Verdict::Holds, || format!("n = {n}: margin {:?}", r.margin))?;
        }
    }
    Ok(format!("{pairs} applicable pairs, min margin {worst:.3}"))
}

fn crit_horodisc(samples: &[(u32, Vec<ZeroSequence>)]) -> Outcome {
    let mut checked = 0;
    for (n, sets) in samples {
        let cc = 2.0 * (*n as f64) * (*n as f64 + 1.0);
        for zs in sets {
            let r = check_horodisc(zs, cc).map_err(|e| e.to_string())?;
            ensure(r.verdict == Verdict::Holds, || format!("n = {n}: margin {:?}", r.margin))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} solutions hold"))
}

fn crit_integral() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.5, 1.0, 2.0] {
        let v = integral_limit(p, 0.0, 1.0 - 1e-5).map_err(|e| e.to_string())?;
        let want = 1.0 / (4.0 * p * (p + 1.0));
        let rel = (v - want).abs() / want;
        ensure(rel < 0.01, || format!("p = {p}: {v} vs {want}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("max relative deviation {worst:.2e}"))
}

fn crit_proof_constants() -> Outcome {
    let abs_a = 1.0 - 1e-10;
    let mut failures = Vec::new();
    let mut worst_sep = 0.0f64;
    let mut worst_horo = 0.0f64;
    for cc in [0.1, 1.0, 10.0] {
        let sep = psi_sep(cc, abs_a).map_err(|e| e.to_string())?;
        let horo = psi_horo(cc, abs_a).map_err(|e| e.to_string())?;
        let (ds, dh) = ((sep - 2.0 * (8.0 * cc).cbrt()).abs(), (horo - 2.0 * cc).abs());
        worst_sep = worst_sep.max(ds);
        worst_horo = worst_horo.max(dh);
        if ds >= 1e-6 {
            failures.push(format!("psi_sep(C = {cc}) off by {ds:.2e}"));
        }
        if dh >= 1e-6 {
            failures.push(format!("psi_horo(C = {cc}) off by {dh:.2e}"));
        }
    }
    for cc in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let t = t_c(cc).map_err(|e| e.to_string())?;
        if !(t > 0.0 && t < 1.0 / 3.0) {
            failures.push(format!("t_C({cc}) = {t}"));
        }
    }
    let summary = format!("psi_sep dev {worst_sep:.2e}, psi_horo dev {worst_horo:.2e}, t_C in (0, 1/3)");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn random_disc_point(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    Complex64::from_polar(r_max * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

fn crit_metric() -> Outcome {
    const CASES: usize = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut inv, mut inv_err, mut mid, mut disc_bad) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for _ in 0..CASES {
        let a = random_disc_point(&mut rng, 0.9);
        let z1 = random_disc_point(&mut rng, 0.9);
        let z2 = random_disc_point(&mut rng, 0.9);
        let e = |x: disc_lab::Result<Complex64>| x.map_err(|e| e.to_string());
        let d0 = rho_p(z1, z2).map_err(|e| e.to_string())?;
        let d1 = rho_p(e(mobius_phi(a, z1))?, e(mobius_phi(a, z2))?).map_err(|e| e.to_string())?;
        inv = inv.max((d0 - d1).abs());
        inv_err = inv_err.max((e(mobius_phi(a, e(mobius_phi(a, z1))?))? - z1).norm());
        let xi = e(hyp_midpoint(z1, z2))?;
        let h = rho_h(z1, z2).map_err(|e| e.to_string())?;
        let (h1, h2) = (rho_h(z1, xi).map_err(|e| e.to_string())?, rho_h(xi, z2).map_err(|e| e.to_string())?);
        mid = mid.max((h1 - h / 2.0).abs()).max((h2 - h / 2.0).abs());
        let r = rng.gen_range(0.05..0.95);
        let disc = PseudoHyperbolicDisc::new(a, r).map_err(|e| e.to_string())?;
        let (center, radius) = pseudo_disc_to_euclidean(&disc);
        let w = random_disc_point(&mut rng, 0.999);
        let by_metric = rho_p(w, a).map_err(|e| e.to_string())? < r;
        let by_disc = (w - center).norm() < radius;
        if by_metric != by_disc && ((w - center).norm() - radius).abs() > 1e-12 {
            disc_bad += 1;
        }
    }
    ensure(inv < 1e-12, || format!("Möbius invariance error {inv:e}"))?;
    ensure(inv_err < 1e-14, || format!("involution error {inv_err:e}"))?;
    ensure(mid < 1e-12, || format!("midpoint error {mid:e}"))?;
    ensure(disc_bad == 0, || format!("{disc_bad} disc classification disagreements"))?;
    Ok(format!("{CASES} cases per suite; invariance {inv:.1e}, involution {inv_err:.1e}, midpoint {mid:.1e}"))
}

fn crit_growth() -> Outcome {
    let r_grid: Vec<f64> = (2..=6).map(|j| 1.0 - 10f64.powi(-j)).collect();
    let fam = CoefficientFamily::Growth { k: 3.0 };
    let r = check_growth(&fam, 3.0, 0.6, &r_grid).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds, || format!("basis trend at p = 0.6: {}", r.params["trends"]))?;
    let f = ClosedForm::Growth { k: 3.0 };
    let t = growth_trend(|z| f.eval(z).map(|p| p.0), 0.5, &r_grid, 64).map_err(|e| e.to_string())?;
    ensure(t.trend == Trend::Diverging, || format!("closed form at p = 0.5: {:?}", t.sups))?;
    ensure(t.sups.windows(2).all(|w| w[1] > w[0]), || format!("not monotone: {:?}", t.sups))?;
    Ok(format!("basis bounded at p = 0.6; closed form sups {:?} at p = 0.5", t.sups.iter().map(|s| (s * 100.0).round() / 100.0).collect::<Vec<_>>()))
}

fn all_closed_forms() -> Vec<ClosedForm> {
    let mut v = vec![
        ClosedForm::SchwarzSin { gamma: 1.0 },
        ClosedForm::SchwarzCos { gamma: 1.0 },
        ClosedForm::NehariFirst,
        ClosedForm::NehariSecond,
        ClosedForm::HilleFirst { a: -8.0 },
        ClosedForm::HilleSecond { a: -8.0 },
        ClosedForm::HilleFirst { a: -15.0 },
        ClosedForm::HilleSecond { a: -15.0 },
        ClosedForm::Growth { k: 3.0 },
        ClosedForm::Growth { k: 0.0 },
        ClosedForm::LogLogSin,
        ClosedForm::LogLogCos,
        ClosedForm::PowLogSin { q: 0.5 },
        ClosedForm::PowLogCos { q: 0.5 },
    ];
    for n in 0..=5 {
        v.push(ClosedForm::LegendreP { n });
        v.push(ClosedForm::LegendreQ { n });
    }
    v
}

fn crit_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for cf in all_closed_forms() {
        let exact = closed_form_solution(cf);
        let h = exact.to_handle().map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let z = random_disc_point(&mut rng, 0.95);
            let (f, fp) = exact.eval_pair(z).map_err(|e| e.to_string())?;
            let (g, gp) = h.eval_pair(z).map_err(|e| e.to_string())?;
            // relative to the size of the jet, so isolated zeros of f do not blow up the ratio
            let rel = ((f - g).norm() + (fp - gp).norm()) / (f.norm() + fp.norm());
            ensure(rel < 1e-7, || format!("{cf:?} at {z}: relative error {rel:e}"))?;
            worst = worst.max(rel);
        }
    }
    let mut wworst = 0.0f64;
    for fam in [
        CoefficientFamily::NehariSharp,
        CoefficientFamily::Hille { a: -8.0 },
        CoefficientFamily::Legendre { n: 3 },
        CoefficientFamily::SchwarzSin { gamma: 1.0 },
        CoefficientFamily::LogLog,
        CoefficientFamily::PowLog { q: 0.5 },
    ] {
        let (f1, f2) = reference_basis(&fam).ok_or("no basis")?;
        let (h1, h2) = (
            closed_form_solution(f1).to_handle().map_err(|e| e.to_string())?,
            closed_form_solution(f2).to_handle().map_err(|e| e.to_string())?,
        );
        let w0 = wronskian(&h1, &h2, c(0.0)).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let z = random_disc_point(&mut rng, 0.95);
            let w = wronskian(&h1, &h2, z).map_err(|e| e.to_string())?;
            let rel = (w - w0).norm() / w0.norm();
            ensure(rel < 1e-9, || format!("{fam}: Wronskian drift {rel:e} at {z}"))?;
            wworst = wworst.max(rel);
        }
    }
    Ok(format!("max relative error {worst:.1e}; Wronskian drift {wworst:.1e}"))
}

fn crit_carleson() -> Outcome {
    let zs = oracle_zeros(&closed_form_solution(ClosedForm::LogLogSin), 1.0).map_err(|e| e.to_string())?;
    let ks: Vec<f64> = [64u32, 256, 1024].iter().map(|&j| carleson_constant(&zs, &dyadic_squares_at(0.0, j)).0).collect();
    let (lo, hi) = ks.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &k| (lo.min(k), hi.max(k)));
    ensure(lo > 0.0 && hi <= 1.1 * lo, || format!("K across levels: {ks:?}"))?;
    Ok(format!("{} zeros; K = {ks:.4?} across 2^-64, 2^-256, 2^-1024", zs.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
}

fn report(crit: &Criterion, outcome: Outcome, elapsed: Duration) -> bool {
    let over = crit.budget.is_some_and(|b| elapsed > b);
    let (ok, detail) = match outcome {
        Ok(d) if over => (false, format!("{d}; over budget {:?}", crit.budget.unwrap())),
        Ok(d) => (true, d),
        Err(e) => (false, e),
    };
    println!(
        "[{}] {:>2} {:<28} {:>8.2}s  {}",
        if ok { "PASS" } else { "FAIL" },
        crit.id,
        crit.name,
        elapsed.as_secs_f64(),
        detail
    );
    ok
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut all_ok = true;
    let mut run = |id, name, budget, f: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        all_ok &= report(&Criterion { id, name, budget }, out, t0.elapsed());
    };
    run(1, "hille zero pairs", secs(5), &crit_hille);
    run(2, "legendre zero counts", secs(10), &crit_legendre);
    run(3, "schwarz zeros and sup N", None, &crit_schwarz);
    run(4, "nehari sharpness", None, &crit_nehari_sharp);

    let t0 = Instant::now();
    let samples = legendre_samples();
    let sampling = t0.elapsed();
    let with_samples = |check: fn(&[(u32, Vec<ZeroSequence>)]) -> Outcome| -> Outcome {
        match &samples {
            Ok(s) => check(s),
            Err(e) => Err(format!("zero sampling failed: {e}")),
        }
    };
    let t1 = Instant::now();
    let sep = with_samples(crit_separation);
    all_ok &= report(&Criterion { id: 5, name: "separation bound", budget: secs(60) }, sep, sampling + t1.elapsed());
    let t2 = Instant::now();
    let horo = with_samples(crit_horodisc);
    all_ok &= report(&Criterion { id: 6, name: "horodisc bound", budget: None }, horo, t2.elapsed());

    let mut run = |id, name, budget, f: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        all_ok &= report(&Criterion { id, name, budget }, out, t0.elapsed());
    };
    run(7, "integral limit", None, &crit_integral);
    run(8, "proof-constant limits", None, &crit_proof_constants);
    run(9, "metric toolkit", secs(10), &crit_metric);
    run(10, "growth trend", None, &crit_growth);
    run(11, "solver cross-validation", None, &crit_cross_validation);
    run(12, "carleson stability", None, &crit_carleson);

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
