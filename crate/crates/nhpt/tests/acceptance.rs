//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use nhpt::commands::{verification_reports, SuiteChoice};
use nhpt_core::dynamics::{
    basis_state, contour_asymptotics, integrate, truncation_study, ContourMode, IntegrationConfig,
};
use nhpt_core::operators::{eigendecompose, matrix_elements, EigenSystem, GeneralOperator};
use nhpt_core::perturbation::{first_order, weak_limit_compare};
use nhpt_core::pulses::Pulse;
use nhpt_core::scenarios::{model_system, run_figure, Figure, Model, Verdict};
use nhpt_core::spectrum::{numerical_spectrum, numerical_spectrum_with, one_sidedness, HalfLine, SpectrumOptions};
use nhpt_core::verify::{check_first_order_symmetry, generate, trial_seed, PulseFamily, RandomSystemSpec};
use nhpt_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Runs `nhpt reproduce <fig>` into `dir` and returns the parsed verdict.txt.
fn reproduce_via_cli(fig: &str, dir: &Path) -> Result<(Vec<(String, String)>, Duration), String> {
    let start = Instant::now();
    let mut sink = Vec::new();
    let args = ["nhpt", "reproduce", fig, "--out", dir.to_str().unwrap()];
    let code = nhpt::cli::run(args, &mut sink).map_err(e)?;
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("reproduce {fig} exited with {code}:\n{}", String::from_utf8_lossy(&sink)));
    }
    let text = fs::read_to_string(dir.join(fig).join("verdict.txt")).map_err(e)?;
    let kv = text
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    Ok((kv, elapsed))
}

fn lookup<'a>(kv: &'a [(String, String)], key: &str) -> Result<&'a str, String> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| format!("verdict.txt lacks {key}"))
}

fn golden(fig: &str, key: &str, target: f64) -> Outcome {
    let tmp = tempfile::tempdir().map_err(e)?;
    let (kv, elapsed) = reproduce_via_cli(fig, tmp.path())?;
    let value: f64 = lookup(&kv, key)?.parse().map_err(e)?;
    let converged = lookup(&kv, "converged")? == "true";
    let rel = (value - target).abs() / target;
    let ok = rel <= 0.02 && converged && elapsed < Duration::from_secs(10);
    Ok((
        ok,
        format!(
            "{fig}: {key} = {value:.4} (target {target} +-2%, off by {:.3}%), windows {}, {:.2} s",
            100.0 * rel,
            lookup(&kv, "windows")?,
            elapsed.as_secs_f64()
        ),
    ))
}

fn criterion_1() -> Outcome {
    golden("fig1b", "population_2", 31.47)
}

fn criterion_2() -> Outcome {
    golden("fig4a", "population_1", 12.26)
}

/// Largest distance from a point of `a` to the nearest point of `b`, both ways.
fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (fa, fb) in [(Figure::Fig1a, Figure::Fig1b), (Figure::Fig4a, Figure::Fig4b)] {
        let ra = run_figure(fa).map_err(e)?;
        let rb = run_figure(fb).map_err(e)?;
        let verdicts = ra.verdict == fa.expected_verdict() && rb.verdict == fb.expected_verdict();
        let windings = ra.loop_.winding.abs() == 1 && ra.loop_.winding == -rb.loop_.winding;
        let dist = set_distance(&ra.loop_.samples, &rb.loop_.samples);
        ok &= verdicts && windings && dist <= 1e-10;
        notes.push(format!(
            "{fa} {} / {fb} {}, winding {:+}/{:+}, point-set distance {dist:.1e}",
            ra.verdict, rb.verdict, ra.loop_.winding, rb.loop_.winding
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for fig in [Figure::Fig2a, Figure::Fig2b, Figure::Fig5a, Figure::Fig5b] {
        let r = run_figure(fig).map_err(e)?;
        let worst = r
            .final_populations
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != r.init)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
        let s = fig.scenario();
        let (basis, h1e) = model_system(s.model).map_err(e)?;
        let budget = truncation_study(&basis, &h1e, &s.pulse, &IntegrationConfig::default()).map_err(e)?;
        ok &= worst < 1e-3;
        notes.push(format!("{fig} max off-initial {worst:.1e} (eps_trunc {:.1e})", budget.epsilon));
    }
    let a = run_figure(Figure::Fig3a).map_err(e)?;
    let b = run_figure(Figure::Fig3b).map_err(e)?;
    let differ = a
        .final_populations
        .iter()
        .zip(&b.final_populations)
        .any(|(x, y)| (x - y).abs() > 1e-2 * x.abs().max(y.abs()));
    ok &= a.verdict == Verdict::Mixed && b.verdict == Verdict::Mixed && differ;
    notes.push(format!(
        "fig3a {} {:.3?}, fig3b {} {:.3?}",
        a.verdict, a.final_populations, b.verdict, b.final_populations
    ));
    Ok((ok, notes.join("; ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let base = RandomSystemSpec::new(PulseFamily::UpperPole, 42).with_dims(2, 6);
    let cfg = IntegrationConfig {
        output_points: 2,
        ..IntegrationConfig::default()
    };
    let reports = verification_reports(&[SuiteChoice::Unidirectional, SuiteChoice::Transitionless], &base, 50, &cfg)
        .map_err(e)?;
    let elapsed = start.elapsed();
    let mut ok = elapsed < Duration::from_secs(300);
    let mut notes = Vec::new();
    for r in &reports {
        ok &= r.passed() && r.trials.len() == 50;
        let dims: Vec<usize> = r.trials.iter().map(|t| t.dim).collect();
        ok &= (2..=6).all(|n| dims.contains(&n));
        notes.push(format!(
            "{} {} eps {:.1e} worst {:.1e}",
            r.family.name(),
            if r.passed() { "pass" } else { "fail" },
            r.epsilon_trunc,
            r.worst().map_or(f64::NAN, |t| t.violation)
        ));
    }
    notes.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Ok((ok, notes.join("; ")))
}

fn criterion_6() -> Outcome {
    let cfg = IntegrationConfig {
        output_points: 2,
        ..IntegrationConfig::default()
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for fig in [Figure::Fig1a, Figure::Fig1b, Figure::Fig4a, Figure::Fig4b] {
        let s = fig.scenario();
        let (basis, h1e) = model_system(s.model).map_err(e)?;
        let r = weak_limit_compare(&basis, &h1e, &s.pulse, 1e-3, &cfg).map_err(e)?;
        let pass = r.max_relative_deviation < 1e-2;
        ok &= pass;
        let mut note = format!(
            "{} pulse of {fig}: max dev {:.1e} over {} entries",
            s.model.name(),
            r.max_relative_deviation,
            r.compared_entries
        );
        if let (false, Some((n, m))) = (pass, r.worst_entry) {
            let half = weak_limit_compare(&basis, &h1e, &s.pulse, 5e-4, &cfg).map_err(e)?;
            note.push_str(&format!(
                " at W[{}][{}] (first order {:.1e}, numeric {:.2e}; numeric/16 at half scale: {:.2e})",
                n + 1,
                m + 1,
                r.first_order.get(n, m),
                r.numeric.get(n, m),
                half.numeric.get(n, m) * 16.0
            ));
        }
        notes.push(note);
    }

    // Hermitian symmetry with analytic spectra: EP2 H0 with sigma_z coupling,
    // and random Hermitian systems.
    let (h0, _) = Model::Ep2.operators();
    let basis = eigendecompose(&h0).map_err(e)?;
    let sz = GeneralOperator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).map_err(e)?;
    let sx = GeneralOperator::from_fn(2, |i, j| if i == j { c(0.3, 0.0) } else if i < j { c(0.2, -0.7) } else { c(0.2, 0.7) })
        .map_err(e)?;
    let mut asym = 0.0_f64;
    for h1 in [&sz, &sx] {
        let w = first_order(&basis, &matrix_elements(h1, &basis).map_err(e)?, &Pulse::gaussian(1.0, 0.5, 0.0).map_err(e)?)
            .map_err(e)?;
        asym = asym.max(w.max_asymmetry());
    }
    let random = check_first_order_symmetry(&RandomSystemSpec::new(PulseFamily::HermitianGaussian, 42), 50).map_err(e)?;
    let random_worst = random.worst().map_or(f64::NAN, |t| t.violation);
    ok &= asym <= 1e-12 && random.passed();
    notes.push(format!("Hermitian symmetry: EP2 {asym:.1e}, 50 random {random_worst:.1e}"));
    Ok((ok, notes.join("; ")))
}

fn criterion_7() -> Outcome {
    let cfg = IntegrationConfig::default();
    let deltas = [0.0, 0.25, 0.5];
    let mut ok = true;
    let mut notes = Vec::new();

    let s = Figure::Fig1a.scenario();
    let (basis, h1e) = model_system(s.model).map_err(e)?;
    let omegas = basis.omegas().to_vec();
    for n in 0..2 {
        let init = basis_state(2, n);
        let b = deltas
            .iter()
            .map(|&d| contour_asymptotics(&basis, &h1e, &s.pulse, &init, &cfg, d, ContourMode::Plain))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        let b0 = &b[0].coefficients;
        let drift = b.iter().map(|x| (x.coefficients[n] - b0[n]).norm() / b0[n].norm()).fold(0.0, f64::max);
        ok &= drift < 1e-5;
        let mut note = format!("fig1a from |{}>: B_n drift {drift:.1e}", n + 1);
        for l in (0..2).filter(|&l| l != n && b0[l].norm() > 1e-6) {
            let worst = b[1..]
                .iter()
                .map(|x| {
                    let slope = (x.coefficients[l].norm().ln() - b0[l].norm().ln()) / x.delta;
                    (slope - (omegas[l] - omegas[n])).abs()
                })
                .fold(0.0, f64::max);
            ok &= worst < 1e-3;
            note.push_str(&format!(", slope of log|B_{}| off by {worst:.1e}", l + 1));
        }
        notes.push(note);
    }

    let s = Figure::Fig2a.scenario();
    let omega = s.pulse.omega().ok_or("fig2a pulse has no modulation")?;
    for n in 0..2 {
        let init = basis_state(2, n);
        let d = deltas
            .iter()
            .map(|&dl| contour_asymptotics(&basis, &h1e, &s.pulse, &init, &cfg, dl, ContourMode::FrequencyShifted(omega)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(e)?;
        let d0 = &d[0].coefficients;
        let scale = d0.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let drift = d
            .iter()
            .flat_map(|x| x.coefficients.iter().zip(d0).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
            / scale;
        ok &= drift < 1e-5;
        notes.push(format!("fig2a from |{}>: D drift {drift:.1e}", n + 1));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for t_p in [-0.5, 0.5] {
        let p = Pulse::pole(c(1.0, 0.0), t_p).map_err(e)?;
        let grid = numerical_spectrum_with(&p, 2000.0, 1 << 18, SpectrumOptions { tail_correction: true }).map_err(e)?;
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let k = grid.nearest_index(rng.gen_range(-20.0..20.0));
            let exact = p.analytic_spectrum(grid.omegas[k]).map_err(e)?;
            let err = (grid.values[k] - exact).norm() / 1e-6_f64.max(1e-4 * exact.norm());
            worst = worst.max(err);
        }
        ok &= worst <= 1.0;
        let forbidden = HalfLine::forbidden_by(p.classify().support);
        let leak: Vec<f64> = [500.0, 1000.0, 2000.0, 4000.0]
            .iter()
            .map(|&t| numerical_spectrum(&p, t, 1 << 18).map(|g| one_sidedness(&g, forbidden)))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let monotone = leak.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        ok &= monotone && leak[2] < 1e-3;
        notes.push(format!(
            "t_p {t_p:+}: worst error {worst:.1e} of tolerance, leakage {:.1e} at 2000, monotone {monotone}",
            leak[2]
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn criterion_9() -> Outcome {
    let cfg = IntegrationConfig::default();
    let gauss = Pulse::gaussian(1.0, 0.5, 0.0).map_err(e)?;
    let mut worst = 0.0_f64;
    let mut check = |basis: &EigenSystem, h1e: &GeneralOperator, p: &Pulse| -> Result<(), String> {
        for n in 0..basis.dim() {
            let t = integrate(basis, h1e, p, &basis_state(basis.dim(), n), &cfg).map_err(e)?;
            for k in 0..t.times.len() {
                worst = worst.max((t.norm_at(k) - 1.0).abs());
            }
            let end: f64 = t.asymptotic.iter().map(|a| a.norm_sqr()).sum();
            worst = worst.max((end - 1.0).abs());
        }
        Ok(())
    };
    let (h0, _) = Model::Ep2.operators();
    let basis = eigendecompose(&h0).map_err(e)?;
    let sz = GeneralOperator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).map_err(e)?;
    check(&basis, &matrix_elements(&sz, &basis).map_err(e)?, &gauss)?;
    let spec = RandomSystemSpec::new(PulseFamily::HermitianGaussian, 42);
    for k in 0..10 {
        let g = generate(&spec, trial_seed(42, k)).map_err(e)?;
        check(&g.basis, &g.h1e, &g.pulse)?;
    }
    Ok((worst < 1e-8, format!("max |norm - 1| = {worst:.1e} over [-2000, 2000] (EP2 with sigma_z, 10 random systems)")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden EP2 endpoint", criterion_1),
        ("golden EP3 endpoint", criterion_2),
        ("chirality", criterion_3),
        ("transitionless panels", criterion_4),
        ("randomized theorem suites", criterion_5),
        ("first-order consistency", criterion_6),
        ("contour invariants", criterion_7),
        ("spectra", criterion_8),
        ("Hermitian-limit norm", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match std::panic::catch_unwind(run) {
            Ok(Ok(r)) => r,
            Ok(Err(msg)) => (false, format!("error: {msg}")),
            Err(_) => (false, "panicked".into()),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {}  {name} [{:.1} s]: {detail}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
