//! Implementations of the subcommands.

use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};
use nhpt_core::dynamics::{basis_state, converge_window, integrate, transition_matrix as numeric_matrix, IntegrationConfig};
use nhpt_core::perturbation::{first_order, TransitionMatrix, COMPARISON_FLOOR};
use nhpt_core::pulses::SpectralSupport;
use nhpt_core::scenarios::{analyze_loop, loop_grid, run_figure, verdict, Figure, Verdict, LOOP_POINTS, MAX_DOUBLINGS};
use nhpt_core::spectrum::{hilbert_check, numerical_spectrum_with, HalfLine, SpectrumOptions};
use nhpt_core::verify::{
    assemble_dynamic_report, check_first_order_symmetry, run_dynamic_trial, PulseFamily, RandomSystemSpec, Report,
};
use nhpt_core::Complex64;

use crate::artifacts::{self, summary_text, PLOT_SCRIPT};
use crate::cli::{
    resolve_out, resolve_run, ReproduceArgs, SimulateArgs, SpectrumArgs, SweepArgs, TransitionArgs, VerifyArgs,
    DEFAULT_OUT, EXIT_CHECK_FAILED,
};
use crate::config::{ConfigFile, LoadedSystem, RunConfig};
use crate::io::{header, indexed, num, write_csv};
use crate::parallel;
use crate::pulse_spec::{PulseSpec, SweepParam};

fn pops_line(pops: &[f64]) -> String {
    pops.iter()
        .enumerate()
        .map(|(l, p)| format!("|c_{}|^2 = {}", l + 1, num(*p)))
        .collect::<Vec<_>>()
        .join("  ")
}

pub fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ConfigFile::load_optional(a.common.config.as_deref())?;
    let rc = resolve_run(&a.system, &a.integration, &a.common, a.converge, &file)?;
    let sys = LoadedSystem::load(&rc.system)?;
    rc.check_init(sys.dim())?;
    let pulse = rc.pulse.build()?;
    let init = basis_state(sys.dim(), rc.init - 1);
    let (traj, windows) = if rc.converge {
        let run = converge_window(&sys.basis, &sys.h1e, &pulse, &init, &rc.integration, MAX_DOUBLINGS)?;
        (run.trajectory, run.windows)
    } else {
        let t = integrate(&sys.basis, &sys.h1e, &pulse, &init, &rc.integration)?;
        (t, vec![rc.integration.t_end])
    };
    fs::create_dir_all(&rc.out).with_context(|| format!("creating {}", rc.out.display()))?;
    artifacts::write_populations(&rc.out.join("populations.csv"), &traj)?;
    artifacts::write_final_amplitudes(&rc.out.join("final_amplitudes.csv"), &sys.basis, &traj)?;
    writeln!(out, "system = {}", rc.system.label())?;
    writeln!(out, "pulse = {}", rc.pulse)?;
    writeln!(out, "init = {}", rc.init)?;
    writeln!(
        out,
        "window = {}",
        windows.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" -> ")
    )?;
    if sys.model.is_some() && rc.pulse != PulseSpec::None {
        let scale = rc.pulse.t_p().map_or(1.0, f64::abs);
        let l = analyze_loop(&pulse, &loop_grid(rc.integration.t_end, scale, LOOP_POINTS))?;
        artifacts::write_loop(&rc.out.join("loop.csv"), &l)?;
        writeln!(out, "winding = {}", l.winding)?;
    }
    let pops = traj.final_populations();
    writeln!(out, "final populations: {}", pops_line(&pops))?;
    writeln!(out, "verdict = {}", verdict(&pops, rc.init - 1))?;
    writeln!(out, "artifacts in {}", rc.out.display())?;
    Ok(0)
}

fn figure_pulse(fig: Figure) -> PulseSpec {
    let a = Complex64::new(1.0, 0.0);
    match fig.parameters() {
        (t_p, None) => PulseSpec::Pole { a, t_p },
        (t_p, Some(omega)) => PulseSpec::ModulatedPole { a, t_p, omega },
    }
}

pub fn reproduce(a: &ReproduceArgs, out: &mut dyn Write) -> Result<i32> {
    let figures: Vec<Figure> = if a.figure.eq_ignore_ascii_case("all") {
        Figure::ALL.to_vec()
    } else {
        vec![Figure::from_id(&a.figure).with_context(|| format!("unknown figure {:?}; expected fig1a .. fig5b or all", a.figure))?]
    };
    let root = a.out.clone().unwrap_or_else(|| DEFAULT_OUT.into());
    fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
    let results = parallel::map(&figures, |&fig| {
        let r = run_figure(fig).with_context(|| format!("running {fig}"))?;
        let (basis, _) = nhpt_core::scenarios::model_system(r.model)?;
        let summary = summary_text(&r, &figure_pulse(fig).to_string(), Some(fig.expected_verdict().to_string()));
        artifacts::write_scenario(&root.join(fig.id()), &basis, &r, &summary)?;
        Ok(r)
    })?;
    fs::write(root.join("plot.py"), PLOT_SCRIPT).context("writing plot.py")?;

    writeln!(out, "{:<7} {:<4} {:>4} {:>7}  {:<44} {:<14} {:<14}", "figure", "model", "init", "window", "final populations", "verdict", "expected")?;
    let mut mismatches = 0;
    for (fig, r) in figures.iter().zip(&results) {
        let pops = r.final_populations.iter().map(|p| format!("{p:.6e}")).collect::<Vec<_>>().join(" ");
        let expected = fig.expected_verdict();
        let ok = r.verdict == expected;
        if !ok {
            mismatches += 1;
        }
        writeln!(
            out,
            "{:<7} {:<4} {:>4} {:>7}  {:<44} {:<14} {:<14}{}",
            fig.id(),
            r.model.name(),
            r.init + 1,
            r.windows.last().copied().unwrap_or(0.0),
            pops,
            r.verdict.to_string(),
            expected.to_string(),
            if ok { "" } else { "  MISMATCH" }
        )?;
    }
    writeln!(out, "artifacts in {}", root.display())?;
    Ok(if mismatches == 0 { 0 } else { EXIT_CHECK_FAILED })
}

fn support_label(s: SpectralSupport) -> String {
    match s {
        SpectralSupport::NegativeOnly => "F = 0 for w > 0".into(),
        SpectralSupport::PositiveOnly => "F = 0 for w < 0".into(),
        SpectralSupport::ShiftedNegative(e) => format!("F = 0 for w > {e}"),
        SpectralSupport::ShiftedPositive(e) => format!("F = 0 for w < {e}"),
        SpectralSupport::TwoSided => "two-sided".into(),
    }
}

pub fn spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ConfigFile::load_optional(a.common.config.as_deref())?;
    let spec = crate::cli::resolve_pulse(a.pulse.clone(), &file)?;
    let t_max = file.pick(a.t_max, "t_max")?.unwrap_or(2000.0);
    let samples = file.pick(a.samples, "samples")?.unwrap_or(1 << 18);
    let omega_max = file.pick(a.omega_max, "omega_max")?.unwrap_or(20.0);
    let tails = file.flag(a.tails, "tails")?;
    let dir = resolve_out(&a.common, &file)?;
    let pulse = spec.build()?;
    let grid = numerical_spectrum_with(&pulse, t_max, samples, SpectrumOptions { tail_correction: tails })?;

    let mut peak = 0.0_f64;
    let mut deviation = None::<f64>;
    let mut rows = Vec::new();
    for s in grid.samples().filter(|s| s.omega.abs() <= omega_max) {
        let analytic = pulse.analytic_spectrum(s.omega).ok();
        let mut row = vec![num(s.omega), num(s.value.re), num(s.value.im), num(s.value.norm())];
        match analytic {
            Some(v) => {
                peak = peak.max(v.norm());
                let d = (v - s.value).norm();
                deviation = Some(deviation.map_or(d, |x: f64| x.max(d)));
                row.extend([num(v.re), num(v.im), num(v.norm())]);
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        rows.push(row);
    }
    let path = dir.join("spectrum.csv");
    write_csv(
        &path,
        &header(["omega", "re_numeric", "im_numeric", "abs_numeric", "re_analytic", "im_analytic", "abs_analytic"]),
        rows,
    )?;

    let support = pulse.classify().support;
    let forbidden = HalfLine::forbidden_by(support);
    writeln!(out, "pulse = {spec}")?;
    writeln!(out, "t_max = {t_max}  samples = {samples}  d_omega = {}", num(grid.d_omega()))?;
    writeln!(out, "support = {}", support_label(support))?;
    let side = match forbidden {
        HalfLine::Above(e) => format!("w > {e}"),
        HalfLine::Below(e) => format!("w < {e}"),
    };
    writeln!(out, "leakage({side}) = {}", num(grid.leakage))?;
    if let Some(d) = deviation {
        writeln!(out, "max |F_numeric - F_analytic| / max |F| = {}", num(d / peak.max(f64::MIN_POSITIVE)))?;
    }
    if let Ok(h) = hilbert_check(&pulse, t_max, samples) {
        writeln!(out, "hilbert residual = {}", num(h))?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(0)
}

fn matrix_rows(w: &TransitionMatrix) -> Vec<Vec<String>> {
    w.w.iter()
        .enumerate()
        .map(|(n, row)| {
            let mut r = vec![w.source.tag().to_string(), (n + 1).to_string()];
            r.extend(row.iter().map(|v| num(*v)));
            r
        })
        .collect()
}

fn print_matrix(out: &mut dyn Write, w: &TransitionMatrix) -> Result<()> {
    writeln!(out, "W ({}), row = initial level, column = final level:", w.source.tag())?;
    for (n, row) in w.w.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>14.6e}")).collect();
        writeln!(out, "  {:>2} {}", n + 1, cells.join(" "))?;
    }
    Ok(())
}

pub fn transition_matrix(a: &TransitionArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ConfigFile::load_optional(a.common.config.as_deref())?;
    let rc = resolve_run(&a.system, &a.integration, &a.common, false, &file)?;
    let method = file.pick(a.method.clone(), "method")?.unwrap_or_else(|| "both".into());
    let (want_first, want_numeric) = match method.as_str() {
        "numeric" => (false, true),
        "first-order" | "first_order" => (true, false),
        "both" => (true, true),
        other => bail!("unknown method {other:?}; expected numeric, first-order or both"),
    };
    let scale = file.pick(a.scale, "scale")?.unwrap_or(1.0);
    let sys = LoadedSystem::load(&rc.system)?;
    let pulse = rc.pulse.build()?.scaled(scale);
    let cfg = IntegrationConfig {
        output_points: 2,
        ..rc.integration
    };

    let mut mats = Vec::new();
    if want_first {
        mats.push(first_order(&sys.basis, &sys.h1e, &pulse)?);
    }
    if want_numeric {
        mats.push(numeric_matrix(&sys.basis, &sys.h1e, &pulse, &cfg)?);
    }
    let n = sys.dim();
    let mut head = header(["source", "n"]);
    head.extend(indexed("W_to", n));
    let path = rc.out.join("transition_matrix.csv");
    write_csv(&path, &head, mats.iter().flat_map(matrix_rows))?;

    writeln!(out, "system = {}  pulse = {}  scale = {scale}", rc.system.label(), rc.pulse)?;
    for w in &mats {
        print_matrix(out, w)?;
    }
    if let [fo, nu] = &mats[..] {
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (fo.w[i][j], nu.w[i][j]);
                if i != j && (x > COMPARISON_FLOOR || y > COMPARISON_FLOOR) {
                    worst = worst.max((x - y).abs() / x.max(y));
                }
            }
        }
        writeln!(out, "max relative deviation (off-diagonal) = {}", num(worst))?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteChoice {
    Unidirectional,
    Transitionless,
    Symmetry,
}

pub fn suite_choices(name: &str) -> Result<Vec<SuiteChoice>> {
    Ok(match name {
        "unidirectional" => vec![SuiteChoice::Unidirectional],
        "transitionless" => vec![SuiteChoice::Transitionless],
        "symmetry" | "first-order-symmetry" => vec![SuiteChoice::Symmetry],
        "all" => vec![SuiteChoice::Unidirectional, SuiteChoice::Transitionless, SuiteChoice::Symmetry],
        _ => bail!("unknown suite {name:?}; expected unidirectional, transitionless, symmetry or all"),
    })
}

/// Dynamical trials of one family run in parallel, in trial order.
pub fn dynamic_report(spec: &RandomSystemSpec, trials: usize, cfg: &IntegrationConfig, reference: Option<f64>) -> Result<Report> {
    let indices: Vec<usize> = (0..trials).collect();
    let outcomes = parallel::map(&indices, |&k| {
        run_dynamic_trial(spec, k, cfg).with_context(|| format!("{} trial {k}", spec.family.name()))
    })?;
    Ok(assemble_dynamic_report(spec, outcomes, reference)?)
}

/// Reports for the chosen suites: theorem families first, then controls
/// measured against their budgets.
pub fn verification_reports(
    suites: &[SuiteChoice],
    base: &RandomSystemSpec,
    trials: usize,
    cfg: &IntegrationConfig,
) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    for suite in suites {
        match suite {
            SuiteChoice::Unidirectional => {
                let upper = dynamic_report(&base.with_family(PulseFamily::UpperPole), trials, cfg, None)?;
                let lower = dynamic_report(&base.with_family(PulseFamily::LowerPole), trials, cfg, None)?;
                let budget = upper.epsilon_trunc;
                reports.push(upper);
                reports.push(lower);
                reports.push(dynamic_report(&base.with_family(PulseFamily::HermitianGaussian), trials, cfg, Some(budget))?);
            }
            SuiteChoice::Transitionless => {
                let clearing = dynamic_report(&base.with_family(PulseFamily::ClearingModulated), trials, cfg, None)?;
                let budget = clearing.epsilon_trunc;
                reports.push(clearing);
                reports.push(dynamic_report(&base.with_family(PulseFamily::NonClearingModulated), trials, cfg, Some(budget))?);
            }
            SuiteChoice::Symmetry => {
                for family in [
                    PulseFamily::HermitianGaussian,
                    PulseFamily::ComplexPoleHermitian,
                    PulseFamily::RealGaussianNonNormal,
                ] {
                    reports.push(check_first_order_symmetry(&base.with_family(family), trials)?);
                }
            }
        }
    }
    Ok(reports)
}

pub fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ConfigFile::load_optional(a.common.config.as_deref())?;
    let suite = file.pick(a.suite.clone(), "suite")?.unwrap_or_else(|| "all".into());
    let seed = file.pick(a.seed, "seed")?.unwrap_or(42);
    let trials = file.pick(a.trials, "trials")?.unwrap_or(50);
    if trials == 0 {
        bail!("at least one trial is needed");
    }
    let base = RandomSystemSpec::new(PulseFamily::UpperPole, seed).with_dims(
        file.pick(a.min_dim, "min_dim")?.unwrap_or(2),
        file.pick(a.max_dim, "max_dim")?.unwrap_or(6),
    );
    let t_max = file.pick(a.t_max, "t_max")?.unwrap_or(2000.0);
    let cfg = IntegrationConfig {
        output_points: 2,
        ..IntegrationConfig::default().with_window(t_max)
    };
    cfg.validate()?;
    let dir = resolve_out(&a.common, &file)?.join("verify");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let reports = verification_reports(&suite_choices(&suite)?, &base, trials, &cfg)?;
    writeln!(out, "{:<20} {:<24} {:>6} {:>13} {:>13}  result", "suite", "family", "trials", "epsilon", "worst")?;
    let mut failed = 0;
    for r in &reports {
        let path = dir.join(format!("{}_{}.txt", r.suite.name(), r.family.name()));
        fs::write(&path, r.to_text()).with_context(|| format!("writing {}", path.display()))?;
        if !r.passed() {
            failed += 1;
        }
        writeln!(
            out,
            "{:<20} {:<24} {:>6} {:>13.6e} {:>13.6e}  {}{}",
            r.suite.name(),
            r.family.name(),
            r.trials.len(),
            r.epsilon_trunc,
            r.worst().map_or(0.0, |t| t.violation),
            if r.passed() { "pass" } else { "FAIL" },
            if r.epsilon_flagged() { " (epsilon above target)" } else { "" }
        )?;
    }
    writeln!(out, "seed = {seed}; reports in {}", dir.display())?;
    Ok(if failed == 0 { 0 } else { EXIT_CHECK_FAILED })
}

/// Inclusive `start:stop:step` grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        bail!("range must be start:stop:step, got {s:?}");
    };
    let parse = |x: &str, what: &str| -> Result<f64> {
        let v: f64 = x.trim().parse().with_context(|| format!("bad range {what} {x:?}"))?;
        if !v.is_finite() {
            bail!("range {what} must be finite");
        }
        Ok(v)
    };
    let (start, stop, step) = (parse(start, "start")?, parse(stop, "stop")?, parse(step, "step")?);
    if step == 0.0 || (stop - start) * step < 0.0 {
        bail!("step {step} does not lead from {start} to {stop}");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        bail!("range has {count} points; at most 100000 are allowed");
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Pulse template for a sweep: a missing swept parameter is filled with the
/// first range value.
fn sweep_template(raw: &str, param: SweepParam, first: f64) -> Result<PulseSpec> {
    match raw.parse::<PulseSpec>() {
        Ok(p) => Ok(p),
        Err(e) => {
            let key = format!("{}=", param.name());
            if raw.contains(&key) {
                return Err(e);
            }
            let sep = if raw.contains(':') { "," } else { ":" };
            format!("{raw}{sep}{key}{first}").parse().or(Err(e))
        }
    }
}

pub fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let file = ConfigFile::load_optional(a.common.config.as_deref())?;
    let param: SweepParam = file.pick(a.param.clone(), "param")?.context("no --param given")?.parse()?;
    let values = parse_range(&file.pick(a.range.clone(), "range")?.context("no --range given")?)?;
    let raw = file.pick(a.system.pulse.clone(), "pulse")?.context("no pulse given")?;
    let template = sweep_template(&raw, param, values[0])?;
    let mut system = a.system.clone();
    system.pulse = Some(template.to_string());
    let rc: RunConfig = resolve_run(&system, &a.integration, &a.common, a.converge, &file)?;
    let sys = LoadedSystem::load(&rc.system)?;
    rc.check_init(sys.dim())?;
    let cfg = IntegrationConfig {
        output_points: 2,
        ..rc.integration
    };
    let init = basis_state(sys.dim(), rc.init - 1);

    let rows = parallel::map(&values, |&v| {
        let spec = template.with_param(param, v)?;
        let pulse = spec.build()?;
        let pops = if rc.converge {
            converge_window(&sys.basis, &sys.h1e, &pulse, &init, &cfg, MAX_DOUBLINGS)?
                .trajectory
                .final_populations()
        } else {
            integrate(&sys.basis, &sys.h1e, &pulse, &init, &cfg)?.final_populations()
        };
        let v_ = verdict(&pops, rc.init - 1);
        Ok::<(f64, PulseSpec, Vec<f64>, Verdict), anyhow::Error>((v, spec, pops, v_))
    })?;

    let n = sys.dim();
    let mut head = header([param.name(), "pulse"]);
    head.extend(indexed("pop", n));
    head.push("verdict".into());
    let path = rc.out.join("sweep.csv");
    write_csv(
        &path,
        &head,
        rows.iter().map(|(v, spec, pops, verdict)| {
            let mut r = vec![num(*v), spec.to_string()];
            r.extend(pops.iter().map(|p| num(*p)));
            r.push(verdict.to_string());
            r
        }),
    )?;
    writeln!(out, "system = {}  init = {}  sweeping {}", rc.system.label(), rc.init, param.name())?;
    for (v, _, pops, verdict) in &rows {
        let cells: Vec<String> = pops.iter().map(|p| format!("{p:.4e}")).collect();
        writeln!(out, "{:>10.4}  {}  {}", v, cells.join(" "), verdict)?;
    }
    writeln!(out, "wrote {}", path.display())?;
    Ok(0)
}
