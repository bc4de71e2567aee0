//! Interaction-picture amplitude equations
//! i dc_l/dt = f(t) sum_s (H1)_{l,s} c_s exp(i (w_l - w_s) t),
//! integrated on the real axis or along the line t = xi + i*delta.
//!
//! The pulse tails beyond the window are folded in exactly to first order:
//! over a tail the propagator is exp(-i T) with
//! T_{l,s} = (H1)_{l,s} int f(t) exp(i (w_l - w_s) t) dt.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{solve_on_grid, OdeOptions, OdeStats};
use crate::operators::{expm, EigenSystem, GeneralOperator};
use crate::perturbation::{Source, TransitionMatrix};
use crate::pulses::{Pulse, Tail};

/// Closest approach of the contour to the pulse pole.
pub const CONTOUR_POLE_GUARD: f64 = 1e-6;
/// Accepted asymptotic fit residual.
pub const FIT_THRESHOLD: f64 = 1e-6;
/// Window doubling stops once populations move less than this (relative).
pub const CONVERGENCE_TOLERANCE: f64 = 2e-3;
/// Smallest reported truncation budget.
pub const EPSILON_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Contour offset: the solution is computed along t = xi + i*delta.
    pub delta: f64,
    /// Start from c(-inf) and report c(+inf) using the analytic tails.
    pub tail_correction: bool,
    /// Number of uniformly spaced trajectory samples (both ends included).
    pub output_points: usize,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            t_start: -2000.0,
            t_end: 2000.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            delta: 0.0,
            tail_correction: true,
            output_points: 4001,
            max_steps: 5_000_000,
        }
    }
}

impl IntegrationConfig {
    /// Symmetric window [-t_max, t_max].
    pub fn with_window(mut self, t_max: f64) -> Self {
        self.t_start = -t_max;
        self.t_end = t_max;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.t_start < self.t_end) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            return bad("t_start must be below t_end");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) || !(self.abs_tol > 0.0 && self.abs_tol <= 1e-2) {
            return bad("tolerances must lie in (0, 1e-2]");
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return bad("contour offset must be finite and non-negative");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step must be positive");
        }
        if self.output_points < 2 {
            return bad("at least two output points are needed");
        }
        Ok(())
    }

    fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            initial_step: 1e-3_f64.min(self.max_step),
            max_steps: self.max_steps,
            ..OdeOptions::default()
        }
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.output_points;
        let h = (self.t_end - self.t_start) / (n - 1) as f64;
        (0..n)
            .map(|k| if k == n - 1 { self.t_end } else { self.t_start + k as f64 * h })
            .collect()
    }
}

/// Amplitudes sampled along the integration path.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTrajectory {
    /// Real parts xi of the sample points t = xi + i*delta.
    pub times: Vec<f64>,
    pub delta: f64,
    /// c[l][k] = c_l(times[k]).
    pub c: Vec<Vec<Complex64>>,
    /// populations[l][k] = |c[l][k]|^2.
    pub populations: Vec<Vec<f64>>,
    /// c_l(t_end).
    pub final_amplitudes: Vec<Complex64>,
    /// c_l(+inf) from the analytic tail; equals `final_amplitudes` when tail
    /// correction is off.
    pub asymptotic: Vec<Complex64>,
    pub stats: OdeStats,
}

impl AmplitudeTrajectory {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn final_populations(&self) -> Vec<f64> {
        self.asymptotic.iter().map(|c| c.norm_sqr()).collect()
    }

    /// sum_l |c_l|^2 at sample k.
    pub fn norm_at(&self, k: usize) -> f64 {
        self.populations.iter().map(|p| p[k]).sum()
    }
}

struct Rhs<'a> {
    omegas: &'a [f64],
    m: &'a GeneralOperator,
    pulse: &'a Pulse,
    delta: f64,
    /// Extra phase exp(-i shift t) applied to the couplings while the
    /// envelope is multiplied by exp(+i shift t); zero for plain integration.
    shift: f64,
    v: Vec<Complex64>,
    phase: Vec<Complex64>,
}

impl Rhs<'_> {
    fn eval(&mut self, xi: f64, c: &[Complex64], dc: &mut [Complex64]) -> Result<()> {
        let t = Complex64::new(xi, self.delta);
        let i = Complex64::i();
        let mut g = self.pulse.evaluate(t)?;
        if self.shift != 0.0 {
            g *= (i * self.shift * t).exp();
        }
        if g == Complex64::new(0.0, 0.0) {
            dc.iter_mut().for_each(|d| *d = Complex64::new(0.0, 0.0));
            return Ok(());
        }
        let n = c.len();
        for s in 0..n {
            self.phase[s] = (i * self.omegas[s] * t).exp();
            self.v[s] = c[s] / self.phase[s];
        }
        let g = if self.shift != 0.0 {
            -i * g * (-i * self.shift * t).exp()
        } else {
            -i * g
        };
        for l in 0..n {
            let row = self.m.row(l);
            let w: Complex64 = row.iter().zip(&self.v).map(|(a, b)| a * b).sum();
            dc[l] = g * self.phase[l] * w;
        }
        Ok(())
    }
}

/// First-order propagator over one tail beyond `t0` (complex).
pub fn tail_propagator(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    t0: Complex64,
    tail: Tail,
) -> GeneralOperator {
    let omegas = basis.omegas();
    let gen = GeneralOperator::from_fn(basis.dim(), |l, s| {
        -Complex64::i() * h1e[(l, s)] * p.tail_integral(t0, omegas[l] - omegas[s], tail)
    })
    .expect("basis dimension is at least 2");
    expm(&gen)
}

fn check_inputs(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    init: &[Complex64],
    cfg: &IntegrationConfig,
) -> Result<()> {
    cfg.validate()?;
    let n = basis.dim();
    for found in [h1e.dim(), init.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    if init.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument("initial amplitudes must be finite".into()));
    }
    if cfg.delta > 0.0 {
        if let Some(t_p) = p.t_p() {
            let distance = (t_p - cfg.delta).abs();
            if distance < CONTOUR_POLE_GUARD {
                return Err(Error::Singularity { distance });
            }
            if t_p > 0.0 && t_p < cfg.delta {
                return Err(Error::InvalidArgument(alloc::format!(
                    "pole at i*{t_p} lies between the real axis and the contour"
                )));
            }
        }
    }
    Ok(())
}

fn integrate_shifted(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    init: &[Complex64],
    cfg: &IntegrationConfig,
    shift: f64,
) -> Result<AmplitudeTrajectory> {
    check_inputs(basis, h1e, p, init, cfg)?;
    let n = basis.dim();
    let start = if cfg.tail_correction {
        let t0 = Complex64::new(cfg.t_start, cfg.delta);
        tail_propagator(basis, h1e, p, t0, Tail::Lower).mul_vec(init)?
    } else {
        init.to_vec()
    };
    let mut rhs = Rhs {
        omegas: basis.omegas(),
        m: h1e,
        pulse: p,
        delta: cfg.delta,
        shift,
        v: vec![Complex64::new(0.0, 0.0); n],
        phase: vec![Complex64::new(0.0, 0.0); n],
    };
    let grid = cfg.grid();
    let (samples, last, stats) = solve_on_grid(
        |xi, c, dc| rhs.eval(xi, c, dc),
        cfg.t_start,
        cfg.t_end,
        &start,
        &cfg.ode_options(),
        &grid,
    )?;
    let asymptotic = if cfg.tail_correction {
        let t1 = Complex64::new(cfg.t_end, cfg.delta);
        tail_propagator(basis, h1e, p, t1, Tail::Upper).mul_vec(&last)?
    } else {
        last.clone()
    };
    let mut c = vec![Vec::with_capacity(grid.len()); n];
    for sample in &samples {
        for (l, v) in sample.iter().enumerate() {
            c[l].push(*v);
        }
    }
    let populations = c.iter().map(|row| row.iter().map(|v| v.norm_sqr()).collect()).collect();
    Ok(AmplitudeTrajectory {
        times: grid,
        delta: cfg.delta,
        c,
        populations,
        final_amplitudes: last,
        asymptotic,
        stats,
    })
}

/// Integrates from `init` = c(t_start) (or c(-inf) with tail correction).
pub fn integrate(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    init: &[Complex64],
    cfg: &IntegrationConfig,
) -> Result<AmplitudeTrajectory> {
    integrate_shifted(basis, h1e, p, init, cfg, 0.0)
}

/// Basis state |n> (0-based) as an amplitude tuple.
pub fn basis_state(dim: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContourMode {
    /// Reports B_l = c_l(+inf) exp((w_l - w_n) delta).
    Plain,
    /// Integrates with the envelope g = f exp(i shift t) and couplings
    /// carrying exp(i (w_l - w_s - shift) t); reports D_l = c_l(+inf).
    FrequencyShifted(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourAsymptotics {
    pub delta: f64,
    pub mode: ContourMode,
    /// Reference level n (0-based).
    pub reference: usize,
    /// B_l(delta) or D_l(delta).
    pub coefficients: Vec<Complex64>,
    pub fit_residual: f64,
}

/// Integrates along t = xi + i*delta and extracts the large-xi coefficients
/// from the last 10% of the window. The reference level n is the component
/// of `init` with the largest modulus.
pub fn contour_asymptotics(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    init: &[Complex64],
    cfg: &IntegrationConfig,
    delta: f64,
    mode: ContourMode,
) -> Result<ContourAsymptotics> {
    let cfg = IntegrationConfig {
        delta,
        tail_correction: true,
        ..*cfg
    };
    let shift = match mode {
        ContourMode::Plain => 0.0,
        ContourMode::FrequencyShifted(shift) => {
            if !shift.is_finite() {
                return Err(Error::InvalidArgument("frequency shift must be finite".into()));
            }
            shift
        }
    };
    let traj = integrate_shifted(basis, h1e, p, init, &cfg, shift)?;
    let n = basis.dim();
    let reference = (0..n)
        .max_by(|&a, &b| init[a].norm().total_cmp(&init[b].norm()))
        .expect("dim >= 2");

    let fit_from = cfg.t_end - 0.1 * (cfg.t_end - cfg.t_start);
    let mut estimates: Vec<Vec<Complex64>> = Vec::new();
    for (k, &xi) in traj.times.iter().enumerate() {
        if xi < fit_from {
            continue;
        }
        let here: Vec<Complex64> = (0..n).map(|l| traj.c[l][k]).collect();
        let tail = tail_propagator(basis, h1e, p, Complex64::new(xi, delta), Tail::Upper);
        estimates.push(tail.mul_vec(&here)?);
    }
    let count = estimates.len() as f64;
    let mean: Vec<Complex64> = (0..n)
        .map(|l| estimates.iter().map(|e| e[l]).sum::<Complex64>() / count)
        .collect();
    let spread = estimates
        .iter()
        .flat_map(|e| e.iter().zip(&mean).map(|(a, b)| (a - b).norm()))
        .fold(0.0, f64::max);
    let scale = mean.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let fit_residual = spread / scale;
    if !(fit_residual < FIT_THRESHOLD) {
        return Err(Error::AsymptoticsNotReached { residual: fit_residual });
    }
    let omegas = basis.omegas();
    let coefficients = match mode {
        ContourMode::Plain => mean
            .iter()
            .enumerate()
            .map(|(l, v)| v * ((omegas[l] - omegas[reference]) * delta).exp())
            .collect(),
        ContourMode::FrequencyShifted(_) => mean,
    };
    Ok(ContourAsymptotics {
        delta,
        mode,
        reference,
        coefficients,
        fit_residual,
    })
}

/// W[n][m] = |c_m(+inf)|^2 for c(-inf) = |n>, one integration per n.
pub fn transition_matrix(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    cfg: &IntegrationConfig,
) -> Result<TransitionMatrix> {
    let rows = (0..basis.dim())
        .map(|n| integrate(basis, h1e, p, &basis_state(basis.dim(), n), cfg).map(|t| t.asymptotic))
        .collect::<Result<Vec<_>>>()?;
    Ok(transition_matrix_from_rows(&rows))
}

/// Assembles W from the final amplitudes of each initial state.
pub fn transition_matrix_from_rows(rows: &[Vec<Complex64>]) -> TransitionMatrix {
    TransitionMatrix {
        w: rows.iter().map(|r| r.iter().map(|c| c.norm_sqr()).collect()).collect(),
        source: Source::Numeric,
        survival_unperturbed: false,
        survival_amplitudes: Some(rows.iter().enumerate().map(|(n, r)| r[n]).collect()),
    }
}

/// Relative change between two population vectors, normalized by the
/// largest population.
pub fn population_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergedRun {
    pub trajectory: AmplitudeTrajectory,
    /// Half-widths tried, last one accepted.
    pub windows: Vec<f64>,
    /// Population change between the last two windows.
    pub change: f64,
    pub converged: bool,
}

/// Doubles the window half-width (from the configured one) until final
/// populations move by less than [`CONVERGENCE_TOLERANCE`], at most
/// `max_doublings` times.
pub fn converge_window(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    init: &[Complex64],
    cfg: &IntegrationConfig,
    max_doublings: usize,
) -> Result<ConvergedRun> {
    let mut t_max = cfg.t_start.abs().max(cfg.t_end.abs());
    let mut windows = vec![t_max];
    let run = |t_max: f64| {
        let c = IntegrationConfig {
            output_points: cfg.output_points,
            ..cfg.with_window(t_max)
        };
        integrate(basis, h1e, p, init, &c)
    };
    let mut prev = run(t_max)?;
    for _ in 0..max_doublings {
        t_max *= 2.0;
        windows.push(t_max);
        let next = run(t_max)?;
        let change = population_change(&prev.final_populations(), &next.final_populations());
        if change < CONVERGENCE_TOLERANCE {
            return Ok(ConvergedRun {
                trajectory: next,
                windows,
                change,
                converged: true,
            });
        }
        prev = next;
    }
    let change = f64::INFINITY;
    Ok(ConvergedRun {
        trajectory: prev,
        windows,
        change,
        converged: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationStudy {
    /// max_l |c_l(T, tol) - c_l(2T, tol/10)| over all initial states.
    pub max_shift: f64,
    /// max(EPSILON_FLOOR, 10 * max_shift).
    pub epsilon: f64,
    /// Baseline W from the configured window.
    pub baseline: TransitionMatrix,
}

/// Compares every initial state at the configured window and tolerance
/// against a doubled window with a tenfold tighter tolerance.
pub fn truncation_study(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    cfg: &IntegrationConfig,
) -> Result<TruncationStudy> {
    let t_max = cfg.t_start.abs().max(cfg.t_end.abs());
    let base_cfg = IntegrationConfig {
        output_points: 2,
        ..*cfg
    };
    let fine_cfg = IntegrationConfig {
        output_points: 2,
        ..cfg.with_window(2.0 * t_max).with_tolerances(cfg.rel_tol / 10.0, cfg.abs_tol / 10.0)
    };
    let n = basis.dim();
    let mut rows = Vec::with_capacity(n);
    let mut max_shift = 0.0_f64;
    for s in 0..n {
        let init = basis_state(n, s);
        let a = integrate(basis, h1e, p, &init, &base_cfg)?.asymptotic;
        let b = integrate(basis, h1e, p, &init, &fine_cfg)?.asymptotic;
        for (x, y) in a.iter().zip(&b) {
            max_shift = max_shift.max((x - y).norm());
        }
        rows.push(a);
    }
    Ok(TruncationStudy {
        max_shift,
        epsilon: EPSILON_FLOOR.max(10.0 * max_shift),
        baseline: transition_matrix_from_rows(&rows),
    })
}
