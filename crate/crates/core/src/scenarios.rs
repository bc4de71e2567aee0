//! Prebuilt exceptional-point models, loop geometry of z(t) = 1 + f(t) and
//! the ten reference panels.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{basis_state, converge_window, integrate, AmplitudeTrajectory, IntegrationConfig};
use crate::error::{Error, Result};
use crate::operators::{eigendecompose, eigenvalues, matrix_elements, EigenSystem, GeneralOperator, HermitianOperator};
use crate::pulses::Pulse;

/// Loops closer than this to z = 0 are rejected.
pub const EP_GUARD: f64 = 1e-6;
/// A final population above this fraction of the total decides the verdict.
pub const DOMINANCE: f64 = 0.9;
/// Window doublings allowed when certifying a figure run.
pub const MAX_DOUBLINGS: usize = 4;

/// H0 = |I><II| + |II><I|, H1 = |II><I|; H0 + f H1 = [[0, 1], [z, 0]].
pub fn build_ep2() -> (HermitianOperator, GeneralOperator) {
    let h0 = GeneralOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2");
    let h1 = GeneralOperator::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("2x2");
    (HermitianOperator::new(h0).expect("symmetric"), h1)
}

/// H0 + f H1 = [[0, 1, 0], [z, 0, 1], [0, z, 0]].
pub fn build_ep3() -> (HermitianOperator, GeneralOperator) {
    let h0 = GeneralOperator::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]])
        .expect("3x3");
    let h1 = GeneralOperator::from_real_rows(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
        .expect("3x3");
    (HermitianOperator::new(h0).expect("symmetric"), h1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Ep2,
    Ep3,
}

impl Model {
    pub fn operators(&self) -> (HermitianOperator, GeneralOperator) {
        match self {
            Model::Ep2 => build_ep2(),
            Model::Ep3 => build_ep3(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Ep2 => 2,
            Model::Ep3 => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Ep2 => "ep2",
            Model::Ep3 => "ep3",
        }
    }

    /// H0 + (z - 1) H1 in the bare basis.
    pub fn hamiltonian_at(&self, z: Complex64) -> GeneralOperator {
        let (h0, h1) = self.operators();
        h0.as_general().add(&h1.scale(z - 1.0)).expect("same dim")
    }

    /// Closed-form instantaneous eigenvalues, ascending by real part.
    pub fn exact_eigenvalues(&self, z: Complex64) -> Vec<Complex64> {
        let r = match self {
            Model::Ep2 => z.sqrt(),
            Model::Ep3 => (z * 2.0).sqrt(),
        };
        let mut v = match self {
            Model::Ep2 => alloc::vec![-r, r],
            Model::Ep3 => alloc::vec![-r, Complex64::new(0.0, 0.0), r],
        };
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }
}

/// Model, pulse and initial level (0-based) of a run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: Model,
    pub pulse: Pulse,
    pub init: usize,
}

/// Sampled loop z(t) = 1 + f(t).
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub times: Vec<f64>,
    pub samples: Vec<Complex64>,
    /// Signed number of turns around z = 0; counter-clockwise is positive.
    pub winding: i32,
    /// Distance of the accumulated turn count from the nearest integer.
    pub winding_residual: f64,
    pub min_distance_to_ep: f64,
}

/// Grid on [-t_max, t_max] with t = s tan(theta), theta uniform, so samples
/// crowd within |t| of order `s`. Symmetric under t -> -t exactly.
pub fn loop_grid(t_max: f64, scale: f64, points: usize) -> Vec<f64> {
    let points = points.max(3) | 1;
    let half = points / 2;
    let theta_max = (t_max / scale).atan();
    let mut grid = alloc::vec![0.0; points];
    for k in 0..half {
        let theta = -theta_max + theta_max * k as f64 / half as f64;
        let t = if k == 0 { -t_max } else { scale * theta.tan() };
        grid[k] = t;
        grid[points - 1 - k] = -t;
    }
    grid
}

/// Winding and EP distance of z(t) = 1 + f(t) over `grid`.
pub fn analyze_loop(p: &Pulse, grid: &[f64]) -> Result<Loop> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("loop grid needs at least two points".into()));
    }
    let samples = grid
        .iter()
        .map(|&t| p.evaluate_real(t).map(|f| f + 1.0))
        .collect::<Result<Vec<_>>>()?;
    let min_distance = samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_distance < EP_GUARD {
        return Err(Error::DegenerateLoop { min_distance });
    }
    let mut total = 0.0;
    for w in samples.windows(2) {
        total += (w[1] / w[0]).arg();
    }
    // Close the loop through the straight segment back to the start.
    total += (samples[0] / samples[samples.len() - 1]).arg();
    let turns = total / (2.0 * PI);
    let winding = turns.round();
    Ok(Loop {
        times: grid.to_vec(),
        samples,
        winding: winding as i32,
        winding_residual: (turns - winding).abs(),
        min_distance_to_ep: min_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Remained,
    /// 1-based label of the dominant level.
    FlippedTo(usize),
    Mixed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Remained => write!(f, "remained"),
            Verdict::FlippedTo(m) => write!(f, "flipped_to({m})"),
            Verdict::Mixed => write!(f, "mixed"),
        }
    }
}

/// Dominance rule on final populations; `init` is 0-based.
pub fn verdict(populations: &[f64], init: usize) -> Verdict {
    let total: f64 = populations.iter().sum();
    let (d, &top) = populations
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if total > 0.0 && top / total > DOMINANCE {
        if d == init {
            Verdict::Remained
        } else {
            Verdict::FlippedTo(d + 1)
        }
    } else {
        Verdict::Mixed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig1a,
        Figure::Fig1b,
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig5a,
        Figure::Fig5b,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.id().eq_ignore_ascii_case(id))
    }

    /// Pole offset and modulation frequency (None for the plain pole).
    pub fn parameters(&self) -> (f64, Option<f64>) {
        let w3 = 2.0 * SQRT_2;
        match self {
            Figure::Fig1a | Figure::Fig4a => (-0.5, None),
            Figure::Fig1b | Figure::Fig4b => (0.5, None),
            Figure::Fig2a => (-0.5, Some(-2.0)),
            Figure::Fig2b => (0.5, Some(2.0)),
            Figure::Fig3a => (-0.5, Some(2.0)),
            Figure::Fig3b => (0.5, Some(-2.0)),
            Figure::Fig5a => (-0.5, Some(-w3)),
            Figure::Fig5b => (0.5, Some(w3)),
        }
    }

    pub fn scenario(&self) -> Scenario {
        let model = match self {
            Figure::Fig4a | Figure::Fig4b | Figure::Fig5a | Figure::Fig5b => Model::Ep3,
            _ => Model::Ep2,
        };
        let (t_p, omega) = self.parameters();
        let a = Complex64::new(1.0, 0.0);
        let pulse = match omega {
            None => Pulse::pole(a, t_p),
            Some(w) => Pulse::modulated_pole(a, t_p, w),
        }
        .expect("valid reference parameters");
        // Three-level panels start in the middle level.
        let init = match model {
            Model::Ep2 => 0,
            Model::Ep3 => 1,
        };
        Scenario { model, pulse, init }
    }

    /// Verdict stated for the panel. Mixed panels only promise "not a clean
    /// outcome".
    pub fn expected_verdict(&self) -> Verdict {
        match self {
            Figure::Fig1b => Verdict::FlippedTo(2),
            Figure::Fig4a => Verdict::FlippedTo(1),
            Figure::Fig4b => Verdict::FlippedTo(3),
            Figure::Fig3a | Figure::Fig3b => Verdict::Mixed,
            _ => Verdict::Remained,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub label: String,
    pub model: Model,
    pub init: usize,
    pub loop_: Loop,
    pub trajectory: AmplitudeTrajectory,
    /// Eigenvalues of H(t) at each loop sample, ascending by real part.
    pub instantaneous_eigenvalues: Vec<Vec<Complex64>>,
    pub final_populations: Vec<f64>,
    pub verdict: Verdict,
    /// Window half-widths used by the convergence doubling.
    pub windows: Vec<f64>,
    pub window_change: f64,
    pub converged: bool,
}

pub const LOOP_POINTS: usize = 4001;

/// Integrates a scenario with window doubling and analyses its loop.
pub fn run_scenario(label: &str, s: &Scenario, cfg: &IntegrationConfig) -> Result<ScenarioResult> {
    let (h0, h1) = s.model.operators();
    let basis = eigendecompose(&h0)?;
    let h1e = matrix_elements(&h1, &basis)?;
    let init = basis_state(basis.dim(), s.init);
    let run = converge_window(&basis, &h1e, &s.pulse, &init, cfg, MAX_DOUBLINGS)?;
    let t_max = cfg.t_start.abs().max(cfg.t_end.abs());
    let scale = s.pulse.t_p().map(f64::abs).unwrap_or(1.0);
    let loop_ = analyze_loop(&s.pulse, &loop_grid(t_max, scale, LOOP_POINTS))?;
    let instantaneous_eigenvalues = loop_
        .samples
        .iter()
        .map(|&z| eigenvalues(&s.model.hamiltonian_at(z)))
        .collect::<Result<Vec<_>>>()?;
    let final_populations = run.trajectory.final_populations();
    Ok(ScenarioResult {
        label: label.into(),
        model: s.model,
        init: s.init,
        verdict: verdict(&final_populations, s.init),
        loop_,
        trajectory: run.trajectory,
        instantaneous_eigenvalues,
        final_populations,
        windows: run.windows,
        window_change: run.change,
        converged: run.converged,
    })
}

pub fn run_figure(fig: Figure) -> Result<ScenarioResult> {
    run_scenario(fig.id(), &fig.scenario(), &IntegrationConfig::default())
}

/// Basis and matrix elements of a model.
pub fn model_system(model: Model) -> Result<(EigenSystem, GeneralOperator)> {
    let (h0, h1) = model.operators();
    let basis = eigendecompose(&h0)?;
    let h1e = matrix_elements(&h1, &basis)?;
    Ok((basis, h1e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPoint {
    pub omega: f64,
    pub t_p: f64,
    pub final_populations: Vec<f64>,
    pub verdict: Verdict,
}

/// Three-level runs with A = 1 and t_p = 0.5 sign(Omega) (positive at
/// Omega = 0), starting from level `init` (0-based).
pub fn omega_threshold_scan(init: usize, omegas: &[f64]) -> Result<Vec<ThresholdPoint>> {
    let (basis, h1e) = model_system(Model::Ep3)?;
    if init >= basis.dim() {
        return Err(Error::InvalidArgument(alloc::format!("initial level {} out of range", init + 1)));
    }
    let cfg = IntegrationConfig {
        output_points: 2,
        ..IntegrationConfig::default()
    };
    omegas
        .iter()
        .map(|&omega| {
            let t_p = if omega < 0.0 { -0.5 } else { 0.5 };
            let p = Pulse::modulated_pole(Complex64::new(1.0, 0.0), t_p, omega)?;
            let traj = integrate(&basis, &h1e, &p, &basis_state(3, init), &cfg)?;
            let pops = traj.final_populations();
            Ok(ThresholdPoint {
                omega,
                t_p,
                verdict: verdict(&pops, init),
                final_populations: pops,
            })
        })
        .collect()
}
