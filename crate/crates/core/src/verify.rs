//! Randomized checks of the one-sided-spectrum theorems and the first-order
//! (a)symmetry statements on generated systems.
//!
//! Trials are independent and reproducible: trial k of root seed s uses the
//! generator seeded with [`trial_seed`]`(s, k)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{truncation_study, IntegrationConfig, EPSILON_FLOOR};
use crate::error::{Error, Result};
use crate::operators::{eigendecompose, matrix_elements, EigenSystem, GeneralOperator, HermitianOperator};
use crate::perturbation::first_order;
use crate::pulses::Pulse;

/// Budgets above this are flagged in reports.
pub const EPSILON_TARGET: f64 = 1e-3;
/// Controls must exceed the budget by this factor.
pub const CONTROL_MARGIN: f64 = 10.0;
/// Relative tolerance of first-order symmetry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Relative asymmetry a certificate case must show.
pub const ASYMMETRY_MINIMUM: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseFamily {
    /// Pole below the real axis: no upward transitions.
    UpperPole,
    /// Pole above the real axis: no downward transitions.
    LowerPole,
    /// Modulated pole whose support clears the level spread.
    ClearingModulated,
    /// Same with the sign of the modulation reversed (control).
    NonClearingModulated,
    /// Real Gaussian with Hermitian H1 (control).
    HermitianGaussian,
    /// Complex pole pulse with Hermitian H1.
    ComplexPoleHermitian,
    /// Real Gaussian with a non-normal H1.
    RealGaussianNonNormal,
}

impl PulseFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PulseFamily::UpperPole => "upper_pole",
            PulseFamily::LowerPole => "lower_pole",
            PulseFamily::ClearingModulated => "clearing_modulated",
            PulseFamily::NonClearingModulated => "non_clearing_modulated",
            PulseFamily::HermitianGaussian => "hermitian_gaussian",
            PulseFamily::ComplexPoleHermitian => "complex_pole_hermitian",
            PulseFamily::RealGaussianNonNormal => "real_gaussian_non_normal",
        }
    }

    fn hermitian_h1(&self) -> bool {
        matches!(self, PulseFamily::HermitianGaussian | PulseFamily::ComplexPoleHermitian)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSystemSpec {
    pub min_dim: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub h0_scale: f64,
    pub h1_scale: f64,
    pub family: PulseFamily,
    /// Range of |A|.
    pub amplitude: (f64, f64),
    /// Range of |t_p|.
    pub pole_offset: (f64, f64),
    /// Range of the Gaussian width.
    pub sigma: (f64, f64),
    /// |Omega| = factor * spread for modulated families.
    pub omega_factor: f64,
    /// Cap on |A| * row-sum norm of H1.
    pub strength_cap: f64,
}

impl RandomSystemSpec {
    pub fn new(family: PulseFamily, seed: u64) -> Self {
        Self {
            min_dim: 2,
            max_dim: 6,
            seed,
            h0_scale: 1.0,
            h1_scale: 1.0,
            family,
            amplitude: (0.2, 2.0),
            pole_offset: (0.5, 1.0),
            sigma: (0.4, 0.6),
            omega_factor: 1.1,
            strength_cap: 10.0,
        }
    }

    pub fn with_dims(mut self, min_dim: usize, max_dim: usize) -> Self {
        self.min_dim = min_dim;
        self.max_dim = max_dim;
        self
    }

    pub fn with_family(mut self, family: PulseFamily) -> Self {
        self.family = family;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.min_dim < 2 || self.max_dim > 8 || self.min_dim > self.max_dim {
            return Err(Error::InvalidArgument("dimensions must satisfy 2 <= min <= max <= 8".into()));
        }
        Ok(())
    }
}

/// SplitMix64 mix of the root seed and trial index.
pub fn trial_seed(root: u64, trial: usize) -> u64 {
    let mut z = root ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct GeneratedSystem {
    pub seed: u64,
    pub h0: HermitianOperator,
    pub h1: GeneralOperator,
    pub basis: EigenSystem,
    pub h1e: GeneralOperator,
    pub pulse: Pulse,
}

impl GeneratedSystem {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

fn uniform_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)) * scale
}

/// Draws one system from `spec` using `seed`.
pub fn generate(spec: &RandomSystemSpec, seed: u64) -> Result<GeneratedSystem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(spec.min_dim..=spec.max_dim);
    let m = GeneralOperator::from_fn(dim, |_, _| uniform_complex(&mut rng, spec.h0_scale))?;
    let h0 = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let h0 = HermitianOperator::new(h0)?;
    let mut h1 = GeneralOperator::from_fn(dim, |_, _| uniform_complex(&mut rng, spec.h1_scale))?;
    if spec.family.hermitian_h1() {
        h1 = h1.add(&h1.adjoint())?.scale(Complex64::new(0.5, 0.0));
    }
    let basis = eigendecompose(&h0)?;
    let spread = basis.spread();

    let magnitude = rng.gen_range(spec.amplitude.0..=spec.amplitude.1);
    let phase = rng.gen_range(0.0..2.0 * PI);
    let offset = rng.gen_range(spec.pole_offset.0..=spec.pole_offset.1);
    let below = rng.gen_bool(0.5);
    let sigma = rng.gen_range(spec.sigma.0..=spec.sigma.1);
    let a = Complex64::from_polar(magnitude, phase);
    let pulse = match spec.family {
        PulseFamily::UpperPole => Pulse::pole(a, -offset)?,
        PulseFamily::LowerPole | PulseFamily::ComplexPoleHermitian => Pulse::pole(a, offset)?,
        PulseFamily::ClearingModulated | PulseFamily::NonClearingModulated => {
            let t_p = if below { -offset } else { offset };
            let clearing = t_p.signum() * spec.omega_factor * spread;
            let omega = if spec.family == PulseFamily::ClearingModulated { clearing } else { -clearing };
            Pulse::modulated_pole(a, t_p, omega)?
        }
        PulseFamily::HermitianGaussian | PulseFamily::RealGaussianNonNormal => {
            Pulse::gaussian(magnitude, sigma, 0.0)?
        }
    };
    let strength = magnitude * h1.row_sum_norm();
    if strength > spec.strength_cap {
        h1 = h1.scale(Complex64::new(spec.strength_cap / strength, 0.0));
    }
    let h1e = matrix_elements(&h1, &basis)?;
    Ok(GeneratedSystem {
        seed,
        h0,
        h1,
        basis,
        h1e,
        pulse,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Unidirectional,
    Transitionless,
    FirstOrderSymmetry,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Unidirectional => "unidirectional",
            Suite::Transitionless => "transitionless",
            Suite::FirstOrderSymmetry => "first_order_symmetry",
        }
    }
}

/// What a passing trial must show.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expectation {
    /// Violation below the budget.
    Below(f64),
    /// Violation above the threshold (controls and asymmetry certificates).
    Above(f64),
}

impl Expectation {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Expectation::Below(b) => value < b,
            Expectation::Above(b) => value > b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub spread: f64,
    /// Largest violation of the suite's assertion.
    pub violation: f64,
    /// (n, m) where the violation occurred, 0-based; m == n for survival.
    pub worst_pair: Option<(usize, usize)>,
    /// max |c_l(T) - c_l(2T, tighter tolerance)|.
    pub truncation_shift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub family: PulseFamily,
    pub root_seed: u64,
    /// Budget derived from the truncation study; zero for first-order suites.
    pub epsilon_trunc: f64,
    pub expectation: Expectation,
    pub trials: Vec<TrialOutcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.trials.is_empty() && self.trials.iter().all(|t| self.expectation.holds(t.violation))
    }

    /// Trial farthest from meeting the expectation.
    pub fn worst(&self) -> Option<&TrialOutcome> {
        let key = |t: &&TrialOutcome| match self.expectation {
            Expectation::Below(_) => t.violation,
            Expectation::Above(_) => -t.violation,
        };
        self.trials.iter().max_by(|a, b| key(a).total_cmp(&key(b)))
    }

    pub fn epsilon_flagged(&self) -> bool {
        self.epsilon_trunc > EPSILON_TARGET
    }

    /// Structured text: a header, one line per trial, a summary line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (kind, bound) = match self.expectation {
            Expectation::Below(b) => ("below", b),
            Expectation::Above(b) => ("above", b),
        };
        let _ = writeln!(s, "suite = {}", self.suite.name());
        let _ = writeln!(s, "family = {}", self.family.name());
        let _ = writeln!(s, "root_seed = {}", self.root_seed);
        let _ = writeln!(s, "epsilon_trunc = {:.6e}", self.epsilon_trunc);
        if self.epsilon_flagged() {
            let _ = writeln!(s, "epsilon_flag = exceeds {EPSILON_TARGET:e}");
        }
        let _ = writeln!(s, "expect = violation {kind} {bound:.6e}");
        for t in &self.trials {
            let pair = t
                .worst_pair
                .map(|(n, m)| format!("{}->{}", n + 1, m + 1))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "trial {:>3} seed {:>20} N {} spread {:.4} violation {:.6e} at {} shift {:.3e} {}",
                t.index,
                t.seed,
                t.dim,
                t.spread,
                t.violation,
                pair,
                t.truncation_shift,
                if self.expectation.holds(t.violation) { "ok" } else { "FAIL" }
            );
        }
        if let Some(w) = self.worst() {
            let _ = writeln!(s, "worst = {:.6e} (trial {}, seed {})", w.violation, w.index, w.seed);
        }
        let _ = writeln!(s, "result = {}", if self.passed() { "pass" } else { "fail" });
        s
    }
}

fn dynamic_suite(family: PulseFamily) -> Result<Suite> {
    match family {
        PulseFamily::UpperPole | PulseFamily::LowerPole | PulseFamily::HermitianGaussian => Ok(Suite::Unidirectional),
        PulseFamily::ClearingModulated | PulseFamily::NonClearingModulated => Ok(Suite::Transitionless),
        _ => Err(Error::InvalidArgument(format!(
            "family {} has no dynamical suite",
            family.name()
        ))),
    }
}

/// Runs one dynamical trial. For one-sided families the violation is the
/// largest forbidden-direction population or survival deviation
/// |c_n - 1|; the Gaussian control is measured against the upward rule.
/// For modulated families it is the largest off-initial population.
pub fn run_dynamic_trial(spec: &RandomSystemSpec, index: usize, cfg: &IntegrationConfig) -> Result<TrialOutcome> {
    let suite = dynamic_suite(spec.family)?;
    let seed = trial_seed(spec.seed, index);
    let sys = generate(spec, seed)?;
    let study = truncation_study(&sys.basis, &sys.h1e, &sys.pulse, cfg)?;
    let omegas = sys.basis.omegas();
    let n_dim = sys.dim();
    let w = &study.baseline;
    let survival = w.survival_amplitudes.as_ref().expect("numeric source");
    let mut violation = 0.0_f64;
    let mut worst_pair = None;
    let mut consider = |v: f64, pair: (usize, usize)| {
        if v > violation || worst_pair.is_none() {
            violation = violation.max(v);
            worst_pair = Some(pair);
        }
    };
    for n in 0..n_dim {
        match suite {
            Suite::Unidirectional => {
                let downward_forbidden = spec.family == PulseFamily::LowerPole;
                for m in 0..n_dim {
                    let forbidden = if downward_forbidden {
                        omegas[m] < omegas[n]
                    } else {
                        omegas[m] > omegas[n]
                    };
                    if m != n && forbidden {
                        consider(w.w[n][m], (n, m));
                    }
                }
                consider((survival[n] - 1.0).norm(), (n, n));
            }
            _ => {
                for m in 0..n_dim {
                    if m != n {
                        consider(w.w[n][m], (n, m));
                    }
                }
            }
        }
    }
    Ok(TrialOutcome {
        index,
        seed,
        dim: n_dim,
        spread: sys.basis.spread(),
        violation,
        worst_pair,
        truncation_shift: study.max_shift,
    })
}

/// Budget from a set of trials: max(floor, 10 * largest truncation shift).
pub fn epsilon_from(trials: &[TrialOutcome]) -> f64 {
    let shift = trials.iter().map(|t| t.truncation_shift).fold(0.0, f64::max);
    EPSILON_FLOOR.max(10.0 * shift)
}

/// Builds a dynamical report. Theorem families must stay below the budget;
/// control families must exceed `CONTROL_MARGIN` times `reference_epsilon`
/// (or their own budget if larger).
pub fn assemble_dynamic_report(
    spec: &RandomSystemSpec,
    trials: Vec<TrialOutcome>,
    reference_epsilon: Option<f64>,
) -> Result<Report> {
    let suite = dynamic_suite(spec.family)?;
    let own = epsilon_from(&trials);
    let control = matches!(
        spec.family,
        PulseFamily::HermitianGaussian | PulseFamily::NonClearingModulated
    );
    let (epsilon, expectation) = if control {
        let eps = own.max(reference_epsilon.unwrap_or(0.0));
        (eps, Expectation::Above(CONTROL_MARGIN * eps))
    } else {
        (own, Expectation::Below(own))
    };
    Ok(Report {
        suite,
        family: spec.family,
        root_seed: spec.seed,
        epsilon_trunc: epsilon,
        expectation,
        trials,
    })
}

fn run_dynamic(spec: &RandomSystemSpec, trials: usize, cfg: &IntegrationConfig, reference: Option<f64>) -> Result<Report> {
    let outcomes = (0..trials)
        .map(|k| run_dynamic_trial(spec, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_dynamic_report(spec, outcomes, reference)
}

/// Upward (or, for [`PulseFamily::LowerPole`], downward) transitions and
/// survival deviation against the derived budget.
pub fn check_unidirectional(spec: &RandomSystemSpec, trials: usize, cfg: &IntegrationConfig) -> Result<Report> {
    if !matches!(spec.family, PulseFamily::UpperPole | PulseFamily::LowerPole | PulseFamily::HermitianGaussian) {
        return Err(Error::InvalidArgument("unidirectional suite needs a pole or Gaussian control family".into()));
    }
    run_dynamic(spec, trials, cfg, None)
}

pub fn check_transitionless(spec: &RandomSystemSpec, trials: usize, cfg: &IntegrationConfig) -> Result<Report> {
    if !matches!(spec.family, PulseFamily::ClearingModulated | PulseFamily::NonClearingModulated) {
        return Err(Error::InvalidArgument("transitionless suite needs a modulated family".into()));
    }
    run_dynamic(spec, trials, cfg, None)
}

/// Negative control measured against a theorem suite's budget.
pub fn check_control(spec: &RandomSystemSpec, trials: usize, cfg: &IntegrationConfig, reference_epsilon: f64) -> Result<Report> {
    run_dynamic(spec, trials, cfg, Some(reference_epsilon))
}

/// First-order W of one generated system: the relative asymmetry
/// max |W_nm - W_mn| / max W over off-diagonal pairs.
pub fn run_symmetry_trial(spec: &RandomSystemSpec, index: usize) -> Result<TrialOutcome> {
    let seed = trial_seed(spec.seed, index);
    let sys = generate(spec, seed)?;
    let w = first_order(&sys.basis, &sys.h1e, &sys.pulse)?;
    let n = sys.dim();
    let mut scale = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                scale = scale.max(w.w[a][b]);
            }
        }
    }
    let mut violation = 0.0_f64;
    let mut worst_pair = None;
    for a in 0..n {
        for b in 0..a {
            let d = if scale > 0.0 { (w.w[a][b] - w.w[b][a]).abs() / scale } else { 0.0 };
            if d >= violation {
                violation = d;
                worst_pair = Some((a, b));
            }
        }
    }
    Ok(TrialOutcome {
        index,
        seed,
        dim: n,
        spread: sys.basis.spread(),
        violation,
        worst_pair,
        truncation_shift: 0.0,
    })
}

/// Hermitian Gaussian must be symmetric to [`SYMMETRY_TOLERANCE`]; the two
/// certificate families must be asymmetric by at least [`ASYMMETRY_MINIMUM`].
pub fn check_first_order_symmetry(spec: &RandomSystemSpec, trials: usize) -> Result<Report> {
    let expectation = match spec.family {
        PulseFamily::HermitianGaussian => Expectation::Below(SYMMETRY_TOLERANCE),
        PulseFamily::ComplexPoleHermitian | PulseFamily::RealGaussianNonNormal => {
            Expectation::Above(ASYMMETRY_MINIMUM)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "family {} is not a first-order symmetry case",
                other.name()
            )))
        }
    };
    let outcomes = (0..trials)
        .map(|k| run_symmetry_trial(spec, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        suite: Suite::FirstOrderSymmetry,
        family: spec.family,
        root_seed: spec.seed,
        epsilon_trunc: 0.0,
        expectation,
        trials: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IntegrationConfig {
        IntegrationConfig {
            output_points: 2,
            ..IntegrationConfig::default()
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let spec = RandomSystemSpec::new(PulseFamily::UpperPole, 42);
        let a = generate(&spec, trial_seed(42, 3)).unwrap();
        let b = generate(&spec, trial_seed(42, 3)).unwrap();
        assert_eq!(a.h0.as_general(), b.h0.as_general());
        assert_eq!(a.h1, b.h1);
        assert_ne!(trial_seed(42, 3), trial_seed(42, 4));
    }

    #[test]
    fn generated_systems_respect_the_spec() {
        for family in [PulseFamily::UpperPole, PulseFamily::ClearingModulated, PulseFamily::HermitianGaussian] {
            let spec = RandomSystemSpec::new(family, 7);
            for k in 0..20 {
                let s = generate(&spec, trial_seed(7, k)).unwrap();
                assert!((2..=6).contains(&s.dim()));
                let a = s.pulse.amplitude().map(|a| a.norm()).unwrap_or(1.0);
                assert!(a * s.h1.row_sum_norm() <= 10.0 + 1e-12);
                let c = s.pulse.classify();
                match family {
                    PulseFamily::UpperPole => assert!(c.support.forbids_upward()),
                    PulseFamily::ClearingModulated => assert!(c.support.clears(s.basis.spread())),
                    _ => assert!(s.h1.is_hermitian(1e-12)),
                }
            }
        }
    }

    #[test]
    fn small_unidirectional_run() {
        let spec = RandomSystemSpec::new(PulseFamily::UpperPole, 1).with_dims(2, 3);
        let r = check_unidirectional(&spec, 3, &cfg()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let mirrored = spec.with_family(PulseFamily::LowerPole);
        let r = check_unidirectional(&mirrored, 3, &cfg()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn small_transitionless_run_and_control() {
        let spec = RandomSystemSpec::new(PulseFamily::ClearingModulated, 5).with_dims(2, 4);
        let r = check_transitionless(&spec, 3, &cfg()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let ctrl = spec.with_family(PulseFamily::NonClearingModulated);
        let c = check_control(&ctrl, 3, &cfg(), r.epsilon_trunc).unwrap();
        assert!(c.passed(), "{}", c.to_text());
    }

    #[test]
    fn symmetry_cases() {
        let herm = RandomSystemSpec::new(PulseFamily::HermitianGaussian, 9);
        assert!(check_first_order_symmetry(&herm, 10).unwrap().passed());
        for family in [PulseFamily::ComplexPoleHermitian, PulseFamily::RealGaussianNonNormal] {
            let r = check_first_order_symmetry(&herm.with_family(family), 10).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn report_text_names_seeds_and_budget() {
        let spec = RandomSystemSpec::new(PulseFamily::UpperPole, 11).with_dims(2, 2);
        let r = check_unidirectional(&spec, 2, &cfg()).unwrap();
        let text = r.to_text();
        assert!(text.contains("epsilon_trunc = "));
        assert!(text.contains(&format!("seed {:>20}", trial_seed(11, 1))));
        assert!(text.ends_with("result = pass\n"));
    }
}
