//! Perturbation envelopes f(t).
//!
//! Fourier convention throughout the crate: F(w) = int f(t) exp(+i w t) dt.
//! Under this convention a pole pulse A/(t - i t_p)^2 with t_p < 0 is
//! holomorphic in Im t >= 0 and its spectrum vanishes for w > 0; the
//! modulated pulse A exp(-i Omega t)/(t - i t_p)^2 has F(w) = F_pole(w - Omega),
//! i.e. its spectral edge sits at w = Omega.

use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::inverse_square_ray_integral;

/// Minimum distance between an evaluation point and the pole.
pub const POLE_GUARD: f64 = 1e-9;

/// Real-time envelope supplied by the caller.
pub type CustomFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Zero,
    Pole { amplitude: Complex64, t_p: f64 },
    ModulatedPole { amplitude: Complex64, t_p: f64, omega: f64 },
    GaussianReal { amplitude: f64, sigma: f64, center: f64 },
    Custom(CustomFn),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseKind {
    Zero,
    PolePulse,
    ModulatedPolePulse,
    GaussianReal,
    Custom,
}

/// Half-plane of complex time in which f is holomorphic and decays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Holomorphy {
    UpperHolomorphic,
    LowerHolomorphic,
    TwoSided,
}

/// Where F(w) may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralSupport {
    /// F(w) = 0 for w > 0.
    NegativeOnly,
    /// F(w) = 0 for w < 0.
    PositiveOnly,
    /// F(w) = 0 for w > edge.
    ShiftedNegative(f64),
    /// F(w) = 0 for w < edge.
    ShiftedPositive(f64),
    TwoSided,
}

impl SpectralSupport {
    /// True when F is guaranteed to vanish at `omega`.
    pub fn forbids(&self, omega: f64) -> bool {
        match *self {
            SpectralSupport::NegativeOnly => omega > 0.0,
            SpectralSupport::PositiveOnly => omega < 0.0,
            SpectralSupport::ShiftedNegative(edge) => omega > edge,
            SpectralSupport::ShiftedPositive(edge) => omega < edge,
            SpectralSupport::TwoSided => false,
        }
    }

    /// F vanishes on all of w > 0: no transitions toward higher energy.
    pub fn forbids_upward(&self) -> bool {
        match *self {
            SpectralSupport::NegativeOnly => true,
            SpectralSupport::ShiftedNegative(edge) => edge <= 0.0,
            _ => false,
        }
    }

    /// F vanishes on all of w < 0: no transitions toward lower energy.
    pub fn forbids_downward(&self) -> bool {
        match *self {
            SpectralSupport::PositiveOnly => true,
            SpectralSupport::ShiftedPositive(edge) => edge >= 0.0,
            _ => false,
        }
    }

    /// The support lies entirely beyond the level spread, on one side.
    pub fn clears(&self, spread: f64) -> bool {
        match *self {
            SpectralSupport::NegativeOnly => spread <= 0.0,
            SpectralSupport::PositiveOnly => spread <= 0.0,
            SpectralSupport::ShiftedNegative(edge) => edge <= -spread,
            SpectralSupport::ShiftedPositive(edge) => edge >= spread,
            SpectralSupport::TwoSided => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub holomorphy: Holomorphy,
    pub support: SpectralSupport,
    /// Set for custom envelopes, whose classification is not derived.
    pub unverified: bool,
}

/// Which tail of the time axis a tail integral covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// From `t0` to `t0 + inf`.
    Upper,
    /// From `t0 - inf` to `t0`.
    Lower,
}

/// A complex perturbation envelope f(t).
#[derive(Clone)]
pub struct Pulse {
    shape: Shape,
}

impl fmt::Debug for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Zero => write!(f, "Pulse::Zero"),
            Shape::Pole { amplitude, t_p } => {
                write!(f, "Pulse::Pole {{ A: {amplitude}, t_p: {t_p} }}")
            }
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            } => write!(
                f,
                "Pulse::ModulatedPole {{ A: {amplitude}, t_p: {t_p}, Omega: {omega} }}"
            ),
            Shape::GaussianReal {
                amplitude,
                sigma,
                center,
            } => write!(
                f,
                "Pulse::GaussianReal {{ A: {amplitude}, sigma: {sigma}, t0: {center} }}"
            ),
            Shape::Custom(_) => write!(f, "Pulse::Custom"),
        }
    }
}

impl Pulse {
    /// f = 0.
    pub fn zero() -> Self {
        Self { shape: Shape::Zero }
    }

    /// f(t) = A / (t - i t_p)^2. The pole must be off the real axis.
    pub fn pole(amplitude: Complex64, t_p: f64) -> Result<Self> {
        check_pole_offset(t_p)?;
        Ok(Self {
            shape: Shape::Pole { amplitude, t_p },
        })
    }

    /// f(t) = A exp(-i Omega t) / (t - i t_p)^2.
    pub fn modulated_pole(amplitude: Complex64, t_p: f64, omega: f64) -> Result<Self> {
        check_pole_offset(t_p)?;
        if !omega.is_finite() {
            return Err(Error::InvalidArgument("Omega must be finite".into()));
        }
        Ok(Self {
            shape: Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            },
        })
    }

    /// f(t) = A exp(-(t - t0)^2 / (2 sigma^2)) with real A.
    pub fn gaussian(amplitude: f64, sigma: f64, center: f64) -> Result<Self> {
        if !(sigma > 0.0) || !amplitude.is_finite() || !center.is_finite() {
            return Err(Error::InvalidArgument(
                "Gaussian needs finite amplitude and center and sigma > 0".into(),
            ));
        }
        Ok(Self {
            shape: Shape::GaussianReal {
                amplitude,
                sigma,
                center,
            },
        })
    }

    /// Arbitrary envelope known only on the real axis.
    pub fn custom(f: CustomFn) -> Self {
        Self {
            shape: Shape::Custom(f),
        }
    }

    pub fn kind(&self) -> PulseKind {
        match self.shape {
            Shape::Zero => PulseKind::Zero,
            Shape::Pole { .. } => PulseKind::PolePulse,
            Shape::ModulatedPole { .. } => PulseKind::ModulatedPolePulse,
            Shape::GaussianReal { .. } => PulseKind::GaussianReal,
            Shape::Custom(_) => PulseKind::Custom,
        }
    }

    pub fn amplitude(&self) -> Option<Complex64> {
        match self.shape {
            Shape::Pole { amplitude, .. } | Shape::ModulatedPole { amplitude, .. } => {
                Some(amplitude)
            }
            Shape::GaussianReal { amplitude, .. } => Some(Complex64::new(amplitude, 0.0)),
            _ => None,
        }
    }

    pub fn t_p(&self) -> Option<f64> {
        match self.shape {
            Shape::Pole { t_p, .. } | Shape::ModulatedPole { t_p, .. } => Some(t_p),
            _ => None,
        }
    }

    /// Modulation frequency; zero for unmodulated pole pulses.
    pub fn omega(&self) -> Option<f64> {
        match self.shape {
            Shape::Pole { .. } => Some(0.0),
            Shape::ModulatedPole { omega, .. } => Some(omega),
            _ => None,
        }
    }

    /// Location of the pole, i t_p.
    pub fn pole_location(&self) -> Option<Complex64> {
        self.t_p().map(|t_p| Complex64::new(0.0, t_p))
    }

    /// f is an entire function (no singularities anywhere).
    pub fn is_entire(&self) -> bool {
        matches!(self.shape, Shape::Zero | Shape::GaussianReal { .. })
    }

    /// The same envelope with its amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::Zero => Shape::Zero,
            Shape::Pole { amplitude, t_p } => Shape::Pole {
                amplitude: amplitude * factor,
                t_p: *t_p,
            },
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            } => Shape::ModulatedPole {
                amplitude: amplitude * factor,
                t_p: *t_p,
                omega: *omega,
            },
            Shape::GaussianReal {
                amplitude,
                sigma,
                center,
            } => Shape::GaussianReal {
                amplitude: amplitude * factor,
                sigma: *sigma,
                center: *center,
            },
            Shape::Custom(f) => {
                let f = f.clone();
                Shape::Custom(Arc::new(move |t| f(t) * factor))
            }
        };
        Self { shape }
    }

    /// The envelope t -> conj(f(t)) on the real axis.
    pub fn conjugated(&self) -> Self {
        let shape = match &self.shape {
            Shape::Zero => Shape::Zero,
            Shape::Pole { amplitude, t_p } => Shape::Pole {
                amplitude: amplitude.conj(),
                t_p: -t_p,
            },
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            } => Shape::ModulatedPole {
                amplitude: amplitude.conj(),
                t_p: -t_p,
                omega: -omega,
            },
            Shape::GaussianReal { .. } => self.shape.clone(),
            Shape::Custom(f) => {
                let f = f.clone();
                Shape::Custom(Arc::new(move |t| f(t).conj()))
            }
        };
        Self { shape }
    }

    /// f(t) at complex time t.
    pub fn evaluate(&self, t: Complex64) -> Result<Complex64> {
        match &self.shape {
            Shape::Zero => Ok(Complex64::new(0.0, 0.0)),
            Shape::Pole { amplitude, t_p } => {
                let d = pole_offset(t, *t_p)?;
                Ok(amplitude / (d * d))
            }
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            } => {
                let d = pole_offset(t, *t_p)?;
                Ok(amplitude / (d * d) * (Complex64::new(0.0, -omega) * t).exp())
            }
            Shape::GaussianReal {
                amplitude,
                sigma,
                center,
            } => {
                let x = (t - center) / sigma;
                Ok((-(x * x) * 0.5).exp() * *amplitude)
            }
            Shape::Custom(f) => {
                if t.im != 0.0 {
                    return Err(Error::Unsupported(
                        "custom pulses are only defined on the real axis",
                    ));
                }
                Ok(f(t.re))
            }
        }
    }

    /// f(t) for real t.
    pub fn evaluate_real(&self, t: f64) -> Result<Complex64> {
        self.evaluate(Complex64::new(t, 0.0))
    }

    /// Closed-form spectrum F(w) = int f(t) exp(i w t) dt.
    pub fn analytic_spectrum(&self, omega: f64) -> Result<Complex64> {
        match &self.shape {
            Shape::Zero => Ok(Complex64::new(0.0, 0.0)),
            Shape::Pole { amplitude, t_p } => Ok(pole_spectrum(*amplitude, *t_p, omega)),
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega: shift,
            } => Ok(pole_spectrum(*amplitude, *t_p, omega - shift)),
            Shape::GaussianReal {
                amplitude,
                sigma,
                center,
            } => {
                let mag = amplitude * sigma * (2.0 * PI).sqrt() * (-0.5 * sigma * sigma * omega * omega).exp();
                Ok(Complex64::from_polar(1.0, omega * center) * mag)
            }
            Shape::Custom(_) => Err(Error::Unsupported(
                "no closed-form spectrum for custom pulses; use the numerical spectrum",
            )),
        }
    }

    pub fn classify(&self) -> Classification {
        let (holomorphy, support) = match self.shape {
            Shape::Zero | Shape::GaussianReal { .. } | Shape::Custom(_) => {
                (Holomorphy::TwoSided, SpectralSupport::TwoSided)
            }
            Shape::Pole { t_p, .. } => {
                if t_p < 0.0 {
                    (Holomorphy::UpperHolomorphic, SpectralSupport::NegativeOnly)
                } else {
                    (Holomorphy::LowerHolomorphic, SpectralSupport::PositiveOnly)
                }
            }
            Shape::ModulatedPole { t_p, omega, .. } => {
                if t_p < 0.0 {
                    let support = if omega == 0.0 {
                        SpectralSupport::NegativeOnly
                    } else {
                        SpectralSupport::ShiftedNegative(omega)
                    };
                    let holo = if omega <= 0.0 {
                        Holomorphy::UpperHolomorphic
                    } else {
                        Holomorphy::TwoSided
                    };
                    (holo, support)
                } else {
                    let support = if omega == 0.0 {
                        SpectralSupport::PositiveOnly
                    } else {
                        SpectralSupport::ShiftedPositive(omega)
                    };
                    let holo = if omega >= 0.0 {
                        Holomorphy::LowerHolomorphic
                    } else {
                        Holomorphy::TwoSided
                    };
                    (holo, support)
                }
            }
        };
        Classification {
            holomorphy,
            support,
            unverified: matches!(self.shape, Shape::Custom(_)),
        }
    }

    /// int f(t) exp(i kappa t) dt along the horizontal ray through `t0`
    /// (to +inf for [`Tail::Upper`], from -inf for [`Tail::Lower`]).
    ///
    /// Exact for pole pulses. Gaussian and zero envelopes return 0: callers
    /// place their windows many widths beyond the center. Custom envelopes
    /// also return 0.
    pub fn tail_integral(&self, t0: Complex64, kappa: f64, tail: Tail) -> Complex64 {
        let (amplitude, t_p, shift) = match self.shape {
            Shape::Pole { amplitude, t_p } => (amplitude, t_p, 0.0),
            Shape::ModulatedPole {
                amplitude,
                t_p,
                omega,
            } => (amplitude, t_p, omega),
            _ => return Complex64::new(0.0, 0.0),
        };
        let a = Complex64::new(0.0, t_p);
        let k = kappa - shift;
        let phase = (Complex64::i() * k * a).exp();
        match tail {
            Tail::Upper => amplitude * phase * inverse_square_ray_integral(t0 - a, k),
            Tail::Lower => amplitude * phase * inverse_square_ray_integral(a - t0, -k),
        }
    }
}

fn check_pole_offset(t_p: f64) -> Result<()> {
    if !t_p.is_finite() || t_p == 0.0 {
        return Err(Error::InvalidArgument(
            "pole offset t_p must be finite and nonzero".into(),
        ));
    }
    Ok(())
}

fn pole_offset(t: Complex64, t_p: f64) -> Result<Complex64> {
    let d = t - Complex64::new(0.0, t_p);
    let distance = d.norm();
    if distance < POLE_GUARD {
        return Err(Error::Singularity { distance });
    }
    Ok(d)
}

/// Residue evaluation of int A exp(i w t)/(t - i t_p)^2 dt.
fn pole_spectrum(amplitude: Complex64, t_p: f64, omega: f64) -> Complex64 {
    let active = if t_p < 0.0 { omega < 0.0 } else { omega > 0.0 };
    if !active {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if t_p < 0.0 { 1.0 } else { -1.0 };
    amplitude * (sign * 2.0 * PI * omega * (-omega * t_p).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn evaluation_examples() {
        let p = Pulse::pole(one(), 0.5).unwrap();
        assert!((p.evaluate_real(0.0).unwrap() - Complex64::new(-4.0, 0.0)).norm() < 1e-15);
        let p = Pulse::pole(one(), -0.5).unwrap();
        assert!((p.evaluate_real(0.0).unwrap() - Complex64::new(-4.0, 0.0)).norm() < 1e-15);
        let p = Pulse::modulated_pole(one(), 0.5, 2.0).unwrap();
        assert!((p.evaluate_real(0.0).unwrap() - Complex64::new(-4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_guard() {
        let p = Pulse::pole(one(), 0.5).unwrap();
        assert!(matches!(
            p.evaluate(Complex64::new(0.0, 0.5)),
            Err(Error::Singularity { .. })
        ));
        assert!(p.evaluate(Complex64::new(0.0, 0.5 + 1e-6)).is_ok());
        assert!(Pulse::pole(one(), 0.0).is_err());
    }

    #[test]
    fn custom_is_real_axis_only() {
        let p = Pulse::custom(Arc::new(|t| Complex64::new(t, 0.0)));
        assert_eq!(p.evaluate_real(2.0).unwrap(), Complex64::new(2.0, 0.0));
        assert!(p.evaluate(Complex64::new(2.0, 0.1)).is_err());
        assert!(p.analytic_spectrum(1.0).is_err());
        let c = p.classify();
        assert_eq!(c.holomorphy, Holomorphy::TwoSided);
        assert!(c.unverified);
    }

    #[test]
    fn classification_examples() {
        let c = Pulse::pole(one(), -0.5).unwrap().classify();
        assert_eq!(c.holomorphy, Holomorphy::UpperHolomorphic);
        assert_eq!(c.support, SpectralSupport::NegativeOnly);
        let c = Pulse::pole(one(), 0.5).unwrap().classify();
        assert_eq!(c.holomorphy, Holomorphy::LowerHolomorphic);
        assert_eq!(c.support, SpectralSupport::PositiveOnly);
        let c = Pulse::gaussian(1.0, 1.0, 0.0).unwrap().classify();
        assert_eq!(c.support, SpectralSupport::TwoSided);
        // Two-level spread is 2: support below -2 clears it.
        let c = Pulse::modulated_pole(one(), -0.5, -2.0).unwrap().classify();
        assert_eq!(c.support, SpectralSupport::ShiftedNegative(-2.0));
        assert!(c.support.clears(2.0));
        assert_eq!(c.holomorphy, Holomorphy::UpperHolomorphic);
        // Reversed sign pairing does not clear anything.
        let c = Pulse::modulated_pole(one(), -0.5, 2.0).unwrap().classify();
        assert!(!c.support.clears(2.0));
        assert_eq!(c.holomorphy, Holomorphy::TwoSided);
    }

    #[test]
    fn spectrum_vanishes_on_forbidden_half_line() {
        let lower = Pulse::pole(one(), 0.5).unwrap();
        let upper = Pulse::pole(one(), -0.5).unwrap();
        for k in 1..=1000 {
            let w = k as f64 * 0.05;
            assert_eq!(lower.analytic_spectrum(-w).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(upper.analytic_spectrum(w).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    /// Composite Simpson over [-T, T] plus leading-order asymptotic tails
    /// -f(+-T) exp(i w (+-T)) / (i w) from one integration by parts.
    fn quadrature_spectrum(p: &Pulse, omega: f64, half_width: f64, steps: usize, tails: bool) -> Complex64 {
        let h = 2.0 * half_width / steps as f64;
        let g = |t: f64| p.evaluate_real(t).unwrap() * Complex64::from_polar(1.0, omega * t);
        let mut acc = g(-half_width) + g(half_width);
        for j in 1..steps {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += g(-half_width + j as f64 * h) * w;
        }
        let window = acc * (h / 3.0);
        if !tails {
            return window;
        }
        let iw = Complex64::new(0.0, omega);
        window - g(half_width) / iw + g(-half_width) / iw
    }

    #[test]
    fn residue_spectrum_matches_quadrature_at_two() {
        let p = Pulse::pole(one(), 0.5).unwrap();
        let analytic = p.analytic_spectrum(2.0).unwrap();
        // -4 pi / e
        assert!((analytic - Complex64::new(-4.0 * PI / core::f64::consts::E, 0.0)).norm() < 1e-14);
        let numeric = quadrature_spectrum(&p, 2.0, 5000.0, 2_000_000, true);
        assert!((numeric - analytic).norm() < 1e-7, "{numeric} vs {analytic}");
    }

    #[test]
    fn modulated_spectrum_is_shifted_pole_spectrum() {
        let base = Pulse::pole(Complex64::new(0.7, -0.2), -0.8).unwrap();
        let shifted = Pulse::modulated_pole(Complex64::new(0.7, -0.2), -0.8, 1.5).unwrap();
        for k in -40..40 {
            let w = k as f64 * 0.1;
            assert_eq!(
                shifted.analytic_spectrum(w).unwrap(),
                base.analytic_spectrum(w - 1.5).unwrap()
            );
        }
        let numeric = quadrature_spectrum(&shifted, 0.5, 5000.0, 2_000_000, true);
        assert!((numeric - shifted.analytic_spectrum(0.5).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn gaussian_spectrum_matches_quadrature() {
        let p = Pulse::gaussian(1.3, 0.7, 0.4).unwrap();
        for &w in &[-3.0, -0.5, 0.0, 1.1, 2.5] {
            let numeric = quadrature_spectrum(&p, w, 20.0, 20_000, false);
            assert!((numeric - p.analytic_spectrum(w).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn tail_integral_of_non_oscillating_pole_tail() {
        let p = Pulse::pole(one(), -0.5).unwrap();
        let t = 2000.0;
        // int_T^inf dt/(t + 0.5 i)^2 = 1/(T + 0.5 i)
        let upper = p.tail_integral(Complex64::new(t, 0.0), 0.0, Tail::Upper);
        assert!((upper - Complex64::new(t, 0.5).inv()).norm() < 1e-18);
        let lower = p.tail_integral(Complex64::new(-t, 0.0), 0.0, Tail::Lower);
        assert!((lower - Complex64::new(t, -0.5).inv()).norm() < 1e-18);
    }

    #[test]
    fn tails_plus_window_give_full_spectrum() {
        // F(w) = lower tail + window + upper tail, for several modulations.
        for &(t_p, shift, w) in &[(0.5, 0.0, 2.0), (-0.5, -2.0, -3.0), (0.5, 2.0, 2.0), (-0.7, 0.0, -0.01)] {
            let p = Pulse::modulated_pole(Complex64::new(1.0, 0.3), t_p, shift).unwrap();
            let half = 60.0;
            let steps = 400_000;
            let h = 2.0 * half / steps as f64;
            let g = |t: f64| p.evaluate_real(t).unwrap() * Complex64::from_polar(1.0, w * t);
            let mut acc = g(-half) + g(half);
            for j in 1..steps {
                acc += g(-half + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            let total = acc * (h / 3.0)
                + p.tail_integral(Complex64::new(half, 0.0), w, Tail::Upper)
                + p.tail_integral(Complex64::new(-half, 0.0), w, Tail::Lower);
            let exact = p.analytic_spectrum(w).unwrap();
            assert!((total - exact).norm() < 1e-9, "{t_p} {shift} {w}: {total} vs {exact}");
        }
    }

    #[test]
    fn conjugation_mirrors_the_pole() {
        let p = Pulse::modulated_pole(Complex64::new(1.0, 0.5), 0.5, 2.0).unwrap();
        let q = p.conjugated();
        for &t in &[-3.0, -0.2, 0.0, 1.7] {
            assert!((q.evaluate_real(t).unwrap() - p.evaluate_real(t).unwrap().conj()).norm() < 1e-14);
        }
        assert_eq!(q.t_p(), Some(-0.5));
    }

    proptest! {
        #[test]
        fn pole_pulse_tail_bound(a_re in -3.0f64..3.0, a_im in -3.0f64..3.0,
                                 t_p in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0],
                                 frac in 0.0f64..1.0, far in 2.01f64..1e4) {
            let p = Pulse::pole(Complex64::new(a_re, a_im), t_p).unwrap();
            let t = far * t_p.abs() * if frac < 0.5 { -1.0 } else { 1.0 };
            let bound = Complex64::new(a_re, a_im).norm() / (t * t - t_p * t_p);
            prop_assert!(p.evaluate_real(t).unwrap().norm() <= bound * (1.0 + 1e-12));
        }
    }
}
