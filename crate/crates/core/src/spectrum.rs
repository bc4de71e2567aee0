//! Numerical Fourier analysis of pulse envelopes: the truncated transform
//! F(w) = int_{-T}^{T} f(t) exp(i w t) dt on an FFT grid, one-sidedness
//! (leakage) scores and the Hilbert-transform consistency of holomorphic
//! envelopes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{fft_in_place, Direction};
use crate::pulses::{Holomorphy, Pulse, PulseKind, SpectralSupport, Tail};

/// Smallest |t_p| for which a pole pulse may be sampled on the real axis.
pub const MIN_POLE_OFFSET: f64 = 1e-6;

/// Half-line of frequencies on which a spectrum should vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalfLine {
    /// w > edge
    Above(f64),
    /// w < edge
    Below(f64),
}

impl HalfLine {
    pub fn edge(&self) -> f64 {
        match *self {
            HalfLine::Above(edge) | HalfLine::Below(edge) => edge,
        }
    }

    pub fn contains(&self, omega: f64) -> bool {
        match *self {
            HalfLine::Above(edge) => omega > edge,
            HalfLine::Below(edge) => omega < edge,
        }
    }

    /// The half-line on which `support` says F vanishes. Two-sided spectra
    /// use w > 0 by convention.
    pub fn forbidden_by(support: SpectralSupport) -> Self {
        match support {
            SpectralSupport::NegativeOnly | SpectralSupport::TwoSided => HalfLine::Above(0.0),
            SpectralSupport::PositiveOnly => HalfLine::Below(0.0),
            SpectralSupport::ShiftedNegative(edge) => HalfLine::Above(edge),
            SpectralSupport::ShiftedPositive(edge) => HalfLine::Below(edge),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SpectrumOptions {
    /// Add the exact contribution of |t| > T for pole pulses.
    pub tail_correction: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumSample {
    pub omega: f64,
    pub value: Complex64,
}

/// Uniform frequency grid with spectral samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGrid {
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Energy fraction on the nominally forbidden half-line.
    pub leakage: f64,
    pub forbidden: HalfLine,
    /// Sum |f(t_j)|^2 dt over the time samples, for Parseval checks.
    pub time_energy: f64,
    pub t_max: f64,
}

impl SpectrumGrid {
    pub fn d_omega(&self) -> f64 {
        self.omegas[1] - self.omegas[0]
    }

    /// int |F|^2 dw / (2 pi) over the grid.
    pub fn frequency_energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.d_omega() / (2.0 * PI)
    }

    pub fn samples(&self) -> impl Iterator<Item = SpectrumSample> + '_ {
        self.omegas
            .iter()
            .zip(&self.values)
            .map(|(&omega, &value)| SpectrumSample { omega, value })
    }

    /// Index of the grid frequency closest to `omega`.
    pub fn nearest_index(&self, omega: f64) -> usize {
        let k = ((omega - self.omegas[0]) / self.d_omega()).round();
        (k.max(0.0) as usize).min(self.omegas.len() - 1)
    }
}

fn check_grid(p: &Pulse, t_max: f64, n_samples: usize) -> Result<()> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument("t_max must be positive".into()));
    }
    if !n_samples.is_power_of_two() || n_samples < 1024 {
        return Err(Error::InvalidArgument(alloc::format!(
            "n_samples must be a power of two >= 1024, got {n_samples}"
        )));
    }
    if let Some(t_p) = p.t_p() {
        if t_p.abs() < MIN_POLE_OFFSET {
            return Err(Error::PoleTooCloseToAxis { t_p });
        }
    }
    Ok(())
}

/// Samples f on [-T, T) with n points.
fn sample(p: &Pulse, t_max: f64, n: usize) -> Result<(f64, Vec<Complex64>)> {
    let dt = 2.0 * t_max / n as f64;
    let values = (0..n)
        .map(|j| p.evaluate_real(-t_max + j as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    Ok((dt, values))
}

/// Truncated Fourier transform on the FFT grid w_k = 2 pi k / (2T),
/// k = -n/2 .. n/2 - 1, by the trapezoid rule.
pub fn numerical_spectrum(p: &Pulse, t_max: f64, n_samples: usize) -> Result<SpectrumGrid> {
    numerical_spectrum_with(p, t_max, n_samples, SpectrumOptions::default())
}

pub fn numerical_spectrum_with(
    p: &Pulse,
    t_max: f64,
    n_samples: usize,
    options: SpectrumOptions,
) -> Result<SpectrumGrid> {
    check_grid(p, t_max, n_samples)?;
    let n = n_samples;
    let (dt, samples) = sample(p, t_max, n)?;
    let f_end = p.evaluate_real(t_max)?;
    let time_energy = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt;

    let mut buf = samples;
    // Trapezoid: half weight at -T here, the +T sample is added per frequency.
    buf[0] *= 0.5;
    fft_in_place(&mut buf, Direction::Inverse);

    let d_omega = PI / t_max;
    let mut omegas = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for idx in 0..n {
        let k = idx as i64 - (n / 2) as i64;
        let omega = k as f64 * d_omega;
        let bin = buf[k.rem_euclid(n as i64) as usize];
        let mut value = (bin * Complex64::from_polar(1.0, -omega * t_max)
            + f_end * 0.5 * Complex64::from_polar(1.0, omega * t_max))
            * dt;
        if options.tail_correction {
            value += p.tail_integral(Complex64::new(t_max, 0.0), omega, Tail::Upper)
                + p.tail_integral(Complex64::new(-t_max, 0.0), omega, Tail::Lower);
        }
        omegas.push(omega);
        values.push(value);
    }
    let forbidden = HalfLine::forbidden_by(p.classify().support);
    let mut grid = SpectrumGrid {
        omegas,
        values,
        leakage: 0.0,
        forbidden,
        time_energy,
        t_max,
    };
    grid.leakage = one_sidedness(&grid, forbidden);
    Ok(grid)
}

/// Fraction of int |F|^2 dw lying in `forbidden`; 0 for an all-zero grid.
/// A sample sitting exactly on the edge counts half.
pub fn one_sidedness(grid: &SpectrumGrid, forbidden: HalfLine) -> f64 {
    let mut total = 0.0;
    let mut outside = 0.0;
    for s in grid.samples() {
        let e = s.value.norm_sqr();
        total += e;
        if forbidden.contains(s.omega) {
            outside += e;
        } else if s.omega == forbidden.edge() {
            outside += 0.5 * e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (outside / total).clamp(0.0, 1.0)
    }
}

/// Spectral value at one frequency: closed form when available, otherwise a
/// trapezoid sum over [-t_max, t_max] with `n` intervals.
pub fn spectral_value(p: &Pulse, omega: f64, t_max: f64, n: usize) -> Result<Complex64> {
    match p.analytic_spectrum(omega) {
        Ok(v) => Ok(v),
        Err(Error::Unsupported(_)) => {
            let dt = 2.0 * t_max / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=n {
                let t = -t_max + j as f64 * dt;
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += p.evaluate_real(t)? * Complex64::from_polar(w, omega * t);
            }
            Ok(acc * dt)
        }
        Err(e) => Err(e),
    }
}

/// Largest |Im f - H[Re f]| over the central half of [-T, T), where the
/// Hilbert transform is taken with the sign fixed by the pulse's half-plane
/// of holomorphy. Implemented by one-sided spectral projection of Re f.
pub fn hilbert_check(p: &Pulse, t_max: f64, n: usize) -> Result<f64> {
    let sign = match p.classify().holomorphy {
        // F vanishes for w > 0: keep the negative-frequency half.
        Holomorphy::UpperHolomorphic => -1,
        Holomorphy::LowerHolomorphic => 1,
        Holomorphy::TwoSided => {
            return Err(Error::Unsupported(
                "Hilbert relation needs a pulse holomorphic in one half-plane",
            ))
        }
    };
    if p.kind() == PulseKind::Zero {
        return Ok(0.0);
    }
    check_grid(p, t_max, n)?;
    let (_, samples) = sample(p, t_max, n)?;
    let mut spec: Vec<Complex64> = samples.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    // X_k = sum u_j exp(+2 pi i jk/n); bins 1..n/2 are positive frequencies.
    fft_in_place(&mut spec, Direction::Inverse);
    let mut projected = vec![Complex64::new(0.0, 0.0); n];
    projected[0] = spec[0];
    projected[n / 2] = spec[n / 2];
    for k in 1..n / 2 {
        let keep = if sign > 0 { k } else { n - k };
        projected[keep] = spec[keep] * 2.0;
    }
    fft_in_place(&mut projected, Direction::Forward);
    let scale = 1.0 / n as f64;
    let mut worst = 0.0_f64;
    for j in n / 4..3 * n / 4 {
        let reconstructed_im = projected[j].im * scale;
        worst = worst.max((samples[j].im - reconstructed_im).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::Pulse;

    fn pole(t_p: f64) -> Pulse {
        Pulse::pole(Complex64::new(1.0, 0.0), t_p).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(numerical_spectrum(&pole(-0.5), 100.0, 1000).is_err());
        assert!(numerical_spectrum(&pole(-0.5), 100.0, 512).is_err());
        assert!(numerical_spectrum(&pole(-0.5), -1.0, 1024).is_err());
        assert!(matches!(
            numerical_spectrum(&pole(1e-8), 100.0, 1024),
            Err(Error::PoleTooCloseToAxis { .. })
        ));
    }

    #[test]
    fn zero_pulse_has_zero_spectrum_and_leakage() {
        let g = numerical_spectrum(&Pulse::zero(), 50.0, 1024).unwrap();
        assert!(g.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert_eq!(g.leakage, 0.0);
    }

    #[test]
    fn gaussian_is_symmetric_and_splits_evenly() {
        let g = numerical_spectrum(&Pulse::gaussian(1.0, 1.0, 0.0).unwrap(), 40.0, 4096).unwrap();
        let n = g.omegas.len();
        for idx in 1..n {
            let mirror = n - idx;
            assert!((g.omegas[idx] + g.omegas[mirror]).abs() < 1e-12);
            assert!((g.values[idx].norm() - g.values[mirror].norm()).abs() < 1e-10);
        }
        let leak = one_sidedness(&g, HalfLine::Above(0.0));
        assert!((leak - 0.5).abs() < 1e-9, "{leak}");
    }

    #[test]
    fn exact_one_sided_spectrum_has_no_leakage() {
        let p = pole(-0.5);
        let omegas: Vec<f64> = (-512..512).map(|k| k as f64 * 0.05).collect();
        let values = omegas.iter().map(|&w| p.analytic_spectrum(w).unwrap()).collect();
        let grid = SpectrumGrid {
            omegas,
            values,
            leakage: 0.0,
            forbidden: HalfLine::Above(0.0),
            time_energy: 0.0,
            t_max: 0.0,
        };
        assert_eq!(one_sidedness(&grid, HalfLine::Above(0.0)), 0.0);
    }

    #[test]
    fn parseval_holds_on_the_grid() {
        let g = numerical_spectrum(&pole(0.5), 500.0, 1 << 15).unwrap();
        let rel = (g.frequency_energy() - g.time_energy).abs() / g.time_energy;
        assert!(rel < 1e-2, "{rel}");
    }

    #[test]
    fn tail_corrected_grid_matches_closed_form() {
        let p = Pulse::modulated_pole(Complex64::new(0.8, 0.3), 0.5, 1.0).unwrap();
        let g = numerical_spectrum_with(&p, 500.0, 1 << 16, SpectrumOptions { tail_correction: true })
            .unwrap();
        for idx in (0..g.omegas.len()).step_by(97) {
            let w = g.omegas[idx];
            if w.abs() > 20.0 {
                continue;
            }
            let exact = p.analytic_spectrum(w).unwrap();
            let err = (g.values[idx] - exact).norm();
            assert!(err < 1e-6_f64.max(1e-4 * exact.norm()), "w={w}: {err}");
        }
    }

    #[test]
    fn hilbert_relation_for_both_half_planes() {
        assert!(hilbert_check(&pole(-0.5), 200.0, 1 << 15).unwrap() < 1e-4);
        assert!(hilbert_check(&pole(0.5), 200.0, 1 << 15).unwrap() < 1e-4);
        let p = Pulse::pole(Complex64::new(0.3, -1.2), 0.7).unwrap();
        assert!(hilbert_check(&p, 200.0, 1 << 15).unwrap() < 1e-4);
        assert!(hilbert_check(&p.conjugated(), 200.0, 1 << 15).unwrap() < 1e-4);
        assert!(hilbert_check(&Pulse::gaussian(1.0, 1.0, 0.0).unwrap(), 200.0, 1 << 15).is_err());
    }

    #[test]
    fn spectral_value_falls_back_to_quadrature() {
        let p = Pulse::pole(Complex64::new(1.0, 0.0), 0.5).unwrap();
        let custom = {
            let q = p.clone();
            Pulse::custom(alloc::sync::Arc::new(move |t| q.evaluate_real(t).unwrap()))
        };
        let exact = p.analytic_spectrum(2.0).unwrap();
        let approx = spectral_value(&custom, 2.0, 2000.0, 1 << 20).unwrap();
        assert!((exact - approx).norm() < 1e-5, "{exact} {approx}");
    }
}
