//! Adaptive Dormand-Prince 5(4) integrator for complex-valued systems
//! y' = F(s, y) with a real independent variable s.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub max_steps: usize,
    /// State norms above this count as divergence.
    pub max_norm: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            initial_step: 1e-3,
            max_steps: 5_000_000,
            max_norm: 1e150,
        }
    }
}

/// One accepted step with its fourth-order continuous extension.
pub struct Step<'a> {
    pub s0: f64,
    pub y0: &'a [Complex64],
    pub f0: &'a [Complex64],
    pub s1: f64,
    pub y1: &'a [Complex64],
    pub f1: &'a [Complex64],
    /// h * sum_i d_i k_i of the Dormand-Prince dense output.
    dense: &'a [Complex64],
}

impl Step<'_> {
    /// Solution at `s` in [s0, s1].
    pub fn interpolate(&self, s: f64, out: &mut [Complex64]) {
        let h = self.s1 - self.s0;
        let th = if h == 0.0 { 1.0 } else { (s - self.s0) / h };
        let th1 = 1.0 - th;
        for i in 0..out.len() {
            let r2 = self.y1[i] - self.y0[i];
            let r3 = self.f0[i] * h - r2;
            let r4 = r2 - self.f1[i] * h - r3;
            out[i] = self.y0[i] + (r2 + (r3 + (r4 + self.dense[i] * th1) * th) * th1) * th;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates from `s_start` to `s_end` (> s_start), calling `observer` on
/// every accepted step. Returns the final state.
pub fn solve<F, O>(
    mut rhs: F,
    s_start: f64,
    s_end: f64,
    y_start: &[Complex64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<(Vec<Complex64>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    O: FnMut(&Step<'_>),
{
    let n = y_start.len();
    if !(s_end > s_start) {
        return Err(Error::InvalidArgument("integration interval is empty".into()));
    }
    if y_start.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument("initial state is not finite".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut stats = OdeStats::default();
    let mut y = y_start.to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut dense = vec![zero; n];

    let mut s = s_start;
    rhs(s, &y, &mut k1)?;
    stats.evaluations += 1;
    let mut h = opts.initial_step.min(opts.max_step).min(s_end - s_start);
    let mut last_good = s;

    while s < s_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps { t: s });
        }
        let last = s + h >= s_end;
        if last {
            h = s_end - s;
        }
        if h < 1e-13 * s.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t: s });
        }

        let stage = |tmp: &mut [Complex64], terms: &[(&[Complex64], f64)]| {
            for i in 0..n {
                let mut acc = y[i];
                for (k, a) in terms {
                    acc += k[i] * (a * h);
                }
                tmp[i] = acc;
            }
        };
        stage(&mut tmp, &[(&k1, A21)]);
        rhs(s + C2 * h, &tmp, &mut k2)?;
        stage(&mut tmp, &[(&k1, A31), (&k2, A32)]);
        rhs(s + C3 * h, &tmp, &mut k3)?;
        stage(&mut tmp, &[(&k1, A41), (&k2, A42), (&k3, A43)]);
        rhs(s + C4 * h, &tmp, &mut k4)?;
        stage(&mut tmp, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]);
        rhs(s + C5 * h, &tmp, &mut k5)?;
        stage(&mut tmp, &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)]);
        rhs(s + h, &tmp, &mut k6)?;
        stage(&mut y_new, &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)]);
        let s_new = if last { s_end } else { s + h };
        rhs(s_new, &y_new, &mut k7)?;
        stats.evaluations += 6;

        // Errors are measured against the largest component, so amplitudes
        // that stay near zero do not force the absolute tolerance.
        let mut err_sq = 0.0;
        let mut finite = true;
        let mut norm_sq = 0.0;
        let mut largest = 0.0_f64;
        for i in 0..n {
            largest = largest.max(y[i].norm()).max(y_new[i].norm());
        }
        let scale = opts.abs_tol + opts.rel_tol * largest;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            err_sq += (e.norm() / scale).powi(2);
            finite &= y_new[i].re.is_finite() && y_new[i].im.is_finite();
            norm_sq += y_new[i].norm_sqr();
        }
        if !finite || norm_sq.sqrt() > opts.max_norm {
            return Err(Error::Divergence { last_good_t: last_good });
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            for i in 0..n {
                dense[i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
            }
            observer(&Step {
                s0: s,
                y0: &y,
                f0: &k1,
                s1: s_new,
                y1: &y_new,
                f1: &k7,
                dense: &dense,
            });
            s = s_new;
            last_good = s;
            core::mem::swap(&mut y, &mut y_new);
            core::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(opts.max_step);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok((y, stats))
}

/// Like [`solve`], additionally sampling the solution at the ascending
/// points `grid` (which must lie within [s_start, s_end]).
pub fn solve_on_grid<F>(
    rhs: F,
    s_start: f64,
    s_end: f64,
    y_start: &[Complex64],
    opts: &OdeOptions,
    grid: &[f64],
) -> Result<(Vec<Vec<Complex64>>, Vec<Complex64>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let n = y_start.len();
    let mut samples: Vec<Vec<Complex64>> = Vec::with_capacity(grid.len());
    let mut next = 0;
    while next < grid.len() && grid[next] <= s_start {
        samples.push(y_start.to_vec());
        next += 1;
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let (y, stats) = solve(rhs, s_start, s_end, y_start, opts, |step| {
        while next < grid.len() && grid[next] <= step.s1 {
            step.interpolate(grid[next], &mut buf);
            samples.push(buf.clone());
            next += 1;
        }
    })?;
    while samples.len() < grid.len() {
        samples.push(y.clone());
    }
    Ok((samples, y, stats))
}
