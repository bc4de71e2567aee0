//! Weak-interaction transition probabilities
//! W[n][m] = |(H1)_{m,n}|^2 |F(w_m - w_n)|^2 and their comparison against
//! full numerics.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{transition_matrix, IntegrationConfig};
use crate::error::{Error, Result};
use crate::operators::{EigenSystem, GeneralOperator};
use crate::pulses::Pulse;
use crate::spectrum::spectral_value;

/// Off-diagonal entries at or below this are treated as zero in comparisons.
pub const COMPARISON_FLOOR: f64 = 1e-12;

/// Window and sample count for numerical spectra of custom pulses.
const FALLBACK_T_MAX: f64 = 2000.0;
const FALLBACK_SAMPLES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    FirstOrder,
    Numeric,
}

impl Source {
    pub fn tag(&self) -> &'static str {
        match self {
            Source::FirstOrder => "first_order",
            Source::Numeric => "numeric",
        }
    }
}

/// W[n][m]: probability of the transition n -> m (0-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub w: Vec<Vec<f64>>,
    pub source: Source,
    /// Diagonal holds the unperturbed value 1 rather than a computed survival.
    pub survival_unperturbed: bool,
    /// Numeric source only: c_n(t_end) per initial state n.
    pub survival_amplitudes: Option<Vec<Complex64>>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.w[n][m]
    }

    /// Largest |W[n][m] - W[m][n]|.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..a {
                worst = worst.max((self.w[a][b] - self.w[b][a]).abs());
            }
        }
        worst
    }
}

/// First-order W; the diagonal is set to 1 and flagged.
pub fn first_order(basis: &EigenSystem, h1e: &GeneralOperator, p: &Pulse) -> Result<TransitionMatrix> {
    let n = basis.dim();
    if h1e.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h1e.dim(),
        });
    }
    let omegas = basis.omegas();
    let mut w = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                w[a][b] = 1.0;
                continue;
            }
            let f = spectral_value(p, omegas[b] - omegas[a], FALLBACK_T_MAX, FALLBACK_SAMPLES)?;
            w[a][b] = h1e[(b, a)].norm_sqr() * f.norm_sqr();
        }
    }
    Ok(TransitionMatrix {
        w,
        source: Source::FirstOrder,
        survival_unperturbed: true,
        survival_amplitudes: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakLimitReport {
    pub scale: f64,
    pub first_order: TransitionMatrix,
    pub numeric: TransitionMatrix,
    /// Largest |W_num - W_1| / max(W_num, W_1) over compared entries.
    pub max_relative_deviation: f64,
    /// (n, m) of the worst entry.
    pub worst_entry: Option<(usize, usize)>,
    pub compared_entries: usize,
}

/// Runs first-order and full numerics with the amplitude scaled by `scale`.
/// Entries where both values are at or below [`COMPARISON_FLOOR`] are
/// skipped.
pub fn weak_limit_compare(
    basis: &EigenSystem,
    h1e: &GeneralOperator,
    p: &Pulse,
    scale: f64,
    cfg: &IntegrationConfig,
) -> Result<WeakLimitReport> {
    if !(scale.abs() <= 1e-2) {
        return Err(Error::InvalidArgument(alloc::format!(
            "weak-limit scale must be at most 1e-2, got {scale}"
        )));
    }
    let weak = p.scaled(scale);
    let fo = first_order(basis, h1e, &weak)?;
    let num = transition_matrix(basis, h1e, &weak, cfg)?;
    let n = basis.dim();
    let mut worst = 0.0_f64;
    let mut worst_entry = None;
    let mut compared = 0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (x, y) = (fo.w[a][b], num.w[a][b]);
            if x <= COMPARISON_FLOOR && y <= COMPARISON_FLOOR {
                continue;
            }
            compared += 1;
            let dev = (x - y).abs() / x.max(y);
            if dev > worst || worst_entry.is_none() {
                worst = worst.max(dev);
                worst_entry = Some((a, b));
            }
        }
    }
    Ok(WeakLimitReport {
        scale,
        first_order: fo,
        numeric: num,
        max_relative_deviation: worst,
        worst_entry,
        compared_entries: compared,
    })
}
