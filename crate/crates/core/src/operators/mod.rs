//! Dense complex operators, the eigenbasis of the unperturbed Hamiltonian and
//! the change of representation into interaction-picture amplitudes.
//!
//! Storage is dense and row-major. Systems are small (N <= 8), so every
//! routine here is a plain O(N^3) loop.

mod general_eigen;
mod hermitian_eigen;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub use general_eigen::{characteristic_polynomial, eigenvalues};
pub use hermitian_eigen::eigendecompose;

/// Absolute tolerance for the Hermiticity invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense N x N complex matrix, N >= 2. Houses the perturbation operator and
/// its matrix elements in the eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GeneralOperator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, entries)
    }

    /// Real-valued rows, convenient for the builtin models and tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(Self { dim: n, entries: out })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// max |a_ij - conj(a_ji)|.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// Maximum absolute row sum (induced infinity norm).
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|a| a.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if other != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for GeneralOperator {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for GeneralOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// A self-adjoint operator: entries[i][j] = conj(entries[j][i]) to 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(GeneralOperator);

impl HermitianOperator {
    pub fn new(op: GeneralOperator) -> Result<Self> {
        let max_asymmetry = op.max_asymmetry();
        if !(max_asymmetry <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self(op))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_general(&self) -> &GeneralOperator {
        &self.0
    }

    pub fn into_general(self) -> GeneralOperator {
        self.0
    }
}

impl Index<(usize, usize)> for HermitianOperator {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Sorted eigenvalues of H0 (ascending) with orthonormal eigenvectors.
///
/// `vectors[n]` is the column |n+1> expressed in the bare basis. Each
/// eigenvector is rotated so that its largest-magnitude component is real
/// and positive (ties go to the lowest index).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    omegas: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
    spread: f64,
}

impl EigenSystem {
    pub(crate) fn from_parts(omegas: Vec<f64>, vectors: Vec<Vec<Complex64>>) -> Self {
        let spread = omegas[omegas.len() - 1] - omegas[0];
        Self {
            omegas,
            vectors,
            spread,
        }
    }

    pub fn dim(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// omega_N - omega_1.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// V diag(omega) V^dagger in the bare basis.
    pub fn reconstruct(&self) -> GeneralOperator {
        let n = self.dim();
        GeneralOperator::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[k][i] * self.vectors[k][j].conj() * self.omegas[k])
                .sum()
        })
        .expect("eigen systems are at least 2x2")
    }

    /// Largest deviation of V^dagger V from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let dot: Complex64 = inner(&self.vectors[a], &self.vectors[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// <u|v> with the first argument conjugated.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Matrix elements (H1)_{l,s} = <l| H1 |s> in the eigenbasis of H0.
pub fn matrix_elements(h1: &GeneralOperator, basis: &EigenSystem) -> Result<GeneralOperator> {
    let n = basis.dim();
    h1.check_dim(n)?;
    let h1_cols: Vec<Vec<Complex64>> = basis
        .vectors
        .iter()
        .map(|v| h1.mul_vec(v))
        .collect::<Result<_>>()?;
    GeneralOperator::from_fn(n, |l, s| inner(&basis.vectors[l], &h1_cols[s]))
}

/// Bare-basis amplitudes psi_i at time t to interaction-picture amplitudes
/// c_l = exp(i omega_l t) <l|psi>.
pub fn bare_to_eigen(psi: &[Complex64], basis: &EigenSystem, t: f64) -> Result<Vec<Complex64>> {
    check_len(basis, psi.len())?;
    Ok(basis
        .vectors
        .iter()
        .zip(&basis.omegas)
        .map(|(v, &w)| Complex64::from_polar(1.0, w * t) * inner(v, psi))
        .collect())
}

/// Inverse of [`bare_to_eigen`]: psi = sum_l c_l exp(-i omega_l t) |l>.
pub fn eigen_to_bare(c: &[Complex64], basis: &EigenSystem, t: f64) -> Result<Vec<Complex64>> {
    check_len(basis, c.len())?;
    let n = basis.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    for (l, (v, &w)) in basis.vectors.iter().zip(&basis.omegas).enumerate() {
        let coeff = c[l] * Complex64::from_polar(1.0, -w * t);
        for (p, x) in psi.iter_mut().zip(v) {
            *p += coeff * x;
        }
    }
    Ok(psi)
}

fn check_len(basis: &EigenSystem, len: usize) -> Result<()> {
    if len != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: len,
        });
    }
    Ok(())
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &GeneralOperator) -> GeneralOperator {
    let n = a.dim();
    let norm = a.row_sum_norm();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a.scale(Complex64::new(scale, 0.0));
    let ident = GeneralOperator::identity(n).expect("dim >= 2");
    let mut sum = ident.clone();
    let mut term = ident;
    for k in 1..=16 {
        term = term
            .matmul(&scaled)
            .expect("same dimension")
            .scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term).expect("same dimension");
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum).expect("same dimension");
    }
    sum
}
