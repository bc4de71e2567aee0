//! Cyclic Jacobi diagonalization for complex Hermitian matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{EigenSystem, HermitianOperator};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;
/// Eigenvalues closer than this are treated as one degenerate block.
const DEGENERACY_TOL: f64 = 1e-10;
/// Components below this modulus do not count as "significant" when ordering
/// vectors inside a degenerate block.
const SIGNIFICANT: f64 = 1e-8;

/// Eigenvalues (ascending) and orthonormal eigenvectors of `h0`.
pub fn eigendecompose(h0: &HermitianOperator) -> Result<EigenSystem> {
    let n = h0.dim();
    // Symmetrize exactly; the 1e-12 slack allowed by the invariant would
    // otherwise leak into the rotations.
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (h0[(i, j)] + h0[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let scale = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let col: Vec<Complex64> = (0..n).map(|i| v[i * n + k]).collect();
            (a[k * n + k].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    order_degenerate_blocks(&mut pairs);

    let (omegas, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = pairs
        .into_iter()
        .map(|(w, col)| (w, fix_phase(col)))
        .unzip();
    Ok(EigenSystem::from_parts(omegas, vectors))
}

/// One Jacobi rotation annihilating a[p][q]. The rotation is the product of
/// a diagonal phase making a[p][q] real and a real Givens rotation.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    // A <- A G
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * g_pp + aiq * g_qp;
        a[i * n + q] = aip * g_pq + aiq * g_qq;
    }
    // A <- G^dagger A
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = a[q * n + j];
        a[p * n + j] = g_pp.conj() * apj + g_qp.conj() * aqj;
        a[q * n + j] = g_pq.conj() * apj + g_qq.conj() * aqj;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
    // V <- V G
    for i in 0..n {
        let vip = v[i * n + p];
        let viq = v[i * n + q];
        v[i * n + p] = vip * g_pp + viq * g_qp;
        v[i * n + q] = vip * g_pq + viq * g_qq;
    }
}

/// Within each block of (numerically) equal eigenvalues, re-orthonormalize
/// and order the vectors by the index of their first significant component.
fn order_degenerate_blocks(pairs: &mut [(f64, Vec<Complex64>)]) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end].0 - pairs[start].0).abs() < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let block = &mut pairs[start..end];
            gram_schmidt(block);
            block.sort_by_key(|(_, v)| {
                v.iter()
                    .position(|x| x.norm() > SIGNIFICANT)
                    .unwrap_or(v.len())
            });
        }
        start = end;
    }
}

fn gram_schmidt(block: &mut [(f64, Vec<Complex64>)]) {
    for k in 0..block.len() {
        for j in 0..k {
            let proj = super::inner(&block[j].1, &block[k].1);
            let (head, tail) = block.split_at_mut(k);
            for (x, y) in tail[0].1.iter_mut().zip(&head[j].1) {
                *x -= proj * y;
            }
        }
        let norm = super::norm_sqr(&block[k].1).sqrt();
        for x in block[k].1.iter_mut() {
            *x /= norm;
        }
    }
}

/// Rotate so that the largest-magnitude component is real and positive.
fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .position(|x| x.norm() >= max - 1e-12)
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    v[pivot].im = 0.0;
    v
}
