//! Eigenvalues of small non-Hermitian matrices, used for the instantaneous
//! spectrum of H(t) = H0 + f(t) H1 along an encircling loop.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::GeneralOperator;
use crate::error::{Error, Result};

/// Coefficients of det(lambda I - A), lowest degree first; the leading
/// coefficient is 1. Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(a: &GeneralOperator) -> Vec<Complex64> {
    let n = a.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let ident = GeneralOperator::identity(n).expect("dim >= 2");
    let mut m = GeneralOperator::zeros(n).expect("dim >= 2");
    for k in 1..=n {
        m = a
            .matmul(&m)
            .expect("same dim")
            .add(&ident.scale(coeffs[n - k + 1]))
            .expect("same dim");
        let am = a.matmul(&m).expect("same dim");
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All eigenvalues of `a`, sorted by real part then imaginary part.
///
/// Roots of the characteristic polynomial by Aberth-Ehrlich iteration.
/// Accuracy degrades like sqrt(eps) as eigenvalues approach coalescence,
/// which is the expected behaviour near an exceptional point.
pub fn eigenvalues(a: &GeneralOperator) -> Result<Vec<Complex64>> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entries".into()));
    }
    let coeffs = characteristic_polynomial(a);
    let n = a.dim();
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + core::f64::consts::TAU * k as f64 / n as f64))
        .collect();

    let mut last_step = f64::INFINITY;
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let (p, dp) = horner(&coeffs, roots[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = roots[i] - roots[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                roots[i] -= step;
                max_step = max_step.max(step.norm() / roots[i].norm().max(1.0));
            }
        }
        last_step = max_step;
        if max_step < 1e-15 {
            break;
        }
    }
    // Clustered roots stall at the rounding floor well above 1e-15.
    if !(last_step < 1e-8) {
        return Err(Error::NoConvergence);
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_of_two_by_two() {
        // [[a, b], [c, d]] -> lambda^2 - (a + d) lambda + (ad - bc)
        let m = GeneralOperator::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let p = characteristic_polynomial(&m);
        assert!((p[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((p[1] - Complex64::new(-5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn non_normal_two_level() {
        // H = [[0, 1], [z, 0]] has eigenvalues +-sqrt(z).
        let z = Complex64::new(-0.7, 1.9);
        let m = GeneralOperator::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 0) => z,
            _ => Complex64::new(0.0, 0.0),
        })
        .unwrap();
        let ev = eigenvalues(&m).unwrap();
        let r = z.sqrt();
        let mut want = [r, -r];
        want.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn triangular_matrix() {
        let m = GeneralOperator::from_fn(3, |i, j| {
            if i == j {
                Complex64::new(i as f64 + 1.0, -(i as f64))
            } else if j > i {
                Complex64::new(0.5, 0.5)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let ev = eigenvalues(&m).unwrap();
        for (k, e) in ev.iter().enumerate() {
            assert!((e - Complex64::new(k as f64 + 1.0, -(k as f64))).norm() < 1e-12);
        }
    }
}
