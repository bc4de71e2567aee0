//! In-place iterative radix-2 FFT.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Sign of the exponent in X_k = sum_j x_j exp(sign * 2 pi i j k / n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// exp(-2 pi i jk/n)
    Forward,
    /// exp(+2 pi i jk/n), unnormalized
    Inverse,
}

/// Transforms `data` in place. The length must be a power of two.
pub fn fft_in_place(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // Twiddles computed directly rather than by recurrence to keep
                // the error flat at 2^18 points.
                let w = Complex64::from_polar(1.0, step * k as f64);
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn naive(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos() - 0.2))
            .collect();
        for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
            let mut y = x.clone();
            fft_in_place(&mut y, dir);
            for (a, b) in y.iter().zip(naive(&x, sign)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip() {
        let x: Vec<Complex64> = (0..1024).map(|j| Complex64::new(j as f64, -(j as f64) * 0.5)).collect();
        let mut y = x.clone();
        fft_in_place(&mut y, Direction::Forward);
        fft_in_place(&mut y, Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 1024.0 - b).norm() < 1e-9);
        }
    }
}
