//! Exponential integral E1 for complex arguments and the ray integral of
//! exp(i k u) / u^2, which gives the exact contribution of a pole pulse's
//! 1/t^2 tails beyond a finite integration window.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E1(z) = int_z^inf exp(-w)/w dw, principal branch (cut along z <= 0).
pub fn exp_integral_e1(z: Complex64) -> Complex64 {
    if z.norm() < 2.0 {
        series(z)
    } else {
        continued_fraction(z)
    }
}

fn series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// exp(-z) / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz.
fn continued_fraction(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut f = z + 1.0;
    if f.norm() == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..20_000 {
        let kf = k as f64;
        let a = -kf * kf;
        let b = z + (2.0 * kf + 1.0);
        d = b + d * a;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = b + c.inv() * a;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() / f
}

/// int_{u0}^{u0 + inf} exp(i k u) / u^2 du along the horizontal ray
/// starting at `u0`. Requires `Re u0 > 0`, so the ray and the rotated E1
/// contour both stay clear of the origin.
pub fn inverse_square_ray_integral(u0: Complex64, k: f64) -> Complex64 {
    debug_assert!(u0.re > 0.0);
    if k == 0.0 {
        return u0.inv();
    }
    let i = Complex64::i();
    // Integration by parts: exp(i k u0)/u0 + i k int exp(i k u)/u du, and the
    // remaining integral is E1(-i k u0) after rotating the ray.
    (i * k * u0).exp() / u0 + i * k * exp_integral_e1(-i * k * u0)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: (f64, f64), rel: f64) {
        let b = Complex64::new(b.0, b.1);
        assert!((a - b).norm() <= rel * b.norm(), "{a} vs {b}");
    }

    // Reference values from 30-digit arbitrary-precision evaluation.
    #[test]
    fn e1_reference_values() {
        close(
            exp_integral_e1(Complex64::new(0.5, 0.3)),
            (0.42221132422501794, -0.30537113617426665),
            1e-14,
        );
        close(
            exp_integral_e1(Complex64::new(3.0, -40.0)),
            (-0.00099972835368728268, -0.00072979526761768551),
            1e-13,
        );
        close(
            exp_integral_e1(Complex64::new(-2.0, 50.0)),
            (0.035893290324570515, -0.14326472054135649),
            1e-13,
        );
        close(
            exp_integral_e1(Complex64::new(0.0, 1e-3)),
            (6.3305398640805938, -1.5697963268504522),
            1e-14,
        );
        close(
            exp_integral_e1(Complex64::new(1.5, -1.0)),
            (0.011240991372424813, 0.088487122313500294),
            1e-13,
        );
        close(
            exp_integral_e1(Complex64::new(-1.0, -4000.0)),
            (0.00046448895662991407, -0.00049605035795275155),
            1e-12,
        );
    }

    #[test]
    fn ray_integral_reference_values() {
        close(
            inverse_square_ray_integral(Complex64::new(5.0, 0.5), 2.0),
            (0.0013417322573958634, -0.006793494485880767),
            1e-12,
        );
        close(
            inverse_square_ray_integral(Complex64::new(5.0, -0.5), -1.3),
            (0.0034819550783436812, -0.014070082447094838),
            1e-12,
        );
        close(
            inverse_square_ray_integral(Complex64::new(2000.0, 0.5), 1e-4),
            (0.00035293406751166279, 0.00020343271350468289),
            1e-12,
        );
        close(
            inverse_square_ray_integral(Complex64::new(3.0, 0.25), 0.7),
            (-0.090864547371322346, 0.018390514083276536),
            1e-12,
        );
    }

    #[test]
    fn ray_integral_matches_brute_force_quadrature() {
        // Independent route: composite Simpson on [u0, u0 + L] plus the
        // leading asymptotic remainder exp(i k u)/(-i k u^2) at the far end.
        let u0 = Complex64::new(4.0, -0.3);
        let k = 1.7;
        let len = 4000.0;
        let steps = 400_000;
        let h = len / steps as f64;
        let f = |s: f64| {
            let u = u0 + s;
            (Complex64::i() * k * u).exp() / (u * u)
        };
        let mut acc = f(0.0) + f(len);
        for j in 1..steps {
            acc += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        let far = u0 + len;
        let remainder = -(Complex64::i() * k * far).exp() / (Complex64::i() * k * far * far);
        let brute = acc * (h / 3.0) + remainder;
        let exact = inverse_square_ray_integral(u0, k);
        assert!((brute - exact).norm() < 1e-9, "{brute} vs {exact}");
    }
}
