//! Special functions used by the envelope densities.
//!
//! Everything here works on `f64` and is written so that it can be evaluated
//! inside tight quadrature loops without allocation.

#[allow(unused_imports)]
use num_traits::Float;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = core::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * core::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cont_frac(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
///
/// Computed directly on each side of `x = a + 1`, so that small upper tails
/// keep their relative accuracy.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cont_frac(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..10_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    (sum.ln() - x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cont_frac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Argument above which the Hankel expansion replaces the power series.
const BESSEL_ASYMPTOTIC_Z: f64 = 30.0;

/// `ln I_nu(z) - nu * ln(z / 2)` for real order `nu > -1` and `z >= 0`.
///
/// Removing the `(z/2)^nu` factor makes the function finite and smooth at
/// `z = 0`, where it equals `-ln Gamma(nu + 1)`. Callers fold the power term
/// back in analytically, which is what keeps the conditional envelope density
/// free of the removable singularity at vanishing specular power.
pub fn ln_bessel_i_reduced(nu: f64, z: f64) -> f64 {
    ReducedBesselI::new(nu).eval(z)
}

/// [`ln_bessel_i_reduced`] for a fixed order, with the order-dependent
/// constants computed once.
#[derive(Debug, Clone, Copy)]
pub struct ReducedBesselI {
    nu: f64,
    ln_gamma_nu1: f64,
    mu4: f64,
    /// `nu ln 2 - ln(2 pi) / 2`
    asym_const: f64,
}

impl ReducedBesselI {
    pub fn new(nu: f64) -> Self {
        debug_assert!(nu > -1.0, "order must exceed -1");
        Self {
            nu,
            ln_gamma_nu1: ln_gamma(nu + 1.0),
            mu4: 4.0 * nu * nu,
            asym_const: nu * core::f64::consts::LN_2 - 0.5 * (2.0 * core::f64::consts::PI).ln(),
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        if z <= BESSEL_ASYMPTOTIC_Z {
            self.series(z)
        } else {
            self.asymptotic(z)
        }
    }

    fn series(&self, z: f64) -> f64 {
        let q = 0.25 * z * z;
        // Terms carry an implicit 1/Gamma(nu + 1) factor, applied in log space.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * (k + self.nu));
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        sum.ln() - self.ln_gamma_nu1
    }

    /// Large-argument Hankel expansion of `I_nu(z) e^{-z} sqrt(2 pi z)`,
    /// summed up to its smallest term.
    fn asymptotic(&self, z: f64) -> f64 {
        let mut term = 1.0;
        let mut tail = 0.0;
        let mut prev_abs = f64::INFINITY;
        let inv_8z = 0.125 / z;
        for k in 1..200 {
            let odd = (2 * k - 1) as f64;
            term *= -(self.mu4 - odd * odd) * inv_8z / k as f64;
            let abs = term.abs();
            if abs > prev_abs {
                break;
            }
            tail += term;
            if abs < 1e-17 {
                break;
            }
            prev_abs = abs;
        }
        z + tail.ln_1p() - (self.nu + 0.5) * z.ln() + self.asym_const
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(
            ln_gamma(0.5),
            core::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-13
        );
        assert_relative_eq!(ln_gamma(0.1), 2.252_712_651_734_206, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(100.0), 359.134_205_369_575_4, max_relative = 1e-14);
    }

    #[test]
    fn incomplete_gamma_exponential_case() {
        for &x in &[0.01, 0.5, 1.0, 3.0, 20.0] {
            assert_relative_eq!(gamma_p(1.0, x), 1.0 - (-x as f64).exp(), epsilon = 1e-14);
            assert_relative_eq!(gamma_q(1.0, x), (-x as f64).exp(), max_relative = 1e-13);
        }
        // Poisson CDF: Q(n + 1, a) = P(N <= n)
        let a: f64 = 3.5;
        let mut cdf = 0.0;
        let mut p = (-a).exp();
        for n in 0..10 {
            cdf += p;
            assert_relative_eq!(gamma_q(n as f64 + 1.0, a), cdf, max_relative = 1e-13);
            p *= a / (n as f64 + 1.0);
        }
    }

    fn bessel_i_series_direct(nu: f64, z: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..400 {
            let k = k as f64;
            let ln_t = (2.0 * k + nu) * (0.5 * z).ln() - ln_gamma(k + 1.0) - ln_gamma(k + nu + 1.0);
            sum += ln_t.exp();
        }
        sum
    }

    #[test]
    fn reduced_bessel_matches_direct_series_across_switch() {
        for &nu in &[-0.9, -0.5, 0.0, 0.3, 1.0, 2.5, 5.0] {
            for &z in &[1e-3, 0.5, 4.0, 29.0, 31.0, 60.0] {
                let direct = bessel_i_series_direct(nu, z).ln() - nu * (0.5 * z).ln();
                let ours = ln_bessel_i_reduced(nu, z);
                assert_relative_eq!(ours, direct, epsilon = 1e-11, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn reduced_bessel_at_zero() {
        assert_relative_eq!(ln_bessel_i_reduced(1.5, 0.0), -ln_gamma(2.5), epsilon = 1e-15);
    }

    #[test]
    fn half_order_closed_form() {
        // I_{1/2}(z) = sqrt(2 / (pi z)) sinh z
        for &z in &[0.2f64, 3.0, 45.0, 400.0] {
            let expected = if z < 50.0 {
                ((2.0 / (core::f64::consts::PI * z)).sqrt() * z.sinh()).ln()
            } else {
                z + (1.0 - (-2.0 * z).exp()).ln() - 0.5 * (2.0 * core::f64::consts::PI * z).ln()
            };
            let ours = ln_bessel_i_reduced(0.5, z) + 0.5 * (0.5 * z).ln();
            assert_relative_eq!(ours, expected, epsilon = 1e-12, max_relative = 1e-13);
        }
    }
}
