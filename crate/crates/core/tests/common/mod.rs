//! Reference formulas used as test oracles. They avoid the crate's own
//! special functions and quadrature.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `ln I_nu(z)` from the Poisson integral
/// `I_nu(z) = (z/2)^nu / (sqrt(pi) Gamma(nu + 1/2)) * int_0^pi e^{z cos t} sin^{2 nu} t dt`,
/// valid for `nu >= 0`, `z > 0`.
pub fn ln_bessel_i(nu: f64, z: f64) -> f64 {
    let integral = simpson(
        |t: f64| (z * (t.cos() - 1.0)).exp() * t.sin().powf(2.0 * nu),
        0.0,
        std::f64::consts::PI,
        20_000,
    );
    z + integral.ln() + nu * (z / 2.0).ln() - 0.5 * std::f64::consts::PI.ln() - ln_gamma(nu + 0.5)
}

/// kappa-mu envelope density.
pub fn kappa_mu_pdf(kappa: f64, mu: f64, omega: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if mu > 1.0 { 0.0 } else { f64::NAN };
    }
    let z = 2.0 * mu * (kappa * (1.0 + kappa) / omega).sqrt() * r;
    let ln_f = (2.0 * mu).ln() + 0.5 * (mu + 1.0) * (1.0 + kappa).ln()
        - 0.5 * (mu - 1.0) * kappa.ln()
        - mu * kappa
        - 0.5 * (mu + 1.0) * omega.ln()
        + mu * r.ln()
        - mu * (1.0 + kappa) * r * r / omega
        + ln_bessel_i(mu - 1.0, z);
    ln_f.exp()
}

/// Nakagami-m envelope density.
pub fn nakagami_pdf(m: f64, omega: f64, r: f64) -> f64 {
    let ln_f = 2f64.ln() + m * (m / omega).ln() - ln_gamma(m) + (2.0 * m - 1.0) * r.ln() - m * r * r / omega;
    ln_f.exp()
}

/// Exponential integral `E1(x)` for moderate `x` by its convergent series.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..400 {
        term *= -x / k as f64;
        let add = -term / k as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Rayleigh ergodic capacity `log2(e) e^{1/g} E1(1/g)`.
pub fn rayleigh_ec(gamma_bar: f64) -> f64 {
    std::f64::consts::LOG2_E * (1.0 / gamma_bar).exp() * exp_integral_e1(1.0 / gamma_bar)
}

/// Half-width of the DKW confidence band at level `1 - alpha`.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Shapes spread across the default solution box.
pub const SHAPES: [[f64; 3]; 6] = [
    [0.1, 0.0, 0.1],
    [1.0, 0.5, 0.7],
    [15.0, 0.9, 2.0],
    [45.0, 1.0, 6.0],
    [5.0, 0.3, 3.5],
    [30.0, 0.99, 1.0],
];
