//! Semi-analytic MTW envelope density and distribution function.
//!
//! Conditioned on the phase difference `theta = phi1 - phi2` of the two
//! specular waves, the first cluster sees a single specular component of power
//! `d^2(theta) = (V1^2 + V2^2)(1 + Delta cos theta)`, so the envelope follows a
//! kappa-mu law with `kappa(theta) = K (1 + Delta cos theta)`. Since `theta` is
//! uniform on `[0, 2 pi)` and the integrand is even,
//!
//! ```text
//! f(r) = (1/pi) * integral_0^pi f_kappa_mu(r | d(theta)) dtheta
//! ```
//!
//! evaluated with fixed-node Gauss–Legendre quadrature. The conditional law is
//! a noncentral chi distribution with `2 mu` degrees of freedom:
//!
//! ```text
//! f(r | d) = r^(2mu-1) / (2^(mu-1) sigma^(2mu)) * exp(-(r^2 + d^2) / (2 sigma^2))
//!            * [I_{mu-1}(r d / sigma^2) / (r d / (2 sigma^2))^(mu-1)]
//! ```
//!
//! The bracketed ratio is finite as `d -> 0`, so the Nakagami limit needs no
//! special branch. Everything is evaluated in the log domain.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::ParamSet;
use crate::numeric::is_valid_grid;
use crate::quadrature::GaussLegendre;
use crate::special::{gamma_q, ln_gamma, ReducedBesselI};

/// Minimum phase-quadrature order.
pub const THETA_NODES: usize = 64;

/// Spread of the conditional specular amplitude `d(theta)`, in units of the
/// diffuse deviation `sigma`, that [`THETA_NODES`] nodes resolve to 1e-8. The
/// conditional density is a bump of width `sigma` in `d`; sharper phase
/// integrands get proportionally more nodes.
const NODES_SPREAD_RATIO: f64 = 24.0;

/// Log-density floor reported where the density underflows to zero.
pub const LOG_PDF_FLOOR: f64 = -745.0;

#[derive(Debug, Clone, Copy)]
struct Branch {
    /// Conditional specular amplitude `d(theta)`.
    d: f64,
    /// `d^2 / (2 sigma^2)`, the Poisson mean of the chi-square mixture.
    half_noncentrality: f64,
    weight: f64,
    /// `ln(weight) - d^2 / (2 sigma^2)`.
    ln_offset: f64,
}

/// An MTW distribution with its phase quadrature precomputed.
#[derive(Debug, Clone)]
pub struct Mtw {
    params: ParamSet,
    sigma2: f64,
    bessel: ReducedBesselI,
    ln_norm: f64,
    branches: Vec<Branch>,
}

impl Mtw {
    pub fn new(params: ParamSet) -> Result<Self> {
        Self::with_theta_nodes(params, Self::default_theta_nodes(&params))
    }

    /// Phase-quadrature order: [`THETA_NODES`], doubled until the rule
    /// resolves the width of the phase integrand.
    pub fn default_theta_nodes(params: &ParamSet) -> usize {
        let k_frac = params.k / (1.0 + params.k);
        let sigma = (0.5 / (params.mu * (1.0 + params.k))).sqrt();
        let spread = ((k_frac * (1.0 + params.delta)).sqrt()
            - (k_frac * (1.0 - params.delta)).max(0.0).sqrt())
            / sigma;
        let mut nodes = THETA_NODES;
        while spread > NODES_SPREAD_RATIO * (nodes / THETA_NODES) as f64 && nodes < 4096 {
            nodes *= 2;
        }
        nodes
    }

    /// Same distribution with an explicit phase-quadrature order.
    pub fn with_theta_nodes(params: ParamSet, nodes: usize) -> Result<Self> {
        params.validate()?;
        if nodes == 0 {
            return Err(Error::InvalidParameter("phase quadrature needs at least one node"));
        }
        let mu = params.mu;
        let diffuse = params.omega / (1.0 + params.k);
        let specular = params.omega * params.k / (1.0 + params.k);
        let sigma2 = diffuse / (2.0 * mu);
        let inv_two_sigma2 = 0.5 / sigma2;

        let branch = |d2: f64, weight: f64| {
            let d2 = d2.max(0.0);
            Branch {
                d: d2.sqrt(),
                half_noncentrality: d2 * inv_two_sigma2,
                weight,
                ln_offset: weight.ln() - d2 * inv_two_sigma2,
            }
        };
        let branches = if specular == 0.0 || params.delta == 0.0 {
            alloc::vec![branch(specular, 1.0)]
        } else {
            let rule = GaussLegendre::new(nodes);
            rule.mapped(0.0, core::f64::consts::PI)
                .map(|(theta, w)| {
                    let d2 = specular * (1.0 + params.delta * theta.cos());
                    branch(d2, w / core::f64::consts::PI)
                })
                .collect()
        };

        Ok(Self {
            params,
            sigma2,
            bessel: ReducedBesselI::new(mu - 1.0),
            ln_norm: -(mu - 1.0) * core::f64::consts::LN_2 - mu * sigma2.ln(),
            branches,
        })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    /// Per-component diffuse variance `sigma^2`.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Exponent of the power law `f(r) ~ r^(2 mu - 1)` at the origin.
    pub fn origin_power(&self) -> f64 {
        2.0 * self.params.mu - 1.0
    }

    /// `ln f(x) - (2 mu - 1) ln x`: the log-density without its power-law
    /// factor. It is an even, smooth function of `x`, finite at the origin.
    pub fn ln_pdf_regular(&self, x: f64) -> f64 {
        let inv_sigma2 = 1.0 / self.sigma2;
        let base = self.ln_norm - 0.5 * x * x * inv_sigma2;

        // Streaming log-sum-exp over the phase branches.
        let mut max = f64::NEG_INFINITY;
        let mut acc = 0.0;
        for b in &self.branches {
            let l = b.ln_offset + self.bessel.eval(x * b.d * inv_sigma2);
            if l > max {
                acc = acc * (max - l).exp() + 1.0;
                max = l;
            } else {
                acc += (l - max).exp();
            }
        }
        base + max + acc.ln()
    }

    /// Natural log of the density at `x >= 0`, without flooring.
    pub fn ln_pdf_exact(&self, x: f64) -> f64 {
        let power = self.origin_power();
        let r_term = if power == 0.0 {
            0.0
        } else if x == 0.0 {
            return if power > 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        } else {
            power * x.ln()
        };
        self.ln_pdf_regular(x) + r_term
    }

    /// Log-density floored at [`LOG_PDF_FLOOR`].
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let l = self.ln_pdf_exact(x);
        if l.is_nan() {
            LOG_PDF_FLOOR
        } else {
            l.max(LOG_PDF_FLOOR)
        }
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.ln_pdf_exact(x).exp()
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let y = 0.5 * x * x / self.sigma2;
        let mu = self.params.mu;
        // Each branch is a noncentral gamma law; branches left of their mean
        // use the CDF series, the others the survival series.
        let split = |upper: bool| self.branches.iter().filter(move |b| (y > mu + b.half_noncentrality) == upper);
        let lower = mixture_gamma_cdf(y, mu, split(false));
        let upper = mixture_gamma_sf(y, mu, split(true));
        let upper_weight: f64 = split(true).map(|b| b.weight).sum();
        (lower + upper_weight - upper).clamp(0.0, 1.0)
    }

    /// Upper end of the effective support: the probability mass beyond it is
    /// below `exp(-72)`.
    ///
    /// The envelope is the norm of a Gaussian vector with `2 mu` components of
    /// variance `sigma^2` shifted by a mean of norm at most `d_max`; Gaussian
    /// concentration of the norm gives `P(r > d_max + sigma (sqrt(2 mu) + t))
    /// <= exp(-t^2 / 2)`, used here with `t = 12`.
    pub fn support_upper(&self) -> f64 {
        let d_max = self.branches.iter().map(|b| b.d).fold(0.0, f64::max);
        let specular = self.params.omega * self.params.k / (1.0 + self.params.k);
        let d_max = d_max.max((specular * (1.0 + self.params.delta)).sqrt());
        d_max + self.sigma2.sqrt() * ((2.0 * self.params.mu).sqrt() + 12.0)
    }
}

impl Mtw {
    /// `E[g(r)]` by adaptive Gauss–Kronrod quadrature over the effective
    /// support.
    ///
    /// Near the origin the density behaves like `r^(2 mu - 1)`, which is
    /// singular for `mu < 1/2`. On `[0, r0]` the substitution
    /// `r = r0 t^(1/(2 mu))` absorbs that factor exactly: the transformed
    /// integrand is `g(r) exp(ln_pdf_regular(r)) r0^(2 mu) / (2 mu)`, smooth in
    /// `t`.
    pub fn expectation<G: FnMut(f64) -> f64>(&self, mut g: G, abs_tol: f64, rel_tol: f64) -> f64 {
        const PIECES: usize = 32;
        let upper = self.support_upper();
        let r0 = upper / PIECES as f64;
        let two_mu = 2.0 * self.params.mu;
        let scale = r0.powf(two_mu) / two_mu;
        let head = crate::quadrature::integrate_adaptive(
            |t| {
                let r = r0 * t.powf(1.0 / two_mu);
                g(r) * self.ln_pdf_regular(r).exp() * scale
            },
            0.0,
            1.0,
            0.1 * abs_tol,
            rel_tol,
            500,
        );
        let points: Vec<f64> = (1..=PIECES).map(|i| if i == PIECES { upper } else { r0 * i as f64 }).collect();
        let body = crate::quadrature::integrate_adaptive_pieces(
            |r| g(r) * self.pdf_at(r),
            &points,
            abs_tol,
            rel_tol,
            4000,
        );
        head.value + body.value
    }
}

/// `sum_b w_b P(G_b <= y)` with `G_b ~ Gamma(mu + N_b, 1)`,
/// `N_b ~ Poisson(a_b)`: a phase mixture of noncentral chi-square laws with
/// both arguments halved.
///
/// Rearranging the double series gives
/// `F_b = sum_n [y^(mu+n) e^-y / Gamma(mu+n+1)] * P(N_b <= n)`, a sum of
/// non-negative terms that keeps full relative accuracy deep in the left
/// tail, where outage probabilities live. The gamma factor does not depend on
/// the branch and is shared.
fn mixture_gamma_cdf<'a>(y: f64, mu: f64, branches: impl Iterator<Item = &'a Branch>) -> f64 {
    struct State {
        a: f64,
        weight: f64,
        pois: f64,
        below: f64,
    }
    // Gamma weights below n0 carry relative mass under exp(-36).
    let n0 = (y - 8.5 * y.sqrt() - 5.0).floor().max(0.0);
    let mut states: Vec<State> = branches
        .map(|b| {
            let a = b.half_noncentrality;
            let (pois, below) = if a == 0.0 {
                (if n0 == 0.0 { 1.0 } else { 0.0 }, 1.0)
            } else {
                let p = (n0 * a.ln() - a - ln_gamma(n0 + 1.0)).exp();
                (p, if n0 == 0.0 { p } else { gamma_q(n0 + 1.0, a) })
            };
            State {
                a,
                weight: b.weight,
                pois,
                below,
            }
        })
        .collect();
    if states.is_empty() {
        return 0.0;
    }
    let mut term = ((mu + n0) * y.ln() - y - ln_gamma(mu + n0 + 1.0)).exp();
    let mut sum = 0.0;
    let mut n = n0;
    loop {
        sum += term * states.iter().map(|s| s.weight * s.below).sum::<f64>();
        n += 1.0;
        let ratio = y / (mu + n);
        term *= ratio;
        for s in states.iter_mut().filter(|s| s.a > 0.0) {
            s.pois *= s.a / n;
            s.below = (s.below + s.pois).min(1.0);
        }
        if ratio < 1.0 && term / (1.0 - ratio) <= 1e-17 * sum {
            break;
        }
        if (term == 0.0 && n > y) || n - n0 > 1.0e6 {
            break;
        }
    }
    sum
}

/// `sum_b w_b P(G_b > y)`, the complement of [`mixture_gamma_cdf`], as
/// `sum_n P(N_b = n) Q(mu + n, y)`. The regularized `Q` values are shared
/// across branches and built by the upward recurrence
/// `Q(s + 1, y) = Q(s, y) + y^s e^-y / Gamma(s + 1)`.
fn mixture_gamma_sf<'a>(y: f64, mu: f64, branches: impl Iterator<Item = &'a Branch> + Clone) -> f64 {
    let lowest = |a: f64| (a - 8.5 * a.sqrt() - 5.0).floor().max(0.0);
    let Some(n_start) = branches.clone().map(|b| lowest(b.half_noncentrality)).reduce(f64::min) else {
        return 0.0;
    };
    let mut q = alloc::vec![gamma_q(mu + n_start, y)];
    let mut term = ((mu + n_start) * y.ln() - y - ln_gamma(mu + n_start + 1.0)).exp();
    let mut q_at = |n: f64| {
        let i = (n - n_start) as usize;
        while q.len() <= i {
            let next = (q[q.len() - 1] + term).min(1.0);
            term *= y / (mu + n_start + q.len() as f64);
            q.push(next);
        }
        q[i]
    };
    let mut total = 0.0;
    for b in branches {
        let a = b.half_noncentrality;
        if a == 0.0 {
            total += b.weight * q_at(0.0);
            continue;
        }
        let n_lo = lowest(a);
        let mut pois = (n_lo * a.ln() - a - ln_gamma(n_lo + 1.0)).exp();
        let mut sum = 0.0;
        let mut n = n_lo;
        loop {
            sum += pois * q_at(n);
            n += 1.0;
            pois *= a / n;
            // Past the mode the remaining Poisson mass bounds the rest.
            if n > a && pois / (1.0 - a / (n + 1.0)) <= 1e-17 * sum.max(1e-300) {
                break;
            }
            if n - n_lo > 1.0e6 {
                break;
            }
        }
        total += b.weight * sum.min(1.0);
    }
    total
}

#[cfg(test)]
fn single(a: f64) -> Branch {
    Branch {
        d: 0.0,
        half_noncentrality: a,
        weight: 1.0,
        ln_offset: 0.0,
    }
}

/// `P(G <= x)` for `G ~ Gamma(mu + N, 1)` with `N ~ Poisson(a)`.
#[cfg(test)]
pub(crate) fn noncentral_gamma_cdf(x: f64, a: f64, mu: f64) -> f64 {
    mixture_gamma_cdf(x, mu, core::iter::once(&single(a))).min(1.0)
}

/// `P(G > x)`, complement of [`noncentral_gamma_cdf`].
#[cfg(test)]
pub(crate) fn noncentral_gamma_sf(x: f64, a: f64, mu: f64) -> f64 {
    mixture_gamma_sf(x, mu, core::iter::once(&single(a))).min(1.0)
}

fn checked(params: &ParamSet, grid: &[f64]) -> Result<Mtw> {
    if !is_valid_grid(grid) {
        return Err(Error::InvalidGrid);
    }
    Mtw::new(*params)
}

/// Density on a non-negative, strictly increasing grid.
pub fn pdf(params: &ParamSet, grid: &[f64]) -> Result<Vec<f64>> {
    let m = checked(params, grid)?;
    Ok(crate::numeric::map_slice(grid, |&x| m.pdf_at(x)))
}

/// Distribution function on a non-negative, strictly increasing grid.
pub fn cdf(params: &ParamSet, grid: &[f64]) -> Result<Vec<f64>> {
    let m = checked(params, grid)?;
    Ok(crate::numeric::map_slice(grid, |&x| m.cdf_at(x)))
}

/// Number of table nodes used by [`LogPdfTable`] unless configured otherwise.
pub const LOG_PDF_TABLE_NODES: usize = 4096;

/// Dense log-density table on `[0, upper]`.
///
/// The smooth part [`Mtw::ln_pdf_regular`] is tabulated on a uniform grid and
/// interpolated with shape-preserving cubics; the power-law term
/// `(2 mu - 1) ln x` is added back exactly, so the singular behaviour at the
/// origin costs no accuracy.
#[derive(Debug, Clone)]
pub struct LogPdfTable {
    model: Mtw,
    step: f64,
    upper: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl LogPdfTable {
    pub fn new(model: Mtw, upper: f64, nodes: usize) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) || nodes < 5 {
            return Err(Error::InvalidParameter("table needs a positive span and at least 5 nodes"));
        }
        let step = upper / (nodes - 1) as f64;
        let values = crate::numeric::map_indexed(nodes, |i| {
            let x = if i == nodes - 1 { upper } else { i as f64 * step };
            model.ln_pdf_regular(x)
        });
        let slopes = crate::interp::monotone_slopes(&values, step);
        Ok(Self {
            model,
            step,
            upper,
            values,
            slopes,
        })
    }

    pub fn model(&self) -> &Mtw {
        &self.model
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Tabulated [`Mtw::ln_pdf_regular`] values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Interpolated [`Mtw::ln_pdf_regular`] at `0 <= x < upper`.
    pub fn eval_regular(&self, x: f64) -> f64 {
        let cell = x / self.step;
        let k = (cell.floor() as usize).min(self.values.len() - 2);
        crate::interp::hermite(
            self.values[k],
            self.values[k + 1],
            self.slopes[k] * self.step,
            self.slopes[k + 1] * self.step,
            cell - k as f64,
        )
    }

    /// Floored log-density at `x`; points outside `(0, upper)` are evaluated
    /// directly.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.upper {
            return self.model.ln_pdf(x);
        }
        let l = self.eval_regular(x) + self.model.origin_power() * x.ln();
        l.max(LOG_PDF_FLOOR)
    }
}

/// Log-density at arbitrary non-negative points, floored at
/// [`LOG_PDF_FLOOR`].
///
/// For large point sets the density is tabulated on a dense uniform grid over
/// `[0, 1.05 * max point]` and interpolated with shape-preserving cubics in
/// the log domain; small sets are evaluated directly.
pub fn log_pdf(params: &ParamSet, points: &[f64]) -> Result<Vec<f64>> {
    if points.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidGrid);
    }
    let model = Mtw::new(*params)?;
    if points.len() < 2 * LOG_PDF_TABLE_NODES {
        return Ok(crate::numeric::map_slice(points, |&x| model.ln_pdf(x)));
    }
    let max = points.iter().copied().fold(0.0, f64::max);
    let table = LogPdfTable::new(model, 1.05 * max.max(f64::MIN_POSITIVE), LOG_PDF_TABLE_NODES)?;
    Ok(points.iter().map(|&x| table.eval(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rayleigh() -> ParamSet {
        ParamSet::new(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn survival_complements_cdf() {
        for &(x, a, mu) in &[(3.0, 1.0, 0.5), (40.0, 25.0, 2.0), (10.0, 0.0, 3.0), (120.0, 90.0, 6.0)] {
            let total = noncentral_gamma_cdf(x, a, mu) + noncentral_gamma_sf(x, a, mu);
            assert!((total - 1.0).abs() < 1e-13, "{x} {a} {mu}: {total}");
        }
    }

    #[test]
    fn rayleigh_log_density_closed_form() {
        let l = log_pdf(&rayleigh(), &[1.0]).unwrap();
        assert_relative_eq!(l[0], 2f64.ln() - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rayleigh_cdf_closed_form() {
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        let f = cdf(&rayleigh(), &grid).unwrap();
        for (x, v) in grid.iter().zip(&f) {
            assert!((v - (1.0 - (-x * x).exp())).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn support_boundaries() {
        let p = ParamSet::new(15.0, 0.9, 2.0, 1.0).unwrap();
        let f = cdf(&p, &[0.0, 10.0]).unwrap();
        assert_eq!(f[0], 0.0);
        assert!(f[1] >= 1.0 - 1e-9);
    }

    #[test]
    fn rejects_bad_grids() {
        let p = rayleigh();
        assert_eq!(pdf(&p, &[0.5, 0.2]), Err(Error::InvalidGrid));
        assert_eq!(cdf(&p, &[-0.5, 0.2]), Err(Error::InvalidGrid));
        assert_eq!(log_pdf(&p, &[-1.0]), Err(Error::InvalidGrid));
    }

    #[test]
    fn density_at_origin_follows_power_law() {
        let grid = [0.0];
        assert_eq!(pdf(&ParamSet::new(1.0, 0.5, 2.0, 1.0).unwrap(), &grid).unwrap()[0], 0.0);
        assert!(pdf(&ParamSet::new(1.0, 0.5, 0.3, 1.0).unwrap(), &grid).unwrap()[0].is_infinite());
        let half = pdf(&ParamSet::new(1.0, 0.5, 0.5, 1.0).unwrap(), &grid).unwrap()[0];
        assert!(half.is_finite() && half > 0.0);
        let l = log_pdf(&ParamSet::new(1.0, 0.5, 2.0, 1.0).unwrap(), &grid).unwrap();
        assert_eq!(l[0], LOG_PDF_FLOOR);
    }

    #[test]
    fn noncentral_gamma_cdf_reduces_to_gamma() {
        for &(x, mu) in &[(0.3, 0.4), (2.0, 2.0), (50.0, 6.0), (200.0, 3.5)] {
            assert_relative_eq!(
                noncentral_gamma_cdf(x, 0.0, mu),
                crate::special::gamma_p(mu, x),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn noncentral_gamma_cdf_matches_poisson_mixture() {
        // Direct mixture sum, fine for moderate arguments.
        for &(x, a, mu) in &[(1.0, 2.0, 1.5), (40.0, 30.0, 2.0), (5.0, 0.1, 0.3), (300.0, 250.0, 4.0)] {
            let mut direct = 0.0;
            for j in 0..2000 {
                let jf = j as f64;
                let w = (jf * f64::ln(a) - a - ln_gamma(jf + 1.0)).exp();
                direct += w * crate::special::gamma_p(mu + jf, x);
            }
            assert_relative_eq!(noncentral_gamma_cdf(x, a, mu), direct, max_relative = 1e-11);
        }
    }

    #[test]
    fn deep_left_tail_keeps_relative_accuracy() {
        // F ~ x^mu e^{-a} / Gamma(mu + 1) as x -> 0.
        let (x, a, mu) = (1e-8, 20.0, 2.0);
        let approx = (mu * f64::ln(x) - a - ln_gamma(mu + 1.0)).exp();
        assert_relative_eq!(noncentral_gamma_cdf(x, a, mu), approx, max_relative = 1e-6);
    }

    #[test]
    fn theta_quadrature_converged() {
        assert_eq!(Mtw::default_theta_nodes(&ParamSet::new(15.0, 0.9, 2.0, 1.0).unwrap()), 64);
        for shape in [[15.0, 0.9, 2.0], [45.0, 1.0, 6.0], [5.0, 1.0, 0.5], [0.1, 0.5, 0.1]] {
            let p = ParamSet::from_shape(shape, 1.0).unwrap();
            let n = Mtw::default_theta_nodes(&p);
            let m64 = Mtw::with_theta_nodes(p, n).unwrap();
            let m128 = Mtw::with_theta_nodes(p, 2 * n).unwrap();
            for i in 1..300 {
                let x = i as f64 * 0.01;
                let (a, b) = (m64.pdf_at(x), m128.pdf_at(x));
                assert!((a - b).abs() < 1e-8, "{shape:?} x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn table_matches_direct_at_nodes() {
        let p = ParamSet::new(15.0, 0.9, 2.0, 1.0).unwrap();
        let table = LogPdfTable::new(Mtw::new(p).unwrap(), 2.0, 4096).unwrap();
        for k in [1, 31, 100, 2000, 4000] {
            let x = k as f64 * table.step();
            let direct = table.model().pdf_at(x);
            assert_relative_eq!(table.eval(x).exp(), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn table_interpolation_error_below_1e6() {
        // Refinement check: doubling the node count must not move the
        // interpolant by more than 1e-6, and both agree with direct evaluation.
        for shape in [[15.0, 0.9, 2.0], [45.0, 1.0, 6.0], [0.1, 0.0, 0.1], [45.0, 0.0, 6.0], [2.0, 0.5, 0.4]] {
            let p = ParamSet::from_shape(shape, 1.0).unwrap();
            let m = Mtw::new(p).unwrap();
            let coarse = LogPdfTable::new(m.clone(), 3.2, LOG_PDF_TABLE_NODES).unwrap();
            let fine = LogPdfTable::new(m.clone(), 3.2, 2 * LOG_PDF_TABLE_NODES).unwrap();
            for i in 0..5000 {
                let x = 3.2 * (i as f64 + 0.31) / 5000.0;
                let (c, f) = (coarse.eval(x), fine.eval(x));
                if m.ln_pdf_exact(x) < -700.0 {
                    continue;
                }
                assert!((c - f).abs() <= 1e-6, "{shape:?} x={x}: {c} vs {f}");
                assert!((c - m.ln_pdf(x)).abs() <= 1e-6, "{shape:?} x={x}");
            }
        }
    }
}
