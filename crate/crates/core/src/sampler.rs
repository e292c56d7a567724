//! Physical-model sampler for MTW envelopes.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{physical_from_shape, ParamSet, PhysicalParams, SampleSet};

/// Samples drawn from one ChaCha stream. Chunk `i` always uses stream `i`,
/// so the output does not depend on how chunks are scheduled.
pub const CHUNK_LEN: usize = 1 << 14;

/// Draws `n` envelope samples `r = sqrt(sum_i |Z_i|^2)`.
///
/// For `mu >= 1` the first cluster is built literally as
/// `V1 e^{j phi1} + V2 e^{j phi2} + X + jY` and the remaining `mu - 1`
/// clusters contribute a Gamma-distributed diffuse power (shape `mu - 1`,
/// scale `2 sigma^2`), which is the sum of `mu - 1` cluster powers extended to
/// real `mu`. For `mu < 1` no whole cluster exists; the envelope is then drawn
/// from the equivalent Poisson mixture `r^2 = 2 sigma^2 Gamma(mu + J)` with
/// `J ~ Poisson(|S|^2 / (2 sigma^2))`, where `S` is the specular phasor sum.
pub fn sample_envelope(params: &ParamSet, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1"));
    }
    let phys = physical_from_shape(params)?;
    let chunks = n.div_ceil(CHUNK_LEN);
    let parts = crate::numeric::map_indexed(chunks, |c| {
        let len = CHUNK_LEN.min(n - c * CHUNK_LEN);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        draw_chunk(&phys, len, &mut rng)
    });
    let values: Vec<f64> = parts.into_iter().flatten().collect();
    let source = format!(
        "mtw:K={},Delta={},mu={},Omega={}",
        params.k, params.delta, params.mu, params.omega
    );
    SampleSet::new(values, source, Some(seed))
}

fn draw_chunk<R: Rng>(phys: &PhysicalParams, len: usize, rng: &mut R) -> Vec<f64> {
    let sigma = phys.sigma2.sqrt();
    let two_sigma2 = 2.0 * phys.sigma2;
    let tau = 2.0 * core::f64::consts::PI;
    let extra_clusters = if phys.mu > 1.0 {
        Some(Gamma::new(phys.mu - 1.0, two_sigma2).expect("valid gamma shape"))
    } else {
        None
    };
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let phi1 = tau * rng.random::<f64>();
        let phi2 = tau * rng.random::<f64>();
        let s_re = phys.v1 * phi1.cos() + phys.v2 * phi2.cos();
        let s_im = phys.v1 * phi1.sin() + phys.v2 * phi2.sin();
        let r2 = if phys.mu >= 1.0 {
            let x: f64 = s_re + sigma * rng.sample::<f64, _>(StandardNormal);
            let y: f64 = s_im + sigma * rng.sample::<f64, _>(StandardNormal);
            let rest = extra_clusters.as_ref().map_or(0.0, |g| g.sample(rng));
            x * x + y * y + rest
        } else {
            let mean = (s_re * s_re + s_im * s_im) / two_sigma2;
            let j = if mean > 0.0 {
                Poisson::new(mean).expect("valid poisson mean").sample(rng)
            } else {
                0.0
            };
            let g = Gamma::new(phys.mu + j, 1.0).expect("valid gamma shape");
            two_sigma2 * g.sample(rng)
        };
        out.push(r2.sqrt());
    }
    out
}
