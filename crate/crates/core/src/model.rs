//! Parameterizations of the multi-cluster two-wave (MTW) fading model.
//!
//! The envelope is `r^2 = sum_i |Z_i|^2` over `mu` clusters. The first cluster
//! carries two specular waves `V1 e^{j phi1} + V2 e^{j phi2}` on top of its
//! diffuse part; every cluster has complex Gaussian diffuse power `2 sigma^2`.
//! The shape parameters are
//!
//! * `K = (V1^2 + V2^2) / (2 mu sigma^2)`, specular-to-diffuse power ratio,
//! * `Delta = 2 V1 V2 / (V1^2 + V2^2)`, balance of the two specular waves,
//! * `mu`, number of clusters (real, positive),
//!
//! and `Omega = V1^2 + V2^2 + 2 mu sigma^2 = E[r^2]` sets the power scale.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numeric::mean_square;

/// Shape vector `{K, Delta, mu}` plus power scale `Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSet {
    pub k: f64,
    pub delta: f64,
    pub mu: f64,
    pub omega: f64,
}

impl ParamSet {
    pub fn new(k: f64, delta: f64, mu: f64, omega: f64) -> Result<Self> {
        let p = Self {
            k,
            delta,
            mu,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit-power parameter set, as used for normalized envelopes.
    pub fn unit_power(k: f64, delta: f64, mu: f64) -> Result<Self> {
        Self::new(k, delta, mu, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::InvalidParameter("K must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidParameter("Delta must lie in [0, 1]"));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParameter("mu must be finite and > 0"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter("Omega must be finite and > 0"));
        }
        Ok(())
    }

    /// The shape triple `[K, Delta, mu]`.
    pub fn shape(&self) -> [f64; 3] {
        [self.k, self.delta, self.mu]
    }

    /// Builds a parameter set from a shape triple and power scale.
    pub fn from_shape(shape: [f64; 3], omega: f64) -> Result<Self> {
        Self::new(shape[0], shape[1], shape[2], omega)
    }
}

/// Physical description: specular amplitudes, per-component diffuse variance
/// and cluster count.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysicalParams {
    pub v1: f64,
    pub v2: f64,
    pub sigma2: f64,
    pub mu: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v1.is_finite() && self.v2.is_finite() && self.v1 >= 0.0 && self.v2 >= 0.0) {
            return Err(Error::InvalidParameter("specular amplitudes must be finite and >= 0"));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter("sigma^2 must be finite and > 0"));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParameter("mu must be finite and > 0"));
        }
        Ok(())
    }

    /// Total specular power `V1^2 + V2^2`.
    pub fn specular_power(&self) -> f64 {
        self.v1 * self.v1 + self.v2 * self.v2
    }

    /// Total diffuse power `2 mu sigma^2`.
    pub fn diffuse_power(&self) -> f64 {
        2.0 * self.mu * self.sigma2
    }
}

/// Maps shape parameters to canonical physical parameters with `V1 >= V2`.
pub fn physical_from_shape(params: &ParamSet) -> Result<PhysicalParams> {
    params.validate()?;
    let diffuse = params.omega / (1.0 + params.k);
    let specular = params.omega * params.k / (1.0 + params.k);
    let root = (1.0 - params.delta * params.delta).max(0.0).sqrt();
    let v1 = (0.5 * specular * (1.0 + root)).sqrt();
    // V1 V2 = Delta (V1^2 + V2^2) / 2 avoids cancellation in (1 - root) as Delta -> 0.
    let v2 = if v1 > 0.0 {
        0.5 * params.delta * specular / v1
    } else {
        0.0
    };
    Ok(PhysicalParams {
        v1,
        v2,
        sigma2: diffuse / (2.0 * params.mu),
        mu: params.mu,
    })
}

/// Maps physical parameters back to `{K, Delta, mu, Omega}`.
pub fn shape_from_physical(phys: &PhysicalParams) -> Result<ParamSet> {
    phys.validate()?;
    let specular = phys.specular_power();
    let diffuse = phys.diffuse_power();
    let delta = if specular > 0.0 {
        (2.0 * phys.v1 * phys.v2 / specular).min(1.0)
    } else {
        0.0
    };
    ParamSet::new(specular / diffuse, delta, phys.mu, specular + diffuse)
}

/// Envelope samples with provenance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub normalized: bool,
    pub source: String,
    pub seed: Option<u64>,
}

/// Mean-square tolerance under which a sample set counts as normalized.
pub const NORMALIZED_TOL: f64 = 1e-12;

impl SampleSet {
    /// Wraps raw amplitudes; the `normalized` flag is derived from the data.
    pub fn new(values: Vec<f64>, source: impl Into<String>, seed: Option<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSamples("sample set is empty"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSamples("amplitudes must be finite and >= 0"));
        }
        let normalized = (mean_square(&values) - 1.0).abs() <= NORMALIZED_TOL;
        Ok(Self {
            values,
            normalized,
            source: source.into(),
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `E[r^2]` estimated from the samples.
    pub fn mean_square(&self) -> f64 {
        mean_square(&self.values)
    }
}
