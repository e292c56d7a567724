//! Fitting the multi-cluster two-wave (MTW) fading model to envelope data.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can run
//! anywhere; file formats, configuration and the command-line pipeline live
//! in the companion `mtwfit` crate.
//!
//! * [`model`] and [`density`]: parameterizations, pdf, cdf, log-density.
//! * [`sampler`]: reproducible physical-model sampling.
//! * [`empirical`]: normalization, kernel density, ECDF and log grids.
//! * [`gof`]: likelihood, MSE, KLD, RAD and log-CDF Kolmogorov–Smirnov criteria.
//! * [`optim`] and [`fit`]: bounded multistart Nelder–Mead fitting.
//! * [`perf`]: ergodic capacity, outage probability and operational SNR.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod density;
pub mod empirical;
pub mod error;
pub mod fit;
pub mod gof;
pub mod interp;
pub mod model;
pub mod numeric;
pub mod optim;
pub mod perf;
pub mod quadrature;
pub mod sampler;
pub mod special;

pub use density::{cdf, log_pdf, pdf, Mtw};
pub use error::{Error, Result};
pub use model::{physical_from_shape, shape_from_physical, ParamSet, PhysicalParams, SampleSet};
pub use sampler::sample_envelope;
