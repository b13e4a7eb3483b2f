//! Lebesgue, Lorentz and Besov norms, and the diagnostics built on them.
//!
//! Infinite exponents are passed as `f64::INFINITY`.

mod besov;
mod dilation;
mod embedding;
mod lebesgue;
mod lorentz;

pub use besov::{
    besov_norm, besov_norm_vector, besov_sequence, besov_sequence_vector, sequence_norm, BesovParams,
};
pub use dilation::{anisotropic_dilate, dilation_ratio, min_dilation};
pub use embedding::{embedding_ratio, embedding_ratio_from};
pub use lebesgue::{lebesgue_norm, lebesgue_norm_samples, lebesgue_norm_vector};
pub use lorentz::{lorentz_norm, LorentzParams, LorentzSpec, Rearrangement};
