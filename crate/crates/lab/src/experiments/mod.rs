//! Experiment runners, one function per registry key.

pub mod bony;
pub mod decomposition;
pub mod flow;
pub mod geometry;
pub mod norms;
pub mod spectral;
pub mod transport;

use plab_core::axisym::AxisymProfile;

/// Seeded random ring superpositions used as a flow corpus.
pub fn flow_corpus(seed: u64, count: usize) -> Vec<AxisymProfile> {
    (0..count as u64)
        .map(|i| AxisymProfile::Random { seed: seed.wrapping_add(i), terms: 3, amplitude: 0.2 })
        .collect()
}
