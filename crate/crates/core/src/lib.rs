//! Littlewood-Paley analysis, Besov and Lorentz norms, paraproducts and
//! axisymmetric Euler dynamics on periodic grids.

pub mod axisym;
pub mod bernstein;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod norms;
pub mod paraproduct;
pub mod partition;
pub mod random;
pub mod snapshot;
pub mod vector;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::Grid;
pub use partition::{build_partition, PartitionOfUnity};
pub use vector::VectorField;
