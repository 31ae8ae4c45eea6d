//! Primitive rational points on expanding horospheres and their
//! computational shadows: residue parametrizations, exponential sums,
//! Hecke points, covering radii of unimodular lattices and circulant graph
//! diameters.

pub mod circulant;
pub mod error;
pub mod experiments;
pub mod hecke;
pub mod lattices;
pub mod matrix;
pub mod numtheory;
pub mod residues;

pub use error::{Error, Result};
pub use matrix::{hermite_normal_form, IntMatrix};
pub use numtheory::FactoredInt;
pub use residues::{ProjectivePoint, ResidueVector};
