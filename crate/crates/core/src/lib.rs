//! Galois ring isomorphisms and the Galois ring isomorphism (GRI) problem.
//!
//! The crate is layered bottom-up: [`zmod`] residues, [`poly`] polynomials,
//! [`ffield`] residue fields, [`gring`] Galois rings and their isomorphisms,
//! [`gri`] problem instances, [`lattice`] the lattice-reduction attack and
//! [`crt`] direct sums of Galois rings with coprime characteristics.

pub mod crt;
pub mod error;
pub mod ffield;
pub mod format;
pub mod gri;
pub mod gring;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod zmod;

pub use error::{Error, Result};
