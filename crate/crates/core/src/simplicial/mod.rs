//! Simplicial complexes with rank-one local systems.

pub mod cocycle;
pub mod complex;
pub mod data;
pub mod local;

pub use cocycle::{integer_cocycle_basis, EdgeCocycle, LogRational};
pub use complex::SimplicialComplex;
pub use data::{bundled_cocycle, bundled_complex};
pub use local::{
    betti_for, coboundary_square, euler_check, twisted_betti, twisted_coboundary, untwisted_coboundary, Coboundary,
    LocalSystem,
};
