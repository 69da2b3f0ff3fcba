//! Foliated models: mapping-torus flows, curvature gates and Lie algebras.

pub mod curvature;
pub mod lie;
pub mod mapping_torus;

pub use curvature::{positivity_gate, twist_invariance, CurvatureReport};
pub use lie::LieAlgebraModel;
pub use mapping_torus::{BasicTwist, MappingTorusModel, MeanCurvatureForm};
