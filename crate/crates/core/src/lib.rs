pub mod calculus;
pub mod error;
pub mod exterior;
pub mod field;
pub mod foliation;
pub mod fourier;
pub mod geometry;
pub mod identities;
pub mod matrix;
pub mod operator;
pub mod report;
pub mod simplicial;
pub mod torus;

pub use calculus::{HarmonicSummary, TwistClass, TwistedCalculus};
pub use error::{Error, Result};
pub use exterior::{FormBasis, GradedOperator, GradedVector, PointwiseOperator};
pub use field::Field;
pub use foliation::{CurvatureReport, LieAlgebraModel, MappingTorusModel};
pub use fourier::{Mode, ModeBox, TrigPoly};
pub use geometry::{CurvatureTensor, FrameGeometry};
pub use matrix::Matrix;
pub use operator::ModeBlockOperator;
pub use report::{BettiReport, GateRecord, ResidualRecord, SpectrumEntry};
pub use simplicial::{EdgeCocycle, LocalSystem, SimplicialComplex};
pub use torus::TorusModel;
