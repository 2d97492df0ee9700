//! Exact symbolic engine for graded quantum Weyl algebras with commutation
//! factors, their Fock representation, superization and a dense-matrix oracle.

pub mod coefficients;
pub mod fock;
pub mod gram;
pub mod oracle;
pub mod sample;
pub mod statistics;
pub mod superize;
pub mod weyl;

pub use coefficients::{PhaseScalar, ScalarError};
pub use statistics::{CommutationFactor, FactorDescriptor, FactorError, FactorPreset, GradeVector, PresetKind};
