//! Schur functions, KP and 2KP tau-functions, convolution symmetries and
//! the matrix-model integrals they generate.

pub mod convolution;
pub mod error;
pub mod grassmann;
pub mod integrate;
pub mod linalg;
pub mod matmodels;
pub mod partitions;
pub mod report;
pub mod symfunc;
pub mod tau;
pub mod verify;

pub use convolution::{rho_product, LaurentPoly, RhoFamily, RhoSequence};
pub use error::{Result, TauError};
pub use grassmann::FiniteFrame;
pub use integrate::{McEstimate, MeasureSpec, Quad};
pub use linalg::DetValue;
pub use matmodels::{BimomentMatrix, CoupledMeasure, MomentMatrix};
pub use partitions::Partition;
pub use report::Report;
pub use symfunc::{EigenList, FlowVector};
pub use tau::{MiwaShift, Provenance, SeriesValue, TauSeries, TauSeries2};
pub use verify::{Suite, Tolerances, VerifyConfig};
