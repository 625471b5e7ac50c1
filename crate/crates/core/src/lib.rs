//! Numerical core: dense quantum linear algebra, finitely correlated states,
//! entanglement of formation, depolarized Werner-Holevo channels and gapped
//! spin-chain ground-state approximation.

pub mod entanglement;
pub mod error;
pub mod channels;
pub mod fcs;
pub mod gapped;
pub mod qlinalg;

pub use error::{Error, Result};
pub use qlinalg::{c64, ComplexMatrix, DensityMatrix, PureState, TensorShape};
