//! Sampling and reconstruction of Hilbert-Schmidt operators on the finite
//! phase space `Z_L x Z_L` (`L` odd).
//!
//! Operators are handled through their Weyl symbols; lattice-invariant
//! operator spaces are analysed with symplectic Fourier series, transfer
//! matrices and frame bounds.

pub mod error;
pub mod experiment;
pub mod frame;
pub mod lattice;
pub mod linalg;
pub mod phase_space;
pub mod random;
pub mod sampling;
pub mod weyl;

pub use error::{Error, Result};
pub use frame::{ConvolutionMatrix, FrameReport, TransferMatrix, Verdict, Witness};
pub use lattice::{DualFunction, DualGrid, Lattice, LatticeSeq};
pub use phase_space::{HsOperator, ModSize, PhasePoint, Signal};
pub use sampling::{AveragerSet, GeneratorSet, Reconstructor, SampleSet};
pub use weyl::PhaseFunction;
