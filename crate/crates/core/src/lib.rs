//! Two contact-interacting bosons on a ring interrupted by a localized
//! SU(1,1) transfer-matrix defect.
//!
//! Units are ħ = m = 1. The crate is split the same way the computation is:
//!
//! * [`tmatrix`]: the defect's transfer matrix,
//! * [`spectrum`]: the spectral relations, their roots and continuation,
//! * [`wavefun`]: Bethe amplitudes, evaluation and inner products,
//! * [`geomphase`]: the geometric phase along `η = const, α ∈ [0, 2π]`,
//! * [`cli`]: the command-line front end and its file formats.

pub mod cli;
pub mod error;
pub mod geomphase;
pub mod quadrature;
pub mod report;
pub mod spectrum;
pub mod tmatrix;
pub mod wavefun;

pub use error::{Error, Result};
pub use geomphase::{ContourSpec, PhaseResult};
pub use spectrum::{RootPath, SpectralPoint, SystemConfig};
pub use tmatrix::{DefectParams, TransferMatrix};
pub use wavefun::{AmplitudeSet, Wavefunction};
