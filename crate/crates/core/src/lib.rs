//! Weighted composition operators `W_{f,phi} h = f * (h o phi)` on the reproducing kernel spaces
//! H_gamma of the unit ball of C^n, with linear fractional symbols.
//!
//! Symbols are handled in closed form where possible (kernel weights, projective matrices), and
//! through truncated Taylor series in the orthonormal monomial basis otherwise.

pub mod classify;
pub mod error;
pub mod job;
pub mod kernels;
pub mod linalg;
pub mod maps;
pub mod multiindex;
pub mod sampling;
pub mod series;
pub mod spectra;
pub mod wco;

pub use classify::{classify_all, Classification, Tolerances, Verdict, Witness};
pub use error::{Error, ErrorKind, Result};
pub use job::{Command, JobError, JobSpec};
pub use kernels::KernelVector;
pub use maps::{BallPoint, LinearFractionalMap};
pub use multiindex::{Basis, MultiIndex, SpaceParams};
pub use num_complex::Complex64;
pub use series::TruncatedSeries;
pub use wco::{WcoSymbol, WeightSpec};
