//! Fourier analysis on bounded Vilenkin groups.
//!
//! The crate models a Vilenkin group truncated at a finite depth, computes
//! Vilenkin-Fourier spectra with a fast mixed-radix transform, and evaluates
//! partial sums, Fejér means and Riesz logarithmic means together with their
//! kernels. On top of that sit martingale Hardy-space quasi-norms, p-atoms,
//! the Walsh counterexample construction for the strong Riesz inequality,
//! and an experiment harness that checks the kernel and means estimates
//! numerically and writes JSON/CSV reports.

pub mod counterexample;
pub mod error;
pub mod group;
pub mod hardy;
pub mod par;
pub mod summability;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use group::{build_group, enumerate_complement_partition, Coset, GroupElement, GroupStructure, MixedRadixIndex};
pub use par::Execution;
pub use transform::{character, forward_transform, inverse_transform, DiscreteFunction, Spectrum};
