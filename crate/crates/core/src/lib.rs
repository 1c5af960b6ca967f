//! Colour records of generalized random walks in random scenery.
//!
//! A walker on the integers with stationary step law `μ` reads the colours
//! of a scenery drawn from a shift-invariant measure `λ`. This crate
//! computes the law `ρ` of the colour record exactly and by simulation,
//! inverts the block lower-triangular system `V_n(ρ) = A_n V_n(λ)` to
//! recover `λ` (or its reversal symmetrization for symmetric walks), and
//! decides whether two periodic sceneries can be told apart.

pub mod cli;
pub mod distinguish;
pub mod error;
pub mod measures;
pub mod reconstruct;
pub mod record;
pub mod words;

pub use error::{Error, Result};
pub use measures::{SceneryMeasure, StepMeasure, DEFAULT_EPS};
pub use record::{CylinderVector, RecordSequence};
pub use words::{ColourAlphabet, ColourWord, Step, StepWord, WordOrder};
