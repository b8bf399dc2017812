//! Certification of Bell-state measurements in entanglement swapping.
//!
//! A source distributes entangled pairs to Alice–Charlie and Bob–Charlie.
//! Charlie performs one of three four-outcome measurements; the third is the
//! candidate Bell-state measurement. From the CHSH values between
//! Alice–Charlie, Bob–Charlie, and Alice–Bob conditioned on Charlie's
//! outcome, the crate decides whether the measurement is entangling (and
//! whether it is nonlocal), bounds its distance to the ideal Bell
//! measurement, and computes the maximal CHSH value reachable with a
//! product state for arbitrary-dimensional ±1 observables.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! - `ideal_swapping`: exact statistics and verdicts of the ideal scenario
//! - `noisy_sweep`: Werner noise and measurement misalignment
//! - `distance_bounds`: bounds on the distance to the Bell measurement
//! - `block_decomposition`: Jordan blocks of a pair of observables
//! - `separable_bound`: closed form versus see-saw optimization
//! - `theorem_check`: planted high-dimensional instances
//! - `finite_statistics`: sampling counts and certifying with error bars
//!
//! Indices are 0-based in the Rust API. The command line tool and the file
//! formats use 1-based settings and outcomes.

// outcome and setting indices double as array indices throughout
#![allow(clippy::needless_range_loop)]

pub mod bell_decomposition;
pub mod certification;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measurements;
pub mod protocol;
pub mod random;
pub mod sampling;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, PureState};
pub use measurements::{BinnedMeasurement, DichotomicObservable, FourOutcomeMeasurement};
pub use protocol::{chsh_report, ChshReport, Scenario};
