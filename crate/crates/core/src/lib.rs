//! Solutions of the confluent Heun equation
//!
//! ```text
//! u'' + (γ/z + δ/(z−1) + ε) u' + (αz − q)/(z(z−1)) u = 0
//! ```
//!
//! expanded in Kummer confluent hypergeometric functions `₁F₁(αₙ; γₙ; s₀z)`.
//! The crate builds the expansion coefficients from their recurrence
//! relations, detects when a series terminates and computes the accessory
//! parameter values `q` for which it does, and carries two independent
//! oracles (a Frobenius power series at `z = 0` and a Runge–Kutta integrator
//! for the two-state application).
//!
//! Module map:
//!
//! * [`kummer`]: `₁F₁` evaluation and the contiguous relations the expansions use.
//! * [`che`]: equation parameters, residual operator, Frobenius oracle, `z → 1−z`.
//! * [`expansions`]: the five expansion families and series evaluation.
//! * [`termination`]: right-side termination, q-spectra, polynomial root finding.
//! * [`twostate`]: the Lorentzian two-state model and its reduction.
//! * [`cli`]: the `heun` command-line front end.

pub mod che;
pub mod cli;
pub mod expansions;
pub mod kummer;
pub mod numeric;
pub mod termination;
pub mod twostate;

mod error;

pub use error::Error;
pub use num_complex::Complex64 as C64;

pub use che::{CheParams, LocalSeries, LocalValue};
pub use expansions::{Alpha0, Family, SeriesSolution, SeriesValue, Violation};
pub use kummer::{Identity, KummerArgs, SeriesControl};
pub use termination::{QSpectrum, TerminationCondition, TerminationKind};
pub use twostate::{LorentzianModel, Trajectory, TwoStateReduction};
