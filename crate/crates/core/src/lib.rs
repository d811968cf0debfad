//! Operational nonclassicality and quantum-noise-free measurements for a
//! single harmonic-oscillator mode.
//!
//! * [`fock`]: truncated Fock space, dense operators, states, matrix functions.
//! * [`algebra`]: ladder-operator polynomials with true and formal normal ordering.
//! * [`states`]: Fock, coherent, squeezed-vacuum, thermal and mixed states.
//! * [`witness`]: `⟨f†f⟩`, `⟨:f†f:⟩`, their difference and the relative nonclassicality `R`.
//! * [`solver`]: states annihilated (or least disturbed) by a measurement operator.
//! * [`ion`]: two-sideband trapped-ion readout of `f†f`.
//! * [`cli`] and [`config`]: the `qnf` command-line front end.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod ion;
pub mod parallel;
pub mod selftest;
pub mod solver;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use fock::{FockSpace, MixedState, Operator, PureState, State, C64};
pub use parallel::Execution;
