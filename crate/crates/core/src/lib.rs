//! Adiabatic (Born–Oppenheimer) Dicke model: ground state of the effective
//! oscillator potential, spin and oscillator observables, qubit–oscillator
//! entanglement, thermodynamic-limit closed forms and finite-size scaling at
//! the critical point.

pub mod eigensolver;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod observables;
pub mod scaling;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
