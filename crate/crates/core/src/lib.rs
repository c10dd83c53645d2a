//! Resonance dynamics in the Gamow-vector picture.
//!
//! * [`resolvent`] finds the resonance pole of a Friedrichs model on the
//!   second Riemann sheet of its reduced resolvent.
//! * [`dynamics`] evolves states expanded over decaying Gamow modes and
//!   evaluates the Loschmidt echo.
//! * [`coherent`] builds quasi-coherent superpositions of Gamow modes.
//! * [`decoherence`] follows the off-diagonal density-matrix elements of a
//!   two-state superposition and compares their decay with the echo.

pub mod coherent;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod form_factor;
pub mod quadrature;
pub mod resolvent;
pub mod types;

pub use error::{Error, Result};
pub use form_factor::{FormFactor, FormFactorKind};
pub use types::{
    ladder_spectrum, linear_grid, pseudometric_pair, FriedrichsModel, GamowSpectrum, GamowState,
    Hbar, Provenance, ResonancePole, TimeSeries,
};
