//! Superpositions of coherent states in a single field mode.
//!
//! The crate is organised around a handful of pipelines:
//!
//! * [`states`]: finite superpositions of coherent states, their overlaps,
//!   normalization and number-basis expansion.
//! * [`wigner`]: closed-form Wigner functions (generic pairwise sum and the
//!   specialised compass expression), grid evaluation and the central
//!   chessboard metrics.
//! * [`protocol`]: dispersive atom passes, Ramsey atoms and conditional
//!   projection of the cavity field onto joint atomic detections.
//! * [`decoherence`]: zero-temperature amplitude damping of the compass state.
//! * [`probe`]: resonant probe atom, collapse and revival traces.
//! * [`numerics`]: truncated Fock-space oracles (Jaynes-Cummings propagation,
//!   RK4 Lindblad integration, displacement matrices) used to check all of
//!   the above.
//!
//! Conventions: hbar = 1, phase-space points are `gamma = x + i p`, so the
//! vacuum Wigner function is `(2/pi) exp(-2|gamma|^2)` and its `1/e`
//! footprint has area `pi/2`.

pub mod acceptance;
pub mod decoherence;
pub mod error;
pub mod export;
pub mod numerics;
pub mod probe;
pub mod protocol;
pub mod states;
pub mod wigner;

mod math;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use math::default_cutoff;
