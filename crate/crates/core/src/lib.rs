//! Simulator for a driven electro-opto-mechanical cavity coupled to a qubit:
//! a mechanical resonator shared between an optical cavity, a microwave
//! cavity and a two-level system, all rates dimensionless in units of the
//! mechanical frequency.
//!
//! Three computations make up the crate:
//! * [`steady_state`] — mean-field photon number vs. pump amplitude, with
//!   bistability branches, turning points and switching metrics;
//! * [`probe`] — the probe-field response `eps_T` (absorption/dispersion),
//!   its pole/residue decomposition and closed-form window/peak predictions;
//! * [`nms`] — the mechanical displacement spectrum S_x and its normal-mode
//!   peak structure.
//!
//! [`analysis`] turns raw spectra into feature reports with tolerance
//! verdicts, [`check`] hosts the built-in oracle suites, and [`cli`] backs
//! the `eomq` binary.

pub mod analysis;
pub mod check;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod nms;
pub mod numerics;
pub mod output;
pub mod probe;
pub mod series;
pub mod steady_state;

pub use error::{Error, Result};
pub use model::{effective_params, red_sideband, validate, BareParams, SystemParams};
