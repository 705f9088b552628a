//! Ergodic-rate analysis of a two-phase NOMA cooperative relaying system whose
//! decode-and-forward relay is powered by energy harvested from the source.
//!
//! Rates are available two ways that are meant to agree:
//!
//! * [`montecarlo`] averages instantaneous achievable rates over seeded Rayleigh
//!   channel draws;
//! * [`analytic`] integrates the rate expressions against the densities of the
//!   min-of-links gains with adaptive Gauss–Legendre quadrature.
//!
//! [`explore`] sweeps and optimizes the protocol parameters, and [`cli`] wires
//! everything to a small command-line tool.

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod explore;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};
pub use model::{EhProtocol, PowerBudget, SplitFactor, SystemParams};
