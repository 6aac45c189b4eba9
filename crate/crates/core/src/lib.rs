//! Transient response of a meander-line turn to an ultrashort pulse.
//!
//! The turn is a symmetric coupled pair shorted at the far end. Responses
//! are built from closed-form multiple-reflection series of the even and odd
//! modes ([`bounce`], [`turn`]), the design condition that splits an input
//! pulse into three equal pulses lives in [`equalization`], and [`oracle`]
//! recomputes every node voltage independently in the frequency domain.

pub mod bounce;
pub mod cli;
pub mod config;
pub mod equalization;
pub mod error;
pub mod excitation;
pub mod modal;
pub mod oracle;
pub mod plot;
pub mod turn;

pub use error::{Error, Result};
