//! Blind adaptation of microphone spacings for a three-sensor array split
//! into two competing two-channel separation sub-arrays.
//!
//! * [`acoustic`] simulates the room and the microphone signals.
//! * [`bss`] separates each sub-array's two channels.
//! * [`metrics`] scores separation blindly (weighted coherence) and with
//!   oracle access (SIR).
//! * [`adapt`] moves the spacings and picks the output sub-array.
//! * [`harness`] runs whole experiments and writes their traces.

pub mod acoustic;
pub mod adapt;
pub mod bss;
mod dsp;
pub mod error;
pub mod harness;
pub mod metrics;

pub use dsp::convolve;
pub use error::{Error, Result};
