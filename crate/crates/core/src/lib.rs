//! Numerical toolkit for covert communication over additive-noise channels:
//! the square-root scaling constant, tilted noise laws, a random-coding
//! simulator and key-length bounds. All information quantities are in nats.

pub mod error;
pub mod input;
pub mod key_length;
pub mod noise;
pub mod numerics;
pub mod scaling;
pub mod simulator;
pub mod tilt;

pub use error::{Error, Result};
pub use noise::NoiseModel;
