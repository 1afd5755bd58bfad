//! Multi-label classification with trigonometric functional expansion, an
//! autoencoder feature reducer and a delta-rule output layer.
//!
//! The pipeline is normalize → [`expansion::expand`] → autoencoder encoder →
//! sigmoid output layer. Dropping the encoder gives the plain functional-link
//! baseline, and a single-label mode predicts one class by argmax.

pub mod autoencoder;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod expansion;
pub mod harness;
pub mod kernel;
pub mod metrics;

pub use error::{Error, Result};
