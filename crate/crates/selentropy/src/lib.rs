//! One-shot quantum information toolkit.

pub mod apps;
pub mod bounds;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod metrics;
pub mod operators;
pub mod sdp;
pub mod smooth;

pub use error::{Error, Result};
