//! Observation masks and reconstruction quality metrics.

pub mod masks;
pub mod metrics;
