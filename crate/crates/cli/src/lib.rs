//! Experiment harness around `rmln-core`: image loading, plan files, batch
//! runs with CSV reports, and the scalar surrogate profile.

pub mod image_io;
pub mod plan;
pub mod profile;
pub mod runner;

pub use image_io::{load_image, quantize, save_image, LoadedImage};
pub use plan::{ExperimentPlan, MaskPlan, Method, PlanError};
pub use profile::emit_profile;
pub use runner::{complete_channels, run_plan, ImageFailure, PlanOutcome, RunReport};
