//! File formats, rendering and the command line for the unicycle simulator.
//!
//! The model itself lives in [`unicycle_core`]; this crate reads scenarios,
//! writes logs, plots and animation frames, exports the bounded affine model
//! for SpaceEx and runs gain sweeps.

pub mod cli;
pub mod csvlog;
pub mod error;
pub mod frames;
pub mod numfmt;
pub mod plot;
pub mod scenario;
pub mod spaceex;
pub mod sweep;

pub use error::Error;
pub use scenario::Scenario;

/// Version written into every JSON file this crate emits.
pub const FORMAT_VERSION: u32 = 1;
