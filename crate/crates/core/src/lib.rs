//! Pure model of a self-balancing unicycle whose pedals drive a generator
//! and set the target speed, while a hub motor between wheel and saddle
//! keeps the rider upright.
//!
//! The crate is `no_std` (it needs `alloc` for logs and exported models) and
//! has no IO. File formats and the command line live in the `unisim` crate.
//!
//! Layout:
//!
//! * [`physics`] – longitudinal equations of motion.
//! * [`automaton`] – unicycle/motor locations, guards and the composed configuration.
//! * [`controller`] – controller interface and the PID reference controller.
//! * [`intent`] – black-box rider models producing a target speed.
//! * [`simulation`] – the fixed-step digital-time loop.
//! * [`linearize`] – affine surrogates of the nonlinear fields and the bounded affine hybrid model.
#![no_std]

extern crate alloc;

pub mod automaton;
pub mod controller;
pub mod error;
pub mod intent;
pub mod linearize;
pub mod physics;
pub mod simulation;

pub use automaton::{Bounds, HybridConfiguration, MotorLocation, UnicycleLocation};
pub use controller::{Controller, Observation, PidConfig, PidController, PidState, ZeroController};
pub use error::{FitError, Issue, ModelFault};
pub use intent::{IntentProfile, Segment, SegmentKind};
pub use linearize::{AffineCoeffs, AffineModel, BoundedHybridModel, FitSpec};
pub use physics::{BetaModel, Derivatives, ForceBreakdown, Params, State};
pub use simulation::{LogRecord, SimConfig, SimOutcome, Termination};
