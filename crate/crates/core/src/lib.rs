//! A deterministic psychophysics laboratory for gaze-controlled agents.
//!
//! An [`env::Env`] renders a virtual monitor seen through a movable camera.
//! Agents steer their gaze with small yaw/pitch deltas; tasks are built from
//! widgets that react to the gaze point, so a trial starts by fixating a cross
//! and ends by dwelling on one of the response targets.
//!
//! ```no_run
//! use psychlab::config::EnvConfig;
//! use psychlab::env::{Env, GazeAction};
//!
//! let mut env = Env::new(EnvConfig::for_task("glass")).unwrap();
//! let _obs = env.reset(7).unwrap();
//! let step = env.step(GazeAction::new(0.5, 0.0)).unwrap();
//! println!("reward {}", step.reward);
//! ```

pub mod analysis;
pub mod config;
pub mod env;
pub mod error;
pub mod fovea;
pub mod harness;
pub mod protocol;
pub mod raster;
pub mod rng;
pub mod session;
pub mod staircase;
pub mod stimuli;
pub mod tasks;
pub mod widget;

pub use error::{Error, Result};
