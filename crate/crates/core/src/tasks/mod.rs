//! The eight task paradigms and the trial runner that sequences them.
//!
//! A [`Paradigm`] only describes trials: it maps staircase levels to a
//! [`TrialPlan`] (widgets per presentation segment, response widgets, ground
//! truth). The [`runner::TrialRunner`] owns the shared protocol: fixation,
//! presentation, response hold, timeout, reward, logging and the staircase.

use image::RgbaImage;
use serde_json::{Map, Value};

use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

pub mod change;
pub mod glass;
pub mod images;
pub mod landolt;
pub mod layout;
pub mod mot;
pub mod motion;
pub mod recognition;
pub mod runner;
pub mod search;
pub mod visuomotor;

pub use change::{ChangeConfig, ChangeTask};
pub use glass::{GlassConfig, GlassTask};
pub use landolt::{LandoltConfig, LandoltTask};
pub use mot::{MotConfig, MotTask};
pub use motion::{MotionConfig, MotionTask};
pub use recognition::{RecognitionConfig, RecognitionTask};
pub use runner::{ResponseTarget, TaskCtx, TrialPhase, TrialRunner};
pub use search::{SearchConfig, SearchTask};
pub use visuomotor::{VisuomotorConfig, VisuomotorTask};

/// A widget to be placed, in screen fractions (lower-left origin).
#[derive(Debug, Clone, PartialEq)]
pub struct WidgetSpec {
    pub name: String,
    pub image: RgbaImage,
    pub pos: (f64, f64),
    pub size: (f64, f64),
}

/// A gaze-selectable response option.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSpec {
    pub label: String,
    pub widget: WidgetSpec,
}

/// A timed presentation interval before the response stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// `"stimulus"` or `"retention"`, reported as the phase name.
    pub phase: TrialPhase,
    pub widgets: Vec<WidgetSpec>,
    pub duration: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub segments: Vec<Segment>,
    /// Non-selectable widgets shown alongside the responses.
    pub response_stimuli: Vec<WidgetSpec>,
    pub responses: Vec<ResponseSpec>,
    pub correct_response: String,
    /// Task-specific parameters and ground truth, logged verbatim.
    pub descriptor: Map<String, Value>,
    /// Levels actually used, when the paradigm does not follow the staircase
    /// (blocked set sizes in visual search).
    pub levels_override: Option<Vec<usize>>,
}

impl TrialPlan {
    pub fn judge(&self, response: &str) -> bool {
        response == self.correct_response
    }
}

/// Where the runner is within a trial, for animation callbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Segment(usize),
    Response,
}

pub trait Paradigm: Send {
    fn name(&self) -> &'static str;

    /// Number of levels per staircase dimension.
    fn ladder_sizes(&self) -> Vec<usize>;

    /// Whether this task adapts difficulty by default.
    fn adaptive(&self) -> bool {
        true
    }

    /// Accuracy of a uniformly random responder.
    fn chance(&self) -> f64;

    /// Called on every reset, before the first trial.
    fn begin_episode(&mut self, _rng: &mut StreamRng) {}

    /// `levels` are 1-based, one per ladder dimension.
    fn build_trial(&mut self, levels: &[usize], step: u64, rng: &mut StreamRng) -> Result<TrialPlan>;

    /// Image updates for live widgets, called on stage entry (`stage_step` 0)
    /// and on every later tick of that stage.
    fn animate(&mut self, _stage: Stage, _stage_step: u64, _rng: &mut StreamRng) -> Vec<(String, RgbaImage)> {
        Vec::new()
    }

    fn on_outcome(&mut self, _plan: &TrialPlan, _response: Option<&str>, _correct: bool) {}
}

/// Build the paradigm named by `config.task`.
pub fn make_paradigm(config: &EnvConfig) -> Result<Box<dyn Paradigm>> {
    Ok(match config.task.as_str() {
        "landolt" => Box::new(LandoltTask::new(config)?),
        "glass" => Box::new(GlassTask::new(config)?),
        "motion" => Box::new(MotionTask::new(config)?),
        "search" => Box::new(SearchTask::new(config)?),
        "change" => Box::new(ChangeTask::new(config)?),
        "mot" => Box::new(MotTask::new(config)?),
        "recognition" => Box::new(RecognitionTask::new(config)?),
        "visuomotor" => Box::new(VisuomotorTask::new(config)?),
        other => return Err(Error::config("task", format!("unknown task `{other}`"))),
    })
}

pub(crate) fn check_ladder<T: PartialOrd + Copy + std::fmt::Debug>(
    key: &str,
    values: &[T],
    increasing: bool,
) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(key, "ladder must have at least one level"));
    }
    for w in values.windows(2) {
        let ok = if increasing { w[0] < w[1] } else { w[0] > w[1] };
        if !ok {
            let dir = if increasing { "increasing" } else { "decreasing" };
            return Err(Error::config(key, format!("ladder must be strictly {dir}: {values:?}")));
        }
    }
    Ok(())
}

pub(crate) fn descriptor(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
