//! Multiple object tracking: cue the targets, track, then report whether
//! the queried circle belongs to the target set.

use image::RgbaImage;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, Segment, Stage, TrialPhase, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::{MotPhase, MotSpec, MotState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct MotConfig {
    pub n_targets: Vec<usize>,
    /// Texels per step, per level.
    pub speeds: Vec<f64>,
    pub cue_steps: u64,
    pub track_steps: u64,
    /// Circle field; `nTargets` and `speed` are set per trial.
    pub dynamics: MotSpec,
}

impl Default for MotConfig {
    fn default() -> Self {
        Self {
            n_targets: vec![1, 2, 3, 4, 5],
            speeds: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            cue_steps: 60,
            track_steps: 240,
            dynamics: MotSpec {
                patch: (360.0, 360.0),
                ..MotSpec::default()
            },
        }
    }
}

const FIELD: &str = "mot";

pub struct MotTask {
    cfg: MotConfig,
    env: EnvConfig,
    state: Option<MotState>,
}

impl MotTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.mot.clone();
        check_ladder("mot.nTargets", &cfg.n_targets, true)?;
        check_ladder("mot.speeds", &cfg.speeds, true)?;
        if cfg.n_targets[0] == 0 || *cfg.n_targets.last().unwrap() > cfg.dynamics.n_circles {
            return Err(Error::config("mot.nTargets", "need 1 <= nTargets <= dynamics.nCircles"));
        }
        if cfg.speeds[0] <= 0.0 {
            return Err(Error::config("mot.speeds", "speeds must be positive"));
        }
        if cfg.cue_steps == 0 || cfg.track_steps == 0 {
            return Err(Error::config("mot.cueSteps", "cue and track durations must be >= 1"));
        }
        let half = cfg.dynamics.patch.0 / f64::from(env.geometry.screen_width) / 2.0;
        if 0.5 - half < env.screen.response_size + 0.015 {
            return Err(Error::config("mot.dynamics.patch", "patch overlaps the response widgets"));
        }
        if cfg.dynamics.patch.1 > f64::from(env.geometry.screen_height) {
            return Err(Error::config("mot.dynamics.patch", "patch taller than the screen"));
        }
        Ok(Self {
            cfg,
            env: env.clone(),
            state: None,
        })
    }
}

impl Paradigm for MotTask {
    fn name(&self) -> &'static str {
        "mot"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.n_targets.len(), self.cfg.speeds.len()]
    }

    fn chance(&self) -> f64 {
        0.5
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let n_targets = self.cfg.n_targets[levels[0] - 1];
        let speed = self.cfg.speeds[levels[1] - 1];
        let spec = MotSpec {
            n_targets,
            speed,
            ..self.cfg.dynamics.clone()
        };
        let state = MotState::spawn(spec, rng)?;
        let field = layout::texel_widget(FIELD, state.render(), (0.5, 0.5), &self.env);
        let member = state.query_is_target();
        let d = descriptor([
            ("nTargets", Value::from(n_targets)),
            ("speed", Value::from(speed)),
            ("nCircles", Value::from(state.circles.len())),
            ("queried", Value::from(state.queried)),
            ("queryIsTarget", Value::from(member)),
        ]);
        self.state = Some(state);
        Ok(TrialPlan {
            segments: vec![
                Segment {
                    phase: TrialPhase::Stimulus,
                    widgets: vec![field.clone()],
                    duration: self.cfg.cue_steps,
                },
                Segment {
                    phase: TrialPhase::Stimulus,
                    widgets: vec![field.clone()],
                    duration: self.cfg.track_steps,
                },
            ],
            response_stimuli: vec![field],
            responses: layout::binary_responses("yes", "no", &self.env),
            correct_response: if member { "yes" } else { "no" }.into(),
            descriptor: d,
            levels_override: None,
        })
    }

    fn animate(&mut self, stage: Stage, stage_step: u64, _rng: &mut StreamRng) -> Vec<(String, RgbaImage)> {
        let Some(s) = self.state.as_mut() else {
            return Vec::new();
        };
        let phase = match stage {
            Stage::Segment(0) => MotPhase::Cue,
            Stage::Segment(_) => MotPhase::Track,
            Stage::Response => MotPhase::Query,
        };
        if stage_step == 0 {
            s.phase = phase;
        } else if phase == MotPhase::Query {
            return Vec::new();
        } else {
            s.step();
        }
        vec![(FIELD.to_string(), s.render())]
    }
}
