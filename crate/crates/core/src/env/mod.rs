//! The step/reset loop: gaze kinematics, widget dispatch, the task state
//! machine and rendering, in that order.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::fovea::{foveate, parse_spec, FoveaMap};
use crate::session::TrialRecord;
use crate::tasks::{make_paradigm, ResponseTarget, TaskCtx, TrialPhase, TrialRunner};
use crate::widget::WidgetKit;

pub mod geometry;
pub mod render;

pub use geometry::{
    apply_action, DiscreteAction, GazeAction, GazeLimits, GazeState, LookDirection, Magnitude, MonitorGeometry,
    ScreenPoint,
};
pub use render::Camera;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EpisodeClock {
    pub step_index: u64,
    pub episode_length_steps: u64,
}

impl EpisodeClock {
    pub fn done(&self) -> bool {
        self.step_index >= self.episode_length_steps
    }
}

/// Ground truth for scripted agents. Only present when `privileged` is on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrivilegedInfo {
    pub task: String,
    pub phase: TrialPhase,
    /// Fixation cross center while awaiting fixation.
    pub fixation_target: Option<ScreenPoint>,
    pub correct_response: Option<String>,
    /// Live response widgets; empty outside the response phase.
    pub response_targets: Vec<ResponseTarget>,
    pub levels: Option<Vec<usize>>,
    pub gaze: GazeState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepInfo {
    /// Steps taken so far in this episode.
    pub step_index: u64,
    /// Trials completed so far in this episode.
    pub trial_index: u64,
    pub episode_return: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub privileged: Option<PrivilegedInfo>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: RgbImage,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

pub struct Env {
    config: EnvConfig,
    camera: Camera,
    fovea: Option<FoveaMap>,
    kit: WidgetKit<TaskCtx>,
    ctx: TaskCtx,
    runner: TrialRunner,
    gaze: GazeState,
    clock: EpisodeClock,
    resets: u64,
    episode_return: f64,
    frame: RgbImage,
}

impl Env {
    /// Validate `config` and build the task. Call [`Env::reset`] before stepping.
    pub fn new(config: EnvConfig) -> Result<Self> {
        config.validate()?;
        let paradigm = make_paradigm(&config)?;
        let runner = TrialRunner::new(paradigm, &config)?;
        let g = &config.geometry;
        let kit = WidgetKit::new(g.screen_width, g.screen_height, config.screen.background);
        let (cam_w, cam_h, fovea) = match &config.observation.fovea {
            Some(spec) => {
                let (n_in, n_out) = parse_spec(spec)?;
                let map = FoveaMap::new(n_in, n_out)?;
                (n_in as u32, n_in as u32, Some(map))
            }
            None => (config.observation.width, config.observation.height, None),
        };
        let camera = Camera::new(cam_w, cam_h, g.fov_degrees, config.observation.bilinear);
        Ok(Self {
            clock: EpisodeClock {
                step_index: 0,
                episode_length_steps: config.episode_length_steps as u64,
            },
            frame: RgbImage::new(cam_w, cam_h),
            config,
            camera,
            fovea,
            kit,
            ctx: TaskCtx::default(),
            runner,
            gaze: GazeState::CENTER,
            resets: 0,
            episode_return: 0.0,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn geometry(&self) -> &MonitorGeometry {
        &self.config.geometry
    }

    /// Output observation size (after foveation).
    pub fn observation_size(&self) -> (u32, u32) {
        match &self.fovea {
            Some(m) => (m.n_out() as u32, m.n_out() as u32),
            None => (self.camera.width(), self.camera.height()),
        }
    }

    pub fn gaze(&self) -> GazeState {
        self.gaze
    }

    pub fn clock(&self) -> EpisodeClock {
        self.clock
    }

    pub fn runner(&self) -> &TrialRunner {
        &self.runner
    }

    pub fn kit(&self) -> &WidgetKit<TaskCtx> {
        &self.kit
    }

    /// The screen texture as currently composited.
    pub fn screen(&self) -> &RgbImage {
        self.kit.screen()
    }

    /// Resets performed so far; the current episode id is this minus one.
    pub fn episode_id(&self) -> Option<u64> {
        self.resets.checked_sub(1)
    }

    pub fn is_started(&self) -> bool {
        self.resets > 0
    }

    pub fn reset(&mut self, seed: u64) -> Result<RgbImage> {
        self.gaze = GazeState::CENTER;
        self.clock.step_index = 0;
        self.episode_return = 0.0;
        self.ctx.events.clear();
        let id = self.resets;
        self.resets += 1;
        self.runner.reset(&mut self.kit, seed, id)?;
        self.kit.take_reward();
        Ok(self.observe())
    }

    pub fn step(&mut self, action: GazeAction) -> Result<StepResult> {
        if self.resets == 0 {
            return Err(Error::Misuse("step before reset"));
        }
        if self.clock.done() {
            return Err(Error::Misuse("step after episode end"));
        }
        self.gaze = apply_action(self.gaze, action, &self.config.gaze)?;
        let point = self.config.geometry.gaze_to_screen_point(self.gaze);
        self.kit.dispatch_tick(point, &mut self.ctx)?;
        self.runner.tick(&mut self.kit, &mut self.ctx, self.clock.step_index + 1)?;
        let reward = self.kit.take_reward();
        self.episode_return += reward;
        self.clock.step_index += 1;
        let observation = self.observe();
        Ok(StepResult {
            observation,
            reward,
            done: self.clock.done(),
            info: self.info(),
        })
    }

    pub fn step_discrete(&mut self, action: DiscreteAction) -> Result<StepResult> {
        self.step(action.to_gaze_action(self.config.gaze.max_rate))
    }

    /// Info for the current state, as returned by the last step.
    pub fn info(&self) -> StepInfo {
        StepInfo {
            step_index: self.clock.step_index,
            trial_index: self.runner.trial_index(),
            episode_return: self.episode_return,
            privileged: self.config.privileged.then(|| self.privileged_info()),
        }
    }

    /// Ground truth regardless of the config flag; harness code gates access.
    pub fn privileged_info(&self) -> PrivilegedInfo {
        PrivilegedInfo {
            task: self.runner.task_name().to_string(),
            phase: self.runner.phase(),
            fixation_target: self.runner.fixation_target(&self.kit),
            correct_response: self.runner.correct_response().map(str::to_string),
            response_targets: self.runner.response_targets(&self.kit),
            levels: self.runner.current_levels().map(<[usize]>::to_vec),
            gaze: self.gaze,
        }
    }

    /// Trial records completed since the last drain.
    pub fn drain_records(&mut self) -> Vec<TrialRecord> {
        self.runner.drain_records()
    }

    fn observe(&mut self) -> RgbImage {
        self.camera
            .render_into(self.kit.screen(), self.gaze, &self.config.geometry, &mut self.frame);
        match &self.fovea {
            Some(m) => foveate(&self.frame, m, m).expect("camera sized to the map"),
            None => self.frame.clone(),
        }
    }
}
