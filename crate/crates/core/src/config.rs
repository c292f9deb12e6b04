//! Environment configuration. Every key has a default; see
//! `docs/config-reference.toml` for the full annotated list.

use serde::{Deserialize, Serialize};

use crate::env::{GazeLimits, MonitorGeometry};
use crate::error::{Error, Result};
use crate::staircase::StaircaseConfig;
use crate::tasks::{
    ChangeConfig, GlassConfig, LandoltConfig, MotConfig, MotionConfig, RecognitionConfig, SearchConfig,
    VisuomotorConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct EnvConfig {
    pub task: String,
    /// Seed used when a caller does not supply one.
    pub seed: u64,
    pub episode_length_steps: i64,
    /// Expose ground truth and layout through `StepInfo::privileged`.
    pub privileged: bool,
    pub geometry: MonitorGeometry,
    pub gaze: GazeLimits,
    pub observation: ObservationConfig,
    pub screen: ScreenConfig,
    pub reward: RewardConfig,
    pub timing: TimingConfig,
    pub staircase: StaircaseConfig,
    pub landolt: LandoltConfig,
    pub glass: GlassConfig,
    pub motion: MotionConfig,
    pub search: SearchConfig,
    pub change: ChangeConfig,
    pub mot: MotConfig,
    pub recognition: RecognitionConfig,
    pub visuomotor: VisuomotorConfig,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            task: "landolt".into(),
            seed: 0,
            episode_length_steps: 10_800,
            privileged: false,
            geometry: MonitorGeometry::default(),
            gaze: GazeLimits::default(),
            observation: ObservationConfig::default(),
            screen: ScreenConfig::default(),
            reward: RewardConfig::default(),
            timing: TimingConfig::default(),
            staircase: StaircaseConfig::default(),
            landolt: LandoltConfig::default(),
            glass: GlassConfig::default(),
            motion: MotionConfig::default(),
            search: SearchConfig::default(),
            change: ChangeConfig::default(),
            mot: MotConfig::default(),
            recognition: RecognitionConfig::default(),
            visuomotor: VisuomotorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ObservationConfig {
    pub width: u32,
    pub height: u32,
    pub bilinear: bool,
    /// `"nIn:nOut"`: render at nIn and subsample to nOut on both axes.
    pub fovea: Option<String>,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            width: 84,
            height: 84,
            bilinear: false,
            fovea: None,
        }
    }
}

/// The screen texture's own background, distinct from the room around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ScreenConfig {
    pub background: [u8; 3],
    /// Fixation cross side, fraction of the screen width.
    pub fixation_size: f64,
    /// Side of square response widgets, fraction of the screen width.
    pub response_size: f64,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        Self {
            background: [127, 127, 127],
            fixation_size: 0.08,
            response_size: 0.12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RewardConfig {
    pub correct: f64,
    pub incorrect: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            correct: 1.0,
            incorrect: 0.0,
        }
    }
}

/// Trial phase durations, in steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct TimingConfig {
    pub fixation_hold: u64,
    pub response_hold: u64,
    pub intertrial: u64,
    pub response_timeout: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            fixation_hold: 30,
            response_hold: 20,
            intertrial: 30,
            response_timeout: 600,
        }
    }
}

pub const TASK_NAMES: [&str; 8] = [
    "landolt",
    "glass",
    "motion",
    "search",
    "change",
    "mot",
    "recognition",
    "visuomotor",
];

impl EnvConfig {
    /// A default configuration for the named task.
    pub fn for_task(task: &str) -> Self {
        Self {
            task: task.into(),
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let key = offending_key(&msg).unwrap_or_else(|| "<root>".into());
            Error::config(key, msg)
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Check every constraint that types alone cannot express.
    pub fn validate(&self) -> Result<()> {
        if !TASK_NAMES.contains(&self.task.as_str()) {
            return Err(Error::config(
                "task",
                format!("unknown task `{}`; expected one of {}", self.task, TASK_NAMES.join(", ")),
            ));
        }
        if self.episode_length_steps <= 0 {
            return Err(Error::config(
                "episodeLengthSteps",
                format!("must be positive, got {}", self.episode_length_steps),
            ));
        }
        self.geometry.validate()?;
        let g = &self.gaze;
        for (key, v) in [("gaze.yawMax", g.yaw_max), ("gaze.pitchMax", g.pitch_max)] {
            if !(v.is_finite() && v > 0.0 && v < 90.0) {
                return Err(Error::config(key, format!("must be in (0, 90), got {v}")));
            }
        }
        if !(g.max_rate.is_finite() && g.max_rate > 0.0) {
            return Err(Error::config("gaze.maxRate", "must be positive"));
        }
        let o = &self.observation;
        if o.width == 0 || o.height == 0 {
            return Err(Error::config("observation.width", "observation must be non-empty"));
        }
        if let Some(spec) = &o.fovea {
            let (n_in, _) = crate::fovea::parse_spec(spec)
                .map_err(|_| Error::config("observation.fovea", format!("expected nIn:nOut, got `{spec}`")))?;
            if n_in == 0 {
                return Err(Error::config("observation.fovea", "nIn must be positive"));
            }
        }
        let s = &self.screen;
        for (key, v) in [("screen.fixationSize", s.fixation_size), ("screen.responseSize", s.response_size)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(Error::config(key, format!("must be in (0, 0.5), got {v}")));
            }
        }
        for (key, v) in [("reward.correct", self.reward.correct), ("reward.incorrect", self.reward.incorrect)] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        let t = &self.timing;
        if t.fixation_hold == 0 || t.response_hold == 0 {
            return Err(Error::config("timing", "holds must be at least one step"));
        }
        if t.response_timeout <= t.response_hold {
            return Err(Error::config("timing.responseTimeout", "must exceed responseHold"));
        }
        if self.staircase.w_min == 0 {
            return Err(Error::config("staircase.wMin", "must be >= 1"));
        }
        if self.staircase.initial_level == 0 {
            return Err(Error::config("staircase.initialLevel", "levels are 1-based"));
        }
        Ok(())
    }
}

/// Pull a key name out of a serde error message, if it names one.
fn offending_key(msg: &str) -> Option<String> {
    let start = msg.find('`')?;
    let rest = &msg[start + 1..];
    let end = rest.find('`')?;
    Some(rest[..end].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(EnvConfig::from_toml_str("").unwrap(), EnvConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let c = EnvConfig::default();
        assert_eq!(EnvConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn episode_length_honored_and_checked() {
        let c = EnvConfig::from_toml_str("episodeLengthSteps = 10800").unwrap();
        assert_eq!(c.episode_length_steps, 10_800);
        let bad = EnvConfig::from_toml_str("episodeLengthSteps = -5").unwrap();
        match bad.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "episodeLengthSteps"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        match EnvConfig::from_toml_str("episodeLenght = 3") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "episodeLenght"),
            other => panic!("{other:?}"),
        }
        match EnvConfig::from_toml_str("[geometry]\nfov = 3") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "fov"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch_is_a_config_error() {
        assert!(matches!(
            EnvConfig::from_toml_str("privileged = 3"),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn unknown_task_rejected() {
        let c = EnvConfig::for_task("pong");
        assert!(matches!(c.validate(), Err(Error::Config { key, .. }) if key == "task"));
        for t in TASK_NAMES {
            EnvConfig::for_task(t).validate().unwrap();
        }
    }

    #[test]
    fn bad_geometry_rejected() {
        let mut c = EnvConfig::default();
        c.geometry.distance = 0.0;
        assert!(c.validate().is_err());
        let mut c = EnvConfig::default();
        c.geometry.screen_width = 1024;
        assert!(c.validate().is_err());
    }
}
