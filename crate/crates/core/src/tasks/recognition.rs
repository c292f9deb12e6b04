//! Continuous recognition: one image per trial, judged old (seen earlier in
//! the episode) or new.

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::images::ImageSource;
use super::{check_ladder, descriptor, layout, Paradigm, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RecognitionConfig {
    /// Target steps since an old item was last shown, per level.
    pub lags: Vec<u64>,
    /// Displayed image side, fraction of the screen width.
    pub image_scale: f64,
    /// Optional directory of images to use instead of procedural ones.
    pub dataset_dir: Option<PathBuf>,
}

impl Default for RecognitionConfig {
    fn default() -> Self {
        Self {
            lags: vec![100, 200, 400, 800, 1600, 3200],
            image_scale: 0.3,
            dataset_dir: None,
        }
    }
}

pub struct RecognitionTask {
    cfg: RecognitionConfig,
    env: EnvConfig,
    source: ImageSource,
    /// (image index, step of last presentation), in order of first showing.
    seen: Vec<(usize, u64)>,
}

impl RecognitionTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.recognition.clone();
        check_ladder("recognition.lags", &cfg.lags, true)?;
        check_scale("recognition.imageScale", cfg.image_scale, env)?;
        let source = ImageSource::open(cfg.dataset_dir.as_ref())?;
        if source.capacity().is_some_and(|n| n < 2) {
            return Err(Error::config("recognition.datasetDir", "need at least 2 images"));
        }
        Ok(Self {
            cfg,
            env: env.clone(),
            source,
            seen: Vec::new(),
        })
    }
}

/// Center image must clear the response widgets on either side.
pub(crate) fn check_scale(key: &str, scale: f64, env: &EnvConfig) -> Result<()> {
    let inner = layout::ring_radius(env) - env.screen.response_size / 2.0;
    if !(scale > 0.0) || scale / 2.0 > inner {
        return Err(Error::config(key, format!("image scale must be in (0, {:.3}]", 2.0 * inner)));
    }
    Ok(())
}

impl Paradigm for RecognitionTask {
    fn name(&self) -> &'static str {
        "recognition"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.lags.len()]
    }

    fn chance(&self) -> f64 {
        0.5
    }

    fn begin_episode(&mut self, rng: &mut StreamRng) {
        self.source.begin_episode(rng);
        self.seen.clear();
    }

    fn build_trial(&mut self, levels: &[usize], step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let target_lag = self.cfg.lags[levels[0] - 1];
        let exhausted = self.source.capacity().is_some_and(|n| self.seen.len() >= n);
        let old = !self.seen.is_empty() && (exhausted || rng.gen::<bool>());
        let (k, lag) = if old {
            let slot = self
                .seen
                .iter()
                .enumerate()
                .min_by_key(|(_, (_, last))| (step - last).abs_diff(target_lag))
                .map(|(i, _)| i)
                .expect("non-empty");
            let (k, last) = self.seen[slot];
            self.seen[slot].1 = step;
            (k, Some(step - last))
        } else {
            let k = self.seen.len();
            self.seen.push((k, step));
            (k, None)
        };
        let widget = layout::square_widget("image", self.source.image(k), (0.5, 0.5), self.cfg.image_scale, &self.env);
        Ok(TrialPlan {
            segments: Vec::new(),
            response_stimuli: vec![widget],
            responses: layout::binary_responses("old", "new", &self.env),
            correct_response: if old { "old" } else { "new" }.into(),
            descriptor: descriptor([
                ("imageId", Value::from(self.source.id(k))),
                ("old", Value::from(old)),
                ("targetLag", Value::from(target_lag)),
                ("lag", lag.map_or(Value::Null, Value::from)),
                ("oldSetSize", Value::from(self.seen.len())),
            ]),
            levels_override: None,
        })
    }
}
