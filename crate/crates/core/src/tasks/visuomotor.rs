//! Arbitrary visuomotor mapping: each image owns one of four response
//! directions, fixed on its first appearance for the rest of the episode.

use std::collections::HashMap;
use std::path::PathBuf;

use image::RgbaImage;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::images::ImageSource;
use super::recognition::check_scale;
use super::{check_ladder, descriptor, layout, Paradigm, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::MotionDirection;

const DIRECTIONS: [MotionDirection; 4] = [
    MotionDirection::Right,
    MotionDirection::Up,
    MotionDirection::Left,
    MotionDirection::Down,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct VisuomotorConfig {
    /// Number of images in play, per level.
    pub pool_sizes: Vec<usize>,
    pub image_scale: f64,
    pub dataset_dir: Option<PathBuf>,
}

impl Default for VisuomotorConfig {
    fn default() -> Self {
        Self {
            pool_sizes: vec![2, 4, 8, 16, 32, 64],
            image_scale: 0.3,
            dataset_dir: None,
        }
    }
}

pub struct VisuomotorTask {
    cfg: VisuomotorConfig,
    env: EnvConfig,
    source: ImageSource,
    mapping: HashMap<usize, MotionDirection>,
    options: Vec<(String, (f64, f64), RgbaImage)>,
}

impl VisuomotorTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.visuomotor.clone();
        check_ladder("visuomotor.poolSizes", &cfg.pool_sizes, true)?;
        if cfg.pool_sizes[0] == 0 {
            return Err(Error::config("visuomotor.poolSizes", "pool size must be >= 1"));
        }
        check_scale("visuomotor.imageScale", cfg.image_scale, env)?;
        let source = ImageSource::open(cfg.dataset_dir.as_ref())?;
        if let Some(n) = source.capacity() {
            if *cfg.pool_sizes.last().unwrap() > n {
                return Err(Error::config(
                    "visuomotor.poolSizes",
                    format!("largest pool exceeds the {n} dataset images"),
                ));
            }
        }
        let options = DIRECTIONS
            .iter()
            .map(|d| (d.label().to_string(), d.unit(), layout::marker(layout::YES_COLOR)))
            .collect();
        Ok(Self {
            cfg,
            env: env.clone(),
            source,
            mapping: HashMap::new(),
            options,
        })
    }

    /// The direction assigned to image `k`, if it has appeared.
    pub fn assigned(&self, k: usize) -> Option<MotionDirection> {
        self.mapping.get(&k).copied()
    }
}

impl Paradigm for VisuomotorTask {
    fn name(&self) -> &'static str {
        "visuomotor"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.pool_sizes.len()]
    }

    fn chance(&self) -> f64 {
        0.25
    }

    fn begin_episode(&mut self, rng: &mut StreamRng) {
        self.source.begin_episode(rng);
        self.mapping.clear();
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let pool = self.cfg.pool_sizes[levels[0] - 1];
        let k = rng.gen_range(0..pool);
        let first = !self.mapping.contains_key(&k);
        let dir = *self
            .mapping
            .entry(k)
            .or_insert_with(|| DIRECTIONS[rng.gen_range(0..DIRECTIONS.len())]);
        let widget = layout::square_widget("image", self.source.image(k), (0.5, 0.5), self.cfg.image_scale, &self.env);
        Ok(TrialPlan {
            segments: Vec::new(),
            response_stimuli: vec![widget],
            responses: layout::ring_responses(&self.options, layout::ring_radius(&self.env), &self.env),
            correct_response: dir.label().into(),
            descriptor: descriptor([
                ("imageId", Value::from(self.source.id(k))),
                ("poolSize", Value::from(pool)),
                ("firstExposure", Value::from(first)),
                ("direction", Value::from(dir.label())),
            ]),
            levels_override: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    #[test]
    fn mapping_is_stable_within_episode() {
        let env = EnvConfig::for_task("visuomotor");
        let mut t = VisuomotorTask::new(&env).unwrap();
        let mut rng = SeedTree::new(8).stream("t");
        t.begin_episode(&mut rng);
        let mut by_id: HashMap<u64, String> = HashMap::new();
        for _ in 0..300 {
            let p = t.build_trial(&[4], 0, &mut rng).unwrap();
            let id = p.descriptor["imageId"].as_u64().unwrap();
            let first = p.descriptor["firstExposure"].as_bool().unwrap();
            assert_eq!(first, !by_id.contains_key(&id));
            let d = by_id.entry(id).or_insert_with(|| p.correct_response.clone());
            assert_eq!(*d, p.correct_response);
        }
        assert_eq!(by_id.len(), 16);
        t.begin_episode(&mut rng);
        assert!(t.assigned(0).is_none());
    }
}
