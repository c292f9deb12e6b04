//! Random-dot motion direction discrimination.

use image::RgbaImage;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, Segment, Stage, TrialPhase, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::{MotionDirection, MotionField, MotionFieldSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct MotionConfig {
    /// Coherent fraction per level, easiest first.
    pub coherences: Vec<f64>,
    /// Response alternatives; each gets a widget on the ring.
    pub directions: Vec<MotionDirection>,
    /// Fixed viewing period before the response widgets appear. 0 keeps
    /// the dots up until the response is made.
    pub viewing_steps: u64,
    /// Field parameters; `coherence` and `direction` are set per trial.
    pub field: MotionFieldSpec,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            coherences: vec![1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.15, 0.1, 0.05],
            directions: vec![MotionDirection::Left, MotionDirection::Right],
            viewing_steps: 0,
            field: MotionFieldSpec::default(),
        }
    }
}

const DOTS: &str = "dots";

pub struct MotionTask {
    cfg: MotionConfig,
    env: EnvConfig,
    options: Vec<(String, (f64, f64), RgbaImage)>,
    field: Option<MotionField>,
}

impl MotionTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.motion.clone();
        check_ladder("motion.coherences", &cfg.coherences, false)?;
        if cfg.coherences.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::config("motion.coherences", "coherence must be in [0, 1]"));
        }
        if cfg.directions.len() < 2 {
            return Err(Error::config("motion.directions", "need at least 2 directions"));
        }
        for (i, d) in cfg.directions.iter().enumerate() {
            if cfg.directions[..i].contains(d) {
                return Err(Error::config("motion.directions", format!("duplicate direction {}", d.label())));
            }
        }
        let inner = layout::ring_radius(env) - env.screen.response_size / 2.0;
        if cfg.field.aperture_radius / f64::from(env.geometry.screen_width) > inner {
            return Err(Error::config("motion.field.apertureRadius", "aperture overlaps the response ring"));
        }
        let options = cfg
            .directions
            .iter()
            .map(|d| (d.label().to_string(), d.unit(), layout::marker(layout::YES_COLOR)))
            .collect();
        Ok(Self {
            cfg,
            env: env.clone(),
            options,
            field: None,
        })
    }

    fn dots_stage(&self) -> Stage {
        if self.cfg.viewing_steps > 0 {
            Stage::Segment(0)
        } else {
            Stage::Response
        }
    }
}

impl Paradigm for MotionTask {
    fn name(&self) -> &'static str {
        "motion"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.coherences.len()]
    }

    fn chance(&self) -> f64 {
        1.0 / self.cfg.directions.len() as f64
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let coherence = self.cfg.coherences[levels[0] - 1];
        let direction = self.cfg.directions[rng.gen_range(0..self.cfg.directions.len())];
        let spec = MotionFieldSpec {
            coherence,
            direction,
            ..self.cfg.field.clone()
        };
        let field = MotionField::new(spec, rng)?;
        let dots = layout::texel_widget(DOTS, field.render(), (0.5, 0.5), &self.env);
        let coherent = field.coherent_count();
        self.field = Some(field);
        let (segments, response_stimuli) = if self.cfg.viewing_steps > 0 {
            let seg = Segment {
                phase: TrialPhase::Stimulus,
                widgets: vec![dots],
                duration: self.cfg.viewing_steps,
            };
            (vec![seg], Vec::new())
        } else {
            (Vec::new(), vec![dots])
        };
        Ok(TrialPlan {
            segments,
            response_stimuli,
            responses: layout::ring_responses(&self.options, layout::ring_radius(&self.env), &self.env),
            correct_response: direction.label().into(),
            descriptor: descriptor([
                ("coherence", Value::from(coherence)),
                ("direction", Value::from(direction.label())),
                ("nDots", Value::from(self.cfg.field.n_dots)),
                ("coherentDots", Value::from(coherent)),
                ("nDirections", Value::from(self.cfg.directions.len())),
            ]),
            levels_override: None,
        })
    }

    fn animate(&mut self, stage: Stage, stage_step: u64, rng: &mut StreamRng) -> Vec<(String, RgbaImage)> {
        if stage != self.dots_stage() {
            return Vec::new();
        }
        let Some(field) = self.field.as_mut() else {
            return Vec::new();
        };
        if stage_step > 0 {
            field.step(rng);
        }
        vec![(DOTS.to_string(), field.render())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    #[test]
    fn direction_is_the_answer() {
        let env = EnvConfig::for_task("motion");
        let mut t = MotionTask::new(&env).unwrap();
        let mut rng = SeedTree::new(3).stream("t");
        for _ in 0..20 {
            let p = t.build_trial(&[1], 0, &mut rng).unwrap();
            let d = p.descriptor["direction"].as_str().unwrap().to_string();
            assert!(p.judge(&d));
            assert_eq!(p.responses.len(), 2);
            assert_eq!(p.descriptor["coherentDots"], 100);
        }
        assert_eq!(t.chance(), 0.5);
    }

    #[test]
    fn animation_only_in_dot_stage() {
        let env = EnvConfig::for_task("motion");
        let mut t = MotionTask::new(&env).unwrap();
        let mut rng = SeedTree::new(3).stream("t");
        t.build_trial(&[5], 0, &mut rng).unwrap();
        assert_eq!(t.animate(Stage::Response, 1, &mut rng).len(), 1);
        assert!(t.animate(Stage::Segment(0), 1, &mut rng).is_empty());
    }

    #[test]
    fn duplicate_directions_rejected() {
        let mut env = EnvConfig::for_task("motion");
        env.motion.directions = vec![MotionDirection::Up, MotionDirection::Up];
        assert!(MotionTask::new(&env).is_err());
    }
}
