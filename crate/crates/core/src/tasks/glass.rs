//! Concentric Glass pattern detection, two-alternative forced choice: which
//! of the two patches holds the pattern.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, ResponseSpec, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::{gen_glass_pair, GlassSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GlassConfig {
    /// Coherence per level, easiest first.
    pub coherences: Vec<f64>,
    /// Patch parameters; `coherence` is overridden per trial.
    pub pattern: GlassSpec,
    /// Horizontal patch centers, screen fractions.
    pub patch_centers: (f64, f64),
}

impl Default for GlassConfig {
    fn default() -> Self {
        Self {
            coherences: vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1],
            pattern: GlassSpec::default(),
            patch_centers: (0.25, 0.75),
        }
    }
}

pub struct GlassTask {
    cfg: GlassConfig,
    env: EnvConfig,
}

impl GlassTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.glass.clone();
        check_ladder("glass.coherences", &cfg.coherences, false)?;
        if cfg.coherences.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::config("glass.coherences", "coherence must be in [0, 1]"));
        }
        let w = f64::from(env.geometry.screen_width);
        let r = cfg.pattern.patch_radius / w;
        let (a, b) = cfg.patch_centers;
        if a - r < 0.0 || b + r > 1.0 || a + r > b - r {
            return Err(Error::config(
                "glass.pattern.patchRadius",
                format!("two patches of radius {} texels do not fit side by side", cfg.pattern.patch_radius),
            ));
        }
        Ok(Self { cfg, env: env.clone() })
    }
}

impl Paradigm for GlassTask {
    fn name(&self) -> &'static str {
        "glass"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.coherences.len()]
    }

    fn chance(&self) -> f64 {
        0.5
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let coherence = self.cfg.coherences[levels[0] - 1];
        let spec = GlassSpec {
            coherence,
            ..self.cfg.pattern.clone()
        };
        let (target, distractor) = gen_glass_pair(&spec, rng)?;
        let target_left = rng.gen::<bool>();
        let (left_img, right_img) = if target_left {
            (target.image.clone(), distractor.image)
        } else {
            (distractor.image, target.image.clone())
        };
        let (xl, xr) = self.cfg.patch_centers;
        let responses = vec![
            ResponseSpec {
                label: "left".into(),
                widget: layout::texel_widget("patch-left", left_img, (xl, 0.5), &self.env),
            },
            ResponseSpec {
                label: "right".into(),
                widget: layout::texel_widget("patch-right", right_img, (xr, 0.5), &self.env),
            },
        ];
        let side = if target_left { "left" } else { "right" };
        Ok(TrialPlan {
            segments: Vec::new(),
            response_stimuli: Vec::new(),
            responses,
            correct_response: side.into(),
            descriptor: descriptor([
                ("coherence", Value::from(coherence)),
                ("targetSide", Value::from(side)),
                ("polarity", serde_json::to_value(spec.polarity).expect("enum")),
                ("nDipoles", Value::from(spec.n_dipoles)),
                ("coherentDipoles", Value::from(target.coherent_count())),
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
    fn target_side_is_the_answer() {
        let env = EnvConfig::for_task("glass");
        let mut t = GlassTask::new(&env).unwrap();
        let mut rng = SeedTree::new(1).stream("t");
        let mut lefts = 0;
        for _ in 0..200 {
            let p = t.build_trial(&[1], 0, &mut rng).unwrap();
            let side = p.descriptor["targetSide"].as_str().unwrap();
            assert!(p.judge(side));
            assert!(!p.judge(if side == "left" { "right" } else { "left" }));
            lefts += usize::from(side == "left");
        }
        assert!((70..130).contains(&lefts));
    }

    #[test]
    fn oversized_patches_rejected() {
        let mut env = EnvConfig::for_task("glass");
        env.glass.pattern.patch_radius = 150.0;
        assert!(GlassTask::new(&env).is_err());
    }
}
