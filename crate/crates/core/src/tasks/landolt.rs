//! Landolt C acuity and contrast task: report the gap orientation.

use image::RgbaImage;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::{gen_landolt, Compass, ContrastPolarity, LandoltSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct LandoltConfig {
    /// Outer diameter per level, fraction of the screen width, easiest first.
    pub scales: Vec<f64>,
    /// Weber contrast per level, easiest first.
    pub contrasts: Vec<f64>,
    /// 4 (cardinal) or 8 (cardinal and diagonal) gap directions.
    pub orientations: usize,
    pub polarity: ContrastPolarity,
}

impl Default for LandoltConfig {
    fn default() -> Self {
        Self {
            scales: vec![0.2, 0.15, 0.1, 0.07, 0.05, 0.035, 0.025, 0.018, 0.012, 0.008],
            contrasts: vec![1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05, 0.03],
            orientations: 4,
            polarity: ContrastPolarity::Dark,
        }
    }
}

pub struct LandoltTask {
    cfg: LandoltConfig,
    env: EnvConfig,
    directions: Vec<Compass>,
    /// Response widgets: a high-contrast C per direction.
    options: Vec<(String, (f64, f64), RgbaImage)>,
}

impl LandoltTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.landolt.clone();
        check_ladder("landolt.scales", &cfg.scales, false)?;
        check_ladder("landolt.contrasts", &cfg.contrasts, false)?;
        let directions = match cfg.orientations {
            4 => Compass::CARDINAL.to_vec(),
            8 => Compass::ALL.to_vec(),
            n if n < 2 => {
                return Err(Error::config("landolt.orientations", format!("need at least 2, got {n}")))
            }
            n => return Err(Error::config("landolt.orientations", format!("supported: 4 or 8, got {n}"))),
        };
        let smallest = cfg.scales.last().copied().unwrap_or(0.0) * f64::from(env.geometry.screen_width);
        if smallest < 3.0 {
            return Err(Error::config(
                "landolt.scales",
                format!("smallest diameter {smallest:.2} texels is below 3"),
            ));
        }
        if cfg.scales[0] > 2.0 * (layout::ring_radius(env) - env.screen.response_size / 2.0) {
            return Err(Error::config("landolt.scales", "largest optotype overlaps the response ring"));
        }
        if cfg.contrasts.iter().any(|c| !(*c > 0.0 && *c <= 1.0)) {
            return Err(Error::config("landolt.contrasts", "contrast must be in (0, 1]"));
        }
        let bg = luminance(env.screen.background);
        let options = directions
            .iter()
            .map(|d| {
                let cue = LandoltSpec {
                    scale: 0.1,
                    contrast: 1.0,
                    gap: *d,
                    polarity: ContrastPolarity::Dark,
                };
                let img = gen_landolt(&cue, env.geometry.screen_width, bg)?;
                Ok((d.label().to_string(), d.unit(), img))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            cfg,
            env: env.clone(),
            directions,
            options,
        })
    }
}

fn luminance(c: [u8; 3]) -> u8 {
    ((u16::from(c[0]) + u16::from(c[1]) + u16::from(c[2])) / 3) as u8
}

impl Paradigm for LandoltTask {
    fn name(&self) -> &'static str {
        "landolt"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.scales.len(), self.cfg.contrasts.len()]
    }

    fn chance(&self) -> f64 {
        1.0 / self.directions.len() as f64
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let scale = self.cfg.scales[levels[0] - 1];
        let contrast = self.cfg.contrasts[levels[1] - 1];
        let gap = self.directions[rng.gen_range(0..self.directions.len())];
        let spec = LandoltSpec {
            scale,
            contrast,
            gap,
            polarity: self.cfg.polarity,
        };
        let img = gen_landolt(&spec, self.env.geometry.screen_width, luminance(self.env.screen.background))?;
        let stimulus = layout::texel_widget("landolt", img, (0.5, 0.5), &self.env);
        let responses = layout::ring_responses(&self.options, layout::ring_radius(&self.env), &self.env);
        Ok(TrialPlan {
            segments: Vec::new(),
            response_stimuli: vec![stimulus],
            responses,
            correct_response: gap.label().into(),
            descriptor: descriptor([
                ("scale", Value::from(scale)),
                ("contrast", Value::from(contrast)),
                ("gap", Value::from(gap.label())),
                ("orientations", Value::from(self.directions.len())),
            ]),
            levels_override: None,
        })
    }
}
