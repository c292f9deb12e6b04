//! Change detection: sample array, blank retention, then the test array
//! with same/different response widgets.

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, Segment, TrialPhase, TrialPlan, WidgetSpec};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stimuli::{gen_change_arrays, ChangeObject};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ChangeConfig {
    pub set_sizes: Vec<usize>,
    /// Retention delay per level, steps.
    pub delays: Vec<u64>,
    pub sample_steps: u64,
    /// Grid (columns, rows).
    pub grid: (usize, usize),
    /// Lower-left corner and size of the grid region, screen fractions.
    pub origin: (f64, f64),
    pub extent: (f64, f64),
    /// Object side, fraction of the screen width.
    pub item_size: f64,
}

impl Default for ChangeConfig {
    fn default() -> Self {
        Self {
            set_sizes: vec![2, 3, 4, 6, 8, 10, 12],
            delays: vec![30, 60, 120],
            sample_steps: 60,
            grid: (4, 3),
            origin: (0.15, 0.2),
            extent: (0.7, 0.6),
            item_size: 0.1,
        }
    }
}

pub struct ChangeTask {
    cfg: ChangeConfig,
    env: EnvConfig,
}

impl ChangeTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.change.clone();
        check_ladder("change.setSizes", &cfg.set_sizes, true)?;
        check_ladder("change.delays", &cfg.delays, true)?;
        if cfg.set_sizes[0] == 0 {
            return Err(Error::config("change.setSizes", "set size must be >= 1"));
        }
        let cap = cfg.grid.0 * cfg.grid.1;
        if let Some(&n) = cfg.set_sizes.iter().find(|&&n| n > cap) {
            return Err(Error::config("change.setSizes", format!("set size {n} exceeds the {cap}-cell grid")));
        }
        if cfg.sample_steps == 0 {
            return Err(Error::config("change.sampleSteps", "must be >= 1"));
        }
        if cfg.delays[0] == 0 {
            return Err(Error::config("change.delays", "delay must be >= 1"));
        }
        let edge = env.screen.response_size + 0.015;
        if cfg.origin.0 < edge || cfg.origin.0 + cfg.extent.0 > 1.0 - edge {
            return Err(Error::config("change.origin", "grid overlaps the response widgets"));
        }
        if cfg.item_size > cfg.extent.0 / cfg.grid.0 as f64 || cfg.item_size > cfg.extent.1 / cfg.grid.1 as f64 {
            return Err(Error::config("change.itemSize", "objects larger than grid cells"));
        }
        Ok(Self { cfg, env: env.clone() })
    }

    fn widgets(&self, prefix: &str, objects: &[ChangeObject]) -> Vec<WidgetSpec> {
        let px = (self.cfg.item_size * f64::from(self.env.geometry.screen_width)).round() as u32;
        let (cols, rows) = self.cfg.grid;
        let cw = self.cfg.extent.0 / cols as f64;
        let ch = self.cfg.extent.1 / rows as f64;
        objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let (c, r) = o.cell;
                let center = (
                    self.cfg.origin.0 + (c as f64 + 0.5) * cw,
                    self.cfg.origin.1 + ((rows - 1 - r) as f64 + 0.5) * ch,
                );
                layout::square_widget(&format!("{prefix}{i}"), o.render(px.max(5)), center, self.cfg.item_size, &self.env)
            })
            .collect()
    }
}

impl Paradigm for ChangeTask {
    fn name(&self) -> &'static str {
        "change"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.set_sizes.len(), self.cfg.delays.len()]
    }

    fn chance(&self) -> f64 {
        0.5
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let set_size = self.cfg.set_sizes[levels[0] - 1];
        let delay = self.cfg.delays[levels[1] - 1];
        let changed = rng.gen::<bool>();
        let arrays = gen_change_arrays(set_size, changed, self.cfg.grid, rng)?;
        let segments = vec![
            Segment {
                phase: TrialPhase::Stimulus,
                widgets: self.widgets("sample", &arrays.sample),
                duration: self.cfg.sample_steps,
            },
            Segment {
                phase: TrialPhase::Retention,
                widgets: Vec::new(),
                duration: delay,
            },
        ];
        let answer = if changed { "different" } else { "same" };
        Ok(TrialPlan {
            segments,
            response_stimuli: self.widgets("test", &arrays.test),
            responses: layout::binary_responses("same", "different", &self.env),
            correct_response: answer.into(),
            descriptor: descriptor([
                ("setSize", Value::from(set_size)),
                ("retentionDelay", Value::from(delay)),
                ("changed", Value::from(changed)),
                ("changedIndex", serde_json::to_value(arrays.changed_index).expect("option")),
                ("changedFeature", serde_json::to_value(arrays.changed_feature).expect("option")),
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
    fn phases_and_truth() {
        let env = EnvConfig::for_task("change");
        let mut t = ChangeTask::new(&env).unwrap();
        let mut rng = SeedTree::new(7).stream("t");
        for _ in 0..50 {
            let p = t.build_trial(&[4, 2], 0, &mut rng).unwrap();
            assert_eq!(p.segments.len(), 2);
            assert_eq!(p.segments[1].duration, 60);
            assert!(p.segments[1].widgets.is_empty());
            assert_eq!(p.segments[0].widgets.len(), 6);
            assert_eq!(p.response_stimuli.len(), 6);
            let changed = p.descriptor["changed"].as_bool().unwrap();
            assert!(p.judge(if changed { "different" } else { "same" }));
            assert!(!p.judge(if changed { "same" } else { "different" }));
            let same_pos = p.segments[0].widgets.iter().zip(&p.response_stimuli).all(|(a, b)| a.pos == b.pos);
            assert!(same_pos);
        }
    }

    #[test]
    fn grid_capacity_checked() {
        let mut env = EnvConfig::for_task("change");
        env.change.set_sizes = vec![2, 13];
        assert!(ChangeTask::new(&env).is_err());
    }
}
