//! Visual search: find the magenta T and hold gaze on it.
//!
//! Set size runs in fixed blocks by default. Setting `adaptive = true`
//! hands it to the staircase instead, easiest (smallest) first.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_ladder, descriptor, layout, Paradigm, ResponseSpec, TrialPlan};
use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::raster::glyph;
use crate::rng::StreamRng;
use crate::stimuli::{gen_search_array, SearchLayout, SearchMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub set_sizes: Vec<usize>,
    /// Consecutive trials per set-size block.
    pub block_length: usize,
    pub adaptive: bool,
    pub layout: SearchLayout,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: SearchMode::Conjunction,
            set_sizes: vec![4, 8, 12, 16],
            block_length: 20,
            adaptive: false,
            layout: SearchLayout::default(),
        }
    }
}

pub struct SearchTask {
    cfg: SearchConfig,
    env: EnvConfig,
    block_order: Vec<usize>,
    built: usize,
}

pub fn item_label(i: usize) -> String {
    format!("item{i}")
}

impl SearchTask {
    pub fn new(env: &EnvConfig) -> Result<Self> {
        let cfg = env.search.clone();
        check_ladder("search.setSizes", &cfg.set_sizes, true)?;
        if cfg.set_sizes[0] == 0 {
            return Err(Error::config("search.setSizes", "set size must be >= 1"));
        }
        let cap = cfg.layout.capacity();
        if let Some(&n) = cfg.set_sizes.iter().find(|&&n| n > cap) {
            return Err(Error::config(
                "search.setSizes",
                format!("set size {n} exceeds the {cap}-cell layout"),
            ));
        }
        if cfg.block_length == 0 {
            return Err(Error::config("search.blockLength", "must be >= 1"));
        }
        let l = &cfg.layout;
        let aspect = f64::from(env.geometry.screen_width) / f64::from(env.geometry.screen_height);
        if l.origin.0 < 0.0 || l.origin.1 < 0.0 || l.origin.0 + l.extent.0 > 1.0 || l.origin.1 + l.extent.1 > 1.0 {
            return Err(Error::config("search.layout", "grid region leaves the screen"));
        }
        if l.item_size > l.extent.0 / l.cols as f64 || l.item_size * aspect > l.extent.1 / l.rows as f64 {
            return Err(Error::config("search.layout.itemSize", "items larger than grid cells"));
        }
        let block_order = (0..cfg.set_sizes.len()).collect();
        Ok(Self {
            cfg,
            env: env.clone(),
            block_order,
            built: 0,
        })
    }
}

impl Paradigm for SearchTask {
    fn name(&self) -> &'static str {
        "search"
    }

    fn ladder_sizes(&self) -> Vec<usize> {
        vec![self.cfg.set_sizes.len()]
    }

    fn adaptive(&self) -> bool {
        self.cfg.adaptive
    }

    /// A random responder almost never lands on the lone target.
    fn chance(&self) -> f64 {
        let n = self.cfg.set_sizes.len() as f64;
        self.cfg.set_sizes.iter().map(|&k| 1.0 / k as f64).sum::<f64>() / n
    }

    fn begin_episode(&mut self, rng: &mut StreamRng) {
        self.block_order = (0..self.cfg.set_sizes.len()).collect();
        self.block_order.shuffle(rng);
        self.built = 0;
    }

    fn build_trial(&mut self, levels: &[usize], _step: u64, rng: &mut StreamRng) -> Result<TrialPlan> {
        let (index, levels_override) = if self.cfg.adaptive {
            (levels[0] - 1, None)
        } else {
            let block = (self.built / self.cfg.block_length) % self.block_order.len();
            let i = self.block_order[block];
            (i, Some(vec![i + 1]))
        };
        self.built += 1;
        let set_size = self.cfg.set_sizes[index];
        let array = gen_search_array(self.cfg.mode, set_size, &self.cfg.layout, rng)?;
        let px = (self.cfg.layout.item_size * f64::from(self.env.geometry.screen_width)).round() as u32;
        let responses = array
            .items
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let img = glyph(item.glyph.raster(), px.max(5), item.color.rgb());
                let label = item_label(i);
                ResponseSpec {
                    widget: layout::square_widget(&label, img, item_center(item, &self.env), item.size, &self.env),
                    label,
                }
            })
            .collect();
        let target = array.target();
        Ok(TrialPlan {
            segments: Vec::new(),
            response_stimuli: Vec::new(),
            responses,
            correct_response: item_label(array.target_index),
            descriptor: descriptor([
                ("setSize", Value::from(set_size)),
                ("mode", Value::from(self.cfg.mode.label())),
                ("targetIndex", Value::from(array.target_index)),
                ("targetCell", Value::from(vec![target.cell.0, target.cell.1])),
            ]),
            levels_override,
        })
    }
}

/// Item center with the height corrected for non-square screens.
fn item_center(item: &crate::stimuli::SearchItem, env: &EnvConfig) -> (f64, f64) {
    let aspect = f64::from(env.geometry.screen_width) / f64::from(env.geometry.screen_height);
    (item.pos.0 + item.size / 2.0, item.pos.1 + item.size * aspect / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    #[test]
    fn blocks_cycle_through_every_set_size() {
        let env = EnvConfig::for_task("search");
        let mut t = SearchTask::new(&env).unwrap();
        let mut rng = SeedTree::new(5).stream("t");
        t.begin_episode(&mut rng);
        let mut seen = Vec::new();
        for k in 0..80 {
            let p = t.build_trial(&[1], 0, &mut rng).unwrap();
            let n = p.descriptor["setSize"].as_u64().unwrap() as usize;
            assert_eq!(p.responses.len(), n);
            assert_eq!(p.levels_override.as_ref().unwrap()[0], env.search.set_sizes.iter().position(|&s| s == n).unwrap() + 1);
            let target = p.descriptor["targetIndex"].as_u64().unwrap() as usize;
            assert!(p.judge(&item_label(target)));
            if k % 20 == 0 {
                seen.push(n);
            } else {
                assert_eq!(*seen.last().unwrap(), n);
            }
        }
        seen.sort_unstable();
        assert_eq!(seen, vec![4, 8, 12, 16]);
    }

    #[test]
    fn adaptive_follows_levels() {
        let mut env = EnvConfig::for_task("search");
        env.search.adaptive = true;
        let mut t = SearchTask::new(&env).unwrap();
        let mut rng = SeedTree::new(5).stream("t");
        let p = t.build_trial(&[3], 0, &mut rng).unwrap();
        assert_eq!(p.descriptor["setSize"], 12);
        assert!(p.levels_override.is_none());
    }

    #[test]
    fn oversized_set_rejected() {
        let mut env = EnvConfig::for_task("search");
        env.search.set_sizes = vec![4, 30];
        assert!(SearchTask::new(&env).is_err());
    }
}
