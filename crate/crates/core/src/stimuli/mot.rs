use image::RgbaImage;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{fill_disc, filled, rgba};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MotPhase {
    Cue,
    Track,
    Query,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct MotSpec {
    pub n_circles: usize,
    pub n_targets: usize,
    /// Texels per step.
    pub speed: f64,
    pub radius: f64,
    /// Patch width and height, texels.
    pub patch: (f64, f64),
    /// Minimum center-to-center distance at spawn.
    pub min_separation: f64,
    pub background: [u8; 3],
    pub circle_color: [u8; 3],
    pub highlight_color: [u8; 3],
}

impl Default for MotSpec {
    fn default() -> Self {
        Self {
            n_circles: 10,
            n_targets: 3,
            speed: 2.0,
            radius: 12.0,
            patch: (400.0, 400.0),
            min_separation: 30.0,
            background: [0, 0, 0],
            circle_color: [255, 255, 255],
            highlight_color: [0, 255, 0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    /// Center in patch coordinates, origin top-left.
    pub pos: (f64, f64),
    pub vel: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotState {
    pub spec: MotSpec,
    pub circles: Vec<Circle>,
    /// Sorted target indices.
    pub targets: Vec<usize>,
    pub queried: usize,
    pub phase: MotPhase,
}

impl MotState {
    pub fn spawn<R: Rng + ?Sized>(spec: MotSpec, rng: &mut R) -> Result<Self> {
        if spec.n_targets == 0 || spec.n_targets > spec.n_circles {
            return Err(Error::Stimulus(format!(
                "need 1 <= nTargets <= nCircles, got {} of {}",
                spec.n_targets, spec.n_circles
            )));
        }
        let (w, h) = spec.patch;
        let r = spec.radius;
        if !(w > 2.0 * r && h > 2.0 * r) || !(spec.speed > 0.0) || spec.speed >= w.min(h) - 2.0 * r {
            return Err(Error::Stimulus("MOT patch too small for circle radius and speed".into()));
        }
        let mut circles: Vec<Circle> = Vec::with_capacity(spec.n_circles);
        let mut attempts = 0;
        while circles.len() < spec.n_circles {
            attempts += 1;
            if attempts > 10_000 + 1_000 * spec.n_circles {
                return Err(Error::Stimulus("cannot place circles at the minimum separation".into()));
            }
            let p = (rng.gen_range(r..w - r), rng.gen_range(r..h - r));
            let ok = circles.iter().all(|c| {
                (c.pos.0 - p.0).hypot(c.pos.1 - p.1) >= spec.min_separation
            });
            if ok {
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                circles.push(Circle {
                    pos: p,
                    vel: (spec.speed * a.cos(), spec.speed * a.sin()),
                });
            }
        }
        let mut targets = sample(rng, spec.n_circles, spec.n_targets).into_vec();
        targets.sort_unstable();
        let queried = if rng.gen::<bool>() {
            targets[rng.gen_range(0..targets.len())]
        } else if spec.n_targets < spec.n_circles {
            let non: Vec<usize> = (0..spec.n_circles).filter(|i| !targets.contains(i)).collect();
            non[rng.gen_range(0..non.len())]
        } else {
            targets[rng.gen_range(0..targets.len())]
        };
        Ok(Self {
            spec,
            circles,
            targets,
            queried,
            phase: MotPhase::Cue,
        })
    }

    pub fn query_is_target(&self) -> bool {
        self.targets.contains(&self.queried)
    }

    /// Advance positions by one step with specular reflection at the walls.
    /// Circles move during cue and track; the query frame is frozen.
    pub fn step(&mut self) {
        if self.phase == MotPhase::Query {
            return;
        }
        let (w, h) = self.spec.patch;
        let r = self.spec.radius;
        for c in &mut self.circles {
            c.pos.0 += c.vel.0;
            c.pos.1 += c.vel.1;
            reflect(&mut c.pos.0, &mut c.vel.0, r, w - r);
            reflect(&mut c.pos.1, &mut c.vel.1, r, h - r);
        }
    }

    pub fn render(&self) -> RgbaImage {
        let s = &self.spec;
        let mut img = filled(s.patch.0.ceil() as u32, s.patch.1.ceil() as u32, s.background);
        for (i, c) in self.circles.iter().enumerate() {
            let lit = match self.phase {
                MotPhase::Cue => self.targets.contains(&i),
                MotPhase::Track => false,
                MotPhase::Query => i == self.queried,
            };
            let color = if lit { s.highlight_color } else { s.circle_color };
            fill_disc(&mut img, c.pos.0, c.pos.1, s.radius, rgba(color));
        }
        img
    }
}

fn reflect(x: &mut f64, v: &mut f64, lo: f64, hi: f64) {
    if *x < lo {
        *x = 2.0 * lo - *x;
        *v = -*v;
    } else if *x > hi {
        *x = 2.0 * hi - *x;
        *v = -*v;
    }
}
