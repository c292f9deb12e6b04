use image::RgbaImage;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{fill_disc, filled, rgba, BLACK, WHITE};

/// How incoherent dots behave each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum NoiseMode {
    /// Move at the common speed in a fresh uniformly random direction.
    #[default]
    RandomDirection,
    /// Relocate to a uniformly random position.
    Flash,
}

/// A named motion direction; angles are counter-clockwise from +x, y up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MotionDirection {
    Right,
    Up,
    Left,
    Down,
}

impl MotionDirection {
    pub fn angle(self) -> f64 {
        use std::f64::consts::{FRAC_PI_2, PI};
        match self {
            MotionDirection::Right => 0.0,
            MotionDirection::Up => FRAC_PI_2,
            MotionDirection::Left => PI,
            MotionDirection::Down => 3.0 * FRAC_PI_2,
        }
    }

    /// Exact unit vector, y up.
    pub fn unit(self) -> (f64, f64) {
        match self {
            MotionDirection::Right => (1.0, 0.0),
            MotionDirection::Up => (0.0, 1.0),
            MotionDirection::Left => (-1.0, 0.0),
            MotionDirection::Down => (0.0, -1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MotionDirection::Right => "right",
            MotionDirection::Up => "up",
            MotionDirection::Left => "left",
            MotionDirection::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct MotionFieldSpec {
    pub n_dots: usize,
    pub coherence: f64,
    pub direction: MotionDirection,
    /// Texels per step.
    pub speed: f64,
    pub aperture_radius: f64,
    /// Steps before a dot is respawned.
    pub dot_lifetime: u32,
    pub dot_radius: f64,
    pub noise: NoiseMode,
}

impl Default for MotionFieldSpec {
    fn default() -> Self {
        Self {
            n_dots: 100,
            coherence: 1.0,
            direction: MotionDirection::Right,
            speed: 2.0,
            aperture_radius: 100.0,
            dot_lifetime: 30,
            dot_radius: 2.0,
            noise: NoiseMode::RandomDirection,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dot {
    /// Position relative to the aperture center, y up.
    pub pos: (f64, f64),
    pub age: u32,
    pub coherent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionStepStats {
    /// Dots displaced by exactly the coherent vector this step.
    pub coherent_movers: usize,
    /// Mean displacement over all dots, before any respawn.
    pub mean_displacement: (f64, f64),
    pub respawned: usize,
}

#[derive(Debug, Clone)]
pub struct MotionField {
    spec: MotionFieldSpec,
    dots: Vec<Dot>,
}

impl MotionField {
    pub fn new<R: Rng + ?Sized>(spec: MotionFieldSpec, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&spec.coherence) {
            return Err(Error::Stimulus(format!("coherence {} outside [0, 1]", spec.coherence)));
        }
        if !(spec.aperture_radius > 0.0 && spec.speed >= 0.0) || spec.dot_lifetime == 0 {
            return Err(Error::Stimulus("aperture, speed, and lifetime must be positive".into()));
        }
        let k = (spec.coherence * spec.n_dots as f64).round() as usize;
        let dots = (0..spec.n_dots)
            .map(|i| Dot {
                pos: uniform_in_disc(spec.aperture_radius, rng),
                // staggered ages so respawns do not arrive in lockstep
                age: rng.gen_range(0..spec.dot_lifetime),
                coherent: i < k,
            })
            .collect();
        Ok(Self { spec, dots })
    }

    pub fn spec(&self) -> &MotionFieldSpec {
        &self.spec
    }

    pub fn dots(&self) -> &[Dot] {
        &self.dots
    }

    pub fn coherent_count(&self) -> usize {
        self.dots.iter().filter(|d| d.coherent).count()
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MotionStepStats {
        let s = self.spec.speed;
        let (ux, uy) = self.spec.direction.unit();
        let cv = (s * ux, s * uy);
        let r = self.spec.aperture_radius;
        let mut movers = 0;
        let mut respawned = 0;
        let mut sum = (0.0, 0.0);
        for d in &mut self.dots {
            let disp = if d.coherent {
                movers += 1;
                cv
            } else {
                match self.spec.noise {
                    NoiseMode::RandomDirection => {
                        let a = rng.gen_range(0.0..std::f64::consts::TAU);
                        (s * a.cos(), s * a.sin())
                    }
                    NoiseMode::Flash => {
                        let p = uniform_in_disc(r, rng);
                        (p.0 - d.pos.0, p.1 - d.pos.1)
                    }
                }
            };
            d.pos = (d.pos.0 + disp.0, d.pos.1 + disp.1);
            sum = (sum.0 + disp.0, sum.1 + disp.1);
            d.age += 1;
            if d.age >= self.spec.dot_lifetime || d.pos.0.hypot(d.pos.1) > r {
                d.pos = uniform_in_disc(r, rng);
                d.age = 0;
                respawned += 1;
            }
        }
        let n = self.dots.len().max(1) as f64;
        MotionStepStats {
            coherent_movers: movers,
            mean_displacement: (sum.0 / n, sum.1 / n),
            respawned,
        }
    }

    /// White dots on black, square image of side `2 * apertureRadius`.
    pub fn render(&self) -> RgbaImage {
        let side = (2.0 * self.spec.aperture_radius).ceil() as u32;
        let c = f64::from(side) / 2.0;
        let mut img = filled(side, side, BLACK);
        for d in &self.dots {
            fill_disc(&mut img, c + d.pos.0, c - d.pos.1, self.spec.dot_radius, rgba(WHITE));
        }
        img
    }
}

fn uniform_in_disc<R: Rng + ?Sized>(r: f64, rng: &mut R) -> (f64, f64) {
    loop {
        let x = rng.gen_range(-r..r);
        let y = rng.gen_range(-r..r);
        if x * x + y * y <= r * r {
            return (x, y);
        }
    }
}
