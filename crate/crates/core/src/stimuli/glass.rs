use image::RgbaImage;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{fill_disc, filled, rgba, BLACK, WHITE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum DotPolarity {
    #[default]
    White,
    Black,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GlassSpec {
    pub n_dipoles: usize,
    pub coherence: f64,
    pub polarity: DotPolarity,
    /// Distance between the two dots of a dipole, texels.
    pub dipole_offset: f64,
    pub patch_radius: f64,
    pub dot_radius: f64,
    pub background: [u8; 3],
}

impl Default for GlassSpec {
    fn default() -> Self {
        Self {
            n_dipoles: 100,
            coherence: 1.0,
            polarity: DotPolarity::White,
            dipole_offset: 8.0,
            patch_radius: 110.0,
            dot_radius: 2.0,
            background: [127, 127, 127],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dipole {
    /// Midpoint relative to the patch center, y up.
    pub mid: (f64, f64),
    /// Orientation of the dot-to-dot axis, radians.
    pub angle: f64,
    pub coherent: bool,
    pub colors: [[u8; 3]; 2],
}

impl Dipole {
    pub fn dots(&self, offset: f64) -> [(f64, f64); 2] {
        let (dx, dy) = (self.angle.cos() * offset / 2.0, self.angle.sin() * offset / 2.0);
        [
            (self.mid.0 - dx, self.mid.1 - dy),
            (self.mid.0 + dx, self.mid.1 + dy),
        ]
    }

    /// Angle between the dipole axis and the tangent at its midpoint, in
    /// degrees within [0, 90].
    pub fn tangent_error_degrees(&self) -> f64 {
        let radial = self.mid.1.atan2(self.mid.0);
        let tangent = radial + std::f64::consts::FRAC_PI_2;
        let mut d = (self.angle - tangent).rem_euclid(std::f64::consts::PI);
        if d > std::f64::consts::FRAC_PI_2 {
            d = std::f64::consts::PI - d;
        }
        d.to_degrees()
    }
}

#[derive(Debug, Clone)]
pub struct GlassPatch {
    pub dipoles: Vec<Dipole>,
    pub image: RgbaImage,
}

impl GlassPatch {
    pub fn coherent_count(&self) -> usize {
        self.dipoles.iter().filter(|d| d.coherent).count()
    }
}

/// Number of coherent dipoles, `round(γ n)`.
pub fn coherent_count(spec: &GlassSpec) -> usize {
    (spec.coherence * spec.n_dipoles as f64).round() as usize
}

/// Generate a concentric Glass pattern and its random-orientation distractor.
pub fn gen_glass_pair<R: Rng + ?Sized>(spec: &GlassSpec, rng: &mut R) -> Result<(GlassPatch, GlassPatch)> {
    validate(spec)?;
    let k = coherent_count(spec);
    let target = gen_patch(spec, k, rng);
    let distractor = gen_patch(spec, 0, rng);
    Ok((target, distractor))
}

fn validate(spec: &GlassSpec) -> Result<()> {
    if spec.n_dipoles == 0 {
        return Err(Error::Stimulus("glass pattern needs at least one dipole".into()));
    }
    if !(0.0..=1.0).contains(&spec.coherence) {
        return Err(Error::Stimulus(format!("coherence {} outside [0, 1]", spec.coherence)));
    }
    if !(spec.dipole_offset > 0.0 && spec.dot_radius > 0.0) {
        return Err(Error::Stimulus("dipole offset and dot radius must be positive".into()));
    }
    if placement_radius(spec) <= 1.0 {
        return Err(Error::Stimulus(format!(
            "patch radius {} too small for dipole offset {}",
            spec.patch_radius, spec.dipole_offset
        )));
    }
    Ok(())
}

fn placement_radius(spec: &GlassSpec) -> f64 {
    spec.patch_radius - spec.dipole_offset / 2.0 - spec.dot_radius
}

fn gen_patch<R: Rng + ?Sized>(spec: &GlassSpec, n_coherent: usize, rng: &mut R) -> GlassPatch {
    let rmax = placement_radius(spec);
    let mut dipoles = Vec::with_capacity(spec.n_dipoles);
    for i in 0..spec.n_dipoles {
        // uniform in the disc, away from the center where the tangent is undefined
        let mid = loop {
            let x = rng.gen_range(-rmax..rmax);
            let y = rng.gen_range(-rmax..rmax);
            let r2 = x * x + y * y;
            if r2 <= rmax * rmax && r2 >= 1.0 {
                break (x, y);
            }
        };
        let coherent = i < n_coherent;
        let angle = if coherent {
            mid.1.atan2(mid.0) + std::f64::consts::FRAC_PI_2
        } else {
            rng.gen_range(0.0..std::f64::consts::PI)
        };
        let colors = match spec.polarity {
            DotPolarity::White => [WHITE, WHITE],
            DotPolarity::Black => [BLACK, BLACK],
            DotPolarity::Mixed => {
                if rng.gen::<bool>() {
                    [WHITE, BLACK]
                } else {
                    [BLACK, WHITE]
                }
            }
        };
        dipoles.push(Dipole {
            mid,
            angle,
            coherent,
            colors,
        });
    }
    let image = render(spec, &dipoles);
    GlassPatch { dipoles, image }
}

fn render(spec: &GlassSpec, dipoles: &[Dipole]) -> RgbaImage {
    let side = (2.0 * spec.patch_radius).ceil() as u32;
    let c = f64::from(side) / 2.0;
    let mut img = filled(side, side, spec.background);
    for d in dipoles {
        for (p, color) in d.dots(spec.dipole_offset).iter().zip(d.colors) {
            fill_disc(&mut img, c + p.0, c - p.1, spec.dot_radius, rgba(color));
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn spec(gamma: f64, polarity: DotPolarity) -> GlassSpec {
        GlassSpec {
            coherence: gamma,
            polarity,
            ..GlassSpec::default()
        }
    }

    #[test]
    fn full_coherence_is_tangent() {
        let mut rng = SeedTree::new(3).stream("glass");
        for _ in 0..20 {
            let (t, _) = gen_glass_pair(&spec(1.0, DotPolarity::White), &mut rng).unwrap();
            for d in &t.dipoles {
                // independent check: dot-to-dot vector orthogonal to the midpoint radius
                let [a, b] = d.dots(8.0);
                let v = (b.0 - a.0, b.1 - a.1);
                let cos = (v.0 * d.mid.0 + v.1 * d.mid.1)
                    / ((v.0.hypot(v.1)) * d.mid.0.hypot(d.mid.1));
                assert!(cos.abs() < 1f64.to_radians().sin());
                assert!(d.tangent_error_degrees() < 1.0);
            }
        }
    }

    #[test]
    fn coherent_counts_exact() {
        let mut rng = SeedTree::new(4).stream("glass");
        for (g, want) in [(0.0, 0), (0.25, 25), (0.5, 50), (0.75, 75), (1.0, 100)] {
            let (t, d) = gen_glass_pair(&spec(g, DotPolarity::White), &mut rng).unwrap();
            assert_eq!(t.coherent_count(), want);
            assert_eq!(d.coherent_count(), 0);
            assert_eq!(t.dipoles.len(), 100);
            assert_eq!(d.dipoles.len(), 100);
        }
        let mut s = spec(0.333, DotPolarity::White);
        s.n_dipoles = 7;
        assert_eq!(coherent_count(&s), 2);
    }

    #[test]
    fn mixed_polarity_one_of_each() {
        let mut rng = SeedTree::new(5).stream("glass");
        for g in [0.0, 0.5, 1.0] {
            let (t, d) = gen_glass_pair(&spec(g, DotPolarity::Mixed), &mut rng).unwrap();
            for dip in t.dipoles.iter().chain(&d.dipoles) {
                let whites = dip.colors.iter().filter(|c| **c == WHITE).count();
                let blacks = dip.colors.iter().filter(|c| **c == BLACK).count();
                assert_eq!((whites, blacks), (1, 1));
            }
        }
    }

    #[test]
    fn dots_stay_inside_the_patch() {
        let mut rng = SeedTree::new(6).stream("glass");
        let s = spec(0.5, DotPolarity::Black);
        let (t, _) = gen_glass_pair(&s, &mut rng).unwrap();
        for d in &t.dipoles {
            for p in d.dots(s.dipole_offset) {
                assert!(p.0.hypot(p.1) + s.dot_radius <= s.patch_radius + 1e-9);
            }
        }
        assert_eq!(t.image.width(), 220);
    }

    #[test]
    fn zero_coherence_matches_distractor_statistics() {
        // mean |cos| of angle against the tangent; random orientations give 2/pi
        let mut rng = SeedTree::new(7).stream("glass");
        let (mut a, mut b) = (0.0, 0.0);
        let n = 200;
        for _ in 0..n {
            let (t, d) = gen_glass_pair(&spec(0.0, DotPolarity::White), &mut rng).unwrap();
            a += t.dipoles.iter().map(|x| x.tangent_error_degrees().to_radians().cos()).sum::<f64>();
            b += d.dipoles.iter().map(|x| x.tangent_error_degrees().to_radians().cos()).sum::<f64>();
        }
        let m = (n * 100) as f64;
        let expect = 2.0 / std::f64::consts::PI;
        assert!((a / m - expect).abs() < 0.01);
        assert!((b / m - expect).abs() < 0.01);
    }

    #[test]
    fn rejects_small_patch() {
        let mut s = spec(1.0, DotPolarity::White);
        s.patch_radius = 5.0;
        let mut rng = SeedTree::new(1).stream("glass");
        assert!(gen_glass_pair(&s, &mut rng).is_err());
    }

    #[test]
    fn replay_is_exact() {
        let s = spec(0.5, DotPolarity::Mixed);
        let (a, _) = gen_glass_pair(&s, &mut SeedTree::new(9).stream("g")).unwrap();
        let (b, _) = gen_glass_pair(&s, &mut SeedTree::new(9).stream("g")).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.dipoles, b.dipoles);
    }
}
