use image::{Rgba, RgbaImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the eight compass directions, counter-clockwise from east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Compass {
    E,
    NE,
    N,
    NW,
    W,
    SW,
    S,
    SE,
}

impl Compass {
    pub const ALL: [Compass; 8] = [
        Compass::E,
        Compass::NE,
        Compass::N,
        Compass::NW,
        Compass::W,
        Compass::SW,
        Compass::S,
        Compass::SE,
    ];
    pub const CARDINAL: [Compass; 4] = [Compass::E, Compass::N, Compass::W, Compass::S];

    pub fn index(self) -> usize {
        Compass::ALL.iter().position(|c| *c == self).unwrap()
    }

    pub fn from_index(i: usize) -> Compass {
        Compass::ALL[i % 8]
    }

    /// Rotate counter-clockwise by `eighths * 45` degrees.
    pub fn rotate(self, eighths: usize) -> Compass {
        Compass::from_index(self.index() + eighths)
    }

    /// Unit vector, y up. Exact for the cardinal directions.
    pub fn unit(self) -> (f64, f64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Compass::E => (1.0, 0.0),
            Compass::NE => (s, s),
            Compass::N => (0.0, 1.0),
            Compass::NW => (-s, s),
            Compass::W => (-1.0, 0.0),
            Compass::SW => (-s, -s),
            Compass::S => (0.0, -1.0),
            Compass::SE => (s, -s),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Compass::E => "E",
            Compass::NE => "NE",
            Compass::N => "N",
            Compass::NW => "NW",
            Compass::W => "W",
            Compass::SW => "SW",
            Compass::S => "S",
            Compass::SE => "SE",
        }
    }

    pub fn from_label(s: &str) -> Option<Compass> {
        Compass::ALL.iter().copied().find(|c| c.label() == s)
    }
}

/// Whether the optotype is darker or lighter than its background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum ContrastPolarity {
    #[default]
    Dark,
    Light,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandoltSpec {
    /// Outer diameter as a fraction of the screen width.
    pub scale: f64,
    /// Weber contrast in (0, 1].
    pub contrast: f64,
    pub gap: Compass,
    pub polarity: ContrastPolarity,
}

/// Foreground luminance `L_b (1 ± c)`, rounded and clamped to a byte.
pub fn weber_foreground(background: u8, contrast: f64, polarity: ContrastPolarity) -> u8 {
    let lb = f64::from(background);
    let lf = match polarity {
        ContrastPolarity::Dark => lb * (1.0 - contrast),
        ContrastPolarity::Light => lb * (1.0 + contrast),
    };
    lf.round().clamp(0.0, 255.0) as u8
}

/// Rasterize a Landolt C: an annulus of stroke D/5 with a D/5-wide gap.
/// The image is a square of side `ceil(D)` texels filled with the background.
pub fn gen_landolt(spec: &LandoltSpec, screen_width: u32, background: u8) -> Result<RgbaImage> {
    if !(spec.contrast > 0.0 && spec.contrast <= 1.0) {
        return Err(Error::Stimulus(format!("contrast {} outside (0, 1]", spec.contrast)));
    }
    let d = spec.scale * f64::from(screen_width);
    if !(d >= 3.0) {
        return Err(Error::Stimulus(format!(
            "Landolt C diameter {d:.2} texels is below the 3-texel minimum"
        )));
    }
    if spec.scale > 1.0 {
        return Err(Error::Stimulus(format!("scale {} exceeds the screen", spec.scale)));
    }
    let side = d.ceil() as u32;
    let half = f64::from(side) / 2.0;
    let outer = d / 2.0;
    let inner = outer - d / 5.0;
    let gap_half = d / 10.0;
    let (gx, gy) = spec.gap.unit();
    let fg = weber_foreground(background, spec.contrast, spec.polarity);
    let bg_px = Rgba([background, background, background, 255]);
    let fg_px = Rgba([fg, fg, fg, 255]);
    let img = RgbaImage::from_fn(side, side, |i, j| {
        let x = f64::from(i) + 0.5 - half;
        let y = half - (f64::from(j) + 0.5);
        let r2 = x * x + y * y;
        if r2 > outer * outer || r2 < inner * inner {
            return bg_px;
        }
        let along = x * gx + y * gy;
        let across = (x * gy - y * gx).abs();
        if along > 0.0 && across < gap_half {
            bg_px
        } else {
            fg_px
        }
    });
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::rotate_ccw;

    fn spec(gap: Compass, contrast: f64) -> LandoltSpec {
        LandoltSpec {
            scale: 0.1,
            contrast,
            gap,
            polarity: ContrastPolarity::Dark,
        }
    }

    #[test]
    fn full_contrast_east_gap() {
        let img = gen_landolt(&spec(Compass::E, 1.0), 512, 127).unwrap();
        let side = img.width();
        let mid = side / 2;
        // ring pixel on the west side is black, east side on the same row is gap
        let ring_r = (0.1 * 512.0) * 0.4; // middle of the stroke
        let west = (f64::from(side) / 2.0 - ring_r) as u32;
        let east = (f64::from(side) / 2.0 + ring_r) as u32;
        assert_eq!(img.get_pixel(west, mid).0, [0, 0, 0, 255]);
        assert_eq!(img.get_pixel(east, mid).0, [127, 127, 127, 255]);
        let lum: Vec<u8> = img.pixels().map(|p| p.0[0]).collect();
        assert_eq!(*lum.iter().min().unwrap(), 0);
        assert_eq!(*lum.iter().max().unwrap(), 127);
    }

    #[test]
    fn north_and_south_are_mirror_images() {
        let n = gen_landolt(&spec(Compass::N, 0.7), 512, 127).unwrap();
        let s = gen_landolt(&spec(Compass::S, 0.7), 512, 127).unwrap();
        assert_eq!(image::imageops::flip_vertical(&n), s);
        assert_ne!(n, s);
    }

    #[test]
    fn rotating_gap_rotates_raster() {
        for scale in [0.02, 0.05, 0.1, 0.137] {
            for g in Compass::ALL {
                let mut a = spec(g, 1.0);
                a.scale = scale;
                let mut b = a;
                b.gap = g.rotate(2);
                let ra = gen_landolt(&a, 512, 127).unwrap();
                let rb = gen_landolt(&b, 512, 127).unwrap();
                assert_eq!(rotate_ccw(&ra, 1), rb, "scale {scale} gap {g:?}");
            }
        }
    }

    #[test]
    fn weber_contrast_quantization() {
        // 127 * 0.8 = 101.6, 127 * 1.2 = 152.4
        assert_eq!(weber_foreground(127, 0.2, ContrastPolarity::Dark), 102);
        assert_eq!(weber_foreground(127, 0.2, ContrastPolarity::Light), 152);
        assert_eq!(weber_foreground(127, 1.0, ContrastPolarity::Light), 254);
        let mut s = spec(Compass::W, 0.2);
        s.polarity = ContrastPolarity::Light;
        let img = gen_landolt(&s, 512, 127).unwrap();
        assert!(img.pixels().any(|p| p.0[0] == 152));
    }

    #[test]
    fn too_small_is_an_error() {
        let mut s = spec(Compass::E, 1.0);
        s.scale = 2.9 / 512.0;
        assert!(gen_landolt(&s, 512, 127).is_err());
        s.scale = 3.0 / 512.0;
        assert!(gen_landolt(&s, 512, 127).is_ok());
        let bad = spec(Compass::E, 0.0);
        assert!(gen_landolt(&bad, 512, 127).is_err());
    }

    #[test]
    fn compass_labels_round_trip() {
        for c in Compass::ALL {
            assert_eq!(Compass::from_label(c.label()), Some(c));
        }
        assert_eq!(Compass::E.rotate(2), Compass::N);
        assert_eq!(Compass::SE.rotate(1), Compass::E);
    }
}
