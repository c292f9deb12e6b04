use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};

use crate::rng::StreamRng;

pub const DEFAULT_SIZE: u32 = 64;

/// Bijection on 24-bit integers: odd multiply and xorshift steps are both
/// invertible modulo 2^24.
fn permute24(x: u32) -> u32 {
    const MASK: u32 = 0x00ff_ffff;
    let mut v = x & MASK;
    v = v.wrapping_mul(0x9e_3779) & MASK;
    v ^= v >> 12;
    v = v.wrapping_mul(0x5b_d1e5) & MASK;
    v ^= v >> 11;
    v
}

/// Background color of image `id`; distinct for ids below 2^24.
pub fn background_color(id: u64) -> [u8; 3] {
    let v = permute24((id & 0x00ff_ffff) as u32);
    [(v >> 16) as u8, (v >> 8) as u8, v as u8]
}

/// A deterministic composite of colored shapes over a per-id background.
/// Shapes cover at most 36% of the image, so the backgrounds of any two
/// distinct ids stay visible on at least a quarter of the pixels.
pub fn gen_procedural_image(id: u64, size: u32) -> RgbImage {
    let bg = background_color(id);
    let mut img = RgbImage::from_pixel(size, size, Rgb(bg));
    let mut rng = StreamRng::seed_from_u64(id ^ 0x5eed_1a6e_0000_0000);
    let s = f64::from(size);
    // three shapes, each inside a box under 0.28 x 0.38 of the side
    for _ in 0..3 {
        let w = rng.gen_range(0.15..0.28) * s;
        let h = rng.gen_range(0.15..0.38) * s;
        let x0 = rng.gen_range(0.0..s - w);
        let y0 = rng.gen_range(0.0..s - h);
        let color = Rgb([rng.gen(), rng.gen(), rng.gen()]);
        let kind = rng.gen_range(0..3);
        for y in 0..size {
            let py = f64::from(y) + 0.5;
            if py < y0 || py >= y0 + h {
                continue;
            }
            for x in 0..size {
                let px = f64::from(x) + 0.5;
                if px < x0 || px >= x0 + w {
                    continue;
                }
                let u = (px - x0) / w;
                let v = (py - y0) / h;
                let inside = match kind {
                    0 => true,
                    1 => (u - 0.5).powi(2) + (v - 0.5).powi(2) <= 0.25,
                    _ => (u - 0.5).abs() * 2.0 <= v,
                };
                if inside {
                    img.put_pixel(x, y, color);
                }
            }
        }
    }
    img
}

/// Fraction of pixels at which two images differ.
pub fn pixel_difference(a: &RgbImage, b: &RgbImage) -> f64 {
    assert_eq!(a.dimensions(), b.dimensions());
    let n = a.pixels().zip(b.pixels()).filter(|(p, q)| p != q).count();
    n as f64 / (a.width() * a.height()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(gen_procedural_image(0, 64), gen_procedural_image(0, 64));
    }

    #[test]
    fn backgrounds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for id in 0..100_000u64 {
            assert!(seen.insert(background_color(id)));
        }
    }

    #[test]
    fn shape_coverage_is_bounded() {
        for id in 0..1000u64 {
            let img = gen_procedural_image(id, 64);
            let bg = Rgb(background_color(id));
            let covered = img.pixels().filter(|p| **p != bg).count() as f64 / 4096.0;
            assert!(covered <= 0.36, "id {id} covers {covered}");
        }
    }

    #[test]
    fn distinct_ids_differ_in_ten_percent() {
        let imgs: Vec<RgbImage> = (0..1000u64).map(|i| gen_procedural_image(i, 64)).collect();
        let mut worst: f64 = 1.0;
        for i in 0..imgs.len() {
            for j in i + 1..imgs.len() {
                worst = worst.min(pixel_difference(&imgs[i], &imgs[j]));
            }
        }
        assert!(worst >= 0.10, "min pairwise difference {worst}");
    }
}
