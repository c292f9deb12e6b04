//! Small raster toolkit shared by the stimulus generators.
//!
//! Coordinates are in texels with the origin at the top-left pixel corner;
//! pixel `(i, j)` covers `[i, i+1) x [j, j+1)` and has its center at
//! `(i + 0.5, j + 0.5)`.

use image::{Rgb, RgbImage, Rgba, RgbaImage};

pub const MAGENTA: [u8; 3] = [255, 0, 255];
pub const CYAN: [u8; 3] = [0, 255, 255];
pub const RED: [u8; 3] = [255, 0, 0];
pub const WHITE: [u8; 3] = [255, 255, 255];
pub const BLACK: [u8; 3] = [0, 0, 0];
pub const GRAY: [u8; 3] = [127, 127, 127];

pub fn rgba(c: [u8; 3]) -> Rgba<u8> {
    Rgba([c[0], c[1], c[2], 255])
}

pub fn filled(width: u32, height: u32, color: [u8; 3]) -> RgbaImage {
    RgbaImage::from_pixel(width.max(1), height.max(1), rgba(color))
}

pub fn transparent(width: u32, height: u32) -> RgbaImage {
    RgbaImage::from_pixel(width.max(1), height.max(1), Rgba([0, 0, 0, 0]))
}

/// Filled disc; a pixel is covered when its center lies within `radius`.
pub fn fill_disc(img: &mut RgbaImage, cx: f64, cy: f64, radius: f64, color: Rgba<u8>) {
    let (w, h) = img.dimensions();
    let x0 = (cx - radius).floor().max(0.0) as u32;
    let y0 = (cy - radius).floor().max(0.0) as u32;
    let x1 = ((cx + radius).ceil().max(0.0) as u32).min(w);
    let y1 = ((cy + radius).ceil().max(0.0) as u32).min(h);
    let r2 = radius * radius;
    for y in y0..y1 {
        let dy = y as f64 + 0.5 - cy;
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - cx;
            if dx * dx + dy * dy <= r2 {
                img.put_pixel(x, y, color);
            }
        }
    }
}

/// Axis-aligned rectangle fill, in fractional texel coordinates; a pixel is
/// covered when its center lies inside `[x0, x1) x [y0, y1)`.
pub fn fill_rect(img: &mut RgbaImage, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgba<u8>) {
    let (w, h) = img.dimensions();
    for y in 0..h {
        let py = y as f64 + 0.5;
        if py < y0 || py >= y1 {
            continue;
        }
        for x in 0..w {
            let px = x as f64 + 0.5;
            if px >= x0 && px < x1 {
                img.put_pixel(x, y, color);
            }
        }
    }
}

/// Rotate an image counter-clockwise by `quarter_turns * 90` degrees.
pub fn rotate_ccw(img: &RgbaImage, quarter_turns: u32) -> RgbaImage {
    match quarter_turns % 4 {
        0 => img.clone(),
        1 => image::imageops::rotate270(img),
        2 => image::imageops::rotate180(img),
        _ => image::imageops::rotate90(img),
    }
}

/// Red fixation cross on a transparent square.
pub fn fixation_cross(size: u32) -> RgbaImage {
    let mut img = transparent(size, size);
    let s = size as f64;
    let t = (s / 5.0).max(1.0);
    let c = rgba(RED);
    fill_rect(&mut img, 0.0, (s - t) / 2.0, s, (s + t) / 2.0, c);
    fill_rect(&mut img, (s - t) / 2.0, 0.0, (s + t) / 2.0, s, c);
    img
}

/// Letter glyphs drawn with strokes of `size / 5` on a transparent square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glyph {
    T,
    L,
    E,
    Square,
}

pub fn glyph(kind: Glyph, size: u32, color: [u8; 3]) -> RgbaImage {
    let mut img = transparent(size, size);
    let s = size as f64;
    let t = (s / 5.0).max(1.0);
    let c = rgba(color);
    match kind {
        Glyph::T => {
            fill_rect(&mut img, 0.0, 0.0, s, t, c);
            fill_rect(&mut img, (s - t) / 2.0, 0.0, (s + t) / 2.0, s, c);
        }
        Glyph::L => {
            fill_rect(&mut img, 0.0, 0.0, t, s, c);
            fill_rect(&mut img, 0.0, s - t, s, s, c);
        }
        Glyph::E => {
            fill_rect(&mut img, 0.0, 0.0, t, s, c);
            fill_rect(&mut img, 0.0, 0.0, s, t, c);
            fill_rect(&mut img, 0.0, (s - t) / 2.0, s, (s + t) / 2.0, c);
            fill_rect(&mut img, 0.0, s - t, s, s, c);
        }
        Glyph::Square => {
            fill_rect(&mut img, 0.0, 0.0, s, s, c);
        }
    }
    img
}

/// Alpha-composite `src` over the opaque `dst` pixel.
#[inline]
pub fn blend(dst: &mut Rgb<u8>, src: Rgba<u8>) {
    let a = u32::from(src.0[3]);
    match a {
        0 => {}
        255 => {
            dst.0 = [src.0[0], src.0[1], src.0[2]];
        }
        _ => {
            for k in 0..3 {
                let s = u32::from(src.0[k]);
                let d = u32::from(dst.0[k]);
                dst.0[k] = ((s * a + d * (255 - a) + 127) / 255) as u8;
            }
        }
    }
}

pub fn to_rgba(img: &RgbImage) -> RgbaImage {
    let (w, h) = img.dimensions();
    RgbaImage::from_fn(w, h, |x, y| {
        let p = img.get_pixel(x, y).0;
        Rgba([p[0], p[1], p[2], 255])
    })
}
