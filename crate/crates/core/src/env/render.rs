//! Pinhole camera ray casting onto the textured monitor plane.

use image::RgbImage;

use super::geometry::{GazeState, MonitorGeometry};

/// Observation camera: output resolution, sampling mode, and the per-pixel
/// ray offsets in camera space (precomputed once).
#[derive(Debug, Clone)]
pub struct Camera {
    width: u32,
    height: u32,
    bilinear: bool,
    col_offsets: Vec<f64>,
    row_offsets: Vec<f64>,
}

impl Camera {
    pub fn new(width: u32, height: u32, fov_degrees: f64, bilinear: bool) -> Self {
        let tan_y = (fov_degrees.to_radians() / 2.0).tan();
        let tan_x = tan_y * f64::from(width) / f64::from(height);
        let col_offsets = (0..width)
            .map(|i| ((f64::from(i) + 0.5) / f64::from(width) * 2.0 - 1.0) * tan_x)
            .collect();
        let row_offsets = (0..height)
            .map(|j| (1.0 - (f64::from(j) + 0.5) / f64::from(height) * 2.0) * tan_y)
            .collect();
        Self {
            width,
            height,
            bilinear,
            col_offsets,
            row_offsets,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn render(&self, screen: &RgbImage, gaze: GazeState, geom: &MonitorGeometry) -> RgbImage {
        let mut out = RgbImage::new(self.width, self.height);
        self.render_into(screen, gaze, geom, &mut out);
        out
    }

    /// Render into a caller-owned buffer of the camera's dimensions.
    pub fn render_into(
        &self,
        screen: &RgbImage,
        gaze: GazeState,
        geom: &MonitorGeometry,
        out: &mut RgbImage,
    ) {
        debug_assert_eq!(out.dimensions(), (self.width, self.height));
        debug_assert_eq!(screen.dimensions(), (geom.screen_width, geom.screen_height));

        // forward = normalize(tan yaw, tan pitch, 1) so the central ray meets the
        // plane at (d tan yaw, d tan pitch)
        let f = normalize([gaze.yaw.to_radians().tan(), gaze.pitch.to_radians().tan(), 1.0]);
        let r = normalize([f[2], 0.0, -f[0]]);
        let u = cross(f, r);

        let sw = geom.screen_width as usize;
        let sh = geom.screen_height as usize;
        let sx = f64::from(geom.screen_width) / geom.monitor_width;
        let sy = f64::from(geom.screen_height) / geom.monitor_height;
        let half_w = f64::from(geom.screen_width) / 2.0;
        let half_h = f64::from(geom.screen_height) / 2.0;
        let bg = geom.background_color;
        let src = screen.as_raw();
        let dst: &mut [u8] = out;

        let w = self.width as usize;
        for (j, &b) in self.row_offsets.iter().enumerate() {
            let base = [f[0] + b * u[0], f[1] + b * u[1], f[2] + b * u[2]];
            let row = &mut dst[j * w * 3..(j + 1) * w * 3];
            for (i, &a) in self.col_offsets.iter().enumerate() {
                let dz = base[2] + a * r[2];
                let px = &mut row[i * 3..i * 3 + 3];
                if dz <= 0.0 {
                    px.copy_from_slice(&bg);
                    continue;
                }
                let t = geom.distance / dz;
                let hx = t * (base[0] + a * r[0]);
                let hy = t * (base[1] + a * r[1]);
                let tx = hx * sx + half_w;
                let ty = half_h - hy * sy;
                if !(tx >= 0.0 && ty >= 0.0 && tx < sw as f64 && ty < sh as f64) {
                    px.copy_from_slice(&bg);
                    continue;
                }
                if self.bilinear {
                    px.copy_from_slice(&sample_bilinear(src, sw, sh, tx, ty));
                } else {
                    let k = ((ty as usize) * sw + tx as usize) * 3;
                    px.copy_from_slice(&src[k..k + 3]);
                }
            }
        }
    }
}

fn sample_bilinear(src: &[u8], sw: usize, sh: usize, tx: f64, ty: f64) -> [u8; 3] {
    let fx = (tx - 0.5).max(0.0);
    let fy = (ty - 0.5).max(0.0);
    let x0 = (fx as usize).min(sw - 1);
    let y0 = (fy as usize).min(sh - 1);
    let x1 = (x0 + 1).min(sw - 1);
    let y1 = (y0 + 1).min(sh - 1);
    let ax = fx - x0 as f64;
    let ay = fy - y0 as f64;
    let mut out = [0u8; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let p = |x: usize, y: usize| f64::from(src[(y * sw + x) * 3 + c]);
        let top = p(x0, y0) * (1.0 - ax) + p(x1, y0) * ax;
        let bot = p(x0, y1) * (1.0 - ax) + p(x1, y1) * ax;
        *o = (top * (1.0 - ay) + bot * ay).round().clamp(0.0, 255.0) as u8;
    }
    out
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
