//! Foveal row/column subsampling.
//!
//! A [`FoveaMap`] keeps a center-dense subset of the input lines: output
//! offset `u` (relative to the output center) reads input offset `σ(u)`
//! (relative to the input center), with
//!
//! ```text
//! σ(u) = u + b·u⁸,   b = (R − r) / r⁸
//! ```
//!
//! where `R = (nIn − 1) / 2` and `r = (nOut − 1) / 2`. The boundary condition
//! `σ(r) = R` makes the outermost kept line the image border. Offsets are
//! rounded half-up onto the input lattice, which preserves strict
//! monotonicity because σ grows by at least one per unit step.

use image::RgbImage;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoveaMap {
    n_in: usize,
    /// Input index read by each output index, ascending.
    source: Vec<usize>,
}

/// Polynomial warp `σ(u) = u + b·u⁸` for `u ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp {
    pub b: f64,
}

impl Warp {
    pub fn for_sizes(n_in: usize, n_out: usize) -> Self {
        let big_r = (n_in as f64 - 1.0) / 2.0;
        let r = (n_out as f64 - 1.0) / 2.0;
        let b = if r > 0.0 { (big_r - r) / r.powi(8) } else { 0.0 };
        Self { b }
    }

    pub fn sigma(&self, u: f64) -> f64 {
        u + self.b * u.powi(8)
    }
}

impl FoveaMap {
    pub fn new(n_in: usize, n_out: usize) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::Fovea("sizes must be >= 1".into()));
        }
        if n_out > n_in {
            return Err(Error::Fovea(format!("nOut {n_out} exceeds nIn {n_in}")));
        }
        // An odd output has a center line, which needs an odd input to land on;
        // for an even input the last line is dropped and the map is built on the
        // odd-sized remainder.
        let effective_in = if n_out % 2 == 1 && n_in % 2 == 0 {
            n_in - 1
        } else {
            n_in
        };
        let warp = Warp::for_sizes(effective_in, n_out);
        // doubled coordinates keep half-integer centers exact
        let center_in2 = effective_in as i64 - 1;
        let even_in = effective_in % 2 == 0;
        let mut source = Vec::with_capacity(n_out);
        for i in 0..n_out {
            let u2 = 2 * i as i64 - (n_out as i64 - 1);
            let u = u2.unsigned_abs() as f64 / 2.0;
            let s = warp.sigma(u);
            // nearest lattice point, half-up; lattice is Z (odd input) or Z + 1/2 (even)
            let s2 = if even_in {
                2 * (s.floor() as i64) + 1
            } else {
                2 * ((s + 0.5).floor() as i64)
            };
            let j2 = center_in2 + u2.signum() * s2;
            source.push((j2 / 2) as usize);
        }
        Ok(Self { n_in, source })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_in: n,
            source: (0..n).collect(),
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.source.len()
    }

    /// Input index for each output index.
    pub fn source_indices(&self) -> &[usize] {
        &self.source
    }

    /// Kept offsets relative to the input center; undefined for the
    /// even-input/odd-output case, where the center is re-based.
    pub fn kept_offsets(&self) -> Vec<i64> {
        let c = (self.n_in as i64 - 1) / 2;
        self.source.iter().map(|&j| j as i64 - c).collect()
    }
}

/// Gather `out(v, u) = in(map_y(v), map_x(u))`.
pub fn foveate(img: &RgbImage, map_y: &FoveaMap, map_x: &FoveaMap) -> Result<RgbImage> {
    let (w, h) = img.dimensions();
    if w as usize != map_x.n_in() || h as usize != map_y.n_in() {
        return Err(Error::Fovea(format!(
            "image {w}x{h} does not match map {}x{}",
            map_x.n_in(),
            map_y.n_in()
        )));
    }
    let ow = map_x.n_out();
    let oh = map_y.n_out();
    let src = img.as_raw();
    let mut data = Vec::with_capacity(ow * oh * 3);
    for &sy in map_y.source_indices() {
        let row = sy * w as usize * 3;
        for &sx in map_x.source_indices() {
            let k = row + sx * 3;
            data.extend_from_slice(&src[k..k + 3]);
        }
    }
    Ok(RgbImage::from_raw(ow as u32, oh as u32, data).expect("buffer sized above"))
}

/// Parse `"nIn:nOut"`.
pub fn parse_spec(s: &str) -> Result<(usize, usize)> {
    let err = || Error::config("fovea", format!("expected nIn:nOut, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    let n_in = a.trim().parse().map_err(|_| err())?;
    let n_out = b.trim().parse().map_err(|_| err())?;
    if n_out > n_in || n_out == 0 {
        return Err(Error::config("fovea", format!("need 1 <= nOut <= nIn, got `{s}`")));
    }
    Ok((n_in, n_out))
}
