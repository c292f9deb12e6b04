//! Image pools for the memory tasks: procedural by default, or a directory
//! of image files.

use std::path::PathBuf;
use std::sync::Arc;

use image::RgbaImage;
use rand::Rng;

use crate::error::Result;
use crate::raster::to_rgba;
use crate::rng::StreamRng;
use crate::stimuli::procedural::{gen_procedural_image, DEFAULT_SIZE};

#[derive(Clone)]
pub enum ImageSource {
    /// Ids are offset by a per-episode base so every episode sees fresh images.
    Procedural { base: u64 },
    Dataset(Arc<Vec<RgbaImage>>),
}

impl ImageSource {
    pub fn open(dataset_dir: Option<&PathBuf>) -> Result<Self> {
        Ok(match dataset_dir {
            None => ImageSource::Procedural { base: 0 },
            Some(dir) => {
                let imgs = crate::session::load_image_dataset(dir)?;
                ImageSource::Dataset(Arc::new(imgs.iter().map(to_rgba).collect()))
            }
        })
    }

    pub fn begin_episode(&mut self, rng: &mut StreamRng) {
        if let ImageSource::Procedural { base } = self {
            *base = u64::from(rng.gen::<u32>()) << 24;
        }
    }

    /// Number of distinct images, `None` when unbounded.
    pub fn capacity(&self) -> Option<usize> {
        match self {
            ImageSource::Procedural { .. } => None,
            ImageSource::Dataset(v) => Some(v.len()),
        }
    }

    /// Image `k` of the current episode.
    pub fn image(&self, k: usize) -> RgbaImage {
        match self {
            ImageSource::Procedural { base } => to_rgba(&gen_procedural_image(base + k as u64, DEFAULT_SIZE)),
            ImageSource::Dataset(v) => v[k % v.len()].clone(),
        }
    }

    /// Stable identifier for logs.
    pub fn id(&self, k: usize) -> u64 {
        match self {
            ImageSource::Procedural { base } => base + k as u64,
            ImageSource::Dataset(_) => k as u64,
        }
    }
}
