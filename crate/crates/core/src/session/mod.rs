//! Persistence: trial logs, config files and image datasets.

use std::path::{Path, PathBuf};

use image::RgbImage;

use crate::config::EnvConfig;
use crate::error::{Error, Result};

pub mod record;

pub use record::{read_log_file, read_records, write_records, TrialLogWriter, TrialRecord, SCHEMA_VERSION};

/// Read and validate a TOML config file.
pub fn load_config(path: &Path) -> Result<EnvConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg = EnvConfig::from_toml_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

const IMAGE_EXTENSIONS: [&str; 1] = ["png"];

/// Every PNG in `dir`, sorted by file name. All images must share one size.
pub fn load_image_dataset(dir: &Path) -> Result<Vec<RgbImage>> {
    let err = |message: String| Error::Dataset {
        path: dir.to_path_buf(),
        message,
    };
    let entries = std::fs::read_dir(dir).map_err(|e| err(e.to_string()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| IMAGE_EXTENSIONS.contains(&x.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if paths.is_empty() {
        return Err(err("no .png images found".into()));
    }
    let mut out = Vec::with_capacity(paths.len());
    for p in &paths {
        let img = image::open(p)
            .map_err(|e| err(format!("{}: {e}", p.display())))?
            .to_rgb8();
        if let Some(first) = out.first() {
            let first: &RgbImage = first;
            if first.dimensions() != img.dimensions() {
                return Err(err(format!(
                    "{} is {:?}, expected {:?}",
                    p.display(),
                    img.dimensions(),
                    first.dimensions()
                )));
            }
        }
        out.push(img);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_png(dir: &Path, name: &str, w: u32, h: u32, v: u8) {
        RgbImage::from_pixel(w, h, image::Rgb([v, v, v]))
            .save(dir.join(name))
            .unwrap();
    }

    #[test]
    fn dataset_sorted_and_counted() {
        let d = tempfile::tempdir().unwrap();
        write_png(d.path(), "b.png", 8, 8, 2);
        write_png(d.path(), "a.png", 8, 8, 1);
        write_png(d.path(), "c.png", 8, 8, 3);
        std::fs::write(d.path().join("notes.txt"), "skip me").unwrap();
        let imgs = load_image_dataset(d.path()).unwrap();
        assert_eq!(imgs.len(), 3);
        assert_eq!(imgs[0].get_pixel(0, 0).0, [1, 1, 1]);
        assert_eq!(imgs[2].get_pixel(0, 0).0, [3, 3, 3]);
    }

    #[test]
    fn dataset_errors() {
        let d = tempfile::tempdir().unwrap();
        assert!(load_image_dataset(d.path()).is_err());
        assert!(load_image_dataset(&d.path().join("absent")).is_err());
        write_png(d.path(), "a.png", 8, 8, 1);
        write_png(d.path(), "b.png", 9, 8, 1);
        assert!(matches!(load_image_dataset(d.path()), Err(Error::Dataset { .. })));
    }

    #[test]
    fn config_file_constraints() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("c.toml");
        std::fs::write(&p, "episodeLengthSteps = 10800\n").unwrap();
        assert_eq!(load_config(&p).unwrap().episode_length_steps, 10800);
        std::fs::write(&p, "episodeLengthSteps = -5\n").unwrap();
        match load_config(&p) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "episodeLengthSteps"),
            other => panic!("{other:?}"),
        }
    }
}
