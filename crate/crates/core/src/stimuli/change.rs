use image::RgbaImage;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{glyph, rotate_ccw, Glyph};

/// Six well-separated hues.
pub const PALETTE: [[u8; 3]; 6] = [
    [255, 0, 0],
    [255, 255, 0],
    [0, 255, 0],
    [0, 255, 255],
    [0, 0, 255],
    [255, 0, 255],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ChangeShape {
    Square,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ChangeFeature {
    Color,
    Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChangeObject {
    pub shape: ChangeShape,
    /// Index into [`PALETTE`].
    pub color: usize,
    /// Quarter turns counter-clockwise, 0..4.
    pub orientation: u8,
    /// (column, row) of the layout grid, row 0 at the top.
    pub cell: (usize, usize),
}

impl ChangeObject {
    pub fn render(&self, size: u32) -> RgbaImage {
        let g = match self.shape {
            ChangeShape::Square => Glyph::Square,
            ChangeShape::E => Glyph::E,
        };
        rotate_ccw(&glyph(g, size, PALETTE[self.color]), u32::from(self.orientation))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChangeArrays {
    pub sample: Vec<ChangeObject>,
    pub test: Vec<ChangeObject>,
    pub changed: bool,
    pub changed_index: Option<usize>,
    pub changed_feature: Option<ChangeFeature>,
}

/// Sample and test arrays on a `cols x rows` grid. When `changed`, one
/// object differs in one feature; squares are rotation-symmetric, so they
/// only change color.
pub fn gen_change_arrays<R: Rng + ?Sized>(
    set_size: usize,
    changed: bool,
    grid: (usize, usize),
    rng: &mut R,
) -> Result<ChangeArrays> {
    if set_size == 0 {
        return Err(Error::Stimulus("change-detection set size must be >= 1".into()));
    }
    if set_size > grid.0 * grid.1 {
        return Err(Error::Stimulus(format!(
            "set size {set_size} exceeds grid capacity {}",
            grid.0 * grid.1
        )));
    }
    let mut cells: Vec<(usize, usize)> = (0..grid.1)
        .flat_map(|r| (0..grid.0).map(move |c| (c, r)))
        .collect();
    cells.shuffle(rng);
    let sample: Vec<ChangeObject> = cells[..set_size]
        .iter()
        .map(|&cell| ChangeObject {
            shape: if rng.gen::<bool>() {
                ChangeShape::Square
            } else {
                ChangeShape::E
            },
            color: rng.gen_range(0..PALETTE.len()),
            orientation: rng.gen_range(0..4),
            cell,
        })
        .collect();
    let mut test = sample.clone();
    let (mut changed_index, mut changed_feature) = (None, None);
    if changed {
        let i = rng.gen_range(0..set_size);
        let o = &mut test[i];
        let feature = if o.shape == ChangeShape::Square || rng.gen::<bool>() {
            ChangeFeature::Color
        } else {
            ChangeFeature::Orientation
        };
        match feature {
            ChangeFeature::Color => {
                o.color = (o.color + rng.gen_range(1..PALETTE.len())) % PALETTE.len();
            }
            ChangeFeature::Orientation => {
                o.orientation = (o.orientation + rng.gen_range(1..4)) % 4;
            }
        }
        changed_index = Some(i);
        changed_feature = Some(feature);
    }
    Ok(ChangeArrays {
        sample,
        test,
        changed,
        changed_index,
        changed_feature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    #[test]
    fn unchanged_arrays_are_identical() {
        let mut rng = SeedTree::new(1).stream("c");
        for n in 1..=12 {
            let a = gen_change_arrays(n, false, (4, 3), &mut rng).unwrap();
            assert_eq!(a.sample, a.test);
            assert_eq!(a.changed_index, None);
        }
    }

    #[test]
    fn changed_arrays_differ_in_one_feature() {
        let mut rng = SeedTree::new(2).stream("c");
        let mut seen = [0usize; 2];
        for _ in 0..2000 {
            let a = gen_change_arrays(6, true, (4, 3), &mut rng).unwrap();
            let diffs: Vec<usize> = (0..6).filter(|&i| a.sample[i] != a.test[i]).collect();
            assert_eq!(diffs, vec![a.changed_index.unwrap()]);
            let (s, t) = (a.sample[diffs[0]], a.test[diffs[0]]);
            assert_eq!((s.shape, s.cell), (t.shape, t.cell));
            match a.changed_feature.unwrap() {
                ChangeFeature::Color => {
                    assert_ne!(s.color, t.color);
                    assert_eq!(s.orientation, t.orientation);
                    seen[0] += 1;
                }
                ChangeFeature::Orientation => {
                    assert_eq!(s.color, t.color);
                    assert_ne!(s.orientation, t.orientation);
                    assert_eq!(s.shape, ChangeShape::E);
                    seen[1] += 1;
                }
            }
            // the rendered change is visible
            assert_ne!(s.render(20), t.render(20));
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn shapes_are_equiprobable() {
        let mut rng = SeedTree::new(3).stream("c");
        let mut squares = 0;
        let mut total = 0;
        while total < 10_000 {
            let a = gen_change_arrays(10, false, (4, 3), &mut rng).unwrap();
            squares += a.sample.iter().filter(|o| o.shape == ChangeShape::Square).count();
            total += 10;
        }
        let f = squares as f64 / total as f64;
        assert!((f - 0.5).abs() < 0.02, "square fraction {f}");
    }

    #[test]
    fn positions_are_distinct() {
        let mut rng = SeedTree::new(4).stream("c");
        let a = gen_change_arrays(12, true, (4, 3), &mut rng).unwrap();
        let mut cells: Vec<_> = a.sample.iter().map(|o| o.cell).collect();
        cells.sort();
        cells.dedup();
        assert_eq!(cells.len(), 12);
        assert!(gen_change_arrays(13, true, (4, 3), &mut rng).is_err());
        assert!(gen_change_arrays(0, true, (4, 3), &mut rng).is_err());
    }
}
