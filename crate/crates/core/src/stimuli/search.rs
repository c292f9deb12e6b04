use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Glyph, CYAN, MAGENTA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum SearchMode {
    Orientation,
    Color,
    #[default]
    Conjunction,
}

impl SearchMode {
    pub fn label(self) -> &'static str {
        match self {
            SearchMode::Orientation => "orientation",
            SearchMode::Color => "color",
            SearchMode::Conjunction => "conjunction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ItemColor {
    Magenta,
    Cyan,
}

impl ItemColor {
    pub fn rgb(self) -> [u8; 3] {
        match self {
            ItemColor::Magenta => MAGENTA,
            ItemColor::Cyan => CYAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItemGlyph {
    T,
    L,
}

impl ItemGlyph {
    pub fn raster(self) -> Glyph {
        match self {
            ItemGlyph::T => Glyph::T,
            ItemGlyph::L => Glyph::L,
        }
    }
}

/// Grid placement of search items, in screen fractions with y up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SearchLayout {
    pub cols: usize,
    pub rows: usize,
    /// Lower-left corner and size of the region holding the grid.
    pub origin: (f64, f64),
    pub extent: (f64, f64),
    /// Item side as a fraction of the screen width.
    pub item_size: f64,
}

impl Default for SearchLayout {
    fn default() -> Self {
        Self {
            cols: 5,
            rows: 5,
            origin: (0.05, 0.05),
            extent: (0.9, 0.9),
            item_size: 0.08,
        }
    }
}

impl SearchLayout {
    pub fn capacity(&self) -> usize {
        self.cols * self.rows
    }

    fn cell_size(&self) -> (f64, f64) {
        (self.extent.0 / self.cols as f64, self.extent.1 / self.rows as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchItem {
    pub glyph: ItemGlyph,
    pub color: ItemColor,
    /// (column, row), row 0 at the top.
    pub cell: (usize, usize),
    /// Lower-left corner, screen fractions.
    pub pos: (f64, f64),
    pub size: f64,
    pub is_target: bool,
}

impl SearchItem {
    pub fn center(&self) -> (f64, f64) {
        (self.pos.0 + self.size / 2.0, self.pos.1 + self.size / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchArray {
    pub mode: SearchMode,
    pub items: Vec<SearchItem>,
    pub target_index: usize,
}

impl SearchArray {
    pub fn set_size(&self) -> usize {
        self.items.len()
    }

    pub fn target(&self) -> &SearchItem {
        &self.items[self.target_index]
    }
}

pub fn gen_search_array<R: Rng + ?Sized>(
    mode: SearchMode,
    set_size: usize,
    layout: &SearchLayout,
    rng: &mut R,
) -> Result<SearchArray> {
    if set_size == 0 {
        return Err(Error::Stimulus("search set size must be >= 1".into()));
    }
    if set_size > layout.capacity() {
        return Err(Error::Stimulus(format!(
            "set size {set_size} exceeds grid capacity {}",
            layout.capacity()
        )));
    }
    let (cw, ch) = layout.cell_size();
    if layout.item_size > cw.min(ch) {
        return Err(Error::Stimulus("search items larger than grid cells".into()));
    }
    let mut cells: Vec<(usize, usize)> = (0..layout.rows)
        .flat_map(|r| (0..layout.cols).map(move |c| (c, r)))
        .collect();
    cells.shuffle(rng);
    cells.truncate(set_size);

    let n_distractors = set_size - 1;
    let mut distractors: Vec<(ItemGlyph, ItemColor)> = match mode {
        SearchMode::Orientation => vec![(ItemGlyph::L, ItemColor::Magenta); n_distractors],
        SearchMode::Color => vec![(ItemGlyph::T, ItemColor::Cyan); n_distractors],
        SearchMode::Conjunction => {
            let mut cyan = n_distractors / 2;
            if n_distractors % 2 == 1 && rng.gen::<bool>() {
                cyan += 1;
            }
            let mut v = vec![(ItemGlyph::T, ItemColor::Cyan); cyan];
            v.extend(vec![(ItemGlyph::L, ItemColor::Magenta); n_distractors - cyan]);
            v.shuffle(rng);
            v
        }
    };
    let target_index = rng.gen_range(0..set_size);
    distractors.insert(target_index, (ItemGlyph::T, ItemColor::Magenta));

    let slack = (cw - layout.item_size, ch - layout.item_size);
    let items = cells
        .iter()
        .zip(distractors)
        .enumerate()
        .map(|(i, (&(c, r), (glyph, color)))| {
            let jx = if slack.0 > 0.0 { rng.gen_range(0.0..slack.0) } else { 0.0 };
            let jy = if slack.1 > 0.0 { rng.gen_range(0.0..slack.1) } else { 0.0 };
            let x = layout.origin.0 + c as f64 * cw + jx;
            let y = layout.origin.1 + (layout.rows - 1 - r) as f64 * ch + jy;
            SearchItem {
                glyph,
                color,
                cell: (c, r),
                pos: (x, y),
                size: layout.item_size,
                is_target: i == target_index,
            }
        })
        .collect();
    Ok(SearchArray {
        mode,
        items,
        target_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn count(a: &SearchArray, g: ItemGlyph, c: ItemColor) -> usize {
        a.items.iter().filter(|i| i.glyph == g && i.color == c).count()
    }

    #[test]
    fn color_mode_composition() {
        let mut rng = SeedTree::new(1).stream("s");
        let a = gen_search_array(SearchMode::Color, 4, &SearchLayout::default(), &mut rng).unwrap();
        assert_eq!(count(&a, ItemGlyph::T, ItemColor::Magenta), 1);
        assert_eq!(count(&a, ItemGlyph::T, ItemColor::Cyan), 3);
        assert!(a.target().is_target);
    }

    #[test]
    fn conjunction_balance() {
        let mut rng = SeedTree::new(2).stream("s");
        let l = SearchLayout::default();
        let a = gen_search_array(SearchMode::Conjunction, 9, &l, &mut rng).unwrap();
        assert_eq!(count(&a, ItemGlyph::T, ItemColor::Magenta), 1);
        assert_eq!(count(&a, ItemGlyph::T, ItemColor::Cyan), 4);
        assert_eq!(count(&a, ItemGlyph::L, ItemColor::Magenta), 4);
        for _ in 0..50 {
            let a = gen_search_array(SearchMode::Conjunction, 8, &l, &mut rng).unwrap();
            let cy = count(&a, ItemGlyph::T, ItemColor::Cyan) as i64;
            let ml = count(&a, ItemGlyph::L, ItemColor::Magenta) as i64;
            assert_eq!(cy + ml, 7);
            assert!((cy - ml).abs() == 1);
        }
    }

    #[test]
    fn orientation_mode_and_lone_target() {
        let mut rng = SeedTree::new(3).stream("s");
        let l = SearchLayout::default();
        let a = gen_search_array(SearchMode::Orientation, 6, &l, &mut rng).unwrap();
        assert_eq!(count(&a, ItemGlyph::L, ItemColor::Magenta), 5);
        for m in [SearchMode::Orientation, SearchMode::Color, SearchMode::Conjunction] {
            let a = gen_search_array(m, 1, &l, &mut rng).unwrap();
            assert_eq!(a.items.len(), 1);
            assert!(a.items[0].is_target);
            assert_eq!((a.items[0].glyph, a.items[0].color), (ItemGlyph::T, ItemColor::Magenta));
        }
    }

    #[test]
    fn items_disjoint_and_on_screen() {
        let mut rng = SeedTree::new(4).stream("s");
        let l = SearchLayout::default();
        for _ in 0..200 {
            let a = gen_search_array(SearchMode::Conjunction, 16, &l, &mut rng).unwrap();
            for (i, p) in a.items.iter().enumerate() {
                assert!(p.pos.0 >= 0.0 && p.pos.1 >= 0.0);
                assert!(p.pos.0 + p.size <= 1.0 && p.pos.1 + p.size <= 1.0);
                for q in &a.items[i + 1..] {
                    let sep_x = p.pos.0 + p.size <= q.pos.0 || q.pos.0 + q.size <= p.pos.0;
                    let sep_y = p.pos.1 + p.size <= q.pos.1 || q.pos.1 + q.size <= p.pos.1;
                    assert!(sep_x || sep_y);
                }
            }
        }
    }

    #[test]
    fn target_cell_is_uniform() {
        let mut rng = SeedTree::new(5).stream("s");
        let l = SearchLayout::default();
        let mut hist = vec![0usize; 25];
        let n = 25_000;
        for _ in 0..n {
            let a = gen_search_array(SearchMode::Color, 4, &l, &mut rng).unwrap();
            let (c, r) = a.target().cell;
            hist[r * 5 + c] += 1;
        }
        let e = n as f64 / 25.0;
        let chi2: f64 = hist.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        // 24 dof, p = 0.001 critical value
        assert!(chi2 < 51.18, "chi2 {chi2}");
    }

    #[test]
    fn errors() {
        let mut rng = SeedTree::new(6).stream("s");
        let l = SearchLayout::default();
        assert!(gen_search_array(SearchMode::Color, 0, &l, &mut rng).is_err());
        assert!(gen_search_array(SearchMode::Color, 26, &l, &mut rng).is_err());
    }
}
