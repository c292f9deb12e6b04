//! Adaptive difficulty staircase with base, advance, and probe trials.
//!
//! Each new trial is, equiprobably, a *base* trial at the current level `c`,
//! an *advance* trial at `c + 1`, or a *probe* trial at a level drawn
//! uniformly from `1..=c`. The base level is promoted when the sliding window
//! of advance outcomes is full and at least 75% correct, and demoted when the
//! window of base outcomes is full and strictly below 50% correct. Probe
//! outcomes never move the level.
//!
//! The multi-dimensional form keeps one level per dimension; the advance case
//! is split equiprobably between dimensions, each incrementing only its own
//! dimension. Levels are 1-based throughout.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `r_1..r_K`: trial parameter sets in increasing order of difficulty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyLadder<P> {
    levels: Vec<P>,
}

impl<P> DifficultyLadder<P> {
    pub fn new(levels: Vec<P>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::config("staircase", "difficulty ladder must have at least one level"));
        }
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Parameters at 1-based `level`.
    pub fn level(&self, level: usize) -> &P {
        &self.levels[level - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &P> {
        self.levels.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CaseKind {
    Base,
    /// Advance along the given 0-based dimension.
    Advance(usize),
    Probe,
}

impl CaseKind {
    pub fn label(&self) -> String {
        match self {
            CaseKind::Base => "base".into(),
            CaseKind::Advance(0) => "advance".into(),
            CaseKind::Advance(d) => format!("advance{}", d + 1),
            CaseKind::Probe => "probe".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialCase {
    pub kind: CaseKind,
    /// Sampled 1-based level per dimension.
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelChange {
    Promoted { dim: usize, to: usize },
    Demoted { dim: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct StaircaseConfig {
    /// Off: every trial is drawn at the initial (or fixed) levels.
    pub enabled: bool,
    /// Minimum window capacity; windows hold `max(c, wMin)` outcomes.
    pub w_min: usize,
    pub initial_level: usize,
    /// Pin every dimension to these levels (disables adaptation).
    pub fixed_levels: Option<Vec<usize>>,
}

impl Default for StaircaseConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            w_min: 3,
            initial_level: 1,
            fixed_levels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Dimension {
    k: usize,
    base: usize,
    advance_window: VecDeque<bool>,
    base_window: VecDeque<bool>,
}

impl Dimension {
    fn capacity(&self, w_min: usize) -> usize {
        self.base.max(w_min)
    }

    fn clear(&mut self) {
        self.advance_window.clear();
        self.base_window.clear();
    }
}

fn push(window: &mut VecDeque<bool>, cap: usize, v: bool) {
    window.push_back(v);
    while window.len() > cap {
        window.pop_front();
    }
}

fn correct_count(w: &VecDeque<bool>) -> usize {
    w.iter().filter(|&&b| b).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    dims: Vec<Dimension>,
    w_min: usize,
    initial: usize,
    pinned: Option<Vec<usize>>,
}

impl Staircase {
    /// One dimension per entry of `sizes` (the ladder lengths `K`).
    pub fn new(sizes: &[usize], config: &StaircaseConfig) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::config("staircase", "every dimension needs at least one level"));
        }
        if config.w_min == 0 {
            return Err(Error::config("staircase.wMin", "must be >= 1"));
        }
        if config.initial_level == 0 {
            return Err(Error::config("staircase.initialLevel", "levels are 1-based"));
        }
        let pinned = match &config.fixed_levels {
            Some(levels) => {
                if levels.len() != sizes.len() {
                    return Err(Error::config(
                        "staircase.fixedLevels",
                        format!("expected {} levels, got {}", sizes.len(), levels.len()),
                    ));
                }
                if levels.iter().zip(sizes).any(|(l, k)| *l == 0 || l > k) {
                    return Err(Error::config("staircase.fixedLevels", "level out of range"));
                }
                Some(levels.clone())
            }
            None if !config.enabled => Some(
                sizes
                    .iter()
                    .map(|k| config.initial_level.min(*k))
                    .collect(),
            ),
            None => None,
        };
        let dims = sizes
            .iter()
            .map(|&k| Dimension {
                k,
                base: config.initial_level.min(k),
                advance_window: VecDeque::new(),
                base_window: VecDeque::new(),
            })
            .collect();
        Ok(Self {
            dims,
            w_min: config.w_min,
            initial: config.initial_level,
            pinned,
        })
    }

    pub fn one_dimensional(k: usize) -> Result<Self> {
        Self::new(&[k], &StaircaseConfig::default())
    }

    pub fn dimensions(&self) -> usize {
        self.dims.len()
    }

    /// Current base level per dimension.
    pub fn base_levels(&self) -> Vec<usize> {
        match &self.pinned {
            Some(p) => p.clone(),
            None => self.dims.iter().map(|d| d.base).collect(),
        }
    }

    pub fn base(&self) -> usize {
        self.base_levels()[0]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.k).collect()
    }

    pub fn is_adaptive(&self) -> bool {
        self.pinned.is_none()
    }

    pub fn window_lengths(&self, dim: usize) -> (usize, usize) {
        let d = &self.dims[dim];
        (d.advance_window.len(), d.base_window.len())
    }

    /// Choose the case of the next trial and its levels.
    pub fn next_case<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialCase {
        if let Some(p) = &self.pinned {
            return TrialCase {
                kind: CaseKind::Base,
                levels: p.clone(),
            };
        }
        let n = self.dims.len();
        let r = rng.gen_range(0..3 * n);
        let bases: Vec<usize> = self.dims.iter().map(|d| d.base).collect();
        if r < n {
            TrialCase {
                kind: CaseKind::Base,
                levels: bases,
            }
        } else if r < 2 * n {
            let dim = r - n;
            let mut levels = bases;
            levels[dim] = (levels[dim] + 1).min(self.dims[dim].k);
            TrialCase {
                kind: CaseKind::Advance(dim),
                levels,
            }
        } else {
            let levels = self
                .dims
                .iter()
                .map(|d| rng.gen_range(1..=d.base))
                .collect();
            TrialCase {
                kind: CaseKind::Probe,
                levels,
            }
        }
    }

    /// Case and the ladder parameters for each dimension.
    pub fn next_trial<'a, P, R: Rng + ?Sized>(
        &self,
        ladders: &'a [DifficultyLadder<P>],
        rng: &mut R,
    ) -> Result<(Vec<&'a P>, TrialCase)> {
        if ladders.len() != self.dims.len() {
            return Err(Error::config(
                "staircase",
                format!("{} ladders for {} dimensions", ladders.len(), self.dims.len()),
            ));
        }
        if ladders.iter().any(|l| l.is_empty()) {
            return Err(Error::config("staircase", "empty ladder"));
        }
        let case = self.next_case(rng);
        let params = ladders
            .iter()
            .zip(&case.levels)
            .map(|(l, &lv)| l.level(lv.min(l.len())))
            .collect();
        Ok((params, case))
    }

    /// Record a trial outcome; returns the level changes it caused.
    pub fn record(&mut self, case: &TrialCase, correct: bool) -> Vec<LevelChange> {
        if self.pinned.is_some() {
            return Vec::new();
        }
        let w_min = self.w_min;
        let mut changes = Vec::new();
        let touched: Vec<usize> = match case.kind {
            CaseKind::Probe => return changes,
            CaseKind::Base => {
                for d in &mut self.dims {
                    let cap = d.capacity(w_min);
                    push(&mut d.base_window, cap, correct);
                }
                (0..self.dims.len()).collect()
            }
            CaseKind::Advance(dim) => {
                let d = &mut self.dims[dim];
                let cap = d.capacity(w_min);
                push(&mut d.advance_window, cap, correct);
                vec![dim]
            }
        };
        for dim in touched {
            let d = &mut self.dims[dim];
            let cap = d.capacity(w_min);
            let adv = &d.advance_window;
            if d.base < d.k && adv.len() >= cap && 4 * correct_count(adv) >= 3 * adv.len() {
                d.base += 1;
                d.clear();
                changes.push(LevelChange::Promoted { dim, to: d.base });
                continue;
            }
            let bw = &d.base_window;
            if bw.len() >= cap && 2 * correct_count(bw) < bw.len() {
                d.base = d.base.saturating_sub(1).max(1);
                d.clear();
                changes.push(LevelChange::Demoted { dim, to: d.base });
            }
        }
        changes
    }

    /// Back to the initial level with empty windows.
    pub fn reset(&mut self) {
        let initial = self.initial;
        for d in &mut self.dims {
            d.base = initial.min(d.k);
            d.clear();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn at_level(k: usize, c: usize) -> Staircase {
        let cfg = StaircaseConfig {
            initial_level: c,
            ..Default::default()
        };
        Staircase::new(&[k], &cfg).unwrap()
    }

    fn adv() -> TrialCase {
        TrialCase {
            kind: CaseKind::Advance(0),
            levels: vec![0],
        }
    }

    fn base() -> TrialCase {
        TrialCase {
            kind: CaseKind::Base,
            levels: vec![0],
        }
    }

    #[test]
    fn promote_at_exactly_75_percent() {
        let mut s = at_level(10, 4);
        for c in [true, true, true] {
            assert!(s.record(&adv(), c).is_empty());
        }
        let ch = s.record(&adv(), false);
        assert_eq!(ch, vec![LevelChange::Promoted { dim: 0, to: 5 }]);
        assert_eq!(s.base(), 5);
        assert_eq!(s.window_lengths(0), (0, 0));
    }

    #[test]
    fn no_promotion_below_75_percent() {
        let mut s = at_level(10, 4);
        for c in [true, true, false, false] {
            s.record(&adv(), c);
        }
        assert_eq!(s.base(), 4);
    }

    #[test]
    fn demote_strictly_below_half() {
        let mut s = at_level(10, 4);
        for c in [false, false, true, false] {
            s.record(&base(), c);
        }
        assert_eq!(s.base(), 3);
        // exactly 50% does not demote
        let mut s = at_level(10, 4);
        for c in [false, true, true, false] {
            s.record(&base(), c);
        }
        assert_eq!(s.base(), 4);
    }

    #[test]
    fn probes_never_move() {
        let mut s = at_level(10, 4);
        let p = TrialCase {
            kind: CaseKind::Probe,
            levels: vec![2],
        };
        for _ in 0..50 {
            assert!(s.record(&p, false).is_empty());
        }
        assert_eq!(s.base(), 4);
        assert_eq!(s.window_lengths(0), (0, 0));
    }

    #[test]
    fn window_has_min_capacity() {
        // at c=1 the window is max(1, 3) = 3
        let mut s = at_level(5, 1);
        s.record(&adv(), true);
        s.record(&adv(), true);
        assert_eq!(s.base(), 1);
        s.record(&adv(), true);
        assert_eq!(s.base(), 2);
    }

    #[test]
    fn demotion_floor_is_one() {
        let mut s = at_level(5, 1);
        for _ in 0..3 {
            s.record(&base(), false);
        }
        assert_eq!(s.base(), 1);
    }

    #[test]
    fn degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = at_level(5, 1);
        let s_top = at_level(5, 5);
        for _ in 0..200 {
            let c = s.next_case(&mut rng);
            if c.kind == CaseKind::Probe {
                assert_eq!(c.levels, vec![1]);
            }
            let c = s_top.next_case(&mut rng);
            if c.kind == CaseKind::Advance(0) {
                assert_eq!(c.levels, vec![5]);
            }
            if c.kind == CaseKind::Base {
                assert_eq!(c.levels, vec![5]);
            }
        }
    }

    #[test]
    fn reset_returns_to_one() {
        let mut s = Staircase::one_dimensional(10).unwrap();
        while s.base() < 7 {
            s.record(&adv(), true);
        }
        s.record(&adv(), true);
        s.reset();
        assert_eq!(s.base(), 1);
        assert_eq!(s.window_lengths(0), (0, 0));
        let fresh = Staircase::one_dimensional(10).unwrap();
        let mut again = fresh.clone();
        again.reset();
        assert_eq!(again, fresh);
    }

    #[test]
    fn case_frequencies_one_dimensional() {
        let s = at_level(10, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 30_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match s.next_case(&mut rng).kind {
                CaseKind::Base => counts[0] += 1,
                CaseKind::Advance(_) => counts[1] += 1,
                CaseKind::Probe => counts[2] += 1,
            }
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn case_frequencies_two_dimensional() {
        let cfg = StaircaseConfig {
            initial_level: 3,
            ..Default::default()
        };
        let s = Staircase::new(&[6, 6], &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let c = s.next_case(&mut rng);
            match c.kind {
                CaseKind::Base => counts[0] += 1,
                CaseKind::Advance(0) => {
                    assert_eq!(c.levels, vec![4, 3]);
                    counts[1] += 1
                }
                CaseKind::Advance(_) => {
                    assert_eq!(c.levels, vec![3, 4]);
                    counts[2] += 1
                }
                CaseKind::Probe => counts[3] += 1,
            }
        }
        let f: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        assert!((f[0] - 1.0 / 3.0).abs() < 0.01);
        assert!((f[1] - 1.0 / 6.0).abs() < 0.01);
        assert!((f[2] - 1.0 / 6.0).abs() < 0.01);
        assert!((f[3] - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn two_dimensional_probe_at_origin() {
        let s = Staircase::new(&[4, 4], &StaircaseConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let c = s.next_case(&mut rng);
            if c.kind == CaseKind::Probe {
                assert_eq!(c.levels, vec![1, 1]);
            }
        }
    }

    #[test]
    fn two_dimensional_promotes_independently() {
        let mut s = Staircase::new(&[5, 5], &StaircaseConfig::default()).unwrap();
        let a1 = TrialCase {
            kind: CaseKind::Advance(1),
            levels: vec![1, 2],
        };
        for _ in 0..3 {
            s.record(&a1, true);
        }
        assert_eq!(s.base_levels(), vec![1, 2]);
    }

    #[test]
    fn probe_levels_uniform_chi_square() {
        let s = at_level(10, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = [0f64; 6];
        let mut n = 0.0;
        for _ in 0..60_000 {
            let c = s.next_case(&mut rng);
            if c.kind == CaseKind::Probe {
                counts[c.levels[0] - 1] += 1.0;
                n += 1.0;
            }
        }
        let e = n / 6.0;
        let chi2: f64 = counts.iter().map(|o| (o - e).powi(2) / e).sum();
        // 5 degrees of freedom, p = 0.001 critical value
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn ladder_rejects_empty() {
        assert!(DifficultyLadder::<f64>::new(vec![]).is_err());
        let s = Staircase::one_dimensional(3).unwrap();
        let ladders = vec![DifficultyLadder::new(vec![1.0, 2.0, 3.0]).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (p, c) = s.next_trial(&ladders, &mut rng).unwrap();
        assert_eq!(*p[0], ladders[0].level(c.levels[0]).clone());
    }

    #[test]
    fn pinned_levels() {
        let cfg = StaircaseConfig {
            fixed_levels: Some(vec![3, 2]),
            ..Default::default()
        };
        let mut s = Staircase::new(&[5, 5], &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = s.next_case(&mut rng);
        assert_eq!(c.levels, vec![3, 2]);
        assert!(s.record(&c, true).is_empty());
        assert!(Staircase::new(&[5], &cfg).is_err());
    }

    proptest! {
        #[test]
        fn level_stays_in_range_and_moves_by_one(
            seed in any::<u64>(),
            k in 1usize..12,
            outcomes in proptest::collection::vec(any::<bool>(), 1..300),
        ) {
            let mut s = Staircase::one_dimensional(k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for o in outcomes {
                let before = s.base();
                let c = s.next_case(&mut rng);
                prop_assert!(c.levels[0] >= 1 && c.levels[0] <= k);
                s.record(&c, o);
                let after = s.base();
                prop_assert!(after >= 1 && after <= k);
                prop_assert!(before.abs_diff(after) <= 1);
            }
        }
    }

    #[test]
    fn perfect_and_hopeless_observers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = Staircase::one_dimensional(10).unwrap();
        let mut reached = false;
        for _ in 0..2000 {
            let c = s.next_case(&mut rng);
            let before = s.base();
            s.record(&c, true);
            assert!(s.base() >= before, "perfect observer demoted");
            reached |= s.base() == 10;
        }
        assert!(reached);
        assert_eq!(s.base(), 10);

        let mut s = Staircase::one_dimensional(10).unwrap();
        for _ in 0..2000 {
            let c = s.next_case(&mut rng);
            s.record(&c, false);
            assert_eq!(s.base(), 1);
        }
    }
}
