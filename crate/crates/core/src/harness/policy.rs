//! Scripted baseline agents.

use image::RgbImage;
use rand::Rng;

use crate::config::EnvConfig;
use crate::env::{apply_action, GazeAction, GazeLimits, GazeState, MonitorGeometry, PrivilegedInfo, ScreenPoint, StepInfo};
use crate::error::{Error, Result};
use crate::rng::{SeedTree, StreamRng};
use crate::tasks::{ResponseTarget, TrialPhase};

pub trait Policy: Send {
    fn name(&self) -> &str;

    /// Whether `act` needs the privileged channel.
    fn requires_privileged(&self) -> bool {
        false
    }

    /// Called after every reset with that episode's seed.
    fn begin_episode(&mut self, _seed: u64) {}

    fn act(&mut self, observation: &RgbImage, info: &StepInfo) -> Result<GazeAction>;
}

pub const DEFAULT_GAIN: f64 = 0.4;

/// Proportional step toward `target`, capped at `max_rate` per axis.
pub fn steer(gaze: GazeState, target: GazeState, gain: f64, max_rate: f64) -> GazeAction {
    let c = |d: f64| (gain * d).clamp(-max_rate, max_rate);
    GazeAction::new(c(target.yaw - gaze.yaw), c(target.pitch - gaze.pitch))
}

fn privileged<'a>(info: &'a StepInfo, who: &str) -> Result<&'a PrivilegedInfo> {
    info.privileged
        .as_ref()
        .ok_or_else(|| Error::Policy(format!("{who} policy needs the privileged info channel")))
}

fn require_privileged(config: &EnvConfig, who: &str) -> Result<()> {
    if config.privileged {
        Ok(())
    } else {
        Err(Error::Policy(format!("{who} policy needs `privileged = true`")))
    }
}

/// Shared gaze control for the privileged policies.
#[derive(Debug, Clone)]
struct Controller {
    geometry: MonitorGeometry,
    gain: f64,
    max_rate: f64,
}

impl Controller {
    fn new(config: &EnvConfig, gain: f64) -> Self {
        Self {
            geometry: config.geometry.clone(),
            gain,
            max_rate: config.gaze.max_rate,
        }
    }

    fn toward(&self, info: &PrivilegedInfo, p: ScreenPoint) -> GazeAction {
        steer(info.gaze, self.geometry.screen_point_to_gaze(p), self.gain, self.max_rate)
    }

    fn center(&self) -> ScreenPoint {
        ScreenPoint::new(
            f64::from(self.geometry.screen_width) / 2.0,
            f64::from(self.geometry.screen_height) / 2.0,
        )
    }

    /// Fixate the cross, rest at the center through presentation, and go to
    /// the response labelled `choice` once responses are up.
    fn drive(&self, info: &PrivilegedInfo, choice: Option<&str>) -> GazeAction {
        let target = match info.phase {
            TrialPhase::AwaitFixation => info.fixation_target.unwrap_or_else(|| self.center()),
            TrialPhase::Response => choice
                .and_then(|c| find(&info.response_targets, c))
                .map_or_else(|| self.center(), |t| t.center),
            _ => self.center(),
        };
        self.toward(info, target)
    }
}

fn find<'a>(targets: &'a [ResponseTarget], label: &str) -> Option<&'a ResponseTarget> {
    targets.iter().find(|t| t.label == label)
}

/// Reads the ground truth and looks straight at the correct response.
pub struct OraclePolicy {
    ctl: Controller,
}

impl OraclePolicy {
    pub fn new(config: &EnvConfig) -> Result<Self> {
        require_privileged(config, "oracle")?;
        Ok(Self {
            ctl: Controller::new(config, DEFAULT_GAIN),
        })
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.ctl.gain = gain;
        self
    }
}

impl Policy for OraclePolicy {
    fn name(&self) -> &str {
        "oracle"
    }

    fn requires_privileged(&self) -> bool {
        true
    }

    fn act(&mut self, _obs: &RgbImage, info: &StepInfo) -> Result<GazeAction> {
        let p = privileged(info, "oracle")?;
        Ok(self.ctl.drive(p, p.correct_response.as_deref()))
    }
}

/// Accuracy as a function of the hardest current level.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyProfile {
    /// `(first level, last level, accuracy)`, inclusive ranges.
    ranges: Vec<(usize, usize, f64)>,
    default: f64,
}

impl AccuracyProfile {
    pub fn constant(p: f64) -> Self {
        Self {
            ranges: Vec::new(),
            default: p,
        }
    }

    /// Comma-separated `LEVELS=ACC` entries where LEVELS is `a-b`, `a` or `*`,
    /// e.g. `1-7=0.95,*=0.2`. Earlier entries win.
    pub fn parse(spec: &str) -> Result<Self> {
        let err = |m: String| Error::config("policy", format!("bad accuracy profile `{spec}`: {m}"));
        let mut ranges = Vec::new();
        let mut default = None;
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (lv, acc) = part.split_once('=').ok_or_else(|| err(format!("`{part}` lacks `=`")))?;
            let acc: f64 = acc.trim().parse().map_err(|_| err(format!("`{acc}` is not a number")))?;
            if !(0.0..=1.0).contains(&acc) {
                return Err(err(format!("accuracy {acc} outside [0, 1]")));
            }
            let lv = lv.trim();
            if lv == "*" {
                default.get_or_insert(acc);
                continue;
            }
            let (a, b) = match lv.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (lv, lv),
            };
            let a: usize = a.parse().map_err(|_| err(format!("bad level `{a}`")))?;
            let b: usize = b.parse().map_err(|_| err(format!("bad level `{b}`")))?;
            if a == 0 || b < a {
                return Err(err(format!("bad level range {a}-{b}")));
            }
            ranges.push((a, b, acc));
        }
        if ranges.is_empty() && default.is_none() {
            return Err(err("no entries".into()));
        }
        Ok(Self {
            ranges,
            default: default.unwrap_or(0.0),
        })
    }

    pub fn accuracy(&self, level: usize) -> f64 {
        self.ranges
            .iter()
            .find(|(a, b, _)| (*a..=*b).contains(&level))
            .map_or(self.default, |r| r.2)
    }
}

/// Answers correctly with a level-dependent probability, otherwise picks
/// uniformly among the wrong responses.
pub struct NoisyOraclePolicy {
    ctl: Controller,
    profile: AccuracyProfile,
    seed: u64,
    rng: StreamRng,
    decided: Option<(u64, String)>,
}

impl NoisyOraclePolicy {
    pub fn new(config: &EnvConfig, profile: AccuracyProfile, seed: u64) -> Result<Self> {
        require_privileged(config, "noisy")?;
        Ok(Self {
            ctl: Controller::new(config, DEFAULT_GAIN),
            profile,
            seed,
            rng: SeedTree::new(seed).stream("noisy"),
            decided: None,
        })
    }
}

impl Policy for NoisyOraclePolicy {
    fn name(&self) -> &str {
        "noisy"
    }

    fn requires_privileged(&self) -> bool {
        true
    }

    fn begin_episode(&mut self, seed: u64) {
        self.rng = SeedTree::new(seed ^ self.seed).stream("noisy");
        self.decided = None;
    }

    fn act(&mut self, _obs: &RgbImage, info: &StepInfo) -> Result<GazeAction> {
        let p = privileged(info, "noisy")?;
        if p.phase == TrialPhase::Response && self.decided.as_ref().is_none_or(|d| d.0 != info.trial_index) {
            let correct = p.correct_response.clone().unwrap_or_default();
            let level = p.levels.as_ref().and_then(|l| l.iter().copied().max()).unwrap_or(1);
            let choice = if self.rng.gen::<f64>() < self.profile.accuracy(level) {
                correct
            } else {
                let wrong: Vec<&ResponseTarget> = p.response_targets.iter().filter(|t| t.label != correct).collect();
                if wrong.is_empty() {
                    correct
                } else {
                    wrong[self.rng.gen_range(0..wrong.len())].label.clone()
                }
            };
            self.decided = Some((info.trial_index, choice));
        }
        let choice = self
            .decided
            .as_ref()
            .filter(|d| d.0 == info.trial_index)
            .map(|d| d.1.as_str());
        Ok(self.ctl.drive(p, choice))
    }
}

/// Visits search items in raster order, dwelling on each until it is
/// identified, and commits on the target.
pub struct ScannerPolicy {
    ctl: Controller,
    /// Steps spent on an item before moving on.
    pub dwell: u64,
    /// Grid row band in texels: (top of the grid, row height).
    rows: (f64, f64),
    trial: Option<u64>,
    order: Vec<ResponseTarget>,
    next: usize,
    on_item: u64,
}

impl ScannerPolicy {
    pub fn new(config: &EnvConfig) -> Result<Self> {
        require_privileged(config, "scanner")?;
        if config.task != "search" {
            return Err(Error::Policy(format!("scanner policy needs the search task, not `{}`", config.task)));
        }
        let l = &config.search.layout;
        let h = f64::from(config.geometry.screen_height);
        let rows = ((1.0 - l.origin.1 - l.extent.1) * h, l.extent.1 / l.rows as f64 * h);
        Ok(Self {
            ctl: Controller::new(config, DEFAULT_GAIN),
            dwell: 8,
            rows,
            trial: None,
            order: Vec::new(),
            next: 0,
            on_item: 0,
        })
    }
}

impl Policy for ScannerPolicy {
    fn name(&self) -> &str {
        "scanner"
    }

    fn requires_privileged(&self) -> bool {
        true
    }

    fn begin_episode(&mut self, _seed: u64) {
        self.trial = None;
    }

    fn act(&mut self, _obs: &RgbImage, info: &StepInfo) -> Result<GazeAction> {
        let p = privileged(info, "scanner")?;
        if p.phase != TrialPhase::Response {
            return Ok(self.ctl.drive(p, None));
        }
        if self.trial != Some(info.trial_index) {
            self.trial = Some(info.trial_index);
            self.order = p.response_targets.clone();
            // rows top to bottom, then left to right
            let (top, row_h) = self.rows;
            self.order.sort_by(|a, b| {
                let ra = ((a.center.y - top) / row_h).floor();
                let rb = ((b.center.y - top) / row_h).floor();
                ra.total_cmp(&rb).then(a.center.x.total_cmp(&b.center.x))
            });
            self.next = 0;
            self.on_item = 0;
        }
        let Some(item) = self.order.get(self.next).cloned() else {
            return Ok(GazeAction::NOOP);
        };
        let is_target = p.correct_response.as_deref() == Some(item.label.as_str());
        let point = self.ctl.geometry.gaze_to_screen_point(p.gaze);
        let (x0, y0, x1, y1) = item.rect;
        let inside = point.is_some_and(|q| {
            q.x >= f64::from(x0) && q.x < f64::from(x1) && q.y >= f64::from(y0) && q.y < f64::from(y1)
        });
        if inside {
            self.on_item += 1;
            if !is_target && self.on_item >= self.dwell {
                self.next += 1;
                self.on_item = 0;
            }
        }
        Ok(self.ctl.toward(p, item.center))
    }
}

/// Random saccades. Without the privileged channel it tracks its own gaze
/// and jumps between random monitor points; with it, it fixates the cross
/// and then commits to a uniformly random response.
pub struct RandomPolicy {
    seed: u64,
    rng: StreamRng,
    geometry: MonitorGeometry,
    limits: GazeLimits,
    ctl: Controller,
    gaze: GazeState,
    target: Option<GazeState>,
    dwell_left: u64,
    choice: Option<(u64, String)>,
}

impl RandomPolicy {
    pub fn new(config: &EnvConfig, seed: u64) -> Self {
        Self {
            seed,
            rng: SeedTree::new(seed).stream("random"),
            geometry: config.geometry.clone(),
            limits: config.gaze,
            ctl: Controller::new(config, DEFAULT_GAIN),
            gaze: GazeState::CENTER,
            target: None,
            dwell_left: 0,
            choice: None,
        }
    }

    fn saccade(&mut self) -> Result<GazeAction> {
        if self.dwell_left > 0 {
            self.dwell_left -= 1;
            return Ok(GazeAction::NOOP);
        }
        let target = match self.target {
            Some(t) => t,
            None => {
                let t = if self.rng.gen_range(0..3) == 0 {
                    GazeState::CENTER
                } else {
                    let p = ScreenPoint::new(
                        self.rng.gen_range(0.0..f64::from(self.geometry.screen_width)),
                        self.rng.gen_range(0.0..f64::from(self.geometry.screen_height)),
                    );
                    self.geometry.screen_point_to_gaze(p)
                };
                self.target = Some(t);
                t
            }
        };
        let r = self.limits.max_rate;
        let a = GazeAction::new(
            (target.yaw - self.gaze.yaw).clamp(-r, r),
            (target.pitch - self.gaze.pitch).clamp(-r, r),
        );
        self.gaze = apply_action(self.gaze, a, &self.limits)?;
        if (self.gaze.yaw - target.yaw).abs() < 1e-9 && (self.gaze.pitch - target.pitch).abs() < 1e-9 {
            self.target = None;
            self.dwell_left = self.rng.gen_range(10..=50);
        }
        Ok(a)
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn begin_episode(&mut self, seed: u64) {
        self.rng = SeedTree::new(seed ^ self.seed).stream("random");
        self.gaze = GazeState::CENTER;
        self.target = None;
        self.dwell_left = 0;
        self.choice = None;
    }

    fn act(&mut self, _obs: &RgbImage, info: &StepInfo) -> Result<GazeAction> {
        let Some(p) = &info.privileged else {
            return self.saccade();
        };
        if p.phase == TrialPhase::Response
            && !p.response_targets.is_empty()
            && self.choice.as_ref().is_none_or(|c| c.0 != info.trial_index)
        {
            let k = self.rng.gen_range(0..p.response_targets.len());
            self.choice = Some((info.trial_index, p.response_targets[k].label.clone()));
        }
        let choice = self
            .choice
            .as_ref()
            .filter(|c| c.0 == info.trial_index)
            .map(|c| c.1.as_str());
        Ok(self.ctl.drive(p, choice))
    }
}

/// Build a policy from its command-line name:
/// `random`, `oracle`, `scanner` or `noisy:PROFILE`.
pub fn make_policy(spec: &str, config: &EnvConfig, seed: u64) -> Result<Box<dyn Policy>> {
    Ok(match spec {
        "random" => Box::new(RandomPolicy::new(config, seed)),
        "oracle" => Box::new(OraclePolicy::new(config)?),
        "scanner" => Box::new(ScannerPolicy::new(config)?),
        s => match s.strip_prefix("noisy:") {
            Some(profile) => Box::new(NoisyOraclePolicy::new(config, AccuracyProfile::parse(profile)?, seed)?),
            None => {
                return Err(Error::config(
                    "policy",
                    format!("unknown policy `{s}`; expected random, oracle, scanner or noisy:PROFILE"),
                ))
            }
        },
    })
}

/// Whether the named policy reads the privileged channel.
pub fn policy_needs_privileged(spec: &str) -> bool {
    spec != "random"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_parsing() {
        let p = AccuracyProfile::parse("1-7=0.95,*=0.2").unwrap();
        assert_eq!(p.accuracy(1), 0.95);
        assert_eq!(p.accuracy(7), 0.95);
        assert_eq!(p.accuracy(8), 0.2);
        let q = AccuracyProfile::parse("3=1").unwrap();
        assert_eq!(q.accuracy(3), 1.0);
        assert_eq!(q.accuracy(2), 0.0);
        assert!(AccuracyProfile::parse("").is_err());
        assert!(AccuracyProfile::parse("1-7=1.5").is_err());
        assert!(AccuracyProfile::parse("7-1=0.5").is_err());
    }

    #[test]
    fn oracle_needs_privileged() {
        let cfg = EnvConfig::default();
        assert!(matches!(OraclePolicy::new(&cfg), Err(Error::Policy(_))));
        assert!(make_policy("scanner", &cfg, 0).is_err());
        assert!(make_policy("bogus", &cfg, 0).is_err());
        assert!(make_policy("random", &cfg, 0).is_ok());
    }

    #[test]
    fn steer_is_capped() {
        let a = steer(GazeState::CENTER, GazeState::new(100.0, -1.0), 0.4, 2.5);
        assert_eq!(a, GazeAction::new(2.5, -0.4));
    }
}
