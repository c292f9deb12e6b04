//! Gaze kinematics and the eye-to-monitor projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direction of gaze in degrees. Positive yaw looks right, positive pitch looks up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GazeState {
    pub yaw: f64,
    pub pitch: f64,
}

impl GazeState {
    pub const CENTER: GazeState = GazeState {
        yaw: 0.0,
        pitch: 0.0,
    };

    pub fn new(yaw: f64, pitch: f64) -> Self {
        Self { yaw, pitch }
    }
}

/// Per-step change of gaze, degrees per step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GazeAction {
    pub d_yaw: f64,
    pub d_pitch: f64,
}

impl GazeAction {
    pub const NOOP: GazeAction = GazeAction {
        d_yaw: 0.0,
        d_pitch: 0.0,
    };

    pub fn new(d_yaw: f64, d_pitch: f64) -> Self {
        Self { d_yaw, d_pitch }
    }
}

/// Discrete action set for agents with a categorical action head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscreteAction {
    Noop,
    Look(LookDirection, Magnitude),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LookDirection {
    Left,
    Right,
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Magnitude {
    Small,
    Large,
}

impl DiscreteAction {
    /// All nine actions, `Noop` first.
    pub fn all() -> Vec<DiscreteAction> {
        let mut v = vec![DiscreteAction::Noop];
        for d in [
            LookDirection::Left,
            LookDirection::Right,
            LookDirection::Up,
            LookDirection::Down,
        ] {
            for m in [Magnitude::Small, Magnitude::Large] {
                v.push(DiscreteAction::Look(d, m));
            }
        }
        v
    }

    /// Continuous action; `Large` is the full rate limit, `Small` a fifth of it.
    pub fn to_gaze_action(self, max_rate: f64) -> GazeAction {
        match self {
            DiscreteAction::Noop => GazeAction::NOOP,
            DiscreteAction::Look(dir, mag) => {
                let r = match mag {
                    Magnitude::Small => max_rate / 5.0,
                    Magnitude::Large => max_rate,
                };
                match dir {
                    LookDirection::Left => GazeAction::new(-r, 0.0),
                    LookDirection::Right => GazeAction::new(r, 0.0),
                    LookDirection::Up => GazeAction::new(0.0, r),
                    LookDirection::Down => GazeAction::new(0.0, -r),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GazeLimits {
    pub yaw_max: f64,
    pub pitch_max: f64,
    pub max_rate: f64,
}

impl Default for GazeLimits {
    fn default() -> Self {
        Self {
            yaw_max: 60.0,
            pitch_max: 60.0,
            max_rate: 2.5,
        }
    }
}

/// Rate-clamp the action, then clamp the resulting gaze to the limits.
pub fn apply_action(gaze: GazeState, action: GazeAction, limits: &GazeLimits) -> Result<GazeState> {
    let all = [gaze.yaw, gaze.pitch, action.d_yaw, action.d_pitch];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input(format!(
            "non-finite gaze or action: {gaze:?} {action:?}"
        )));
    }
    let r = limits.max_rate;
    let yaw = (gaze.yaw + action.d_yaw.clamp(-r, r)).clamp(-limits.yaw_max, limits.yaw_max);
    let pitch =
        (gaze.pitch + action.d_pitch.clamp(-r, r)).clamp(-limits.pitch_max, limits.pitch_max);
    Ok(GazeState { yaw, pitch })
}

/// A point on the screen texture, in texels; `x` grows rightward, `y` downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenPoint {
    pub x: f64,
    pub y: f64,
}

impl ScreenPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct MonitorGeometry {
    /// Eye to monitor plane, scene units.
    pub distance: f64,
    pub monitor_width: f64,
    pub monitor_height: f64,
    pub screen_width: u32,
    pub screen_height: u32,
    /// Color of everything that is not the monitor.
    pub background_color: [u8; 3],
    /// Vertical field of view of the observation camera.
    pub fov_degrees: f64,
}

impl Default for MonitorGeometry {
    fn default() -> Self {
        Self {
            distance: 1.0,
            monitor_width: 1.0,
            monitor_height: 1.0,
            screen_width: 512,
            screen_height: 512,
            background_color: [0, 0, 0],
            fov_degrees: 60.0,
        }
    }
}

impl MonitorGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::config("geometry.distance", "must be > 0"));
        }
        if !(self.monitor_width.is_finite() && self.monitor_width > 0.0) {
            return Err(Error::config("geometry.monitorWidth", "must be > 0"));
        }
        if !(self.monitor_height.is_finite() && self.monitor_height > 0.0) {
            return Err(Error::config("geometry.monitorHeight", "must be > 0"));
        }
        if self.screen_width == 0 || self.screen_height == 0 {
            return Err(Error::config("geometry.screenWidth", "screen must be non-empty"));
        }
        if !(self.fov_degrees > 10.0 && self.fov_degrees < 120.0) {
            return Err(Error::config(
                "geometry.fovDegrees",
                format!("{} outside (10, 120)", self.fov_degrees),
            ));
        }
        let texel_aspect = f64::from(self.screen_width) / f64::from(self.screen_height);
        let phys_aspect = self.monitor_width / self.monitor_height;
        let tol = 1.0 / f64::from(self.screen_width.min(self.screen_height));
        if (texel_aspect / phys_aspect - 1.0).abs() > tol {
            return Err(Error::config(
                "geometry.screenWidth",
                format!(
                    "screen texel aspect {texel_aspect:.4} does not match monitor aspect {phys_aspect:.4}"
                ),
            ));
        }
        Ok(())
    }

    /// Monitor-plane offset (scene units, y up) to texel coordinates.
    pub fn plane_to_texel(&self, x: f64, y: f64) -> ScreenPoint {
        ScreenPoint {
            x: (x / self.monitor_width + 0.5) * f64::from(self.screen_width),
            y: (0.5 - y / self.monitor_height) * f64::from(self.screen_height),
        }
    }

    pub fn texel_to_plane(&self, p: ScreenPoint) -> (f64, f64) {
        (
            (p.x / f64::from(self.screen_width) - 0.5) * self.monitor_width,
            (0.5 - p.y / f64::from(self.screen_height)) * self.monitor_height,
        )
    }

    pub fn contains(&self, p: ScreenPoint) -> bool {
        p.x >= 0.0
            && p.y >= 0.0
            && p.x < f64::from(self.screen_width)
            && p.y < f64::from(self.screen_height)
    }

    /// Where the central gaze ray lands on the screen, if on the monitor at all.
    pub fn gaze_to_screen_point(&self, gaze: GazeState) -> Option<ScreenPoint> {
        let x = self.distance * gaze.yaw.to_radians().tan();
        let y = self.distance * gaze.pitch.to_radians().tan();
        let p = self.plane_to_texel(x, y);
        self.contains(p).then_some(p)
    }

    /// Gaze whose central ray hits `p`.
    pub fn screen_point_to_gaze(&self, p: ScreenPoint) -> GazeState {
        let (x, y) = self.texel_to_plane(p);
        GazeState {
            yaw: (x / self.distance).atan().to_degrees(),
            pitch: (y / self.distance).atan().to_degrees(),
        }
    }

    /// Texel coordinates of a point given in screen fractions (origin bottom-left, y up).
    pub fn fraction_to_texel(&self, fx: f64, fy: f64) -> ScreenPoint {
        ScreenPoint {
            x: fx * f64::from(self.screen_width),
            y: (1.0 - fy) * f64::from(self.screen_height),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_action_is_additive() {
        let l = GazeLimits::default();
        let g = apply_action(GazeState::CENTER, GazeAction::new(1.0, -0.5), &l).unwrap();
        assert_eq!(g, GazeState::new(1.0, -0.5));
    }

    #[test]
    fn apply_action_clamps_at_bound() {
        let l = GazeLimits::default();
        let g = apply_action(GazeState::new(l.yaw_max, 0.0), GazeAction::new(5.0, 0.0), &l).unwrap();
        assert_eq!(g, GazeState::new(l.yaw_max, 0.0));
    }

    #[test]
    fn apply_action_clamps_rate() {
        let l = GazeLimits::default();
        let g = apply_action(GazeState::CENTER, GazeAction::new(100.0, 0.0), &l).unwrap();
        assert_eq!(g, GazeState::new(2.5, 0.0));
    }

    #[test]
    fn apply_action_rejects_nan() {
        let l = GazeLimits::default();
        assert!(apply_action(GazeState::CENTER, GazeAction::new(f64::NAN, 0.0), &l).is_err());
        assert!(apply_action(GazeState::new(f64::INFINITY, 0.0), GazeAction::NOOP, &l).is_err());
    }

    #[test]
    fn center_gaze_hits_center_texel() {
        let g = MonitorGeometry::default();
        let p = g.gaze_to_screen_point(GazeState::CENTER).unwrap();
        assert_eq!(p, ScreenPoint::new(256.0, 256.0));
    }

    #[test]
    fn just_off_right_edge_is_empty() {
        let g = MonitorGeometry::default();
        let yaw = (g.monitor_width / 2.0 + 1e-6).atan2(g.distance).to_degrees();
        assert!(g.gaze_to_screen_point(GazeState::new(yaw, 0.0)).is_none());
        let yaw_in = (g.monitor_width / 2.0 - 1e-3).atan2(g.distance).to_degrees();
        assert!(g.gaze_to_screen_point(GazeState::new(yaw_in, 0.0)).is_some());
    }

    #[test]
    fn quarter_offset_lands_at_75_percent() {
        // distance 1, width 1, tan(yaw) = 0.25: plane x = 0.25, i.e. (0.25 + 0.5) of the width
        let g = MonitorGeometry::default();
        let yaw = 0.25f64.atan().to_degrees();
        let p = g.gaze_to_screen_point(GazeState::new(yaw, 0.0)).unwrap();
        assert!((p.x - 0.75 * 512.0).abs() < 1e-9);
        assert!((p.y - 256.0).abs() < 1e-9);
    }

    #[test]
    fn geometry_validation() {
        let mut g = MonitorGeometry::default();
        assert!(g.validate().is_ok());
        g.distance = 0.0;
        assert!(g.validate().is_err());
        let mut g = MonitorGeometry::default();
        g.fov_degrees = 130.0;
        assert!(g.validate().is_err());
        let mut g = MonitorGeometry::default();
        g.screen_width = 1024;
        assert!(g.validate().is_err());
    }

    #[test]
    fn discrete_actions() {
        let all = DiscreteAction::all();
        assert_eq!(all.len(), 9);
        let a = DiscreteAction::Look(LookDirection::Right, Magnitude::Large).to_gaze_action(2.5);
        assert_eq!(a, GazeAction::new(2.5, 0.0));
        let a = DiscreteAction::Look(LookDirection::Down, Magnitude::Small).to_gaze_action(2.5);
        assert_eq!(a, GazeAction::new(0.0, -0.5));
    }
}
