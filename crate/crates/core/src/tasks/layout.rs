//! Placement helpers shared by the paradigms.

use image::RgbaImage;

use super::{ResponseSpec, WidgetSpec};
use crate::config::EnvConfig;
use crate::raster::{fill_disc, rgba, transparent};

/// Place `image` at 1:1 texel scale, centered as close to `center` (screen
/// fractions, y up) as the texel grid allows.
pub fn texel_widget(name: &str, image: RgbaImage, center: (f64, f64), cfg: &EnvConfig) -> WidgetSpec {
    let sw = f64::from(cfg.geometry.screen_width);
    let sh = f64::from(cfg.geometry.screen_height);
    let (iw, ih) = (f64::from(image.width()), f64::from(image.height()));
    let x0 = (center.0 * sw - iw / 2.0).round().clamp(0.0, sw - iw);
    let top = ((1.0 - center.1) * sh - ih / 2.0).round().clamp(0.0, sh - ih);
    WidgetSpec {
        name: name.into(),
        image,
        pos: (x0 / sw, 1.0 - (top + ih) / sh),
        size: (iw / sw, ih / sh),
    }
}

/// A square widget of side `side` (fraction of screen width) centered at `center`.
pub fn square_widget(name: &str, image: RgbaImage, center: (f64, f64), side: f64, cfg: &EnvConfig) -> WidgetSpec {
    let aspect = f64::from(cfg.geometry.screen_width) / f64::from(cfg.geometry.screen_height);
    let h = side * aspect;
    WidgetSpec {
        name: name.into(),
        image,
        pos: (
            (center.0 - side / 2.0).clamp(0.0, 1.0 - side),
            (center.1 - h / 2.0).clamp(0.0, 1.0 - h),
        ),
        size: (side, h),
    }
}

/// A colored disc marker, the default look of a response widget.
pub fn marker(color: [u8; 3]) -> RgbaImage {
    let mut img = transparent(32, 32);
    fill_disc(&mut img, 16.0, 16.0, 15.0, rgba(color));
    fill_disc(&mut img, 16.0, 16.0, 6.0, rgba([255, 255, 255]));
    img
}

pub const YES_COLOR: [u8; 3] = [0, 200, 0];
pub const NO_COLOR: [u8; 3] = [220, 0, 0];

/// Binary response pair at the left and right screen edges. The left
/// option is drawn green, the right one red.
pub fn binary_responses(left: &str, right: &str, cfg: &EnvConfig) -> Vec<ResponseSpec> {
    let s = cfg.screen.response_size;
    let m = s / 2.0 + 0.015;
    vec![
        ResponseSpec {
            label: left.into(),
            widget: square_widget(&format!("respond-{left}"), marker(YES_COLOR), (m, 0.5), s, cfg),
        },
        ResponseSpec {
            label: right.into(),
            widget: square_widget(&format!("respond-{right}"), marker(NO_COLOR), (1.0 - m, 0.5), s, cfg),
        },
    ]
}

/// Response widgets on a ring around the screen center, one per
/// `(label, unit vector)`.
pub fn ring_responses(options: &[(String, (f64, f64), RgbaImage)], radius: f64, cfg: &EnvConfig) -> Vec<ResponseSpec> {
    let s = cfg.screen.response_size;
    options
        .iter()
        .map(|(label, (ux, uy), img)| ResponseSpec {
            label: label.clone(),
            widget: square_widget(
                &format!("respond-{label}"),
                img.clone(),
                (0.5 + radius * ux, 0.5 + radius * uy),
                s,
                cfg,
            ),
        })
        .collect()
}

/// Largest ring radius that keeps square response widgets on screen.
pub fn ring_radius(cfg: &EnvConfig) -> f64 {
    0.5 - cfg.screen.response_size / 2.0 - 0.015
}
