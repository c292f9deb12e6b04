//! A complete task written directly on the widget kit: a target square
//! appears at a random spot, and resting the gaze on it for ten ticks pays
//! one reward and moves it. No trial runner, no staircase.
//!
//!     cargo run --example point_to_target

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psychlab::env::{apply_action, Camera, GazeAction, GazeLimits, GazeState, MonitorGeometry};
use psychlab::raster::{filled, GRAY, MAGENTA};
use psychlab::widget::{Api, Widget, WidgetKit};

const SIZE: f64 = 0.1;

struct Ctx {
    rng: ChaCha8Rng,
    hits: u32,
}

fn target(ctx: &mut Ctx) -> Widget<Ctx> {
    let pos = (ctx.rng.gen_range(0.0..1.0 - SIZE), ctx.rng.gen_range(0.0..1.0 - SIZE));
    Widget::new("target", filled(16, 16, MAGENTA), pos, (SIZE, SIZE)).on_hover(
        |ctx: &mut Ctx, api: &mut Api<Ctx>, ev| {
            if ev.hover_time == 10 {
                ctx.hits += 1;
                api.add_reward(1.0).unwrap();
                api.remove_widget("target");
                // reappear elsewhere after a short blank
                api.add_timer("respawn", 15, |ctx: &mut Ctx, api: &mut Api<Ctx>| {
                    let w = target(ctx);
                    api.add_widget(w);
                });
            }
        },
    )
}

fn main() {
    let geom = MonitorGeometry::default();
    let limits = GazeLimits::default();
    let camera = Camera::new(84, 84, geom.fov_degrees, false);
    let mut kit = WidgetKit::new(geom.screen_width, geom.screen_height, GRAY);
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(3),
        hits: 0,
    };
    let first = target(&mut ctx);
    kit.add_widget(first).unwrap();

    let mut gaze = GazeState::CENTER;
    let mut reward = 0.0;
    for _ in 0..2000 {
        // a scripted agent that reads the widget layout; a learning agent
        // would get only the camera image
        let action = match kit.widget_rect("target") {
            Some(r) => {
                let want = geom.screen_point_to_gaze(r.center());
                GazeAction::new(0.4 * (want.yaw - gaze.yaw), 0.4 * (want.pitch - gaze.pitch))
            }
            None => GazeAction::NOOP,
        };
        gaze = apply_action(gaze, action, &limits).unwrap();
        kit.dispatch_tick(geom.gaze_to_screen_point(gaze), &mut ctx).unwrap();
        reward += kit.take_reward();
    }
    let view = camera.render(kit.screen(), gaze, &geom);
    println!("{} hits, reward {reward}, last frame {}x{}", ctx.hits, view.width(), view.height());
}
