//! Reset an environment, steer the gaze onto the fixation cross with a
//! hand-written controller, and save what the agent sees.
//!
//!     cargo run --example quickstart -- /tmp

use std::path::PathBuf;

use psychlab::config::EnvConfig;
use psychlab::env::{Env, GazeAction};

fn main() -> psychlab::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut cfg = EnvConfig::for_task("glass");
    cfg.privileged = true;
    let mut env = Env::new(cfg)?;
    let first = env.reset(7)?;
    first.save(out.join("quickstart-reset.png")).map_err(|e| std::io::Error::other(e.to_string()))?;

    // look a little off-center first so there is something to correct
    for _ in 0..4 {
        env.step(GazeAction::new(2.0, 1.0))?;
    }
    let mut last = None;
    for _ in 0..120 {
        let info = env.info();
        let p = info.privileged.expect("privileged mode");
        let Some(target) = p.fixation_target else { break };
        let want = env.geometry().screen_point_to_gaze(target);
        let a = GazeAction::new(0.4 * (want.yaw - p.gaze.yaw), 0.4 * (want.pitch - p.gaze.pitch));
        last = Some(env.step(a)?);
    }
    let r = last.expect("at least one step");
    println!(
        "step {} phase {:?}, gaze ({:.2}, {:.2})",
        r.info.step_index,
        env.privileged_info().phase,
        env.gaze().yaw,
        env.gaze().pitch
    );
    r.observation
        .save(out.join("quickstart-stimulus.png"))
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    println!("wrote {}", out.display());
    Ok(())
}
