//! Compare a plain 84x84 observation with one rendered at 168x168 and
//! foveated down to 84x84, which keeps central detail and compresses the
//! periphery.
//!
//!     cargo run --example foveated_observation -- /tmp

use std::path::PathBuf;

use psychlab::config::EnvConfig;
use psychlab::env::Env;
use psychlab::fovea::FoveaMap;

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let m = FoveaMap::new(101, 11)?;
    println!("101 -> 11 keeps offsets {:?}", m.kept_offsets());

    let mut plain = EnvConfig::for_task("landolt");
    plain.staircase.fixed_levels = Some(vec![6, 1]);
    let mut foveated = plain.clone();
    foveated.observation.fovea = Some("168:84".into());
    for (name, cfg) in [("plain", plain), ("foveated", foveated)] {
        let mut env = Env::new(cfg)?;
        env.reset(2)?;
        // hold still at the center until the stimulus is up
        let mut obs = None;
        for _ in 0..40 {
            obs = Some(env.step(psychlab::env::GazeAction::NOOP)?.observation);
        }
        let obs = obs.unwrap();
        println!("{name}: {}x{}", obs.width(), obs.height());
        obs.save(out.join(format!("landolt-{name}.png")))?;
    }
    Ok(())
}
