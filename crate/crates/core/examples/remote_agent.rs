//! Serve environments on a local port and play one episode through the
//! binary protocol, the way an out-of-process agent would.
//!
//!     cargo run --release --example remote_agent

use std::net::TcpListener;

use psychlab::config::EnvConfig;
use psychlab::env::GazeAction;
use psychlab::protocol::{spawn, Client, ServerOptions};

fn main() -> psychlab::Result<()> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let server = spawn(listener, ServerOptions::new(EnvConfig::default()))?;
    println!("server on {}", server.addr());

    let mut cfg = EnvConfig::for_task("motion");
    cfg.privileged = true;
    cfg.episode_length_steps = 3000;
    let mut client = Client::connect(server.addr())?;
    let ack = client.hello(Some(cfg), true)?;
    println!("{ack:?}");

    let mut frame = client.reset(11)?;
    let mut trials = 0;
    let mut total = 0.0;
    while !frame.obs.done {
        // the INFO frame carries the same privileged ground truth as in-process
        let info = frame.info.as_ref().expect("info requested");
        let p = info.info.privileged.as_ref().expect("privileged");
        let goal = match (&p.fixation_target, &p.correct_response) {
            (Some(f), _) => Some(*f),
            (None, Some(label)) => p.response_targets.iter().find(|t| &t.label == label).map(|t| t.center),
            _ => None,
        };
        let action = match goal {
            Some(g) => {
                let geom = psychlab::env::MonitorGeometry::default();
                let want = geom.screen_point_to_gaze(g);
                GazeAction::new(0.4 * (want.yaw - p.gaze.yaw), 0.4 * (want.pitch - p.gaze.pitch))
            }
            None => GazeAction::new(-0.4 * p.gaze.yaw, -0.4 * p.gaze.pitch),
        };
        frame = client.step(action)?;
        total += f64::from(frame.obs.reward);
        trials += frame.info.as_ref().map_or(0, |i| i.records.len());
    }
    client.bye()?;
    println!("{trials} trials, return {total}");
    server.shutdown();
    Ok(())
}
