//! Run the privileged oracle through every task, report accuracy and
//! median reaction time, and save one response-phase frame per task.
//!
//!     cargo run --release --example all_tasks -- /tmp

use std::path::PathBuf;

use psychlab::config::{EnvConfig, TASK_NAMES};
use psychlab::env::Env;
use psychlab::harness::{make_policy, Policy};
use psychlab::tasks::TrialPhase;

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    for task in TASK_NAMES {
        let mut cfg = EnvConfig::for_task(task);
        cfg.privileged = true;
        cfg.episode_length_steps = 6000;
        let mut env = Env::new(cfg.clone())?;
        let mut policy: Box<dyn Policy> = make_policy("oracle", &cfg, 0)?;
        let mut obs = env.reset(1)?;
        policy.begin_episode(1);
        let mut info = env.info();
        let mut saved = false;
        let mut records = Vec::new();
        loop {
            let r = env.step(policy.act(&obs, &info)?)?;
            records.extend(env.drain_records());
            let phase = r.info.privileged.as_ref().map(|p| p.phase);
            if !saved && phase == Some(TrialPhase::Response) && records.len() >= 3 {
                env.screen().save(out.join(format!("{task}-screen.png")))?;
                saved = true;
            }
            obs = r.observation;
            info = r.info;
            if r.done {
                break;
            }
        }
        let correct = records.iter().filter(|r| r.correct).count();
        let mut rts: Vec<u64> = records.iter().map(|r| r.reaction_steps).collect();
        rts.sort_unstable();
        println!(
            "{task:<12} {correct:>4}/{:<4} correct, median RT {:>3} steps, levels now {:?}",
            records.len(),
            rts.get(rts.len() / 2).copied().unwrap_or(0),
            env.runner().staircase().base_levels()
        );
    }
    println!("screens in {}", out.display());
    Ok(())
}
