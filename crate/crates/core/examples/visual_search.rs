//! Reaction time against set size: a serial scanner in conjunction search
//! and an oracle in color pop-out search.
//!
//!     cargo run --release --example visual_search

use psychlab::analysis::rt_by_set_size;
use psychlab::config::EnvConfig;
use psychlab::env::Env;
use psychlab::harness::{make_policy, run_episodes, RunOptions};
use psychlab::stimuli::SearchMode;

fn main() -> psychlab::Result<()> {
    for (mode, policy) in [(SearchMode::Conjunction, "scanner"), (SearchMode::Color, "oracle")] {
        let mut cfg = EnvConfig::for_task("search");
        cfg.privileged = true;
        cfg.search.mode = mode;
        let mut env = Env::new(cfg.clone())?;
        let mut p = make_policy(policy, &cfg, 1)?;
        let out = run_episodes(&mut env, p.as_mut(), 2, 1, &RunOptions::default())?;
        let reg = rt_by_set_size(&out.records)?;
        println!("{} search, {policy} ({} trials):", mode.label(), out.records.len());
        for pt in &reg.points {
            println!("  set size {:>2}: median RT {:>5.1} steps", pt.set_size, pt.median_rt);
        }
        println!("  slope {:.2} steps/item, r2 {:.3}", reg.slope, reg.r2);
    }
    Ok(())
}
