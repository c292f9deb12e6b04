//! Collect Glass-pattern trials from an observer whose accuracy falls with
//! coherence, write the trial log, read it back and fit a psychometric
//! function.
//!
//!     cargo run --release --example psychometric_curve -- /tmp

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use psychlab::analysis::{psychometric, write_curve_csv};
use psychlab::config::EnvConfig;
use psychlab::env::Env;
use psychlab::harness::{make_policy, run_episodes_with, RunOptions};
use psychlab::session::{read_log_file, TrialLogWriter};

fn main() -> psychlab::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut cfg = EnvConfig::for_task("glass");
    cfg.privileged = true;
    // every level equally often instead of adaptively
    cfg.staircase.enabled = false;
    let observer = "noisy:1-2=0.98,3=0.95,4=0.9,5=0.82,6=0.72,7=0.62,8=0.55,*=0.5";

    let log_path = out.join("glass-trials.jsonl");
    let mut log = TrialLogWriter::new(BufWriter::new(File::create(&log_path)?));
    for level in 1..=cfg.glass.coherences.len() {
        let mut c = cfg.clone();
        c.staircase.fixed_levels = Some(vec![level]);
        let mut env = Env::new(c.clone())?;
        let mut p = make_policy(observer, &c, level as u64)?;
        let opts = RunOptions {
            max_trials_per_episode: Some(150),
            ..RunOptions::default()
        };
        run_episodes_with(&mut env, p.as_mut(), 1, level as u64, &opts, |r| log.append(r))?;
    }
    log.flush()?;
    drop(log);

    let records = read_log_file(&log_path)?;
    let curve = psychometric(&records, "coherence", 0.5)?;
    for p in &curve.points {
        println!("coherence {:.2}: {:>3}/{:<3} correct", p.value, p.n_correct, p.n_trials);
    }
    match curve.fitted {
        Some(f) => println!("mu {:.3} s {:.3} threshold75 {:?}", f.mu, f.s, f.threshold75),
        None => println!("fit did not converge"),
    }
    write_curve_csv(File::create(out.join("glass-curve.csv"))?, &curve)?;
    println!("wrote {} and glass-curve.csv", log_path.display());
    Ok(())
}
