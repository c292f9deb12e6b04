use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::TcpListener;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use psychlab::analysis;
use psychlab::config::EnvConfig;
use psychlab::env::Env;
use psychlab::harness::{make_policy, policy_needs_privileged, run_episodes_with, RunOptions};
use psychlab::protocol::{serve, ServerOptions};
use psychlab::session::{load_config, read_log_file, TrialLogWriter};
use psychlab::tasks::make_paradigm;

#[derive(Parser)]
#[command(name = "psychlab", version, about = "Gaze-controlled psychophysics environment")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Serve environments over TCP and WebSocket on one port.
    Serve {
        #[arg(long, default_value_t = 7070)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Render at nIn and emit foveated nOut observations, e.g. 168:84.
        #[arg(long)]
        fovea: Option<String>,
        #[arg(long)]
        privileged: bool,
    },
    /// Run a scripted policy and write a trial log.
    Run {
        #[arg(long)]
        task: Option<String>,
        /// random | oracle | scanner | noisy:SPEC
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 1)]
        episodes: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also hash every observation and print the digest.
        #[arg(long)]
        digest: bool,
        #[arg(long)]
        max_trials: Option<u64>,
    },
    /// Summaries over trial logs.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
    /// Print the default configuration as TOML.
    Defaults {
        #[arg(long)]
        task: Option<String>,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Accuracy by stimulus parameter with a logistic fit.
    Psychometric {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        param: String,
        /// Defaults to the task's chance level.
        #[arg(long)]
        chance: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Median correct RT against set size.
    Rt {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn base_config(path: Option<&PathBuf>) -> anyhow::Result<EnvConfig> {
    Ok(match path {
        Some(p) => load_config(p).with_context(|| format!("loading {}", p.display()))?,
        None => EnvConfig::default(),
    })
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::Serve {
            port,
            host,
            config,
            fovea,
            privileged,
        } => {
            let cfg = base_config(config.as_ref())?;
            let mut opts = ServerOptions::new(cfg);
            opts.fovea = fovea;
            opts.privileged = privileged;
            let listener = TcpListener::bind((host.as_str(), port))?;
            println!("listening on {}", listener.local_addr()?);
            std::io::stdout().flush()?;
            serve(listener, opts);
        }
        Cmd::Run {
            task,
            policy,
            episodes,
            seed,
            out,
            config,
            digest,
            max_trials,
        } => {
            let mut cfg = base_config(config.as_ref())?;
            if let Some(t) = task {
                cfg.task = t;
            }
            if policy_needs_privileged(&policy) {
                cfg.privileged = true;
            }
            cfg.validate()?;
            let mut env = Env::new(cfg.clone())?;
            let mut p = make_policy(&policy, &cfg, seed)?;
            let mut log = TrialLogWriter::new(BufWriter::new(File::create(&out)?));
            let opts = RunOptions {
                digest,
                max_trials_per_episode: max_trials,
            };
            let res = run_episodes_with(&mut env, p.as_mut(), episodes, seed, &opts, |r| log.append(r))?;
            log.flush()?;
            println!(
                "{} episodes, {} steps, {} trials, accuracy {:.4}",
                res.episodes.len(),
                res.steps,
                res.records.len(),
                res.accuracy()
            );
            for (i, e) in res.episodes.iter().enumerate() {
                println!("episode {i}: return {} trials {}", e.episode_return, e.trials);
            }
            if let Some(d) = res.observation_digest {
                println!("observation sha256 {d}");
            }
        }
        Cmd::Analyze { what } => match what {
            Analyze::Psychometric {
                log,
                param,
                chance,
                csv,
            } => {
                let records = read_log_file(&log)?;
                let chance = match (chance, records.first()) {
                    (Some(c), _) => c,
                    (None, Some(r)) => make_paradigm(&EnvConfig::for_task(&r.task_name))?.chance(),
                    (None, None) => bail!("{} holds no trials", log.display()),
                };
                let curve = analysis::psychometric(&records, &param, chance)?;
                for p in &curve.points {
                    println!("{param}={} {}/{} ({:.3})", p.value, p.n_correct, p.n_trials, p.accuracy());
                }
                match curve.fitted {
                    Some(f) => {
                        println!("mu {:.5} s {:.5}", f.mu, f.s);
                        match f.threshold75 {
                            Some(t) => println!("threshold75 {t:.5}"),
                            None => println!("threshold75 none"),
                        }
                    }
                    None => println!("fit did not converge"),
                }
                if let Some(path) = csv {
                    analysis::write_curve_csv(File::create(path)?, &curve)?;
                }
            }
            Analyze::Rt { log, csv } => {
                let records = read_log_file(&log)?;
                let reg = analysis::rt_by_set_size(&records)?;
                for p in &reg.points {
                    println!("setSize={} median {} (n={})", p.set_size, p.median_rt, p.n_trials);
                }
                println!("slope {:.4} intercept {:.4} r2 {:.4}", reg.slope, reg.intercept, reg.r2);
                if let Some(path) = csv {
                    analysis::write_rt_csv(File::create(path)?, &reg)?;
                }
            }
        },
        Cmd::Defaults { task } => {
            let cfg = task.map(|t| EnvConfig::for_task(&t)).unwrap_or_default();
            print!("{}", cfg.to_toml_string());
        }
    }
    Ok(())
}
