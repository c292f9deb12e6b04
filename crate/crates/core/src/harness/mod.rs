//! Scripted agents and the episode runner.

use sha2::{Digest, Sha256};

use crate::env::Env;
use crate::error::{Error, Result};
use crate::rng::episode_seed;
use crate::session::TrialRecord;

pub mod policy;

pub use policy::{
    make_policy, policy_needs_privileged, steer, AccuracyProfile, NoisyOraclePolicy, OraclePolicy, Policy,
    RandomPolicy, ScannerPolicy,
};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Hash every observation into [`RunOutput::observation_digest`].
    pub digest: bool,
    /// End an episode early once this many trials have completed.
    pub max_trials_per_episode: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode_seed: u64,
    pub steps: u64,
    pub episode_return: f64,
    pub trials: u64,
    pub correct: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub episodes: Vec<EpisodeSummary>,
    /// Hex SHA-256 over all observations, when requested.
    pub observation_digest: Option<String>,
    pub steps: u64,
}

impl RunOutput {
    pub fn accuracy(&self) -> f64 {
        let n = self.records.len();
        if n == 0 {
            return 0.0;
        }
        self.records.iter().filter(|r| r.correct).count() as f64 / n as f64
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run `episodes` episodes, seeding episode `i` with `episode_seed(seed, i)`.
/// `on_record` sees every completed trial as it happens.
pub fn run_episodes_with(
    env: &mut Env,
    policy: &mut dyn Policy,
    episodes: u64,
    seed: u64,
    opts: &RunOptions,
    mut on_record: impl FnMut(&TrialRecord) -> Result<()>,
) -> Result<RunOutput> {
    if policy.requires_privileged() && !env.config().privileged {
        return Err(Error::Policy(format!(
            "{} policy needs the privileged channel, which this environment has off",
            policy.name()
        )));
    }
    let mut hasher = opts.digest.then(Sha256::new);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut total_steps = 0;
    for i in 0..episodes {
        let ep_seed = episode_seed(seed, i);
        let mut obs = env.reset(ep_seed)?;
        policy.begin_episode(ep_seed);
        let mut info = env.info();
        let mut summary = EpisodeSummary {
            episode_seed: ep_seed,
            steps: 0,
            episode_return: 0.0,
            trials: 0,
            correct: 0,
        };
        loop {
            if let Some(h) = hasher.as_mut() {
                h.update(obs.as_raw());
            }
            let action = policy.act(&obs, &info)?;
            let r = env.step(action)?;
            summary.steps += 1;
            summary.episode_return += r.reward;
            for rec in env.drain_records() {
                summary.trials += 1;
                summary.correct += u64::from(rec.correct);
                on_record(&rec)?;
                records.push(rec);
            }
            obs = r.observation;
            info = r.info;
            let capped = opts.max_trials_per_episode.is_some_and(|m| summary.trials >= m);
            if r.done || capped {
                break;
            }
        }
        total_steps += summary.steps;
        summaries.push(summary);
    }
    Ok(RunOutput {
        records,
        episodes: summaries,
        observation_digest: hasher.map(|h| hex(&h.finalize())),
        steps: total_steps,
    })
}

pub fn run_episodes(
    env: &mut Env,
    policy: &mut dyn Policy,
    episodes: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunOutput> {
    run_episodes_with(env, policy, episodes, seed, opts, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EnvConfig;

    fn short(task: &str) -> EnvConfig {
        let mut c = EnvConfig::for_task(task);
        c.privileged = true;
        c.episode_length_steps = 2000;
        c
    }

    #[test]
    fn oracle_completes_a_trial_within_200_steps_on_every_task() {
        for task in crate::config::TASK_NAMES {
            let cfg = short(task);
            let mut env = Env::new(cfg.clone()).unwrap();
            let mut p = make_policy("oracle", &cfg, 1).unwrap();
            let opts = RunOptions {
                max_trials_per_episode: Some(1),
                ..Default::default()
            };
            let out = run_episodes(&mut env, p.as_mut(), 1, 3, &opts).unwrap();
            let r = &out.records[0];
            assert!(r.correct, "{task}");
            // presentation periods are task time the oracle cannot shorten
            let presentation = match task {
                "change" => cfg.change.sample_steps + cfg.change.delays[0],
                "mot" => cfg.mot.cue_steps + cfg.mot.track_steps,
                _ => 0,
            };
            assert!(r.end_step <= 200 + presentation, "{task}: {}", r.end_step);
        }
    }

    #[test]
    fn same_seed_same_records() {
        let cfg = short("glass");
        let run = || {
            let mut env = Env::new(cfg.clone()).unwrap();
            let mut p = make_policy("random", &cfg, 9).unwrap();
            let opts = RunOptions {
                digest: true,
                ..Default::default()
            };
            run_episodes(&mut env, p.as_mut(), 2, 9, &opts).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.records, b.records);
        assert_eq!(a.observation_digest, b.observation_digest);
    }

    #[test]
    fn privileged_policy_on_plain_env_fails() {
        let cfg = short("glass");
        let mut p = make_policy("oracle", &cfg, 1).unwrap();
        let mut plain = cfg.clone();
        plain.privileged = false;
        let mut env = Env::new(plain).unwrap();
        assert!(matches!(
            run_episodes(&mut env, p.as_mut(), 1, 1, &RunOptions::default()),
            Err(Error::Policy(_))
        ));
    }
}
