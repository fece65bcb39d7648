//! Online agents and their uniform run interface.
//!
//! Every agent consumes two random streams: `noise`, handed to the
//! environment for reward draws, and `coins`, used for the agent's own
//! randomization (acceptance draws, random subsets, the R-ETCG budget). Keeping
//! them apart means changing the noise level never shifts the agent's coin
//! flips under a fixed seed.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arms::ArmSet;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::trace::AgentTrace;

mod anytime;
mod baselines;
mod budget;
mod retcg;
mod rgl;

pub use anytime::{anytime_windows, rgl_anytime_run, AnytimeWindow};
pub use baselines::{opt_run, rnd_run};
pub use budget::{compute_sample_budget, confidence_radius, etcg_budget};
pub use retcg::{retcg_run, retcg_run_with_k, EtcgDiagnostics};
pub use rgl::{rgl_phase_decision, rgl_run, PhaseRecord, RglDiagnostics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "RGL")]
    Rgl,
    #[serde(rename = "OPT")]
    Opt,
    #[serde(rename = "RND")]
    Rnd,
    #[serde(rename = "R-ETCG")]
    REtcg,
    #[serde(rename = "RGL-anytime")]
    RglAnytime,
}

impl AgentKind {
    pub const ALL: [AgentKind; 5] = [
        AgentKind::Rgl,
        AgentKind::Opt,
        AgentKind::Rnd,
        AgentKind::REtcg,
        AgentKind::RglAnytime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Rgl => "RGL",
            AgentKind::Opt => "OPT",
            AgentKind::Rnd => "RND",
            AgentKind::REtcg => "R-ETCG",
            AgentKind::RglAnytime => "RGL-anytime",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown agent `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig {
    pub kind: AgentKind,
    pub horizon: u64,
    pub seed: u64,
    /// Required for OPT only.
    pub opt_set: Option<ArmSet>,
    /// Initial window length, required for RGL-anytime only.
    pub t0: Option<u64>,
}

impl AgentConfig {
    pub fn new(kind: AgentKind, horizon: u64, seed: u64) -> Self {
        Self {
            kind,
            horizon,
            seed,
            opt_set: None,
            t0: None,
        }
    }

    pub fn with_opt_set(mut self, s: ArmSet) -> Self {
        self.opt_set = Some(s);
        self
    }

    pub fn with_t0(mut self, t0: u64) -> Self {
        self.t0 = Some(t0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("{}: {msg}", self.kind)));
        match (self.kind, self.opt_set, self.t0) {
            (AgentKind::Opt, None, _) => bad("requires opt_set"),
            (k, Some(_), _) if k != AgentKind::Opt => bad("opt_set is only valid for OPT"),
            (AgentKind::RglAnytime, _, None) => bad("requires t0"),
            (k, _, Some(_)) if k != AgentKind::RglAnytime => {
                bad("t0 is only valid for RGL-anytime")
            }
            _ if self.horizon < 2 => Err(Error::HorizonTooShort {
                got: self.horizon,
                min: 2,
            }),
            _ => Ok(()),
        }
    }
}

/// The two private random streams of one run.
pub struct Streams {
    pub noise: ChaCha8Rng,
    pub coins: ChaCha8Rng,
}

impl Streams {
    pub fn from_seeds(noise_seed: u64, coin_seed: u64) -> Self {
        Self {
            noise: ChaCha8Rng::seed_from_u64(noise_seed),
            coins: ChaCha8Rng::seed_from_u64(coin_seed),
        }
    }

    /// Both streams from one seed, on separate ChaCha stream ids.
    pub fn from_seed(seed: u64) -> Self {
        let mut noise = ChaCha8Rng::seed_from_u64(seed);
        let mut coins = ChaCha8Rng::seed_from_u64(seed);
        noise.set_stream(0);
        coins.set_stream(1);
        Self { noise, coins }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "agent", rename_all = "snake_case")]
pub enum Diagnostics {
    None,
    Rgl(RglDiagnostics),
    REtcg(EtcgDiagnostics),
    Anytime { windows: Vec<AnytimeWindow> },
}

impl Diagnostics {
    /// Per-set sample budget of the run, if it used one. For the anytime
    /// agent this is the budget of the last window.
    pub fn m(&self) -> Option<u64> {
        match self {
            Diagnostics::None => None,
            Diagnostics::Rgl(d) => Some(d.m),
            Diagnostics::REtcg(d) => d.m,
            Diagnostics::Anytime { windows } => windows.last().map(|w| w.diagnostics.m),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentRun {
    pub trace: AgentTrace,
    pub diagnostics: Diagnostics,
}

pub fn run_agent<E: Environment + ?Sized>(
    env: &E,
    config: &AgentConfig,
    streams: &mut Streams,
) -> Result<AgentRun> {
    config.validate()?;
    let Streams { noise, coins } = streams;
    let (t, seed) = (config.horizon, config.seed);
    let (trace, diagnostics) = match config.kind {
        AgentKind::Rgl => {
            let (trace, d) = rgl_run(env, t, noise, coins, seed)?;
            (trace, Diagnostics::Rgl(d))
        }
        AgentKind::Opt => {
            let s = config.opt_set.expect("validated");
            (opt_run(env, t, s, noise, seed)?, Diagnostics::None)
        }
        AgentKind::Rnd => (rnd_run(env, t, noise, coins, seed), Diagnostics::None),
        AgentKind::REtcg => {
            let (trace, d) = retcg_run(env, t, noise, coins, seed)?;
            (trace, Diagnostics::REtcg(d))
        }
        AgentKind::RglAnytime => {
            let t0 = config.t0.expect("validated");
            let (trace, windows) = rgl_anytime_run(env, t, t0, noise, coins, seed)?;
            (trace, Diagnostics::Anytime { windows })
        }
    };
    Ok(AgentRun { trace, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::TabularEnv;

    #[test]
    fn config_requirements() {
        assert!(AgentConfig::new(AgentKind::Opt, 10, 0).validate().is_err());
        assert!(AgentConfig::new(AgentKind::Opt, 10, 0)
            .with_opt_set(ArmSet::EMPTY)
            .validate()
            .is_ok());
        assert!(AgentConfig::new(AgentKind::Rgl, 10, 0)
            .with_opt_set(ArmSet::EMPTY)
            .validate()
            .is_err());
        assert!(AgentConfig::new(AgentKind::RglAnytime, 10, 0)
            .validate()
            .is_err());
        assert!(AgentConfig::new(AgentKind::Rgl, 10, 0)
            .with_t0(4)
            .validate()
            .is_err());
        assert!(AgentConfig::new(AgentKind::Rgl, 1, 0).validate().is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in AgentKind::ALL {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
        }
        assert!("ucb".parse::<AgentKind>().is_err());
    }

    #[test]
    fn every_agent_fills_the_horizon() {
        let env = TabularEnv::submodular_example(0.1).unwrap();
        for kind in AgentKind::ALL {
            let mut cfg = AgentConfig::new(kind, 3000, 1);
            if kind == AgentKind::Opt {
                cfg = cfg.with_opt_set(ArmSet::from_mask(2));
            }
            if kind == AgentKind::RglAnytime {
                cfg = cfg.with_t0(100);
            }
            let run = run_agent(&env, &cfg, &mut Streams::from_seed(3)).unwrap();
            assert_eq!(run.trace.len(), 3000, "{kind}");
            run.trace.validate().unwrap();
        }
    }

    #[test]
    fn split_streams_differ() {
        use rand::Rng;
        let mut s = Streams::from_seed(10);
        assert_ne!(s.noise.random::<u64>(), s.coins.random::<u64>());
    }
}
