//! Randomized greedy learning (RGL) for unconstrained, non-monotone
//! stochastic submodular maximization under full-bandit feedback.
//!
//! The crate provides the RGL agent and its baselines ([`agents`]), stochastic
//! set-function environments ([`env`]), an exhaustive maximizer used as ground
//! truth ([`oracle`]), regret bookkeeping ([`metrics`]) and a seeded,
//! schedule-independent experiment runner ([`runner`]).

pub mod agents;
pub mod arms;
pub mod env;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod runner;
pub mod trace;

pub use arms::{ArmSet, GroundSet};
pub use env::Environment;
pub use error::{Error, Result};
pub use trace::{AgentTrace, Phase, Step};
