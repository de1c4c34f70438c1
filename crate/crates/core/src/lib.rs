//! Discrete-time simulator for goal-directed client selection in federated
//! learning.
//!
//! A central server (or a self-organized client network) repeatedly picks a
//! subset of `K` out of `N` clients to run federated training, then scores the
//! resulting global model with every client's local test data. The average of
//! those scores is the reward of the chosen subset, which turns subset
//! selection into a stochastic multi-armed bandit problem over "super arms".
//!
//! Two selectors are provided:
//!
//! - [`bandit`] — a centralized UCB over all `C(N, K)` super arms with a
//!   cold-start initialization that seeds every arm from `ceil(N/K)` group
//!   plays instead of `C(N, K)` individual pulls.
//! - [`gossip`] + [`beliefprop`] — a decentralized per-client UCB whose index
//!   mixes the client's empirical opinion with a belief computed by loopy
//!   belief propagation over the client graph; clients agree on the index
//!   ranking by gossip flooding before activating the top `K`.
//!
//! Supporting modules: [`domain`] (scenario geometry, channels, config),
//! [`fedtrain`] (synthetic data, hinge-loss SGD, success-weighted averaging),
//! and [`harness`] (episode orchestration, Monte Carlo aggregation, metrics,
//! CSV/SVG export). Regret upper-bound calculators for both selectors live
//! next to the algorithms they describe.
//!
//! Everything is deterministic given a scenario seed: RNG streams are derived
//! per trial and per purpose, so identical configs reproduce identical traces
//! byte for byte.

pub mod bandit;
pub mod beliefprop;
pub mod domain;
pub mod error;
pub mod fedtrain;
pub mod gossip;
pub mod harness;
pub mod rng;

pub use error::{Error, Result};
