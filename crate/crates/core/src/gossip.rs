//! Decentralized agreement on the per-client selection index and top-K
//! activation.
//!
//! Each client's index mixes its empirical mean opinion, its belief from the
//! message-passing stage scaled by `1/N`, and a UCB exploration bonus:
//! `mean + belief / N + mu * sqrt(ln t / pulls)`. Clients flood `(id, index)`
//! pairs to their neighbors in synchronous rounds until every table holds all
//! `N` entries, which takes exactly the graph diameter on a connected graph;
//! after that every client derives the same descending ranking locally and
//! activates the top `K`.
//!
//! Selected clients fold their own opinion of the new global model into their
//! running mean; unselected clients keep their state frozen. The regret
//! upper-bound calculator for this selector lives here as well.

use std::collections::BTreeMap;

use crate::bandit::SuperArm;
use crate::domain::{ClientId, Topology};
use crate::error::{Error, Result};

/// Per-client bandit state of the decentralized selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClientBanditState {
    /// Running mean of the client's own opinions while selected.
    pub mean: f64,
    /// Times selected (including the shared initialization slot).
    pub pulls: u64,
    /// Latest belief value.
    pub belief: f64,
    /// Latest index value.
    pub index: f64,
}

impl ClientBanditState {
    /// State after the initialization slot: one pull, the first opinion as
    /// the mean.
    pub fn initialized(first_opinion: f64) -> Self {
        ClientBanditState { mean: first_opinion, pulls: 1, belief: 0.0, index: 0.0 }
    }
}

/// What one client knows about everyone's indices after gossip.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// `(client, index)` pairs sorted by client id.
    pub entries: Vec<(ClientId, f64)>,
    /// Flooding rounds it took to fill the table.
    pub rounds_elapsed: usize,
}

impl RankTable {
    pub fn is_complete(&self, n: usize) -> bool {
        self.entries.len() == n
    }

    /// Clients in descending index order; ties go to the lower id.
    pub fn ranking(&self) -> Vec<ClientId> {
        let mut order = self.entries.clone();
        order.sort_by(|a, b| {
            b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0))
        });
        order.into_iter().map(|(c, _)| c).collect()
    }

    /// Bit-exact equality, used to verify network-wide agreement.
    pub fn bits_equal(&self, other: &RankTable) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.0 == b.0 && a.1.to_bits() == b.1.to_bits())
    }
}

/// Decentralized index `mean + belief / N + mu * sqrt(ln t / pulls)` at
/// (possibly fractional) time.
pub fn bpucb_index(mean: f64, belief: f64, pulls: u64, t: f64, mu: f64, n: usize) -> Result<f64> {
    if pulls == 0 {
        return Err(Error::UninitializedArm(usize::MAX));
    }
    if t < 1.0 || n == 0 {
        return Err(Error::Domain("the index needs t >= 1 and n >= 1".into()));
    }
    if belief < 0.0 {
        return Err(Error::Domain(format!("belief {belief} must be non-negative")));
    }
    Ok(mean + belief / n as f64 + mu * (t.ln() / pulls as f64).sqrt())
}

/// Synchronous flooding of `(id, index)` pairs until every client's table is
/// complete. Every round each client forwards everything it knows to all its
/// neighbors; on a connected graph all tables fill after diameter rounds and
/// are identical. A round that adds nothing while tables are still incomplete
/// means the graph is disconnected.
#[allow(clippy::needless_range_loop)]
pub fn gossip_rank(topology: &Topology, local_indices: &[f64]) -> Result<Vec<RankTable>> {
    let n = topology.n();
    if local_indices.len() != n {
        return Err(Error::Config(format!("{} indices for {} clients", local_indices.len(), n)));
    }
    let mut tables: Vec<BTreeMap<usize, f64>> =
        (0..n).map(|c| BTreeMap::from([(c, local_indices[c])])).collect();
    let mut rounds = 0;
    while tables.iter().any(|t| t.len() < n) {
        // Snapshot first: deliveries within a round must not chain.
        let snapshot = tables.clone();
        let mut progressed = false;
        for sender in 0..n {
            for receiver in topology.neighbors(sender) {
                for (&id, &index) in &snapshot[sender] {
                    if tables[receiver].insert(id, index).is_none() {
                        progressed = true;
                    }
                }
            }
        }
        rounds += 1;
        if !progressed {
            return Err(Error::Disconnected);
        }
    }
    Ok(tables
        .into_iter()
        .map(|t| RankTable {
            entries: t.into_iter().map(|(c, v)| (ClientId(c), v)).collect(),
            rounds_elapsed: rounds,
        })
        .collect())
}

/// The `k` clients with the highest indices in a complete table, sorted by id.
pub fn select_topk(table: &RankTable, k: usize, n: usize) -> Result<Vec<ClientId>> {
    if !table.is_complete(n) {
        return Err(Error::IncompleteRankTable { have: table.entries.len(), need: n });
    }
    if k > n {
        return Err(Error::Config(format!("cannot select {k} of {n} clients")));
    }
    let mut selected: Vec<ClientId> = table.ranking().into_iter().take(k).collect();
    selected.sort_unstable();
    Ok(selected)
}

/// Result of one decentralized selection slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub selected: Vec<ClientId>,
    pub gossip_rounds: usize,
    /// Opinions of all clients about the new global model.
    pub opinions: Vec<f64>,
}

/// One slot of the decentralized selector at `t >= 2` (slot 1 initializes all
/// clients with one evaluation each):
///
/// 1. every client computes its index from its mean, belief, and pulls;
/// 2. indices are agreed on by gossip and the top `k` are activated;
/// 3. `eval` produces every client's opinion of the model the activated set
///    trained;
/// 4. activated clients fold their own opinion into their running mean and
///    pull count; everyone else stays frozen.
pub fn bpucb_step(
    states: &mut [ClientBanditState],
    beliefs: &[f64],
    topology: &Topology,
    t: usize,
    mu: f64,
    k: usize,
    eval: impl FnOnce(&[ClientId]) -> Result<Vec<f64>>,
) -> Result<StepOutcome> {
    let n = states.len();
    if t < 2 {
        return Err(Error::Domain("decentralized slots start at t = 2".into()));
    }
    if beliefs.len() != n || topology.n() != n {
        return Err(Error::Config("states, beliefs, and topology sizes disagree".into()));
    }
    let mut indices = Vec::with_capacity(n);
    for (client, state) in states.iter_mut().enumerate() {
        state.belief = beliefs[client];
        state.index = bpucb_index(state.mean, state.belief, state.pulls, t as f64, mu, n)?;
        indices.push(state.index);
    }
    let tables = gossip_rank(topology, &indices)?;
    debug_assert!(tables.iter().all(|t| t.bits_equal(&tables[0])), "gossip tables disagree");
    let selected = select_topk(&tables[0], k, n)?;
    let opinions = eval(&selected)?;
    if opinions.len() != n {
        return Err(Error::Evaluation(format!(
            "evaluation produced {} opinions for {n} clients",
            opinions.len()
        )));
    }
    for &cid in &selected {
        let op = opinions[cid.index()];
        if !(0.0..=1.0).contains(&op) {
            return Err(Error::Evaluation(format!("opinion {op} outside [0, 1]")));
        }
        let s = &mut states[cid.index()];
        s.pulls += 1;
        s.mean += (op - s.mean) / s.pulls as f64;
    }
    Ok(StepOutcome { selected, gossip_rounds: tables[0].rounds_elapsed, opinions })
}

/// Logarithmic regret upper bound of the decentralized selector:
/// `8 N R_max ln T / R_min^2 + (pi^2 / 3 + 1) N R_max`.
pub fn regret_bound(n: usize, r_min: f64, r_max: f64, t: usize) -> Result<f64> {
    if r_min <= 0.0 {
        return Err(Error::UndefinedGap);
    }
    if t == 0 {
        return Err(Error::Domain("the bound needs t >= 1".into()));
    }
    let nf = n as f64;
    Ok(8.0 * nf * r_max * (t as f64).ln() / (r_min * r_min)
        + (std::f64::consts::PI.powi(2) / 3.0 + 1.0) * nf * r_max)
}

/// Client-level reward gaps feeding [`regret_bound`]: for each client, the
/// smallest and largest gaps among suboptimal sets containing it; the bound
/// takes the minimum of the former and the maximum of the latter over
/// clients.
pub fn client_gap_stats(arm_means: &[f64], arms: &[SuperArm], n: usize) -> Result<(f64, f64)> {
    if arm_means.len() != arms.len() || arms.is_empty() {
        return Err(Error::Config("arm means and arms must align and be non-empty".into()));
    }
    let opt = arm_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut r_min = f64::INFINITY;
    let mut r_max: f64 = 0.0;
    let mut any_bad = false;
    for client in 0..n {
        let cid = ClientId(client);
        let mut best_bad = f64::NEG_INFINITY;
        let mut worst_bad = f64::INFINITY;
        for (arm, &mean) in arms.iter().zip(arm_means) {
            if mean < opt && arm.contains(cid) {
                best_bad = best_bad.max(mean);
                worst_bad = worst_bad.min(mean);
            }
        }
        if best_bad > f64::NEG_INFINITY {
            any_bad = true;
            r_min = r_min.min(opt - best_bad);
            r_max = r_max.max(opt - worst_bad);
        }
    }
    if !any_bad {
        return Err(Error::UndefinedGap);
    }
    Ok((r_min, r_max))
}
