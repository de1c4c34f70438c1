//! Centralized subset selection as a stochastic bandit over super arms.
//!
//! A super arm is a `K`-subset of clients; its reward is the population's
//! average opinion of the model that subset trained. The selector keeps a
//! UCB index per arm, `mean + mu * sqrt(ln t / pulls)`, and sidesteps the
//! `C(N, K)`-pull initialization by playing `ceil(N/K)` disjoint cold-start
//! groups once and crediting every arm with the intersection-weighted mean of
//! the group rewards it overlaps.
//!
//! Regret accounting (per-arm gaps, the cumulative pseudo-regret, and the
//! logarithmic upper-bound calculator) lives here next to the index it
//! describes. Episode state is confined to one episode; calculators are pure.

use rand::Rng;

use crate::domain::ClientId;
use crate::error::{Error, Result};

/// Default cap on the enumerable arm space.
pub const DEFAULT_ARM_CAP: u128 = 200_000;

/// A `K`-subset of clients with its dense lexicographic id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperArm {
    pub id: usize,
    /// Strictly increasing member list.
    pub members: Vec<ClientId>,
}

impl SuperArm {
    pub fn contains(&self, client: ClientId) -> bool {
        self.members.binary_search(&client).is_ok()
    }
}

/// Empirical state of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    pub mean: f64,
    pub pulls: u64,
}

impl ArmState {
    pub fn unpulled() -> Self {
        ArmState { mean: 0.0, pulls: 0 }
    }
}

/// Gap statistics of an arm-mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GapStats {
    /// The optimal expected reward.
    pub opt: f64,
    /// Ids of arms strictly below the optimum.
    pub bad_arms: Vec<usize>,
    /// Gap to the best bad arm; `None` when no arm is bad.
    pub r_min: Option<f64>,
    /// Gap to the worst bad arm; `None` when no arm is bad.
    pub r_max: Option<f64>,
    /// Per-arm gap to the optimum.
    pub deltas: Vec<f64>,
}

/// `C(n, k)` without overflow for the sizes this crate handles.
pub fn count_arms(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Enumerates all `K`-subsets of `[0, n)` in lexicographic order with dense
/// ids, refusing arm spaces beyond `cap`.
pub fn enumerate_arms_capped(n: usize, k: usize, cap: u128) -> Result<Vec<SuperArm>> {
    if k == 0 || k > n {
        return Err(Error::Config(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let total = count_arms(n, k);
    if total > cap {
        return Err(Error::ArmSpaceTooLarge { n, k, arms: total, cap });
    }
    let mut arms = Vec::with_capacity(total as usize);
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        arms.push(SuperArm {
            id: arms.len(),
            members: current.iter().map(|&c| ClientId(c)).collect(),
        });
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(arms);
            }
            i -= 1;
            if current[i] != i + n - k {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// [`enumerate_arms_capped`] with the default cap.
pub fn enumerate_arms(n: usize, k: usize) -> Result<Vec<SuperArm>> {
    enumerate_arms_capped(n, k, DEFAULT_ARM_CAP)
}

/// Lexicographic rank of a strictly increasing `k`-subset of `[0, n)`.
pub fn arm_rank(members: &[ClientId], n: usize) -> Result<usize> {
    let k = members.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    if members.windows(2).any(|w| w[0] >= w[1]) || members[k - 1].index() >= n {
        return Err(Error::Config("arm members must be strictly increasing and below n".into()));
    }
    let mut rank: u128 = 0;
    let mut prev: isize = -1;
    for (j, m) in members.iter().enumerate() {
        for v in (prev + 1) as usize..m.index() {
            rank += count_arms(n - v - 1, k - j - 1);
        }
        prev = m.index() as isize;
    }
    usize::try_from(rank).map_err(|_| Error::Config("arm rank exceeds usize".into()))
}

/// UCB index `mean + mu * sqrt(ln t / pulls)` at (possibly fractional) time.
pub fn ucb_index(state: &ArmState, t: f64, mu: f64) -> Result<f64> {
    if state.pulls == 0 {
        return Err(Error::UninitializedArm(usize::MAX));
    }
    if t < 1.0 {
        return Err(Error::Domain("ucb index needs t >= 1".into()));
    }
    Ok(state.mean + mu * (t.ln() / state.pulls as f64).sqrt())
}

/// Partitions clients into `ceil(N/K)` cold-start groups of size `K`,
/// consecutive by id. When `K` does not divide `N` the remainder group is
/// padded with the lowest-id clients so every slot still trains `K` clients.
pub fn cold_start_groups(n: usize, k: usize) -> Vec<Vec<ClientId>> {
    let mut groups = Vec::with_capacity(n.div_ceil(k));
    let mut start = 0;
    while start < n {
        let mut group: Vec<usize> = (start..(start + k).min(n)).collect();
        let mut pad = 0;
        while group.len() < k {
            if !group.contains(&pad) {
                group.push(pad);
            }
            pad += 1;
        }
        group.sort_unstable();
        groups.push(group.into_iter().map(ClientId).collect());
        start += k;
    }
    groups
}

/// Initializes every arm from the cold-start group rewards: an arm's starting
/// mean is the intersection-size-weighted average of the rewards of the
/// groups it overlaps, and every arm starts with one pull.
///
/// Group sizes must equal `K` except possibly one remainder group, and the
/// groups must cover all clients.
pub fn quick_init(
    arms: &[SuperArm],
    groups: &[Vec<ClientId>],
    group_rewards: &[f64],
    n: usize,
    k: usize,
) -> Result<Vec<ArmState>> {
    if groups.is_empty() || groups.len() != group_rewards.len() {
        return Err(Error::Grouping(format!(
            "{} groups with {} rewards",
            groups.len(),
            group_rewards.len()
        )));
    }
    let mut undersized = 0;
    let mut covered = vec![false; n];
    for g in groups {
        if g.len() > k || g.is_empty() {
            return Err(Error::Grouping(format!("group size {} with k = {k}", g.len())));
        }
        if g.len() < k {
            undersized += 1;
        }
        for c in g {
            if c.index() >= n {
                return Err(Error::Grouping(format!("client {c} outside [0, {n})")));
            }
            covered[c.index()] = true;
        }
    }
    if undersized > 1 {
        return Err(Error::Grouping(format!("{undersized} groups are smaller than k = {k}")));
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::Grouping("groups do not cover every client".into()));
    }
    if let Some(bad) = group_rewards.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::Grouping(format!("group reward {bad} outside [0, 1]")));
    }

    // Per-client credit: the sum of rewards (and multiplicity) of the groups
    // containing the client, so an arm's weighted mean is a per-member sum.
    let mut client_reward_sum = vec![0.0; n];
    let mut client_multiplicity = vec![0u32; n];
    for (g, &r) in groups.iter().zip(group_rewards) {
        for c in g {
            client_reward_sum[c.index()] += r;
            client_multiplicity[c.index()] += 1;
        }
    }
    Ok(arms
        .iter()
        .map(|arm| {
            let mut sum = 0.0;
            let mut weight = 0u32;
            for m in &arm.members {
                sum += client_reward_sum[m.index()];
                weight += client_multiplicity[m.index()];
            }
            ArmState { mean: sum / weight as f64, pulls: 1 }
        })
        .collect())
}

/// Argmax of the UCB index over all arms; ties break toward the lowest id.
pub fn select_arm(states: &[ArmState], t: usize, mu: f64) -> Result<usize> {
    if states.is_empty() {
        return Err(Error::Config("no arms to select from".into()));
    }
    let mut best = 0;
    let mut best_index = f64::NEG_INFINITY;
    for (a, state) in states.iter().enumerate() {
        if state.pulls == 0 {
            return Err(Error::UninitializedArm(a));
        }
        let idx = ucb_index(state, t as f64, mu)?;
        if idx > best_index {
            best_index = idx;
            best = a;
        }
    }
    Ok(best)
}

/// Folds a reward into the running mean of an arm.
pub fn update_arm(state: &mut ArmState, reward: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&reward) {
        return Err(Error::Domain(format!("reward {reward} outside [0, 1]")));
    }
    state.pulls += 1;
    state.mean += (reward - state.mean) / state.pulls as f64;
    Ok(())
}

/// Gap statistics of an arm-mean vector: the optimum, the set of strictly
/// suboptimal arms, and the smallest/largest gaps among them.
pub fn gaps(arm_means: &[f64]) -> Result<GapStats> {
    if arm_means.is_empty() {
        return Err(Error::Config("gap statistics need at least one arm".into()));
    }
    let opt = arm_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bad_arms: Vec<usize> = (0..arm_means.len()).filter(|&a| arm_means[a] < opt).collect();
    let deltas = arm_means.iter().map(|&m| opt - m).collect();
    let (r_min, r_max) = if bad_arms.is_empty() {
        (None, None)
    } else {
        let best_bad =
            bad_arms.iter().map(|&a| arm_means[a]).fold(f64::NEG_INFINITY, f64::max);
        let worst_bad = bad_arms.iter().map(|&a| arm_means[a]).fold(f64::INFINITY, f64::min);
        (Some(opt - best_bad), Some(opt - worst_bad))
    };
    Ok(GapStats { opt, bad_arms, r_min, r_max, deltas })
}

/// Cumulative pseudo-regret of a selection history against known arm means:
/// entry `t` is the sum of the chosen arms' gaps over the first `t + 1` slots.
pub fn pseudo_regret(history: &[usize], arm_means: &[f64]) -> Result<Vec<f64>> {
    let stats = gaps(arm_means)?;
    let mut out = Vec::with_capacity(history.len());
    let mut acc = 0.0;
    for &a in history {
        let delta = stats.deltas.get(a).copied().ok_or(Error::UnknownArm(a))?;
        acc += delta;
        out.push(acc);
    }
    Ok(out)
}

/// Logarithmic regret upper bound of the centralized selector:
/// `8 |A| ln T / R_min + (pi^2 / 3 + 1) |A| R_max`.
pub fn regret_bound(num_arms: usize, r_min: f64, r_max: f64, t: usize) -> Result<f64> {
    if r_min <= 0.0 {
        return Err(Error::UndefinedGap);
    }
    if t == 0 {
        return Err(Error::Domain("the bound needs t >= 1".into()));
    }
    let a = num_arms as f64;
    Ok(8.0 * a * (t as f64).ln() / r_min
        + (std::f64::consts::PI.powi(2) / 3.0 + 1.0) * a * r_max)
}

// ---------------------------------------------------------------------------
// Baseline policies
// ---------------------------------------------------------------------------

/// Baseline selection policies over an enumerated arm space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Random,
    RoundRobin,
    /// UCB without the cold-start crediting: the first `|A|` slots play every
    /// arm once.
    ConventionalUcb,
    Oracle,
}

/// Mutable per-episode state of a baseline policy.
#[derive(Debug, Clone)]
pub struct Baseline {
    kind: BaselineKind,
    num_arms: usize,
    mu: f64,
    /// Arm ids cycled by round-robin.
    rotation: Vec<usize>,
    /// Fixed arm played by the oracle policy.
    oracle_arm: usize,
    /// Conventional-UCB arm table; arms stay uninitialized until first played.
    states: Vec<ArmState>,
    init_cursor: usize,
}

impl Baseline {
    pub fn random(num_arms: usize) -> Self {
        Baseline::new(BaselineKind::Random, num_arms, 0.0, Vec::new(), 0)
    }

    pub fn round_robin(num_arms: usize, rotation: Vec<usize>) -> Result<Self> {
        if rotation.is_empty() {
            return Err(Error::Config("round-robin needs a non-empty rotation".into()));
        }
        if rotation.iter().any(|&a| a >= num_arms) {
            return Err(Error::Config("round-robin rotation references an unknown arm".into()));
        }
        Ok(Baseline::new(BaselineKind::RoundRobin, num_arms, 0.0, rotation, 0))
    }

    pub fn conventional_ucb(num_arms: usize, mu: f64) -> Self {
        Baseline::new(BaselineKind::ConventionalUcb, num_arms, mu, Vec::new(), 0)
    }

    pub fn oracle(num_arms: usize, oracle_arm: usize) -> Self {
        Baseline::new(BaselineKind::Oracle, num_arms, 0.0, Vec::new(), oracle_arm)
    }

    fn new(
        kind: BaselineKind,
        num_arms: usize,
        mu: f64,
        rotation: Vec<usize>,
        oracle_arm: usize,
    ) -> Self {
        let states = if kind == BaselineKind::ConventionalUcb {
            vec![ArmState::unpulled(); num_arms]
        } else {
            Vec::new()
        };
        Baseline { kind, num_arms, mu, rotation, oracle_arm, states, init_cursor: 0 }
    }

    /// Picks the arm for slot `t` (1-based).
    pub fn select(&mut self, t: usize, rng: &mut impl Rng) -> Result<usize> {
        match self.kind {
            BaselineKind::Random => Ok(rng.random_range(0..self.num_arms)),
            BaselineKind::RoundRobin => Ok(self.rotation[(t - 1) % self.rotation.len()]),
            BaselineKind::Oracle => Ok(self.oracle_arm),
            BaselineKind::ConventionalUcb => {
                if self.init_cursor < self.num_arms {
                    let arm = self.init_cursor;
                    self.init_cursor += 1;
                    Ok(arm)
                } else {
                    select_arm(&self.states, t, self.mu)
                }
            }
        }
    }

    /// Feeds the observed reward back; only conventional UCB keeps state.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if self.kind == BaselineKind::ConventionalUcb {
            let state = &mut self.states[arm];
            if state.pulls == 0 {
                state.pulls = 1;
                state.mean = reward;
            } else {
                update_arm(state, reward)?;
            }
        }
        Ok(())
    }

    /// Slots conventional UCB spends playing every arm once.
    pub fn init_slots(&self) -> usize {
        match self.kind {
            BaselineKind::ConventionalUcb => self.num_arms,
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    /// Independent recursive binomial, the oracle for arm counting.
    fn binom_recursive(n: usize, k: usize) -> u128 {
        if k > n {
            0
        } else if k == 0 || k == n {
            1
        } else {
            binom_recursive(n - 1, k - 1) + binom_recursive(n - 1, k)
        }
    }

    #[test]
    fn arm_counts_match_recursive_oracle() {
        for n in 1..=12 {
            for k in 1..=n {
                assert_eq!(count_arms(n, k), binom_recursive(n, k), "C({n},{k})");
                let arms = enumerate_arms(n, k).unwrap();
                assert_eq!(arms.len() as u128, binom_recursive(n, k));
            }
        }
    }

    #[test]
    fn desk_scale_arm_count() {
        assert_eq!(count_arms(20, 5), 15_504);
        assert_eq!(enumerate_arms(20, 5).unwrap().len(), 15_504);
    }

    #[test]
    fn single_arm_when_k_equals_n() {
        let arms = enumerate_arms(5, 5).unwrap();
        assert_eq!(arms.len(), 1);
        assert_eq!(arms[0].members, (0..5).map(ClientId).collect::<Vec<_>>());
    }

    #[test]
    fn four_choose_two_enumeration() {
        let arms = enumerate_arms(4, 2).unwrap();
        let expect: Vec<Vec<usize>> =
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]];
        assert_eq!(arms.len(), 6);
        for (arm, want) in arms.iter().zip(&expect) {
            let got: Vec<usize> = arm.members.iter().map(|c| c.index()).collect();
            assert_eq!(&got, want);
        }
    }

    #[test]
    fn cap_exceeded_points_to_decentralized_selector() {
        let err = enumerate_arms_capped(100, 5, DEFAULT_ARM_CAP).unwrap_err();
        assert!(matches!(err, Error::ArmSpaceTooLarge { .. }));
        assert!(err.to_string().contains("bp_ucb"));
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for (n, k) in [(6, 2), (7, 3), (9, 4)] {
            let arms = enumerate_arms(n, k).unwrap();
            for arm in &arms {
                assert_eq!(arm_rank(&arm.members, n).unwrap(), arm.id);
            }
        }
    }

    #[test]
    fn ucb_index_spot_values() {
        let s = ArmState { mean: 0.5, pulls: 4 };
        // t = e^4 makes ln t / pulls exactly 1.
        let idx = ucb_index(&s, std::f64::consts::E.powi(4), 1.0).unwrap();
        assert!((idx - 1.5).abs() < 1e-9);
        assert_eq!(ucb_index(&s, 1.0, 7.0).unwrap(), 0.5);
        assert_eq!(ucb_index(&s, 100.0, 0.0).unwrap(), 0.5);
        assert!(ucb_index(&ArmState::unpulled(), 5.0, 1.0).is_err());
    }

    #[test]
    fn cold_start_groups_cover_with_padding() {
        let groups = cold_start_groups(5, 2);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0], vec![ClientId(0), ClientId(1)]);
        assert_eq!(groups[1], vec![ClientId(2), ClientId(3)]);
        assert_eq!(groups[2], vec![ClientId(0), ClientId(4)]);
        for groups in [cold_start_groups(20, 5), cold_start_groups(7, 3)] {
            let n = groups.iter().flat_map(|g| g.iter()).map(|c| c.index()).max().unwrap() + 1;
            let mut covered = vec![false; n];
            for g in &groups {
                assert_eq!(g.len(), groups[0].len());
                for c in g {
                    covered[c.index()] = true;
                }
            }
            assert!(covered.iter().all(|&c| c));
        }
    }

    #[test]
    fn quick_init_intersection_weighting() {
        let arms = enumerate_arms(4, 2).unwrap();
        let groups = vec![vec![ClientId(0), ClientId(1)], vec![ClientId(2), ClientId(3)]];
        let states = quick_init(&arms, &groups, &[0.4, 0.8], 4, 2).unwrap();
        // Arm {0, 2} straddles both groups: (0.4 + 0.8) / 2.
        let id = arm_rank(&[ClientId(0), ClientId(2)], 4).unwrap();
        assert!((states[id].mean - 0.6).abs() < 1e-12);
        // Arm {0, 1} equals the first group.
        let id = arm_rank(&[ClientId(0), ClientId(1)], 4).unwrap();
        assert!((states[id].mean - 0.4).abs() < 1e-12);
        assert!(states.iter().all(|s| s.pulls == 1));
    }

    #[test]
    fn quick_init_single_group() {
        let arms = enumerate_arms(3, 3).unwrap();
        let groups = vec![vec![ClientId(0), ClientId(1), ClientId(2)]];
        let states = quick_init(&arms, &groups, &[0.8], 3, 3).unwrap();
        assert_eq!(states.len(), 1);
        assert!((states[0].mean - 0.8).abs() < 1e-12);
        assert_eq!(states[0].pulls, 1);
    }

    #[test]
    fn quick_init_constant_rewards_constant_means() {
        let arms = enumerate_arms(6, 2).unwrap();
        let groups = cold_start_groups(6, 2);
        let states = quick_init(&arms, &groups, &[0.55; 3], 6, 2).unwrap();
        assert!(states.iter().all(|s| (s.mean - 0.55).abs() < 1e-12));
    }

    #[test]
    fn quick_init_rejects_bad_groups() {
        let arms = enumerate_arms(4, 2).unwrap();
        // Two undersized groups.
        let groups = vec![vec![ClientId(0)], vec![ClientId(1)], vec![ClientId(2), ClientId(3)]];
        assert!(quick_init(&arms, &groups, &[0.1, 0.2, 0.3], 4, 2).is_err());
        // Missing client 3.
        let groups = vec![vec![ClientId(0), ClientId(1)], vec![ClientId(1), ClientId(2)]];
        assert!(quick_init(&arms, &groups, &[0.1, 0.2], 4, 2).is_err());
    }

    #[test]
    fn select_arm_prefers_best_and_breaks_ties_low() {
        let states = vec![ArmState { mean: 0.5, pulls: 3 }];
        assert_eq!(select_arm(&states, 9, 1.0).unwrap(), 0);

        let states = vec![ArmState { mean: 0.5, pulls: 3 }, ArmState { mean: 0.5, pulls: 3 }];
        assert_eq!(select_arm(&states, 9, 1.0).unwrap(), 0);

        // 0.9 + sqrt(ln 100 / 10) beats 0.5 + the same bonus.
        let states = vec![
            ArmState { mean: 0.9, pulls: 10 },
            ArmState { mean: 0.5, pulls: 10 },
            ArmState { mean: 0.5, pulls: 10 },
        ];
        assert_eq!(select_arm(&states, 100, 1.0).unwrap(), 0);
    }

    #[test]
    fn update_arm_running_mean() {
        let mut s = ArmState { mean: 0.4, pulls: 1 };
        update_arm(&mut s, 0.8).unwrap();
        assert!((s.mean - 0.6).abs() < 1e-12);
        assert_eq!(s.pulls, 2);

        update_arm(&mut s, 0.6).unwrap();
        assert!((s.mean - 0.6).abs() < 1e-12);

        assert!(update_arm(&mut s, 1.5).is_err());
        assert!(update_arm(&mut s, -0.1).is_err());
    }

    #[test]
    fn running_mean_matches_batch_mean() {
        let rewards = [0.1, 0.9, 0.3, 0.7, 0.22, 0.51, 1.0, 0.0];
        let mut s = ArmState { mean: rewards[0], pulls: 1 };
        for &r in &rewards[1..] {
            update_arm(&mut s, r).unwrap();
        }
        let batch = rewards.iter().sum::<f64>() / rewards.len() as f64;
        assert!((s.mean - batch).abs() < 1e-12);
    }

    #[test]
    fn gap_statistics() {
        let g = gaps(&[0.9, 0.7]).unwrap();
        assert_eq!(g.bad_arms, vec![1]);
        assert!((g.r_min.unwrap() - 0.2).abs() < 1e-12);
        assert!((g.r_max.unwrap() - 0.2).abs() < 1e-12);

        let g = gaps(&[0.5, 0.5, 0.5]).unwrap();
        assert!(g.bad_arms.is_empty());
        assert!(g.r_min.is_none() && g.r_max.is_none());

        let g = gaps(&[0.9, 0.8, 0.6]).unwrap();
        assert!((g.r_min.unwrap() - 0.1).abs() < 1e-12);
        assert!((g.r_max.unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn pseudo_regret_accumulates_gaps() {
        let means = [0.9, 0.7];
        let always_best = pseudo_regret(&[0; 10], &means).unwrap();
        assert!(always_best.iter().all(|&r| r == 0.0));

        let always_bad = pseudo_regret(&vec![1; 50], &means).unwrap();
        assert!((always_bad[49] - 10.0).abs() < 1e-12);

        assert!(pseudo_regret(&[2], &means).is_err());
    }

    #[test]
    fn pseudo_regret_equals_per_arm_tally() {
        // Mixed history: regret must equal the per-arm gap * pulls tally.
        let means = [0.9, 0.8, 0.6, 0.3];
        let mut rng = seeded_rng(5);
        let history: Vec<usize> = (0..500).map(|_| rng.random_range(0..means.len())).collect();
        let curve = pseudo_regret(&history, &means).unwrap();
        let stats = gaps(&means).unwrap();
        let mut pulls = [0u64; 4];
        for &a in &history {
            pulls[a] += 1;
        }
        let tally: f64 = (0..4).map(|a| stats.deltas[a] * pulls[a] as f64).sum();
        assert!((curve.last().unwrap() - tally).abs() < 1e-9);
        assert!(curve.windows(2).all(|w| w[1] >= w[0]), "regret must be non-decreasing");
    }

    #[test]
    fn regret_bound_values() {
        // T = 1 leaves only the constant term.
        let b = regret_bound(6, 0.1, 0.3, 1).unwrap();
        let constant = (std::f64::consts::PI.powi(2) / 3.0 + 1.0) * 6.0 * 0.3;
        assert!((b - constant).abs() < 1e-12);

        let b = regret_bound(1, 0.1, 0.3, 50).unwrap();
        let expect = 8.0 * (50f64).ln() / 0.1 + (std::f64::consts::PI.powi(2) / 3.0 + 1.0) * 0.3;
        assert!((b - expect).abs() < 1e-12);

        // Direct high-precision evaluation of 8*6*ln(1000)/0.1 + (pi^2/3+1)*6*0.3.
        let b = regret_bound(6, 0.1, 0.3, 1000).unwrap();
        assert!((b - 3323.444296552079).abs() < 1e-6, "got {b}");

        assert!(regret_bound(6, 0.0, 0.3, 10).is_err());
    }

    #[test]
    fn baseline_oracle_and_round_robin() {
        let mut rng = seeded_rng(0);
        let mut oracle = Baseline::oracle(6, 3);
        assert!((1..=20).all(|t| oracle.select(t, &mut rng).unwrap() == 3));

        let mut rr = Baseline::round_robin(6, vec![0, 1, 2]).unwrap();
        let picks: Vec<usize> = (1..=4).map(|t| rr.select(t, &mut rng).unwrap()).collect();
        assert_eq!(picks, vec![0, 1, 2, 0]);

        assert!(Baseline::round_robin(6, vec![]).is_err());
    }

    #[test]
    fn baseline_random_is_near_uniform() {
        // 60k draws over 6 arms: each frequency within 1/6 +/- 0.01 (3-sigma).
        let mut rng = seeded_rng(11);
        let mut base = Baseline::random(6);
        let mut counts = [0u32; 6];
        for t in 1..=60_000 {
            counts[base.select(t, &mut rng).unwrap()] += 1;
        }
        for c in counts {
            let f = c as f64 / 60_000.0;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "frequency {f}");
        }
    }

    #[test]
    fn conventional_ucb_plays_every_arm_first() {
        let mut rng = seeded_rng(4);
        let mut base = Baseline::conventional_ucb(5, 1.0);
        assert_eq!(base.init_slots(), 5);
        for t in 1..=5 {
            let arm = base.select(t, &mut rng).unwrap();
            assert_eq!(arm, t - 1);
            base.update(arm, 0.1 * t as f64).unwrap();
        }
        // After initialization the argmax applies.
        let arm = base.select(6, &mut rng).unwrap();
        assert_eq!(arm, 4);
    }

    proptest! {
        // Shifting every mean by the same constant shifts every index equally
        // and leaves the argmax unchanged.
        #[test]
        fn argmax_invariant_under_constant_shift(
            means in proptest::collection::vec(0.0f64..0.5, 2..12),
            pulls in proptest::collection::vec(1u64..40, 2..12),
            c in 0.0f64..0.4,
            t in 2usize..10_000,
        ) {
            let k = means.len().min(pulls.len());
            let states: Vec<ArmState> = (0..k)
                .map(|i| ArmState { mean: means[i], pulls: pulls[i] })
                .collect();
            let shifted: Vec<ArmState> = states
                .iter()
                .map(|s| ArmState { mean: s.mean + c, pulls: s.pulls })
                .collect();
            prop_assert_eq!(
                select_arm(&states, t, 1.0).unwrap(),
                select_arm(&shifted, t, 1.0).unwrap()
            );
        }

        // After initialization, exactly one pull lands per slot:
        // sum of (pulls - 1) equals the number of post-init slots.
        #[test]
        fn pull_accounting_after_init(seed in 0u64..200, extra_slots in 0usize..60) {
            let n = 6;
            let k = 2;
            let arms = enumerate_arms(n, k).unwrap();
            let groups = cold_start_groups(n, k);
            let rewards = vec![0.3, 0.5, 0.7];
            let mut states = quick_init(&arms, &groups, &rewards, n, k).unwrap();
            let t0 = groups.len();
            let mut rng = seeded_rng(seed);
            for s in 0..extra_slots {
                let t = t0 + s + 1;
                let a = select_arm(&states, t, 1.0).unwrap();
                update_arm(&mut states[a], rng.random::<f64>()).unwrap();
            }
            let total: u64 = states.iter().map(|s| s.pulls - 1).sum();
            prop_assert_eq!(total as usize, extra_slots);
        }
    }
}
