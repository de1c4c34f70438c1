//! Core scenario types: clients, positions, topology, channel model, and the
//! scenario configuration shared by every other module.
//!
//! All values here are immutable after construction and safe to share across
//! concurrent trials; randomness comes exclusively from caller-provided RNGs.

use std::collections::VecDeque;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Index of a client within a scenario, in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClientId(pub usize);

impl ClientId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for ClientId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected client graph with 2-D positions in kilometres.
///
/// The adjacency matrix is symmetric with a zero diagonal by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<[f64; 2]>,
    edges: Vec<Vec<bool>>,
}

impl Topology {
    /// Builds a topology from explicit positions and adjacency, validating
    /// symmetry and a zero diagonal.
    #[allow(clippy::needless_range_loop)]
    pub fn from_adjacency(positions: Vec<[f64; 2]>, edges: Vec<Vec<bool>>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::Config("topology needs at least one client".into()));
        }
        if edges.len() != n || edges.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!("adjacency must be {n}x{n}")));
        }
        for i in 0..n {
            if edges[i][i] {
                return Err(Error::Config(format!("self-loop at client {i}")));
            }
            for j in 0..i {
                if edges[i][j] != edges[j][i] {
                    return Err(Error::Config(format!("adjacency not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Topology { positions, edges })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges[i][j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[i]
            .iter()
            .enumerate()
            .filter_map(|(j, &e)| e.then_some(j))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges[i].iter().filter(|&&e| e).count()
    }

    /// Euclidean distance between two clients in km.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.positions[i], self.positions[j])
    }

    /// Maximum pairwise distance over all client pairs (not just linked ones).
    pub fn max_pairwise_distance(&self) -> f64 {
        let n = self.n();
        let mut d_max: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d_max = d_max.max(self.distance(i, j));
            }
        }
        d_max
    }

    /// BFS hop distances from `start`; `usize::MAX` marks unreachable nodes.
    fn hops_from(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.hops_from(0).iter().all(|&d| d != usize::MAX)
    }

    /// Graph diameter in hops, or `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut diam = 0;
        for i in 0..self.n() {
            let d = self.hops_from(i);
            for &h in &d {
                if h == usize::MAX {
                    return None;
                }
                diam = diam.max(h);
            }
        }
        Some(diam)
    }

    /// Flat list of directed edges `(i, n)` in lexicographic order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.edges[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Links every pair of clients within `link_radius` km of each other.
pub fn build_topology(positions: &[[f64; 2]], link_radius: f64) -> Result<Topology> {
    if positions.is_empty() {
        return Err(Error::Config("cannot build a topology from zero positions".into()));
    }
    if link_radius <= 0.0 || !link_radius.is_finite() {
        return Err(Error::Config(format!("link radius must be positive, got {link_radius}")));
    }
    let n = positions.len();
    let mut edges = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..i {
            let linked = euclidean(positions[i], positions[j]) <= link_radius;
            edges[i][j] = linked;
            edges[j][i] = linked;
        }
    }
    Topology::from_adjacency(positions.to_vec(), edges)
}

/// Uniform random placement inside an `area_km` x `area_km` square.
pub fn random_positions(n: usize, area_km: f64, rng: &mut impl Rng) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [rng.random::<f64>() * area_km, rng.random::<f64>() * area_km])
        .collect()
}

/// Large-scale path loss in dB at distance `d` km: `128.1 + 37.6 log10(d)`.
pub fn path_loss_db(d: f64) -> Result<f64> {
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::Domain(format!("path loss needs a positive distance, got {d}")));
    }
    Ok(128.1 + 37.6 * d.log10())
}

/// Draws one uplink outcome: `true` with probability `theta`.
///
/// `theta` must already be a valid probability; [`ChannelModel`] enforces that
/// at construction.
pub fn sample_uplink(theta: f64, rng: &mut impl Rng) -> bool {
    debug_assert!((0.0..=1.0).contains(&theta));
    rng.random::<f64>() < theta
}

/// Per-client uplink success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    theta: Vec<f64>,
}

impl ChannelModel {
    /// Fixed per-client probabilities.
    pub fn fixed(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Config("channel model needs at least one client".into()));
        }
        for (n, &t) in theta.iter().enumerate() {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("theta[{n}] = {t} is outside [0, 1]")));
            }
        }
        Ok(ChannelModel { theta })
    }

    /// The same probability for every client.
    pub fn uniform(theta: f64, n: usize) -> Result<Self> {
        ChannelModel::fixed(vec![theta; n])
    }

    /// Derives per-client probabilities from the path-loss model: the mean
    /// received SNR at distance `d` is `tx_power - PL(d) - noise`, and theta
    /// is the probability that log-normal shadowing with standard deviation
    /// `fade_margin_db` keeps the received SNR above `snr_threshold_db`.
    ///
    /// A zero fade margin degenerates to a hard threshold.
    pub fn from_path_loss(
        positions: &[[f64; 2]],
        server: [f64; 2],
        params: &PathLossChannel,
    ) -> Result<Self> {
        let theta = positions
            .iter()
            .map(|&p| {
                let d = euclidean(p, server).max(1e-3);
                let snr = params.tx_power_dbm - path_loss_db(d)? - params.noise_dbm;
                let t = if params.fade_margin_db > 0.0 {
                    normal_cdf((snr - params.snr_threshold_db) / params.fade_margin_db)
                } else if snr >= params.snr_threshold_db {
                    1.0
                } else {
                    0.0
                };
                Ok(t.clamp(0.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        ChannelModel::fixed(theta)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self, n: usize) -> f64 {
        self.theta[n]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }
}

/// Standard normal CDF via the Abramowitz-Stegun erf approximation
/// (absolute error below 1.5e-7, plenty for channel probabilities).
fn normal_cdf(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.3275911 * x.abs());
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-x * x).exp();
    let erf = if x < 0.0 { -erf } else { erf };
    0.5 * (1.0 + erf)
}

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

/// Where rewards come from during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Arm means are specified in the config; rewards are drawn from them and
    /// regret is exact. Used to verify the regret bound calculators.
    Oracle,
    /// Rewards come from actually training and evaluating the classifier.
    Federated,
}

/// Belief-propagation and decentralized-index parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BpConfig {
    /// Coupling constant in dB; converted to linear scale before use.
    pub c_db: f64,
    /// Distance exponent of the compatibility function.
    pub beta: f64,
    /// Convergence tolerance on the max message change per sweep.
    pub tol: f64,
    /// Sweep cap; non-convergence is reported, not fatal.
    pub max_iter: usize,
    /// Message damping in `[0, 1)`; 0 is the plain parallel update.
    pub damping: f64,
    /// Exploration factor of the decentralized index.
    pub mu: f64,
    /// Record per-slot belief-propagation diagnostics in episode traces.
    pub diagnostics: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            c_db: -30.0,
            beta: 3.7,
            tol: 1e-10,
            max_iter: 200,
            damping: 0.0,
            mu: 0.01,
            diagnostics: true,
        }
    }
}

/// Local SGD parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    /// Mini-batch size.
    pub batch: usize,
    /// Epochs per local round.
    pub epochs: usize,
    /// Step size.
    pub step: f64,
    /// L2 regularization strength on the weights (not the bias).
    pub reg: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig { batch: 100, epochs: 10, step: 1e-7, reg: 0.0 }
    }
}

/// Path-loss-derived channel parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathLossChannel {
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub snr_threshold_db: f64,
    /// Shadowing standard deviation in dB; 0 means a hard SNR threshold.
    pub fade_margin_db: f64,
}

impl Default for PathLossChannel {
    fn default() -> Self {
        PathLossChannel {
            tx_power_dbm: 20.0,
            noise_dbm: -114.0,
            snr_threshold_db: 6.0,
            fade_margin_db: 8.0,
        }
    }
}

/// Channel specification: fixed thetas (the default) or derived from path loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub mode: ChannelMode,
    /// Success probability applied to every client in `fixed` mode, unless
    /// `theta_per_client` is given.
    pub theta: f64,
    pub theta_per_client: Option<Vec<f64>>,
    pub path_loss: PathLossChannel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    Fixed,
    PathLoss,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            mode: ChannelMode::Fixed,
            theta: 1.0,
            theta_per_client: None,
            path_loss: PathLossChannel::default(),
        }
    }
}

/// Client placement and graph formation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    /// Side length of the square deployment area, km.
    pub area_km: f64,
    /// Clients within this distance of each other are linked.
    pub link_radius: f64,
    /// Explicit positions; random uniform placement when absent.
    pub positions: Option<Vec<[f64; 2]>>,
    /// Server position; defaults to the area center.
    pub server: Option<[f64; 2]>,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig { area_km: 1.0, link_radius: 0.5, positions: None, server: None }
    }
}

/// Synthetic dataset shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    /// Feature dimension of the two-class Gaussian mixture.
    pub dim: usize,
    /// Class-mean separation `||mu||`; larger is easier.
    pub separation: f64,
    /// Norm of a common offset added to both class means. A nonzero offset
    /// forces the classifier to learn its bias term, so accuracy rises at
    /// step-size speed instead of jumping to the plateau in one slot.
    pub offset: f64,
    /// Explicit per-client train-set sizes; drawn from the range below when
    /// absent.
    pub sizes: Option<Vec<usize>>,
    pub size_lo: usize,
    pub size_hi: usize,
    /// Clients that draw from the full mixture; everyone else is label-skewed.
    pub iid_clients: Vec<usize>,
    /// Distinct labels a skewed client sees: 1 forces a single class, 2 keeps
    /// both at the `skew` proportion.
    pub labels_per_noniid_client: usize,
    /// Fraction of the dominant class at skewed clients (used when
    /// `labels_per_noniid_client` is 2).
    pub skew: f64,
    /// Fraction of skewed clients whose dominant class is positive; 0.5
    /// alternates evenly, larger values make the skewed population lean one
    /// way, which is what makes bad-heavy selections genuinely biased.
    pub skew_balance: f64,
    /// Dominant-class fraction of skewed clients' local test splits; defaults
    /// to the train skew. Evaluation traffic can be less one-sided than a
    /// client's training collection, and a capped test skew keeps the opinion
    /// metric informative even for single-class trainers.
    pub test_skew: Option<f64>,
    /// Label-flip probability at skewed clients, the data-quality axis of the
    /// heterogeneity: noisy labels keep pulling the decision boundary away
    /// no matter how good the broadcast model already is.
    pub noniid_label_noise: f64,
    /// Label-flip probability on skewed clients' test splits; defaults to the
    /// train-side noise. Evaluation feedback is often curated more carefully
    /// than hoarded training data, and a lower test noise keeps the average
    /// opinion sensitive to model quality.
    pub test_label_noise: Option<f64>,
    /// Per-client local test-set size.
    pub test_size: usize,
    /// Shared balanced held-out set size.
    pub shared_test_size: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            dim: 10,
            separation: 1.2,
            offset: 0.0,
            sizes: None,
            size_lo: 80,
            size_hi: 160,
            iid_clients: vec![0, 1, 2, 3, 4],
            labels_per_noniid_client: 2,
            skew: 0.8,
            skew_balance: 0.5,
            test_skew: None,
            noniid_label_noise: 0.0,
            test_label_noise: None,
            test_size: 40,
            shared_test_size: 200,
        }
    }
}

/// Reward distribution used in oracle mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardDist {
    Bernoulli,
    Beta,
}

/// Ground-truth arm means for oracle mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Explicit per-arm means in lexicographic arm order.
    pub arm_means: Option<Vec<f64>>,
    /// Per-client qualities; arm means become subset averages. Preferred,
    /// since it also defines a sensible optimum for the decentralized selector.
    pub client_quality: Option<Vec<f64>>,
    pub dist: RewardDist,
    /// Concentration of the Beta distribution (`alpha + beta`) when used.
    pub beta_concentration: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            arm_means: None,
            client_quality: None,
            dist: RewardDist::Bernoulli,
            beta_concentration: 8.0,
        }
    }
}

/// Knobs for the baseline selection policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    /// Sets cycled by the round-robin baseline; cold-start groups by default.
    pub round_robin_sets: Option<Vec<Vec<usize>>>,
    /// Fixed set played by the oracle baseline; defaults to the arm with the
    /// best oracle mean, or the i.i.d. clients in federated mode.
    pub oracle_arm: Option<Vec<usize>>,
    /// Enumeration cap on `C(N, K)`.
    pub arm_cap: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { round_robin_sets: None, oracle_arm: None, arm_cap: 200_000 }
    }
}

/// Full experiment description. Deserialized from TOML; unknown keys are
/// rejected so typos fail loudly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Number of clients.
    pub n: usize,
    /// Communication budget: clients trained per slot.
    pub k: usize,
    /// Time horizon in slots.
    pub t: usize,
    /// Federated communication rounds per slot.
    pub l: usize,
    /// Exploration factor of the centralized UCB index.
    pub mu: f64,
    /// Master seed; all RNG streams derive from it.
    pub seed: u64,
    pub reward_mode: RewardMode,
    pub bp: BpConfig,
    pub training: TrainingConfig,
    pub channel: ChannelConfig,
    pub topology: TopologyConfig,
    pub data: DataConfig,
    pub oracle: OracleConfig,
    pub selection: SelectionConfig,
}

impl Default for ScenarioConfig {
    /// Desk-scale defaults: N=20, K=5, T=200, L=15, mu=1, theta=1, the BP
    /// constants at -30 dB and 3.7, and batch/epoch/step of 100/10/1e-7.
    fn default() -> Self {
        ScenarioConfig {
            n: 20,
            k: 5,
            t: 200,
            l: 15,
            mu: 1.0,
            seed: 0,
            reward_mode: RewardMode::Federated,
            bp: BpConfig::default(),
            training: TrainingConfig::default(),
            channel: ChannelConfig::default(),
            topology: TopologyConfig::default(),
            data: DataConfig::default(),
            oracle: OracleConfig::default(),
            selection: SelectionConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Parses a TOML scenario file.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(s).map_err(|e| Error::Config(format!("scenario parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates a TOML scenario file from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScenarioConfig::from_toml_str(&text)
    }

    /// Structural checks shared by every consumer.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::Config(format!("k must satisfy 1 <= k <= n, got k={} n={}", self.k, self.n)));
        }
        let t0 = self.n.div_ceil(self.k);
        if self.t < t0 {
            return Err(Error::Config(format!(
                "t = {} is shorter than the {t0}-slot initialization (ceil(n/k))",
                self.t
            )));
        }
        if self.l == 0 {
            return Err(Error::Config("l must be at least 1".into()));
        }
        if self.mu < 0.0 || !self.mu.is_finite() {
            return Err(Error::Config(format!("mu must be >= 0, got {}", self.mu)));
        }
        if self.bp.mu < 0.0 || !self.bp.mu.is_finite() {
            return Err(Error::Config(format!("bp.mu must be >= 0, got {}", self.bp.mu)));
        }
        if !(0.0..1.0).contains(&self.bp.damping) {
            return Err(Error::Config(format!("bp.damping must be in [0, 1), got {}", self.bp.damping)));
        }
        if self.bp.tol <= 0.0 || self.bp.max_iter == 0 {
            return Err(Error::Config("bp.tol must be positive and bp.max_iter >= 1".into()));
        }
        if self.training.batch == 0 {
            return Err(Error::Config("training.batch must be at least 1".into()));
        }
        if self.training.step <= 0.0 {
            return Err(Error::Config("training.step must be positive".into()));
        }
        if self.data.dim == 0 {
            return Err(Error::Config("data.dim must be at least 1".into()));
        }
        if self.data.labels_per_noniid_client == 0 {
            return Err(Error::Config("data.labels_per_noniid_client must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.channel.theta) {
            return Err(Error::Config(format!("channel.theta = {} is outside [0, 1]", self.channel.theta)));
        }
        if let Some(list) = &self.channel.theta_per_client {
            if list.len() != self.n {
                return Err(Error::Config(format!(
                    "channel.theta_per_client has {} entries for n = {}",
                    list.len(),
                    self.n
                )));
            }
        }
        if let Some(pos) = &self.topology.positions {
            if pos.len() != self.n {
                return Err(Error::Config(format!(
                    "topology.positions has {} entries for n = {}",
                    pos.len(),
                    self.n
                )));
            }
            let a = self.topology.area_km;
            if pos.iter().any(|p| p[0] < 0.0 || p[0] > a || p[1] < 0.0 || p[1] > a) {
                return Err(Error::Config(format!("positions must lie inside the {a} km square")));
            }
        }
        if let Some(sizes) = &self.data.sizes {
            if sizes.len() != self.n {
                return Err(Error::Config(format!(
                    "data.sizes has {} entries for n = {}",
                    sizes.len(),
                    self.n
                )));
            }
            if sizes.contains(&0) {
                return Err(Error::Config("every client needs at least one training sample".into()));
            }
        }
        if self.data.iid_clients.iter().any(|&c| c >= self.n) {
            return Err(Error::Config("data.iid_clients references a client >= n".into()));
        }
        if !(0.0..=1.0).contains(&self.data.skew) {
            return Err(Error::Config(format!("data.skew = {} is outside [0, 1]", self.data.skew)));
        }
        if !(0.0..=1.0).contains(&self.data.noniid_label_noise) {
            return Err(Error::Config(format!(
                "data.noniid_label_noise = {} is outside [0, 1]",
                self.data.noniid_label_noise
            )));
        }
        if let Some(tn) = self.data.test_label_noise {
            if !(0.0..=1.0).contains(&tn) {
                return Err(Error::Config(format!("data.test_label_noise = {tn} is outside [0, 1]")));
            }
        }
        if let Some(ts) = self.data.test_skew {
            if !(0.0..=1.0).contains(&ts) {
                return Err(Error::Config(format!("data.test_skew = {ts} is outside [0, 1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.data.skew_balance) {
            return Err(Error::Config(format!(
                "data.skew_balance = {} is outside [0, 1]",
                self.data.skew_balance
            )));
        }
        if let Some(q) = &self.oracle.client_quality {
            if q.len() != self.n || q.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Config("oracle.client_quality must list n values in [0, 1]".into()));
            }
        }
        if let Some(m) = &self.oracle.arm_means {
            if m.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Config("oracle.arm_means must lie in [0, 1]".into()));
            }
        }
        if let Some(sets) = &self.selection.round_robin_sets {
            if sets.is_empty() {
                return Err(Error::Config("round_robin_sets must not be empty".into()));
            }
            for set in sets {
                if set.len() != self.k || set.iter().any(|&c| c >= self.n) {
                    return Err(Error::Config(format!("each round-robin set must hold k = {} valid clients", self.k)));
                }
            }
        }
        if let Some(arm) = &self.selection.oracle_arm {
            if arm.len() != self.k || arm.iter().any(|&c| c >= self.n) {
                return Err(Error::Config(format!("oracle_arm must hold k = {} valid clients", self.k)));
            }
        }
        Ok(())
    }

    /// Slots consumed by the cold-start initialization.
    pub fn init_slots(&self) -> usize {
        self.n.div_ceil(self.k)
    }

    /// Server position used by path-loss channels.
    pub fn server_position(&self) -> [f64; 2] {
        self.topology
            .server
            .unwrap_or([self.topology.area_km / 2.0, self.topology.area_km / 2.0])
    }

    /// Materializes client positions: explicit ones if given, otherwise
    /// placement derived from the scenario seed. Random placement retries a
    /// bounded number of substreams until the link graph is connected, since
    /// both decentralized stages need a connected graph; explicit positions
    /// are taken as-is.
    pub fn build_topology(&self) -> Result<Topology> {
        if let Some(pos) = &self.topology.positions {
            return build_topology(pos, self.topology.link_radius);
        }
        let mut rng = stream_rng(self.seed, Stream::Placement);
        let mut last = None;
        for _ in 0..64 {
            let pos = random_positions(self.n, self.topology.area_km, &mut rng);
            let topo = build_topology(&pos, self.topology.link_radius)?;
            if topo.is_connected() {
                return Ok(topo);
            }
            last = Some(topo);
        }
        // Give the disconnected graph to callers that can live with it; the
        // decentralized entry points re-validate.
        Ok(last.expect("at least one attempt"))
    }

    /// Materializes the channel model for the given topology.
    pub fn build_channel(&self, topo: &Topology) -> Result<ChannelModel> {
        match self.channel.mode {
            ChannelMode::Fixed => match &self.channel.theta_per_client {
                Some(list) => ChannelModel::fixed(list.clone()),
                None => ChannelModel::uniform(self.channel.theta, self.n),
            },
            ChannelMode::PathLoss => ChannelModel::from_path_loss(
                topo.positions(),
                self.server_position(),
                &self.channel.path_loss,
            ),
        }
    }
}
