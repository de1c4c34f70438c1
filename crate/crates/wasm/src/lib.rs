//! Browser bindings for the simulator demo page.
//!
//! Three interactive operations, each taking a JSON parameter object and
//! returning a JSON result ready for plotting:
//!
//! - [`regret_experiment`] — oracle-mode regret of the centralized selector
//!   against its logarithmic upper bound;
//! - [`bp_playground`] — belief propagation on a random geometric graph with
//!   the contraction certificate and the residual curve;
//! - [`selection_demo`] — a small federated run comparing selection policies
//!   on accuracy and per-client selection counts.
//!
//! The heavy lifting lives in the core crate; this layer only shapes
//! parameters and results. All entry points are deterministic in the seed.

use rand::Rng;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use fedsel::bandit::{gaps, regret_bound};
use fedsel::beliefprop::{beliefs, check_contraction, run_bp, BpParams};
use fedsel::domain::{
    build_topology, random_positions, BpConfig, DataConfig, OracleConfig, RewardMode,
    ScenarioConfig, TopologyConfig, TrainingConfig,
};
use fedsel::harness::{monte_carlo, Algorithm};
use fedsel::rng::{stream_rng, Stream};

fn stringify(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Thins a curve to at most `cap` evenly spaced points (keeping the last).
fn downsample(curve: &[f64], cap: usize) -> Vec<(usize, f64)> {
    if curve.is_empty() {
        return Vec::new();
    }
    let stride = curve.len().div_ceil(cap).max(1);
    let mut out: Vec<(usize, f64)> =
        curve.iter().copied().enumerate().step_by(stride).map(|(i, v)| (i + 1, v)).collect();
    if out.last().map(|&(i, _)| i) != Some(curve.len()) {
        out.push((curve.len(), *curve.last().unwrap()));
    }
    out
}

// ---------------------------------------------------------------------------
// Regret experiment
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(default)]
struct RegretParams {
    n: usize,
    k: usize,
    t: usize,
    trials: usize,
    mu: f64,
    seed: u64,
}

impl Default for RegretParams {
    fn default() -> Self {
        RegretParams { n: 6, k: 2, t: 5000, trials: 20, mu: 1.0, seed: 7 }
    }
}

#[derive(Serialize)]
struct RegretResult {
    arms: usize,
    r_min: f64,
    r_max: f64,
    /// `(t, mean cumulative regret)` points.
    regret: Vec<(usize, f64)>,
    /// `(t, upper bound)` points.
    bound: Vec<(usize, f64)>,
}

/// Runs the centralized selector in oracle mode on evenly spread arm means
/// and reports the mean regret curve next to its logarithmic upper bound.
#[wasm_bindgen]
pub fn regret_experiment(params_json: &str) -> Result<String, JsValue> {
    regret_experiment_impl(params_json).map_err(|e| JsValue::from_str(&e))
}

fn regret_experiment_impl(params_json: &str) -> Result<String, String> {
    let p: RegretParams = serde_json::from_str(params_json).map_err(stringify)?;
    let num_arms = fedsel::bandit::count_arms(p.n, p.k);
    if !(2..=5000).contains(&num_arms) {
        return Err("choose n and k with 2..=5000 subsets".into());
    }
    let arm_means: Vec<f64> = (0..num_arms as usize)
        .map(|i| 0.3 + 0.6 * i as f64 / (num_arms - 1) as f64)
        .collect();
    let config = ScenarioConfig {
        n: p.n,
        k: p.k,
        t: p.t.clamp(p.n.div_ceil(p.k), 20_000),
        l: 1,
        mu: p.mu,
        seed: p.seed,
        reward_mode: RewardMode::Oracle,
        oracle: OracleConfig { arm_means: Some(arm_means.clone()), ..OracleConfig::default() },
        bp: BpConfig { diagnostics: false, ..BpConfig::default() },
        data: DataConfig { iid_clients: vec![0], ..DataConfig::default() },
        ..ScenarioConfig::default()
    };
    config.validate().map_err(stringify)?;

    let mut sum = vec![0.0; config.t];
    for trial in 0..p.trials.clamp(1, 200) {
        let seed = fedsel::rng::derive_seed(config.seed, Stream::Trial(trial as u64));
        let trace =
            fedsel::harness::run_episode(&config, Algorithm::QuickInitUcb, seed).map_err(stringify)?;
        for (acc, slot) in sum.iter_mut().zip(&trace.slots) {
            *acc += slot.cum_regret.unwrap_or(0.0);
        }
    }
    let trials = p.trials.clamp(1, 200) as f64;
    let curve: Vec<f64> = sum.into_iter().map(|s| s / trials).collect();

    let stats = gaps(&arm_means).map_err(stringify)?;
    let (r_min, r_max) = (stats.r_min.unwrap_or(0.0), stats.r_max.unwrap_or(0.0));
    let bound_curve: Vec<f64> = (1..=config.t)
        .map(|t| regret_bound(arm_means.len(), r_min, r_max, t).unwrap_or(f64::NAN))
        .collect();

    let result = RegretResult {
        arms: arm_means.len(),
        r_min,
        r_max,
        regret: downsample(&curve, 400),
        bound: downsample(&bound_curve, 400),
    };
    serde_json::to_string(&result).map_err(stringify)
}

// ---------------------------------------------------------------------------
// Belief-propagation playground
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(default)]
struct BpPlaygroundParams {
    n: usize,
    /// Side length of the placement square, km; smaller areas satisfy the
    /// contraction certificate.
    area: f64,
    link_radius: f64,
    c_db: f64,
    beta: f64,
    seed: u64,
}

impl Default for BpPlaygroundParams {
    fn default() -> Self {
        BpPlaygroundParams { n: 8, area: 0.6, link_radius: 0.35, c_db: -30.0, beta: 3.7, seed: 3 }
    }
}

#[derive(Serialize)]
struct BpPlaygroundResult {
    positions: Vec<[f64; 2]>,
    edges: Vec<(usize, usize)>,
    opinions: Vec<f64>,
    beliefs: Vec<f64>,
    residuals: Vec<f64>,
    iterations: usize,
    converged: bool,
    lambda: f64,
    lambda_satisfied: bool,
}

/// Places clients at random, runs message passing on random opinions, and
/// reports beliefs plus the convergence diagnostics.
#[wasm_bindgen]
pub fn bp_playground(params_json: &str) -> Result<String, JsValue> {
    bp_playground_impl(params_json).map_err(|e| JsValue::from_str(&e))
}

fn bp_playground_impl(params_json: &str) -> Result<String, String> {
    let p: BpPlaygroundParams = serde_json::from_str(params_json).map_err(stringify)?;
    if p.n == 0 || p.n > 64 {
        return Err("n must be in 1..=64".into());
    }
    let mut rng = stream_rng(p.seed, Stream::Placement);
    let positions = random_positions(p.n, p.area.clamp(0.05, 3.0), &mut rng);
    let topology = build_topology(&positions, p.link_radius.max(0.01)).map_err(stringify)?;
    let mut opinion_rng = stream_rng(p.seed, Stream::Data);
    let opinions: Vec<f64> =
        (0..p.n).map(|_| 0.1 + 0.9 * opinion_rng.random::<f64>()).collect();
    let params = BpParams::from_db(p.c_db, p.beta).with_tol(1e-10).with_max_iter(500);
    let state = run_bp(&opinions, &topology, &params);
    let belief_values =
        beliefs(&state, &opinions, &topology, &params).unwrap_or_else(|_| vec![1.0 / p.n as f64; p.n]);
    let cert = check_contraction(p.n, topology.max_pairwise_distance(), p.beta);

    let undirected: Vec<(usize, usize)> =
        state.edges().iter().copied().filter(|&(i, j)| i < j).collect();
    let result = BpPlaygroundResult {
        positions: topology.positions().to_vec(),
        edges: undirected,
        opinions,
        beliefs: belief_values,
        residuals: state.residual_history.clone(),
        iterations: state.iterations,
        converged: state.converged,
        lambda: cert.lambda,
        lambda_satisfied: cert.satisfied,
    };
    serde_json::to_string(&result).map_err(stringify)
}

// ---------------------------------------------------------------------------
// Selection demo
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(default)]
struct SelectionDemoParams {
    n: usize,
    k: usize,
    t: usize,
    trials: usize,
    seed: u64,
    algorithms: Vec<String>,
}

impl Default for SelectionDemoParams {
    fn default() -> Self {
        SelectionDemoParams {
            n: 10,
            k: 3,
            t: 60,
            trials: 5,
            seed: 2,
            algorithms: vec!["quick_init_ucb".into(), "bp_ucb".into(), "random".into()],
        }
    }
}

#[derive(Serialize)]
struct AlgoCurves {
    algorithm: String,
    accuracy: Vec<(usize, f64)>,
    selection_counts: Vec<f64>,
}

#[derive(Serialize)]
struct SelectionDemoResult {
    n: usize,
    k: usize,
    t: usize,
    iid_clients: Vec<usize>,
    runs: Vec<AlgoCurves>,
}

/// Small federated comparison: accuracy curves and per-client selection
/// counts for the requested policies on a 10-client two-quality population.
#[wasm_bindgen]
pub fn selection_demo(params_json: &str) -> Result<String, JsValue> {
    selection_demo_impl(params_json).map_err(|e| JsValue::from_str(&e))
}

fn selection_demo_impl(params_json: &str) -> Result<String, String> {
    let p: SelectionDemoParams = serde_json::from_str(params_json).map_err(stringify)?;
    if p.n < 2 || p.n > 16 || p.k == 0 || p.k >= p.n {
        return Err("need 2 <= n <= 16 and 1 <= k < n".into());
    }
    let iid: Vec<usize> = (0..(p.n / 3).max(1)).collect();
    let mut sizes = vec![24usize; p.n];
    for &c in &iid {
        sizes[c] = 72;
    }
    let config = ScenarioConfig {
        n: p.n,
        k: p.k,
        t: p.t.clamp(p.n.div_ceil(p.k), 400),
        l: 4,
        mu: 0.025,
        seed: p.seed,
        reward_mode: RewardMode::Federated,
        training: TrainingConfig { batch: 16, epochs: 8, step: 0.1, reg: 0.01 },
        bp: BpConfig { mu: 0.25, diagnostics: false, ..BpConfig::default() },
        topology: TopologyConfig { link_radius: 0.6, ..TopologyConfig::default() },
        data: DataConfig {
            dim: 30,
            separation: 1.6,
            offset: 6.0,
            sizes: Some(sizes),
            iid_clients: iid.clone(),
            labels_per_noniid_client: 2,
            skew: 0.8,
            noniid_label_noise: 0.45,
            test_label_noise: Some(0.3),
            test_size: 60,
            shared_test_size: 300,
            ..DataConfig::default()
        },
        ..ScenarioConfig::default()
    };
    config.validate().map_err(stringify)?;

    let mut runs = Vec::new();
    for name in &p.algorithms {
        let algo: Algorithm = name.parse().map_err(stringify)?;
        let report = monte_carlo(&config, algo, p.trials.clamp(1, 30)).map_err(stringify)?;
        let accuracy = report.mean_accuracy.as_deref().unwrap_or(&[]).to_vec();
        runs.push(AlgoCurves {
            algorithm: name.clone(),
            accuracy: downsample(&accuracy, 400),
            selection_counts: report.selection_counts.clone(),
        });
    }
    let result =
        SelectionDemoResult { n: p.n, k: p.k, t: config.t, iid_clients: iid, runs };
    serde_json::to_string(&result).map_err(stringify)
}
