//! Synthetic datasets, local SGD on a linear hinge-loss classifier,
//! success-weighted federated averaging, and opinion evaluation.
//!
//! The dataset is a two-class Gaussian mixture in `R^d`: class `y` draws
//! `x ~ N(y * m, I)` with `||m||` set by the config. I.i.d. clients sample
//! both classes evenly; skewed clients over-represent one class, which is the
//! data-quality heterogeneity the selectors have to discover. All functions
//! are pure over immutable inputs, so independent trials can run concurrently.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::{sample_uplink, ChannelModel, ClientId, DataConfig};
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// One labelled sample, label in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: f64,
}

/// A client's local train and test split.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClientData {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Per-client data plus a shared balanced held-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub clients: Vec<ClientData>,
    pub shared_test: Vec<Sample>,
    pub dim: usize,
}

impl Partition {
    /// Training-set size `|D_n|` of a client.
    pub fn data_size(&self, n: usize) -> usize {
        self.clients[n].train.len()
    }
}

/// Linear classifier state broadcast between server and clients.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub round: u64,
}

impl GlobalModel {
    pub fn zeros(dim: usize) -> Self {
        GlobalModel { weights: vec![0.0; dim], bias: 0.0, round: 0 }
    }

    fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

/// Per-client evaluation scores in `[0, 1]` for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Evaluation(format!("opinion {bad} is outside [0, 1]")));
        }
        Ok(OpinionVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for OpinionVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Mini-batch subgradient descent parameters for the hinge loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdParams {
    pub batch: usize,
    pub epochs: usize,
    pub step: f64,
    /// L2 penalty on the weights; the bias is not regularized.
    pub reg: f64,
}

/// Standard normal draw via Box-Muller.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_sample(label: f64, mean: &[f64], offset: f64, rng: &mut impl Rng) -> Sample {
    let features = mean.iter().map(|&m| offset + label * m + standard_normal(rng)).collect();
    Sample { features, label }
}

/// Generates the synthetic per-client partition.
///
/// I.i.d. clients flip a fair coin per sample; skewed clients draw their
/// dominant class with probability `skew` (or always, when only one label is
/// allowed). Dominant classes alternate across skewed clients so the
/// population stays balanced. Each client's test split follows its own train
/// distribution; the shared held-out set is exactly class-balanced.
#[allow(clippy::needless_range_loop)]
pub fn generate_partition(cfg: &DataConfig, n: usize, rng: &mut impl Rng) -> Result<Partition> {
    if cfg.dim == 0 {
        return Err(Error::Config("feature dimension must be at least 1".into()));
    }
    if cfg.labels_per_noniid_client == 0 {
        return Err(Error::Config("labels_per_noniid_client must be at least 1".into()));
    }
    let sizes: Vec<usize> = match &cfg.sizes {
        Some(s) => {
            if s.len() != n {
                return Err(Error::Config(format!("{} sizes for {} clients", s.len(), n)));
            }
            if s.contains(&0) {
                return Err(Error::Config("every client needs at least one sample".into()));
            }
            s.clone()
        }
        None => {
            let lo = cfg.size_lo.max(1);
            let hi = cfg.size_hi.max(lo);
            (0..n).map(|_| rng.random_range(lo..=hi)).collect()
        }
    };

    let mean: Vec<f64> = vec![cfg.separation / (cfg.dim as f64).sqrt(); cfg.dim];
    let offset = cfg.offset / (cfg.dim as f64).sqrt();
    let num_skewed = (0..n).filter(|c| !cfg.iid_clients.contains(c)).count();
    let positive_skewed = (cfg.skew_balance * num_skewed as f64).round() as usize;
    let mut clients = Vec::with_capacity(n);
    let mut skew_rank = 0usize;
    for client in 0..n {
        let iid = cfg.iid_clients.contains(&client);
        // The first `skew_balance` share of skewed clients lean positive,
        // the rest negative.
        let dominant = if iid {
            0.0
        } else if skew_rank < positive_skewed {
            1.0
        } else {
            -1.0
        };
        if !iid {
            skew_rank += 1;
        }
        let p_train = if cfg.labels_per_noniid_client == 1 { 1.0 } else { cfg.skew.max(0.5) };
        let p_test = match cfg.test_skew {
            _ if cfg.labels_per_noniid_client == 1 && cfg.test_skew.is_none() => 1.0,
            Some(ts) => ts.max(0.5),
            None => p_train,
        };
        let draw_label = |p_dominant: f64, rng: &mut dyn rand::RngCore| -> f64 {
            if iid {
                if rng.random::<f64>() < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            } else if rng.random::<f64>() < p_dominant {
                dominant
            } else {
                -dominant
            }
        };
        let train_noise = if iid { 0.0 } else { cfg.noniid_label_noise };
        let test_noise =
            if iid { 0.0 } else { cfg.test_label_noise.unwrap_or(cfg.noniid_label_noise) };
        let train = (0..sizes[client])
            .map(|_| {
                let y = draw_label(p_train, rng);
                let mut s = draw_sample(y, &mean, offset, rng);
                if train_noise > 0.0 && rng.random::<f64>() < train_noise {
                    s.label = -s.label;
                }
                s
            })
            .collect();
        let test = (0..cfg.test_size.max(1))
            .map(|_| {
                let y = draw_label(p_test, rng);
                let mut s = draw_sample(y, &mean, offset, rng);
                if test_noise > 0.0 && rng.random::<f64>() < test_noise {
                    s.label = -s.label;
                }
                s
            })
            .collect();
        clients.push(ClientData { train, test });
    }

    let shared = cfg.shared_test_size.max(2);
    let shared_test = (0..shared)
        .map(|i| {
            let y = if i % 2 == 0 { 1.0 } else { -1.0 };
            draw_sample(y, &mean, offset, rng)
        })
        .collect();

    Ok(Partition { clients, shared_test, dim: cfg.dim })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Runs `epochs` passes of mini-batch subgradient descent on the regularized
/// hinge loss, starting from `model`.
///
/// The subgradient at a margin of exactly 1 is taken as zero, so the update is
/// deterministic given the shuffle RNG. `epochs = 0` returns the input model
/// unchanged.
pub fn local_sgd(
    model: &GlobalModel,
    train: &[Sample],
    params: &SgdParams,
    rng: &mut impl Rng,
) -> Result<GlobalModel> {
    if train.is_empty() {
        return Err(Error::Training("empty train set".into()));
    }
    if params.batch == 0 {
        return Err(Error::Training("batch size must be at least 1".into()));
    }
    if params.step <= 0.0 {
        return Err(Error::Training(format!("step must be positive, got {}", params.step)));
    }
    let dim = model.weights.len();
    if train.iter().any(|s| s.features.len() != dim) {
        return Err(Error::Training("feature dimension mismatch".into()));
    }
    let mut w = model.weights.clone();
    let mut b = model.bias;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for _ in 0..params.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(params.batch) {
            // Within-batch order is irrelevant to the math; canonicalize it so
            // the float accumulation is independent of the shuffle.
            let mut batch = chunk.to_vec();
            batch.sort_unstable();
            let mut grad_w = vec![0.0; dim];
            let mut grad_b = 0.0;
            for &i in &batch {
                let s = &train[i];
                let margin = s.label * (dot(&w, &s.features) + b);
                if margin < 1.0 {
                    for (g, &x) in grad_w.iter_mut().zip(&s.features) {
                        *g -= s.label * x;
                    }
                    grad_b -= s.label;
                }
            }
            let inv = 1.0 / batch.len() as f64;
            for (wj, g) in w.iter_mut().zip(&grad_w) {
                *wj -= params.step * (params.reg * *wj + g * inv);
            }
            b -= params.step * grad_b * inv;
        }
    }
    Ok(GlobalModel { weights: w, bias: b, round: model.round })
}

/// Success-weighted federated average: clients whose uplink failed contribute
/// nothing, the rest are weighted by data size. When every uplink fails the
/// previous global model is returned unchanged.
pub fn aggregate(
    locals: &[GlobalModel],
    uplinks: &[bool],
    sizes: &[usize],
    previous: &GlobalModel,
) -> Result<GlobalModel> {
    if locals.len() != uplinks.len() || locals.len() != sizes.len() {
        return Err(Error::Config(format!(
            "aggregate inputs disagree: {} models, {} uplinks, {} sizes",
            locals.len(),
            uplinks.len(),
            sizes.len()
        )));
    }
    let successes: Vec<usize> =
        (0..locals.len()).filter(|&i| uplinks[i] && sizes[i] > 0).collect();
    let total: u64 = successes.iter().map(|&i| sizes[i] as u64).sum();
    if total == 0 {
        return Ok(GlobalModel {
            weights: previous.weights.clone(),
            bias: previous.bias,
            round: previous.round + 1,
        });
    }
    if let [only] = successes.as_slice() {
        // Single-term average: return the parameters exactly.
        return Ok(GlobalModel {
            weights: locals[*only].weights.clone(),
            bias: locals[*only].bias,
            round: previous.round + 1,
        });
    }
    let dim = locals[successes[0]].weights.len();
    if successes.iter().any(|&i| locals[i].weights.len() != dim) {
        return Err(Error::Config("aggregate: model dimensions disagree".into()));
    }
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    for &i in &successes {
        let w = sizes[i] as f64 / total as f64;
        for (acc, &x) in weights.iter_mut().zip(&locals[i].weights) {
            *acc += w * x;
        }
        bias += w * locals[i].bias;
    }
    let out = GlobalModel { weights, bias, round: previous.round + 1 };
    if !out.is_finite() {
        return Err(Error::Training("aggregated model has non-finite entries".into()));
    }
    Ok(out)
}

/// Classification accuracy of `model` on a test set; scores of exactly zero
/// predict the positive class.
pub fn evaluate(model: &GlobalModel, test: &[Sample]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Evaluation("empty test set".into()));
    }
    let correct = test
        .iter()
        .filter(|s| {
            let score = dot(&model.weights, &s.features) + model.bias;
            let predicted = if score >= 0.0 { 1.0 } else { -1.0 };
            predicted == s.label
        })
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// Every client's accuracy on its own local test split.
pub fn evaluate_all(model: &GlobalModel, partition: &Partition) -> Result<OpinionVector> {
    let values = partition
        .clients
        .iter()
        .map(|c| evaluate(model, &c.test))
        .collect::<Result<Vec<_>>>()?;
    OpinionVector::new(values)
}

/// Arithmetic mean of the opinion vector.
pub fn average_opinion(opinions: &OpinionVector) -> Result<f64> {
    if opinions.is_empty() {
        return Err(Error::Evaluation("cannot average an empty opinion vector".into()));
    }
    Ok(opinions.iter().sum::<f64>() / opinions.len() as f64)
}

/// Runs `l` federated rounds with the selected clients: each round every
/// selected client trains locally from the current global model, uplinks are
/// drawn per client and round, and the survivors are averaged.
///
/// The shuffle seed is shared per round, so clients with identical data
/// produce identical local models.
#[allow(clippy::too_many_arguments)]
pub fn run_fl_round_block(
    selected: &[ClientId],
    channel: &ChannelModel,
    partition: &Partition,
    params: &SgdParams,
    l: usize,
    global: &GlobalModel,
    block_seed: u64,
    channel_rng: &mut impl Rng,
) -> Result<GlobalModel> {
    if l == 0 {
        return Err(Error::Config("the round block needs l >= 1".into()));
    }
    let mut model = global.clone();
    for round in 0..l {
        let round_seed =
            crate::rng::derive_seed(block_seed, crate::rng::Stream::Trial(round as u64));
        let mut locals = Vec::with_capacity(selected.len());
        let mut uplinks = Vec::with_capacity(selected.len());
        let mut sizes = Vec::with_capacity(selected.len());
        for &cid in selected {
            let data = &partition.clients[cid.index()];
            let mut train_rng = seeded_rng(round_seed);
            locals.push(local_sgd(&model, &data.train, params, &mut train_rng)?);
            uplinks.push(sample_uplink(channel.theta(cid.index()), channel_rng));
            sizes.push(data.train.len());
        }
        model = aggregate(&locals, &uplinks, &sizes, &model)?;
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// Dataset dump / load
// ---------------------------------------------------------------------------

/// Writes the partition as CSV, one row per sample:
/// `client,split,label,f0,...`. Shared held-out rows use client `-1`.
pub fn dump_partition_csv(partition: &Partition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write!(out, "client,split,label")?;
        for j in 0..partition.dim {
            write!(out, ",f{j}")?;
        }
        writeln!(out)?;
        let mut write_row = |client: i64, split: &str, s: &Sample| -> std::io::Result<()> {
            write!(out, "{client},{split},{}", s.label as i64)?;
            for f in &s.features {
                write!(out, ",{f}")?;
            }
            writeln!(out)
        };
        for (n, c) in partition.clients.iter().enumerate() {
            for s in &c.train {
                write_row(n as i64, "train", s)?;
            }
            for s in &c.test {
                write_row(n as i64, "test", s)?;
            }
        }
        for s in &partition.shared_test {
            write_row(-1, "shared", s)?;
        }
        Ok(())
    })()
    .map_err(|e| Error::io(path, e))
}

/// Reads a partition written by [`dump_partition_csv`].
pub fn load_partition_csv(path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty dataset file", path.display())))?
        .map_err(|e| Error::io(path, e))?;
    let dim = header.split(',').count().saturating_sub(3);
    if dim == 0 {
        return Err(Error::Config(format!("{}: no feature columns", path.display())));
    }
    let mut clients: Vec<ClientData> = Vec::new();
    let mut shared_test = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad =
            |what: &str| Error::Config(format!("{}: line {}: {what}", path.display(), lineno + 2));
        let mut fields = line.split(',');
        let client: i64 = fields
            .next()
            .ok_or_else(|| bad("missing client"))?
            .parse()
            .map_err(|_| bad("bad client id"))?;
        let split = fields.next().ok_or_else(|| bad("missing split"))?.to_string();
        let label: f64 = fields
            .next()
            .ok_or_else(|| bad("missing label"))?
            .parse()
            .map_err(|_| bad("bad label"))?;
        let features: Vec<f64> = fields
            .map(|f| f.parse::<f64>().map_err(|_| bad("bad feature")))
            .collect::<Result<_>>()?;
        if features.len() != dim {
            return Err(bad("feature count mismatch"));
        }
        let sample = Sample { features, label };
        if client < 0 {
            shared_test.push(sample);
            continue;
        }
        let idx = client as usize;
        if clients.len() <= idx {
            clients.resize(idx + 1, ClientData::default());
        }
        match split.as_str() {
            "train" => clients[idx].train.push(sample),
            "test" => clients[idx].test.push(sample),
            other => return Err(bad(&format!("unknown split {other}"))),
        }
    }
    Ok(Partition { clients, shared_test, dim })
}
