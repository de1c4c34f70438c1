//! Loopy belief propagation over the client graph.
//!
//! Each client `n` carries a binary activation state; its local potential is
//! the squared opinion `phi(r) = r^2` and the pairwise compatibility between
//! linked clients is `psi(d) = exp(-C d^beta)`, a distance-based coupling.
//! Messages are iterated synchronously (all directed edges update from the
//! previous sweep's values, then a barrier), normalized per edge, and
//! optionally damped. Beliefs fuse a client's own opinion with its incoming
//! messages and are normalized globally so the selected-state beliefs sum to
//! one across clients, which preserves the heterogeneity between clients.
//!
//! The potentials are pluggable: the default opinion/distance model is
//! state-independent, but the engine accepts any state-dependent pair model
//! behind the same interface.
//!
//! Convergence is certified by a contraction condition on the coupling
//! strength: when `(N - 1) tanh(d_max^beta) < 1` the parallel update is a
//! contraction and the fixed point is unique regardless of initialization.
//! Non-convergence within the sweep cap is reported, never thrown.

use rand::Rng;

use crate::domain::Topology;
use crate::error::{Error, Result};

/// Parameters of the belief machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpParams {
    /// Linear-scale coupling constant (already converted from dB).
    pub c_linear: f64,
    /// Distance exponent.
    pub beta: f64,
    /// Convergence tolerance on the max message change per sweep.
    pub tol: f64,
    /// Sweep cap.
    pub max_iter: usize,
    /// Damping factor in `[0, 1)`; 0 is the plain parallel update.
    pub damping: f64,
}

impl BpParams {
    /// Builds parameters from a dB-scale coupling constant.
    ///
    /// A dB value is a power ratio, so -30 dB becomes `10^(-3) = 0.001`; a
    /// negative linear coupling would make the compatibility grow with
    /// distance, which the model rules out.
    pub fn from_db(c_db: f64, beta: f64) -> Self {
        BpParams { c_linear: db_to_linear(c_db), beta, tol: 1e-10, max_iter: 200, damping: 0.0 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }
}

/// dB to linear power scale: `10^(db / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Local potential: the squared opinion.
pub fn local_fn(r: f64) -> f64 {
    r * r
}

/// Pairwise compatibility at distance `d`: `exp(-c_linear * d^beta)`.
/// Symmetric in its endpoints since it depends only on the distance.
pub fn compatibility(d: f64, params: &BpParams) -> f64 {
    (-params.c_linear * d.powf(params.beta)).exp()
}

/// Contraction certificate for the parallel message update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    /// `(N - 1) tanh(d_max^beta)`.
    pub lambda: f64,
    /// Whether `lambda < 1`, i.e. a unique fixed point is guaranteed.
    pub satisfied: bool,
}

/// Evaluates the contraction condition `(N - 1) tanh(d_max^beta) < 1`.
///
/// The reported `lambda` saturates in floating point for huge couplings, so
/// the flag is decided by the equivalent exact comparison
/// `d_max^beta < atanh(1 / (N - 1))`: with one neighbor `tanh` never reaches
/// one, so any finite coupling contracts.
pub fn check_contraction(n: usize, d_max: f64, beta: f64) -> Contraction {
    let coupling = d_max.powf(beta).abs();
    let m = n.saturating_sub(1);
    let lambda = m as f64 * coupling.tanh();
    let satisfied = match m {
        0 => true,
        1 => coupling.is_finite(),
        m => coupling < (1.0 / m as f64).atanh(),
    };
    Contraction { lambda, satisfied }
}

/// Supplementary diagnostic that folds the linear coupling constant into the
/// contraction ratio: `(N - 1) tanh(c_linear * d_max^beta)`. Reported but not
/// asserted anywhere.
pub fn scaled_contraction(n: usize, d_max: f64, beta: f64, c_linear: f64) -> f64 {
    (n.saturating_sub(1)) as f64 * (c_linear * d_max.powf(beta)).abs().tanh()
}

/// A pairwise model over binary states: local potentials per client and a
/// coupling per linked pair. States are 0 (not selected) and 1 (selected).
pub trait Potentials {
    fn local(&self, client: usize, state: usize) -> f64;
    fn coupling(&self, i: usize, n: usize, state_i: usize, state_n: usize) -> f64;
}

/// The default model: `phi = r^2` and `psi = exp(-C d^beta)`, both
/// state-independent.
pub struct OpinionPotentials<'a> {
    pub opinions: &'a [f64],
    pub topology: &'a Topology,
    pub params: &'a BpParams,
}

impl Potentials for OpinionPotentials<'_> {
    fn local(&self, client: usize, _state: usize) -> f64 {
        local_fn(self.opinions[client])
    }

    fn coupling(&self, i: usize, n: usize, _state_i: usize, _state_n: usize) -> f64 {
        compatibility(self.topology.distance(i, n), self.params)
    }
}

/// Message initialization for the sweep loop.
pub enum MessageInit<'a> {
    /// Every message starts at (0.5, 0.5).
    Uniform,
    /// Random positive components, normalized per edge.
    Random(&'a mut dyn rand::RngCore),
}

/// Messages over directed edges plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    /// Directed edges `(i, n)` = "i talks to n", lexicographic order.
    edges: Vec<(usize, usize)>,
    /// One message per directed edge, indexed by the receiver's state.
    messages: Vec<[f64; 2]>,
    /// Incoming edge positions per client, for belief products.
    incoming: Vec<Vec<usize>>,
    /// Max absolute message change of the last sweep.
    pub residual: f64,
    /// Sweeps performed.
    pub iterations: usize,
    /// Whether the residual dropped below tolerance within the sweep cap.
    pub converged: bool,
    /// Contraction certificate of the underlying geometry.
    pub certificate: Contraction,
    /// Residual after each sweep.
    pub residual_history: Vec<f64>,
}

impl BeliefState {
    /// Fresh state over a topology with the requested initialization.
    pub fn init(topology: &Topology, init: MessageInit<'_>) -> Self {
        let edges = topology.directed_edges();
        let mut incoming = vec![Vec::new(); topology.n()];
        for (pos, &(_, n)) in edges.iter().enumerate() {
            incoming[n].push(pos);
        }
        let messages = match init {
            MessageInit::Uniform => vec![[0.5, 0.5]; edges.len()],
            MessageInit::Random(rng) => edges
                .iter()
                .map(|_| {
                    let a = rng.random::<f64>().max(1e-9);
                    let b = rng.random::<f64>().max(1e-9);
                    [a / (a + b), b / (a + b)]
                })
                .collect(),
        };
        BeliefState {
            edges,
            messages,
            incoming,
            residual: f64::INFINITY,
            iterations: 0,
            converged: false,
            certificate: Contraction { lambda: 0.0, satisfied: true },
            residual_history: Vec::new(),
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn messages(&self) -> &[[f64; 2]] {
        &self.messages
    }

    fn incoming_product(&self, client: usize, state: usize) -> f64 {
        self.incoming[client].iter().map(|&pos| self.messages[pos][state]).product()
    }
}

/// One synchronous sweep: every directed-edge message is recomputed from the
/// previous sweep's values, normalized per edge (receiver states sum to one),
/// and mixed with the old message by `damping`. Returns the max absolute
/// change. All-zero updates are reset to uniform, which keeps products away
/// from overflow and underflow.
#[allow(clippy::needless_range_loop)]
pub fn message_sweep_with(state: &mut BeliefState, pot: &impl Potentials, damping: f64) -> f64 {
    let old = state.messages.clone();
    let mut residual: f64 = 0.0;
    for (pos, &(i, n)) in state.edges.iter().enumerate() {
        let mut fresh = [0.0f64; 2];
        for (state_n, slot) in fresh.iter_mut().enumerate() {
            let mut sum = 0.0;
            for state_i in 0..2 {
                let mut product = 1.0;
                for &in_pos in &state.incoming[i] {
                    let (k, _) = state.edges[in_pos];
                    if k != n {
                        product *= old[in_pos][state_i];
                    }
                }
                sum += pot.local(i, state_i) * pot.coupling(i, n, state_i, state_n) * product;
            }
            *slot = sum;
        }
        let norm = fresh[0] + fresh[1];
        let normalized = if norm > f64::MIN_POSITIVE && norm.is_finite() {
            [fresh[0] / norm, fresh[1] / norm]
        } else {
            [0.5, 0.5]
        };
        let mixed = [
            (1.0 - damping) * normalized[0] + damping * old[pos][0],
            (1.0 - damping) * normalized[1] + damping * old[pos][1],
        ];
        residual =
            residual.max((mixed[0] - old[pos][0]).abs()).max((mixed[1] - old[pos][1]).abs());
        state.messages[pos] = mixed;
    }
    state.residual = residual;
    state.iterations += 1;
    state.residual_history.push(residual);
    residual
}

/// [`message_sweep_with`] under the default opinion/distance model.
pub fn message_sweep(
    state: &mut BeliefState,
    opinions: &[f64],
    topology: &Topology,
    params: &BpParams,
) -> f64 {
    let pot = OpinionPotentials { opinions, topology, params };
    message_sweep_with(state, &pot, params.damping)
}

/// Per-client beliefs at the selected state, normalized globally so they sum
/// to one across clients. Errors when every unnormalized belief is zero.
pub fn beliefs_with(state: &BeliefState, pot: &impl Potentials, n: usize) -> Result<Vec<f64>> {
    let raw: Vec<f64> =
        (0..n).map(|client| pot.local(client, 1) * state.incoming_product(client, 1)).collect();
    let total: f64 = raw.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::DegenerateBeliefs);
    }
    Ok(raw.into_iter().map(|b| b / total).collect())
}

/// Beliefs under the default opinion/distance model.
pub fn beliefs(
    state: &BeliefState,
    opinions: &[f64],
    topology: &Topology,
    params: &BpParams,
) -> Result<Vec<f64>> {
    let pot = OpinionPotentials { opinions, topology, params };
    beliefs_with(state, &pot, topology.n())
}

/// Sweeps until the residual drops below tolerance or the cap is reached.
/// Never fails: the returned state carries the convergence flag and the
/// contraction certificate.
pub fn run_bp_with(
    pot: &impl Potentials,
    topology: &Topology,
    params: &BpParams,
    init: MessageInit<'_>,
) -> BeliefState {
    let mut state = BeliefState::init(topology, init);
    state.certificate =
        check_contraction(topology.n(), topology.max_pairwise_distance(), params.beta);
    for _ in 0..params.max_iter {
        let residual = message_sweep_with(&mut state, pot, params.damping);
        if residual < params.tol {
            state.converged = true;
            break;
        }
    }
    state
}

/// [`run_bp_with`] under the default model and uniform initialization.
pub fn run_bp(opinions: &[f64], topology: &Topology, params: &BpParams) -> BeliefState {
    let pot = OpinionPotentials { opinions, topology, params };
    run_bp_with(&pot, topology, params, MessageInit::Uniform)
}
