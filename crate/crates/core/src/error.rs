//! Error types shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or running a scenario.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration (bad scenario file, inconsistent parameters).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numeric argument is outside its domain (e.g. non-positive distance).
    #[error("domain error: {0}")]
    Domain(String),

    /// Local training cannot proceed (e.g. empty train set).
    #[error("training error: {0}")]
    Training(String),

    /// Model evaluation cannot proceed (e.g. empty test set).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// The super-arm space is too large to enumerate; use the decentralized
    /// selector instead.
    #[error(
        "arm space too large: C({n}, {k}) = {arms} exceeds the cap of {cap}; \
         the combinatorial selector does not scale here, use bp_ucb"
    )]
    ArmSpaceTooLarge { n: usize, k: usize, arms: u128, cap: u128 },

    /// An arm's index was requested before the arm was ever pulled.
    #[error("arm {0} is uninitialized (zero pulls)")]
    UninitializedArm(usize),

    /// Cold-start groups do not form a valid cover of the client set.
    #[error("grouping error: {0}")]
    Grouping(String),

    /// All arms share the optimal mean, so reward gaps are undefined.
    #[error("undefined gap: every arm has the optimal mean")]
    UndefinedGap,

    /// All opinions are zero, so beliefs cannot be normalized.
    #[error("degenerate beliefs: all opinions are zero")]
    DegenerateBeliefs,

    /// Gossip agreement is impossible on a disconnected graph.
    #[error("gossip agreement impossible: topology is disconnected")]
    Disconnected,

    /// A rank table is missing entries for some clients.
    #[error("incomplete rank table: {have} of {need} clients known")]
    IncompleteRankTable { have: usize, need: usize },

    /// A selection history references an arm id outside the arm set.
    #[error("unknown arm id {0} in selection history")]
    UnknownArm(usize),

    /// Filesystem failure, annotated with the offending path.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors that stem from user-supplied configuration rather than
    /// a runtime failure. The CLI maps these to a distinct exit code.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Grouping(_) | Error::ArmSpaceTooLarge { .. }
        )
    }
}
