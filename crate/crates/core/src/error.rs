use thiserror::Error;

/// Errors raised by graph construction, the round engine and the algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed arguments or graph data supplied by the caller.
    #[error("input error: {0}")]
    Input(String),

    /// Malformed graph or solution file.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A checked invariant or postcondition does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A node sent a message larger than the per-edge bit budget.
    #[error(
        "protocol violation in round {round}: message {from} -> {to} has {bits} bits, budget is {budget}"
    )]
    ProtocolViolation {
        round: u64,
        from: usize,
        to: usize,
        bits: usize,
        budget: usize,
    },

    /// A node addressed a message to a non-neighbor or sent twice over one edge.
    #[error("protocol error in round {round}: {message}")]
    Protocol { round: u64, message: String },

    /// The protocol did not halt within the configured number of rounds.
    #[error("protocol did not halt within {max_rounds} rounds")]
    Timeout { max_rounds: u64 },

    /// A cluster is too large to gather at its leader.
    #[error("cluster {cluster} has {size} gathered edges, capacity is {capacity}")]
    Capacity {
        cluster: usize,
        size: usize,
        capacity: usize,
    },

    /// An exact oracle was asked to solve an instance beyond its size cap.
    #[error("instance too large for exact solver: {0}")]
    SizeCap(String),
}

impl Error {
    /// True for errors that signal a broken guarantee rather than bad input.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_)
                | Error::ProtocolViolation { .. }
                | Error::Protocol { .. }
                | Error::Timeout { .. }
        )
    }

    /// Process exit code used by the command line runner.
    pub fn exit_code(&self) -> i32 {
        if self.is_violation() {
            2
        } else {
            1
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invariant(msg.into()))
}
