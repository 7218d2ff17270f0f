use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error in {op}: expected {expected}, got {got}")]
    Shape {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("singular matrix: pivot {pivot} vanished")]
    Singular { pivot: usize },

    #[error("numeric overflow in {op}")]
    NumericOverflow { op: &'static str },

    #[error("complex root {re}{im:+}i has no conjugate partner")]
    Conjugacy { re: f64, im: f64 },

    #[error("{what} index {index} outside {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("system is not observable: rank {rank} < {n} (deficit {})", n - rank)]
    NotObservable { rank: usize, n: usize },

    #[error(
        "matrix is not in observability companion form; offending entries: {}",
        format_entries(offending)
    )]
    NotCompanionForm { offending: Vec<(usize, usize, f64)> },

    #[error("internal consistency check failed in {what}: residual {residual:e}")]
    Inconsistent { what: &'static str, residual: f64 },

    #[error("operation requires an input matrix B")]
    MissingInputMatrix,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("simulation diverged at step {step}")]
    Divergence { step: usize },

    #[error("decay rate undefined: {0}")]
    UndefinedRate(String),
}

fn format_entries(entries: &[(usize, usize, f64)]) -> String {
    entries
        .iter()
        .map(|(r, c, v)| format!("({r},{c})={v:e}"))
        .collect::<Vec<_>>()
        .join(", ")
}
