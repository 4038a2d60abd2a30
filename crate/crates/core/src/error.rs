use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised anywhere in the pricing/scheduling pipeline.
///
/// Customer, unit and period indices are stored 0-based and displayed
/// 1-based.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}{}: {message}", fmt_index(*.index))]
    Validation {
        field: &'static str,
        index: Option<usize>,
        message: String,
    },
    #[error("Assumption 1 violated for customer {}: a = {a} < sum of w = {row_sum}", .customer + 1)]
    AssumptionViolated { customer: usize, a: f64, row_sum: f64 },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} index {index} out of range (length {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("customer {} has a = 0, best response is unbounded", .customer + 1)]
    UnboundedResponse { customer: usize },
    #[error("A - W is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },
    #[error("prices leave the nonnegative orthant: q[{}] = {q}", .customer + 1)]
    InfeasiblePrice { customer: usize, q: f64 },
    #[error("best-response iteration did not converge in {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("equilibrium residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
    #[error("pricing model invalid: {0}")]
    ModelInvalid(String),
    #[error("quadratic program is infeasible")]
    QpInfeasible,
    #[error("quadratic program did not terminate after {0} active-set changes")]
    QpIterations(usize),
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("threshold of unit {} accepts draws with probability {probability:e}", .unit + 1)]
    AcceptanceTooLow { unit: usize, probability: f64 },
    #[error("state space too large: {states} joint states x {actions} actions x {periods} periods exceeds budget {budget}")]
    StateSpaceTooLarge {
        states: u128,
        actions: u128,
        periods: u128,
        budget: u128,
    },
    #[error("schedule search space 2^{bits} exceeds limit {limit}")]
    SearchSpaceTooLarge { bits: u32, limit: u128 },
    #[error("no maintenance schedule satisfies the degradation thresholds")]
    Infeasible,
    #[error("revenue table for period {} has no entry for capacity {capacity}", .period + 1)]
    MissingCapacity { period: usize, capacity: f64 },
}

fn fmt_index(index: Option<usize>) -> String {
    match index {
        Some(i) => alloc::format!(" [{}]", i + 1),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn validation(
        field: &'static str,
        index: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Validation {
            field,
            index,
            message: message.into(),
        }
    }

    /// Short machine-readable category, used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Validation { .. }
            | Error::AssumptionViolated { .. }
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::Domain { .. } => "validation",
            Error::UnboundedResponse { .. }
            | Error::SingularMatrix { .. }
            | Error::ModelInvalid(_) => "model",
            Error::InfeasiblePrice { .. }
            | Error::NotConverged { .. }
            | Error::Residual { .. }
            | Error::QpInfeasible
            | Error::QpIterations(_)
            | Error::AcceptanceTooLow { .. } => "numerical",
            Error::StateSpaceTooLarge { .. } | Error::SearchSpaceTooLarge { .. } => "size",
            Error::Infeasible | Error::MissingCapacity { .. } => "infeasible",
        }
    }
}
