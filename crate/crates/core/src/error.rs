use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no jobs")]
    EmptyInstance,
    #[error("job {id}: {reason}")]
    InvalidJob { id: usize, reason: String },
    #[error("duplicate job id {0}")]
    DuplicateId(u64),
    #[error("unknown job id {0}")]
    UnknownJob(usize),
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("schedule does not match instance: {0}")]
    ScheduleMismatch(String),
    #[error("remaining processing time must be positive")]
    NonPositiveRemaining,
    #[error("tie script chooses job {choice} at t={t}, which is not among the candidates")]
    ScriptViolation { t: String, choice: usize },
    #[error("exhaustive tie search exceeded its budget of {0} branches")]
    BudgetExceeded(u64),
    #[error("{n} jobs exceed the limit of {max}")]
    TooManyJobs { n: usize, max: usize },
    #[error("instance is not aligned to grid {0}")]
    GridMismatch(String),
    #[error("instance carries no generator tags")]
    NotGenerated,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("policy produced an infeasible dispatch: {0}")]
    InfeasibleDispatch(String),
    #[error("schedule has no slices")]
    EmptySchedule,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
