use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("resonant indicial roots at t={endpoint}: recurrence term {index} divides by zero")]
    ResonantIndices { endpoint: u8, index: usize },

    #[error("step size underflow at t={t} (handoff radius too small or tolerance too tight)")]
    StepSizeUnderflow { t: f64 },

    #[error("Lambda(gamma)={lambda} collides with eigenvalue Lambda_{{{s},{m}}}={eigenvalue}")]
    EigenvalueCollision {
        lambda: f64,
        eigenvalue: f64,
        s: usize,
        m: u32,
    },

    #[error("ill-conditioned origin fit (alpha_+ - alpha_- = {gap}): A={a}, B={b}, cond={cond}")]
    IllConditionedFit { a: f64, b: f64, cond: f64, gap: f64 },

    #[error("no eigenvalue bracket for s={s}, m={m} below Lambda={lambda_max}")]
    BracketNotFound { s: usize, m: u32, lambda_max: f64 },

    #[error("gamma={gamma} outside the positivity range ({lo}, {hi})")]
    GammaOutOfRange { gamma: f64, lo: f64, hi: f64 },

    #[error("no sub/supersolution bracket: {0}")]
    NoBracket(String),

    #[error("constant search exhausted: {0}")]
    SearchExhausted(String),

    #[error("monotone iteration violated ordering at iterate {iteration} (t={t}, excess={excess})")]
    MonotonicityViolation { iteration: usize, t: f64, excess: f64 },

    #[error("iteration did not converge after {iterations} steps (change={change}, residual={residual})")]
    NoConvergence {
        iterations: usize,
        change: f64,
        residual: f64,
    },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("multi-start limits disagree: max deviation {deviation}")]
    NonUniqueLimit { deviation: f64 },

    #[error("finite-difference stencil leaves the half-space at x1={x1} (h={h})")]
    StencilOutOfDomain { x1: f64, h: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for input problems, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::GammaOutOfRange { .. } | Error::Io(_) | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
