//! Error types shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("evaluation time {t} outside covered span [{start}, {end}]")]
    SpanViolation { t: f64, start: f64, end: f64 },

    #[error("history covers [{have_start}, {have_end}] but [{need_start}, {need_end}] is required")]
    HistorySpan {
        need_start: f64,
        need_end: f64,
        have_start: f64,
        have_end: f64,
    },

    #[error("distributed delay integral must be nonnegative, got {0}")]
    NegativeDistributedIntegral(f64),

    #[error("operation requires a {expected} equilibrium")]
    WrongEquilibriumKind { expected: &'static str },

    #[error("operation requires tau = 0, got tau = {0}")]
    TauNotZero(f64),

    #[error(
        "root bracketing failed: G({lo}) = {g_lo}, G({hi}) = {g_hi} (no sign change)"
    )]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },

    #[error(
        "Newton refinement failed for collocation estimate {re}+{im}i (final residual {residual:e})"
    )]
    NewtonFailure { re: f64, im: f64, residual: f64 },

    #[error(
        "root count unstable under collocation refinement: {count_coarse} roots at n={n_coarse}, {count_fine} at n={n_fine} (n too small)"
    )]
    CountInstability {
        n_coarse: usize,
        count_coarse: usize,
        n_fine: usize,
        count_fine: usize,
    },

    #[error("state left [-eps, 1+eps] at t = {t}: S = {s}, I = {i} (initial data outside the invariant set, or step too large)")]
    DomainExit { t: f64, s: f64, i: f64 },

    #[error("step {step} does not divide the delay {tau} into an integer number of steps")]
    StepNotDivisor { tau: f64, step: f64 },

    #[error("invalid scan specification: {0}")]
    InvalidScan(String),

    #[error("empty estimation window: {0}")]
    EmptyWindow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
