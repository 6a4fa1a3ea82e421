use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial has degree {found}, operation needs degree >= {needed}")]
    DegreeTooSmall { needed: usize, found: usize },

    #[error("zero or constant polynomial rejected")]
    ConstantPolynomial,

    #[error("leading coefficient of {0} is not positive")]
    NonPositiveLead(String),

    #[error("invalid polynomial encoding: {0}")]
    PolyParse(String),

    #[error("no root of h modulo {0} is coprime to it")]
    NoCoprimeRoot(u64),

    #[error("h has a coprime root modulo {0}; no witness set exists")]
    HasCoprimeRoot(u64),

    #[error("h(r_d + d x) is not divisible by lambda({d}) = {lambda}")]
    InexactDivision { d: u64, lambda: String },

    #[error("no p-adic root data for prime {0}")]
    MissingRootChoice(u64),

    #[error("p-adic root search for prime {p} exceeded depth {depth}")]
    LiftDepthExceeded { p: u64, depth: u32 },

    #[error("sieve table covers [2, {limit}] but {needed} is required")]
    TableTooSmall { needed: u64, limit: u64 },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error("gcd(a, q) = gcd({a}, {q}) > 1")]
    NotCoprime { a: i64, q: u64 },

    #[error("grid of {grid} points is too coarse for length {len}")]
    GridTooCoarse { grid: usize, len: u64 },

    #[error("moment modulus {n} too small; need >= {needed} to avoid aliasing")]
    ModulusTooSmall { n: u64, needed: u64 },

    #[error("moment order must be a positive even integer, got {0}")]
    OddMoment(u32),

    #[error("arc system with {0} major arcs is too large to enumerate")]
    TooManyArcs(u64),

    #[error("no progression beats the current density {sigma}")]
    NoIncrement { sigma: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
