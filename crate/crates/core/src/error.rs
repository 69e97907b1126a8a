use thiserror::Error;

/// Errors raised by the spectral representation and its operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("grid length must be a positive even integer, got {0}")]
    InvalidLength(usize),
    #[error("half spectrum for N={n} must hold {expected} coefficients, got {got}")]
    SpectrumLength { n: usize, expected: usize, got: usize },
    #[error("domain length must be positive and finite, got {0}")]
    InvalidDomain(f64),
    #[error("Sobolev index must be finite, got {0}")]
    InvalidIndex(f64),
    #[error("negative order s={s} is only defined for mean-zero fields (mean = {mean:e})")]
    NegativeOrderWithMean { s: f64, mean: f64 },
    #[error("invalid frequency band [{lo}, {hi}]")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("dyadic threshold 2^{k} is outside the dealiased range |k| <= {limit}")]
    BandBeyondDealiased { k: i32, limit: usize },
    #[error("cutoff of scale {scale} needs a box of length >= {required}, have {length}")]
    CutoffTooWide {
        scale: f64,
        required: f64,
        length: f64,
    },
}

/// Violations of the hypotheses placed on the viscosity coefficient.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error(
        "coercivity violated: need eps < a(x) < 1/eps with eps={epsilon}, \
         measured min a={min_a}, max a={max_a}"
    )]
    CoercivityViolation { epsilon: f64, min_a: f64, max_a: f64 },
    #[error(
        "Lipschitz budget exceeded: need max|a'| <= delta*eps = {budget}, measured {max_slope}"
    )]
    LipschitzBudgetExceeded { max_slope: f64, budget: f64 },
    #[error(
        "structural condition failed: need a''(x) <= 2a(x), measured max(a''-2a) = {excess}"
    )]
    StructuralConditionFailed { excess: f64 },
    #[error(
        "neither structural option holds: max|a'| = {max_slope} exceeds delta*eps = {budget} \
         and max(a''-2a) = {excess} > 0"
    )]
    NoStructuralOption {
        max_slope: f64,
        budget: f64,
        excess: f64,
    },
    #[error("delta must be nonnegative and finite, got {0}")]
    InvalidDelta(f64),
    #[error(transparent)]
    Grid(#[from] SpectralError),
}

/// Failures while advancing a trajectory.
#[derive(Debug, Clone, Error)]
pub enum IntegrationError {
    #[error("non-finite state at t={t} (step {step}); last finite H1 energy {last_energy}")]
    NonFiniteState {
        t: f64,
        step: u64,
        last_energy: f64,
    },
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("trajectory for seed {seed} failed: {source}")]
    Trajectory {
        seed: u64,
        #[source]
        source: Box<IntegrationError>,
    },
}

/// Violations of the hypotheses placed on the forcing and damping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForcingError {
    #[error("forcing declared mean-zero but its mean is {mean:e}")]
    NonzeroMean { mean: f64 },
    #[error("damping coefficient mu must be nonnegative and finite, got {0}")]
    InvalidDamping(f64),
}

/// Misuse of the energy monitors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("dissipation monitor needs a viscous-mode trajectory, got {0}")]
    WrongMode(String),
    #[error("need at least {needed} diagnostics records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
