use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model parameters are invalid: {0}")]
    InvalidModel(String),

    #[error("susceptibility denominator magnitude {denom_mag:.3e} at omega = {omega} is inside the pole guard")]
    NearPole { omega: Complex64, denom_mag: f64 },

    #[error("leading polynomial coefficient magnitude {0:.3e} is effectively zero")]
    DegenerateLeadingCoefficient(f64),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("root multiset is not closed under omega -> -conj(omega); worst mismatch {mismatch:.3e}")]
    PairingViolation { mismatch: f64 },

    #[error("no dispersion root with positive real part at k = {k}")]
    NoForwardBranch { k: f64 },

    #[error("dp/domega vanished near k = {k}; branch point, group velocity diverges")]
    BranchPoint { k: f64 },

    #[error("branch continuation jumped {jump:.3e} at k = {k} (half min root separation {limit:.3e})")]
    BranchJump { k: f64, jump: f64, limit: f64 },

    #[error("third-harmonic resonance: |n2(omega) - n2(3 omega)| = {0:.3e}")]
    DegenerateC1(f64),

    #[error("degenerate self-interaction denominator: magnitude {0:.3e}")]
    DegenerateC2(f64),

    #[error("solution carries no B amplitude")]
    MissingB,

    #[error("carrier k0 = {k0} is not an integer multiple of dk = {dk}")]
    OffGridCarrier { k0: f64, dk: f64 },

    #[error("grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("Newton inversion did not reach tolerance: residual {residual:.3e} after {iterations} iterations")]
    NewtonDiverged { residual: f64, iterations: usize },

    #[error("Sellmeier coefficient a = {0:.3e} is too close to zero to solve for the highest derivative")]
    ZeroACoefficient(f64),

    #[error("field {field} norm grew by {ratio:.3e} at t = {t}; instability or dt too large")]
    BlowUp { t: f64, field: usize, ratio: f64 },

    #[error("reference field norm is zero")]
    ZeroReference,

    #[error("no spectral modes inside the requested window")]
    EmptyWindow,

    #[error("configuration is invalid: {0}")]
    InvalidConfig(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag an error with the pipeline stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
