use grpd_tribe::error::TribeError;
use hott_core::checker::CheckError;
use thiserror::Error;

#[derive(Clone, Debug, Error)]
pub enum DenoteError {
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    /// A code whose element count exceeds the universe bound was used where
    /// an object of the universe fiber is needed.
    #[error("code with {size} elements exceeds universe bound {k}")]
    CodeTooLarge { size: u64, k: u32 },
    #[error("no witness for `{axiom}` at universe bound {k}")]
    WitnessNotFound { axiom: String, k: u32 },
    #[error(transparent)]
    Tribe(#[from] TribeError),
    #[error("kernel: {0}")]
    Kernel(#[from] CheckError),
    #[error("unknown or unchecked declaration `{0}`")]
    UnknownDecl(String),
    /// A model invariant failed; indicates a bug rather than bad input.
    #[error("model invariant violated: {0}")]
    Internal(String),
}

impl DenoteError {
    pub fn kind(&self) -> &'static str {
        match self {
            DenoteError::Unsupported(_) => "unsupported-construct",
            DenoteError::CodeTooLarge { .. } => "code-too-large",
            DenoteError::WitnessNotFound { .. } => "witness-not-found",
            DenoteError::Tribe(TribeError::ResourceCap { .. }) => "resource-cap",
            DenoteError::Tribe(_) => "tribe",
            DenoteError::Kernel(_) => "kernel",
            DenoteError::UnknownDecl(_) => "unknown-declaration",
            DenoteError::Internal(_) => "internal",
        }
    }

    /// Outside the supported fragment, as opposed to a failure inside it.
    pub fn outside_fragment(&self) -> bool {
        matches!(self, DenoteError::Unsupported(_) | DenoteError::CodeTooLarge { .. })
    }

    pub fn is_resource_cap(&self) -> bool {
        matches!(self, DenoteError::Tribe(TribeError::ResourceCap { .. }))
    }
}

pub type Result<T, E = DenoteError> = std::result::Result<T, E>;

pub(crate) fn internal(what: impl Into<String>) -> DenoteError {
    DenoteError::Internal(what.into())
}
