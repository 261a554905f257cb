use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("causal sign mismatch: {left} vs {right}")]
    EpsMismatch { left: i32, right: i32 },

    #[error("{re} + u·{im} lies on the null cone (|z z̄| = {norm:e})")]
    NullDivisor { re: f64, im: f64, norm: f64 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("point is at the projection pole ({0})")]
    PoleError(String),

    #[error("point lies on the excluded light-cone locus ({0})")]
    LightConeError(String),

    #[error("unit constraint a·ā − ε·b·b̄ = 1 violated (residual {residual:e})")]
    ConstraintViolation { residual: f64 },

    #[error("Möbius denominator b̄z + ā lies on the null cone")]
    DenominatorOnNullCone,

    #[error("singular node at ({x}, {y}): {reason}")]
    SingularNode { x: f64, y: f64, reason: String },

    #[error("integration path from the base point is blocked at node ({i}, {j})")]
    PathBlocked { i: usize, j: usize },

    #[error("non-zero real period detected (residual {residual:e})")]
    PeriodDetected { residual: f64 },

    #[error("degenerate metric (|E| = {0:e})")]
    DegenerateMetric(f64),

    #[error("unknown example '{0}'")]
    UnknownExample(String),

    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolation(String),

    #[error("every node of the mesh is masked")]
    EmptyMesh,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
