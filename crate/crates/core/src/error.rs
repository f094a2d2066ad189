use thiserror::Error;

/// Every failure the toolkit can report. Each variant belongs to one analysis
/// stage; [`Error::module`] and [`Error::code`] give the qualified code used in
/// structured error records.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // group
    #[error("generator {index} is not invertible")]
    NonInvertibleGenerator { index: usize },
    #[error("group closure exceeded {cap} elements")]
    OrderCapExceeded { cap: usize },
    #[error("subgroup enumeration exceeded {cap} candidate closures")]
    SubgroupCapExceeded { cap: usize },
    #[error("index set is not a subgroup")]
    NotASubgroup,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    // poly
    #[error("polynomial kind or arity mismatch")]
    KindMismatch,
    #[error("cannot parse polynomial: {0}")]
    PolyParse(String),

    // invariants
    #[error("polynomial is not invariant under the group")]
    NotInvariant,
    #[error("polynomial of degree {degree} is not expressible in the basis")]
    NotExpressible { degree: usize },
    #[error("degree cap {cap} too low: generated algebra misses invariants in degree {degree}")]
    CapTooLow { cap: usize, degree: usize },

    // strata
    #[error("no unique minimal realized symmetry type")]
    NoUniqueMinimum,

    // landau
    #[error("no start converged ({unconverged} unconverged starts)")]
    NoConvergence { unconverged: usize },
    #[error("descent left the search ball (|x| = {norm:.3e})")]
    StabilityViolation { norm: f64 },
    #[error("candidate isotropy set is not a subgroup at tolerance {tol:e}")]
    AmbiguousClassification { tol: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),

    // reduction
    #[error("homological solve would divide by a critical coefficient: {0}")]
    SingularHomologicalSolve(String),
    #[error("reduction verification failed at lambda {lambda:?}: slope {slope:.3} < {required}")]
    VerificationFailed {
        lambda: Vec<f64>,
        point: Vec<f64>,
        slope: f64,
        required: usize,
    },

    // dynamics
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
    #[error("energy increased at step {step} after {retries} step halvings")]
    MonotonicityViolation { step: usize, retries: usize },

    // cli
    #[error("i/o error: {0}")]
    Io(String),
    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },
}

impl Error {
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            NonInvertibleGenerator { .. }
            | OrderCapExceeded { .. }
            | SubgroupCapExceeded { .. }
            | NotASubgroup
            | DimensionMismatch { .. }
            | InvalidGroup(_) => "group",
            KindMismatch | PolyParse(_) => "poly",
            NotInvariant | NotExpressible { .. } | CapTooLow { .. } => "invariants",
            NoUniqueMinimum => "strata",
            NoConvergence { .. }
            | StabilityViolation { .. }
            | AmbiguousClassification { .. }
            | InvalidModel(_) => "landau",
            SingularHomologicalSolve(_) | VerificationFailed { .. } => "reduction",
            NonFiniteState { .. } | MonotonicityViolation { .. } => "dynamics",
            Io(_) | Parse { .. } => "cli",
        }
    }

    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            NonInvertibleGenerator { .. } => "NonInvertibleGenerator",
            OrderCapExceeded { .. } => "OrderCapExceeded",
            SubgroupCapExceeded { .. } => "SubgroupCapExceeded",
            NotASubgroup => "NotASubgroup",
            DimensionMismatch { .. } => "DimensionMismatch",
            InvalidGroup(_) => "InvalidGroup",
            KindMismatch => "KindMismatch",
            PolyParse(_) => "PolyParse",
            NotInvariant => "NotInvariant",
            NotExpressible { .. } => "NotExpressible",
            CapTooLow { .. } => "CapTooLow",
            NoUniqueMinimum => "NoUniqueMinimum",
            NoConvergence { .. } => "NoConvergence",
            StabilityViolation { .. } => "StabilityViolation",
            AmbiguousClassification { .. } => "AmbiguousClassification",
            InvalidModel(_) => "InvalidModel",
            SingularHomologicalSolve(_) => "SingularHomologicalSolve",
            VerificationFailed { .. } => "VerificationFailed",
            NonFiniteState { .. } => "NonFiniteState",
            MonotonicityViolation { .. } => "MonotonicityViolation",
            Io(_) => "Io",
            Parse { .. } => "Parse",
        }
    }

    /// `module.Code`, e.g. `group.OrderCapExceeded`.
    pub fn qualified_code(&self) -> String {
        format!("{}.{}", self.module(), self.code())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
