use thiserror::Error;

/// Every failure mode in the library. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) that the CLI maps into its
/// JSON envelope.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("model is singular: discriminant is zero")]
    SingularModel,
    #[error("coordinate change with u = 0")]
    ZeroScale,
    #[error("coordinate change is not integral: {0}")]
    NonIntegralTransform(String),
    #[error("quadratic twist by 0")]
    ZeroTwist,
    #[error("twist parameter must be squarefree, got {0}")]
    TwistNotSquarefree(String),
    #[error("tilde parts of 0 are undefined")]
    ZeroInput,
    #[error("Legendre symbol needs an odd prime modulus, got {0}")]
    EvenModulus(u64),
    #[error("no reduction table row matches at l = {prime}: triple ({vc4}, {vc6}, {vdelta})")]
    UnclassifiedReduction {
        prime: u64,
        vc4: String,
        vc6: String,
        vdelta: u64,
    },
    #[error("residues fall outside every inertial-field table row")]
    TableMiss,
    #[error("criterion precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("pair contradicts the criterion theorem: {0}")]
    InconsistentPair(String),
    #[error("isogeny degree divisible by p")]
    DegreeDivisibleByP,
    #[error("class polynomial coefficient did not round to an integer (residual {0})")]
    PrecisionFailure(f64),
    #[error("no h with h^2 | D_l passed the class-polynomial root test")]
    NoValidH,
    #[error("Frobenius matrix formula undefined: p | 2*beta and p does not divide D_l")]
    UnsupportedReduction,
    #[error("reduction mod l is singular")]
    SingularReduction,
    #[error("division polynomial undefined in characteristic p")]
    CharacteristicClash,
    #[error("torsion basis search failed (internal diagnostic)")]
    BasisNotFound,
    #[error("Weil pairing of dependent points requested as primitive")]
    PairingDegenerate,
    #[error("Frobenius matrices are not conjugate: torsion modules not isomorphic")]
    NotIsomorphic,
    #[error("request exceeds oracle resource bounds: {0}")]
    ResourceBound(String),
    #[error("degenerate Frey parameters: a^2 + b^3 = 0")]
    DegenerateFrey,
    #[error("Frey defining equation violated")]
    EquationViolated,
    #[error("Frey coprimality condition violated")]
    GcdViolated,
    #[error("theorem hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("unknown fixture label: {0}")]
    UnknownFixture(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable identifier for machine consumption.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            SingularModel => "singular-model",
            ZeroScale => "zero-scale",
            NonIntegralTransform(_) => "non-integral-transform",
            ZeroTwist => "zero-twist",
            TwistNotSquarefree(_) => "twist-not-squarefree",
            ZeroInput => "zero-input",
            EvenModulus(_) => "even-modulus",
            UnclassifiedReduction { .. } => "unclassified-reduction",
            TableMiss => "table-miss",
            PreconditionFailed(_) => "precondition-failed",
            InconsistentPair(_) => "inconsistent-pair",
            DegreeDivisibleByP => "degree-divisible-by-p",
            PrecisionFailure(_) => "precision-failure",
            NoValidH => "no-valid-h",
            UnsupportedReduction => "unsupported-reduction",
            SingularReduction => "singular-reduction",
            CharacteristicClash => "characteristic-clash",
            BasisNotFound => "basis-not-found",
            PairingDegenerate => "pairing-degenerate",
            NotIsomorphic => "not-isomorphic",
            ResourceBound(_) => "resource-bound",
            DegenerateFrey => "degenerate-frey",
            EquationViolated => "equation-violated",
            GcdViolated => "gcd-violated",
            HypothesisFailed(_) => "hypothesis-failed",
            UnknownFixture(_) => "unknown-fixture",
            InvalidInput(_) => "invalid-input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
