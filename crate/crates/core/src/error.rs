use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("division by an expression that normalizes to zero")]
    DivisionByZeroExpr,
    #[error("division by zero at {line}:{col}")]
    DivisionByZeroAt { line: usize, col: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cyclic binding: {}", .0.join(" -> "))]
    CyclicBinding(Vec<String>),
    #[error("not polynomial in the requested variables: {0}")]
    NotPolynomialInVars(String),
    #[error("not polynomial in the parametric jets: {0}")]
    NotPolynomialInJets(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("generators are defined over different variables: {0}")]
    VariableMismatch(String),
    #[error("basis not closed: [{left}, {right}] leaves residual {residual}")]
    NotClosed {
        left: String,
        right: String,
        residual: String,
    },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate denominator: the invariance system has zero determinant")]
    DegenerateDelta,
    #[error("parameter constraint violated: {0}")]
    ParamConstraintViolated(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("not in span; residual {0}")]
    NotInSpan(String),
    #[error("grid too small: need at least 3 nodes per direction")]
    GridTooSmall,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("Newton iteration failed: {0}")]
    NewtonDivergence(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
