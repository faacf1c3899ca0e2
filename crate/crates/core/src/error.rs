use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree must be positive")]
    ZeroDegree,

    #[error("coefficient matrix must be square and non-empty, got {rows}x{cols}")]
    CoeffShape { rows: usize, cols: usize },

    #[error("non-finite coefficient at ({row}, {col})")]
    NonFiniteCoeff { row: usize, col: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("grid coordinates must be strictly increasing")]
    GridNotIncreasing,

    #[error("field is {field_rows}x{field_cols} but grid is {grid_rows}x{grid_cols}")]
    DimensionMismatch {
        field_rows: usize,
        field_cols: usize,
        grid_rows: usize,
        grid_cols: usize,
    },

    #[error("invalid rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    InvalidRect {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },

    #[error("closed form singular; use direct sums")]
    ClosedFormSingular,

    #[error("degenerate marginal")]
    DegenerateMarginal,

    #[error("conditional independence identity violated (relative residual {0:e})")]
    IdentityViolated(f64),

    #[error("quadrature did not reach tolerance at depth limit: estimate {estimate}, achieved relative error {achieved:e}")]
    QuadratureDepth { estimate: f64, achieved: f64 },

    #[error("degenerate line")]
    DegenerateLine,

    #[error("point must lie strictly inside the unit square")]
    PointNotInterior,

    #[error("polyline point ({0}, {1}) outside the unit square")]
    PointOutsideSquare(f64, f64),

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error(
        "unknown coefficient law `{0}` (expected gaussian, rademacher, exponential or uniform)"
    )]
    UnknownLaw(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
