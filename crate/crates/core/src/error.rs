use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate simplex {0:?}: vertices are affinely dependent")]
    DegenerateSimplex(Vec<usize>),

    #[error("order not total on simplex {0:?}")]
    OrderNotTotal(Vec<usize>),

    #[error("order relation contains a cycle through vertex {0}")]
    OrderCycle(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("entourages live on different nets")]
    NetMismatch,

    #[error("net is not a grid on the nonnegative reals")]
    NotRealGrid,

    #[error("negative profile value {value} at point {point}")]
    NegativeProfile { point: usize, value: f64 },

    #[error("point ({point}, {time}) lies outside the cylinder")]
    OutsideCylinder { point: usize, time: f64 },

    #[error("homotopy endpoints do not match: max discrepancy {max_discrepancy} at point {point}")]
    EndpointMismatch { point: usize, max_discrepancy: f64 },

    #[error("large scale Lipschitz fit fails for pair ({0}, {1})")]
    LipschitzFit(usize, usize),

    #[error("time {time} outside homotopy domain [0, {end}]")]
    TimeOutOfDomain { time: f64, end: f64 },

    #[error("height {0} is below the modeled range")]
    HeightOutOfRange(f64),

    #[error("cone height must be at least 1, got {0}")]
    BadConeHeight(i64),

    #[error("base point {0:?} lies outside the domain of the map")]
    OutsideDomain(Vec<f64>),

    #[error("map is not radial on the required face: residual {0}")]
    NotRadial(f64),

    #[error("boundary condition violated: residual {0}")]
    BoundaryViolation(f64),

    #[error("time slice precondition fails at {slice}: measured {measured} > {bound}")]
    SlicePrecondition { slice: String, measured: f64, bound: f64 },

    #[error("star condition unsatisfiable at domain vertex {0}")]
    StarCondition(usize),

    #[error("no common simplex for sample {0}")]
    NoCommonSimplex(usize),

    #[error("{0:?} is not a proper face of {1:?}")]
    NotAFace(Vec<usize>, Vec<usize>),

    #[error("OFF export supports ambient dimension <= 3, got {0}")]
    OffDimension(usize),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}
