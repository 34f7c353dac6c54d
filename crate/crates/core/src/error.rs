use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside the material table range [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("material table, line {line}: {message}")]
    MaterialFile { line: usize, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("singular system: {0}")]
    SingularSystem(String),

    /// The preloaded stiffness `K + K_R` is indefinite: the plate has already
    /// buckled under the hygrothermal load alone.
    #[error("instability: K + K_R is indefinite, lowest eigenvalue omega^2 = {eigenvalue:.6e}")]
    Instability { eigenvalue: f64 },

    #[error("no positive buckling eigenvalue among the {requested} computed")]
    NoPositiveEigenvalue { requested: usize },

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
