use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field length {found} does not match grid point count {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grids differ")]
    GridMismatch,
    #[error("nonfinite field")]
    NonFinite,
    #[error("singular symbol at zero mode")]
    SingularSymbol,
    #[error("dyadic scale unresolved: N = {0}")]
    DyadicScaleUnresolved(f64),
    #[error("modulation off-lattice: component {axis} = {value}")]
    ModulationOffLattice { axis: usize, value: f64 },
    #[error("rescale aliasing: {fraction:e} of the energy falls outside the target band")]
    RescaleAliasing { fraction: f64 },
    #[error("mass drift guard tripped: relative drift {drift:e} at t = {time}")]
    MassDriftGuard { drift: f64, time: f64 },
    #[error("inadmissible pair (q = {q}, r = {r}) in dimension {d}")]
    Inadmissible { q: f64, r: f64, d: usize },
    #[error("wrap-around horizon exceeded: {0}")]
    WrapAround(String),
    #[error("sigma below d/4: sigma = {sigma}, d = {d}")]
    SigmaBelowQuarterDim { sigma: f64, d: usize },
    #[error("regime refusal: {0}")]
    Regime(String),
    #[error("symbol not coercive: min(p_v + omega^2sigma) = {0}")]
    NotCoercive(f64),
    #[error("stagnation: residual {residual:e} after {iterations} iterations")]
    Stagnation { residual: f64, iterations: usize },
    #[error("boundary amplitude {0:e} exceeds tolerance")]
    BoundaryAmplitude(f64),
    #[error("config: {0}")]
    Config(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
