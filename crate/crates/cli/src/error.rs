use ringcpd::Error as CoreError;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ParseError: {path}:{line}:{column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },
    #[error("RaggedRows: {path}:{line}: expected {expected} fields, found {found}")]
    RaggedRows { path: String, line: usize, expected: usize, found: usize },
    #[error("AsymmetricInput: {path}: cell (row {row}, column {col}) differs from its mirror by {diff:e}")]
    Asymmetric { path: String, row: usize, col: usize, diff: f64 },
    #[error("Io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] CoreError),
}

impl CliError {
    /// 1 = input, 2 = configuration, 3 = numerical degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::RaggedRows { .. }
            | CliError::Asymmetric { .. }
            | CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &CoreError) -> i32 {
    use CoreError::*;
    if e.is_numerical() {
        return 3;
    }
    match e {
        NonFiniteInput { .. } | DimensionMismatch { .. } | AsymmetricInput { .. } | InvalidInput(_)
        | TooFewObservations { .. } => 1,
        NegativeArgument(_) | EmptyDraws => 3,
        _ => 2,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
