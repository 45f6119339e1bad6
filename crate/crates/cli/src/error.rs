use xmanifold::ErrorClass;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] xmanifold::Error),
    #[error("{0}")]
    Input(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("writing {0}")]
    Output(String),
}

impl CliError {
    /// 2 input or usage, 3 dimension, 4 row pairing, 5 too little data,
    /// 6 invalid parameter, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Dimension => 3,
                ErrorClass::Pairing => 4,
                ErrorClass::Data => 5,
                ErrorClass::Parameter => 6,
            },
            CliError::Input(_) | CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}
