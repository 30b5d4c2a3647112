use crforge_core::CrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unresolved name `{name}`")]
    Unresolved { line: usize, col: usize, name: String },
    #[error("{line}:{col}: arity mismatch: {msg}")]
    Arity { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {msg}")]
    Elaboration { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: manifold `{name}`: {source}")]
    Manifold { line: usize, col: usize, name: String, source: CrError },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CrError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// Every error maps to exit code 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
