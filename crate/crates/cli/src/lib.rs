//! Instance files, reports, the resolution cache and the commands behind the
//! `dkoszul` binary.

pub mod cache;
pub mod commands;
pub mod instance;
pub mod report;
pub mod session;

use dkoszul_core::ext::ExtError;
use dkoszul_core::gmod::ModuleError;
use dkoszul_core::resolve::ResolveError;
use dkoszul_core::verify::VerifyError;

pub use commands::{run, Command, Options, Source};
pub use instance::{parse_instance, InstanceFile, ParseError};
pub use report::{Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", render_parse(.0))]
    Parse(Vec<ParseError>),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    /// The computation needs more stored degrees than it was given.
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("engine error: {0}")]
    Engine(String),
}

fn render_parse(errors: &[ParseError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn engine(e: impl Into<VerifyError>) -> CliError {
        let e = e.into();
        let budget = e.is_budget()
            || matches!(
                e,
                VerifyError::Module(ModuleError::Budget { .. } | ModuleError::Window { .. })
                    | VerifyError::Resolve(ResolveError::Module(ModuleError::Budget { .. }))
                    | VerifyError::Ext(ExtError::Module(ModuleError::Budget { .. }))
            );
        if budget {
            CliError::Budget(e.to_string())
        } else {
            CliError::Engine(e.to_string())
        }
    }

    /// Budget shortfalls are "could not check" (2); everything else is an
    /// input problem (3).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 2,
            _ => 3,
        }
    }
}
