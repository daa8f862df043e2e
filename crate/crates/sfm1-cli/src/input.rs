//! Loading terms files and automata from disk.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use sfm1::automata::{from_json, Nfa};
use sfm1::compiler::compile;
use sfm1::semantics::denote;
use sfm1::terms::{parse_system, ParseMode, Process};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Terms,
    Nfa,
}

/// `.json` files (including `.nfa.json`) are automata, anything else is a
/// terms file.
pub fn detect(path: &Path, forced: Option<Kind>) -> Kind {
    forced.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Kind::Nfa,
        _ => Kind::Terms,
    })
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

// Generated names such as `D{1,2}` or `H%3` are accepted so that every file
// this tool writes can be read back.
pub fn terms(path: &Path) -> Result<Process, CliError> {
    parse_system(&read(path)?, ParseMode::Internal).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn nfa(path: &Path) -> Result<Nfa, CliError> {
    from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub enum Loaded {
    Terms(Process),
    Nfa(Nfa),
}

impl Loaded {
    pub fn open(path: &Path, forced: Option<Kind>) -> Result<Loaded, CliError> {
        Ok(match detect(path, forced) {
            Kind::Terms => Loaded::Terms(terms(path)?),
            Kind::Nfa => Loaded::Nfa(nfa(path)?),
        })
    }

    pub fn automaton(&self) -> Nfa {
        match self {
            Loaded::Terms(p) => denote(p),
            Loaded::Nfa(n) => n.clone(),
        }
    }

    pub fn process(self) -> Result<Process, CliError> {
        match self {
            Loaded::Terms(p) => Ok(p),
            Loaded::Nfa(n) => compile(&n).map_err(|e| CliError::Input(e.to_string())),
        }
    }
}
