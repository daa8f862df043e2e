use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sfm1::automata::{bisimilar, isomorphic, language_equiv, to_dot, to_json, LangVerdict};
use sfm1::compiler::compile;
use sfm1::proofs::{
    check_proof, proof_from_json, proof_to_json, prove_equivalence, to_deterministic, to_eps_free, to_normal_form,
    to_og, AxiomSet, EquivVerdict, Proof, ProofError,
};
use sfm1::semantics::denote;
use sfm1::terms::{write_system, Process, Symbol};
use thiserror::Error;

mod input;

use input::{Kind, Loaded};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ProofError> for CliError {
    fn from(e: ProofError) -> Self {
        match e {
            ProofError::Internal(m) => CliError::Internal(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Verdicts map to exit status 0 (equal, valid) or 1 (distinct, invalid).
enum Outcome {
    Yes,
    No,
}

#[derive(Parser)]
#[command(name = "sfm1", version, about = "Terms, automata and equational proofs for regular processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Relation {
    Lang,
    Bisim,
    Iso,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Nf,
    Og,
    Epsfree,
    Det,
}

#[derive(Subcommand)]
enum Command {
    /// Print the automaton denoted by a terms file.
    Semantics {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a reduced automaton into a system of equations.
    Compile {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two inputs (terms files or automata).
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "lang")]
        relation: Relation,
        #[arg(long = "as", value_enum)]
        kind: Option<Kind>,
    },
    /// Prove two inputs equal, or print a word that separates them.
    Prove {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "as", value_enum)]
        kind: Option<Kind>,
    },
    /// Run one stage of the normalization pipeline.
    Normalize {
        input: PathBuf,
        #[arg(long, value_enum)]
        stage: Stage,
        /// Extra symbols for determinization, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the proof; defaults to `<out>.proof.json` when `--out` is set.
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long = "as", value_enum)]
        kind: Option<Kind>,
    },
    /// Check a proof trace.
    CheckProof {
        proof: PathBuf,
        /// Terms file with the definitions the proof starts from.
        env: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

fn proof_text(p: &Proof) -> String {
    serde_json::to_string_pretty(&proof_to_json(p)).expect("proof serializes") + "\n"
}

/// Every emitted proof is checked first.
fn self_check(p: &Proof) -> Result<(), CliError> {
    check_proof(p).map_err(|e| CliError::Internal(format!("generated proof does not check: {e}")))
}

fn semantics(input: &Path, format: Format, out: Option<&Path>) -> Result<Outcome, CliError> {
    let nfa = denote(&input::terms(input)?);
    let text = match format {
        Format::Json => to_json(&nfa),
        Format::Dot => to_dot(&nfa),
    };
    emit(out, &text)?;
    Ok(Outcome::Yes)
}

fn compile_cmd(input: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let p = compile(&input::nfa(input)?).map_err(|e| CliError::Input(e.to_string()))?;
    emit(out, &write_system(&p))?;
    Ok(Outcome::Yes)
}

fn equiv(a: &Path, b: &Path, relation: Relation, kind: Option<Kind>) -> Result<Outcome, CliError> {
    let n1 = Loaded::open(a, kind)?.automaton();
    let n2 = Loaded::open(b, kind)?.automaton();
    let (verdict, text) = match relation {
        Relation::Lang => match language_equiv(&n1, &n2) {
            LangVerdict::Equal => (Outcome::Yes, "EQUAL\n".to_string()),
            LangVerdict::Distinct(w) => (Outcome::No, format!("DISTINCT {}\n", word(&w.to_string()))),
        },
        Relation::Bisim if bisimilar(&n1, &n2) => (Outcome::Yes, "EQUAL\n".to_string()),
        Relation::Bisim => (Outcome::No, "DISTINCT\n".to_string()),
        Relation::Iso => match isomorphic(&n1, &n2).map_err(|e| CliError::Input(e.to_string()))? {
            Some(map) => {
                let mut text = "ISO\n".to_string();
                for (q, r) in map {
                    text.push_str(&format!("{q} -> {r}\n"));
                }
                (Outcome::Yes, text)
            }
            None => (Outcome::No, "DISTINCT\n".to_string()),
        },
    };
    emit(None, &text)?;
    Ok(verdict)
}

fn word(w: &str) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.to_string()
    }
}

fn prove(a: &Path, b: &Path, out: Option<&Path>, kind: Option<Kind>) -> Result<Outcome, CliError> {
    let p = Loaded::open(a, kind)?.process()?;
    let q = Loaded::open(b, kind)?.process()?;
    match prove_equivalence(&p, &q)? {
        EquivVerdict::Equal(proof) => {
            self_check(&proof)?;
            emit(out, &proof_text(&proof))?;
            Ok(Outcome::Yes)
        }
        EquivVerdict::Distinct(w) => {
            emit(None, &format!("DISTINCT {}\n", word(&w.to_string())))?;
            Ok(Outcome::No)
        }
    }
}

fn normalize(
    input: &Path,
    stage: Stage,
    extra: &[String],
    out: Option<&Path>,
    proof_out: Option<&Path>,
    kind: Option<Kind>,
) -> Result<Outcome, CliError> {
    let p: Process = Loaded::open(input, kind)?.process()?;
    let (q, proof) = match stage {
        Stage::Nf => to_normal_form(&p, AxiomSet::Wg)?,
        Stage::Og => to_og(&p)?,
        Stage::Epsfree => to_eps_free(&p)?,
        Stage::Det => {
            let mut alphabet: BTreeSet<Symbol> = denote(&p).alphabet().clone();
            for a in extra.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
                alphabet.insert(Symbol::new(a).map_err(|e| CliError::Input(e.to_string()))?);
            }
            to_deterministic(&p, &alphabet)?
        }
    };
    self_check(&proof)?;
    emit(out, &write_system(&q))?;
    let default_proof = out.map(|o| {
        let mut name = o.as_os_str().to_owned();
        name.push(".proof.json");
        PathBuf::from(name)
    });
    if let Some(path) = proof_out.or(default_proof.as_deref()) {
        emit(Some(path), &proof_text(&proof))?;
    }
    Ok(Outcome::Yes)
}

fn check_proof_cmd(proof: &Path, env: Option<&Path>) -> Result<Outcome, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(&input::read(proof)?).map_err(|e| CliError::Input(format!("{}: {e}", proof.display())))?;
    let file_env = env.map(input::terms).transpose()?.map(|p| p.env);
    // A proof that carries its own definitions keeps them; the file must agree.
    let carries_env = value.get("env0").is_some();
    let parsed = proof_from_json(&value, if carries_env { None } else { file_env.as_ref() })
        .map_err(|e| CliError::Input(format!("{}: {e}", proof.display())))?;
    if let (true, Some(file_env)) = (carries_env, &file_env) {
        for (c, body) in file_env.iter() {
            if parsed.env0.body(c).is_some_and(|b| b != body) {
                emit(None, &format!("INVALID: {c} is defined differently in the proof\n"))?;
                return Ok(Outcome::No);
            }
        }
    }
    match check_proof(&parsed) {
        Ok(()) => {
            emit(None, "VALID\n")?;
            Ok(Outcome::Yes)
        }
        Err(e) => {
            emit(None, &format!("INVALID {e}\n"))?;
            Ok(Outcome::No)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Semantics { input, format, out } => semantics(&input, format, out.as_deref()),
        Command::Compile { input, out } => compile_cmd(&input, out.as_deref()),
        Command::Equiv { a, b, relation, kind } => equiv(&a, &b, relation, kind),
        Command::Prove { a, b, out, kind } => prove(&a, &b, out.as_deref(), kind),
        Command::Normalize { input, stage, alphabet, out, proof, kind } => {
            normalize(&input, stage, &alphabet, out.as_deref(), proof.as_deref(), kind)
        }
        Command::CheckProof { proof, env } => check_proof_cmd(&proof, env.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sfm1: {e}");
            ExitCode::from(e.code())
        }
    }
}
