mod check;
mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modsyn_core::cbv::{menu_for, pretty_named, FragmentConfig};
use modsyn_core::semantics::{check_substitution_lemma, semantic_map, Denotation, SemAlgebra, SemError};
use modsyn_core::sorts::Sort;
use modsyn_core::terms::substitute;

use input::{Failure, Program};

/// Scope-safe syntax, substitution and semantics for a family of
/// call-by-value calculi.
#[derive(Parser, Debug)]
#[command(name = "modsyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Typecheck a program and print its denotation.
    Run {
        program: PathBuf,
        /// Print only the result at this point, e.g. `x = b1, n = 3`.
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Apply a substitution file to a program and print the result.
    Subst {
        program: PathBuf,
        substitution: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a law-checking suite.
    Check {
        #[arg(value_enum)]
        suite: check::Suite,
        /// Check every one of the 128 fragment configurations.
        #[arg(long)]
        all_fragments: bool,
        /// Number of corpus terms per configuration.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        opts: Opts,
    },
    /// List the 128 fragment configurations with their typing needs and
    /// model requirements.
    Fragments,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Extension list (`base`, `full`, `sequential,functions`, …) or a TOML
    /// fragment config file.
    #[arg(long)]
    fragment: Option<String>,
    /// TOML model file: `monad`, `nat_bound` and a `[base]` table of sizes.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Monad name: identity, option, exception:N, writer:N, state:N, powerset.
    #[arg(long)]
    monad: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    ctx_bound: Option<usize>,
    #[arg(long)]
    nat_bound: Option<u32>,
    /// Where to write the JSON report. Defaults to `$MODSYN_REPORT_DIR/<suite>.json`.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { program, at, opts } => run(&program, at.as_deref(), &opts),
        Command::Subst { program, substitution, opts } => subst(&program, &substitution, &opts),
        Command::Check { suite, all_fragments, count, opts } => check::run(suite, all_fragments, count, &opts),
        Command::Fragments => {
            fragments();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

/// Write to stdout, treating a closed pipe as the reader being done.
pub fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn run(path: &PathBuf, at: Option<&str>, opts: &Opts) -> Result<(), Failure> {
    let config = input::fragment(opts)?;
    let program = Program::load(path, &config)?;
    let model = input::model(opts, &config)?;
    model.supports(&config)?;
    let algebra = SemAlgebra::new(model.clone());
    let sem = semantic_map(&program.term, &program.ctx(), &algebra)?;
    let names = program.names();
    match at {
        Some(point) => {
            let p = model.parse_point(program.scope.entries(), point)?;
            let shown = match (&sem, &program.sort) {
                (modsyn_core::semantics::Sem::Value(f), Sort::First(t)) => model.render(t, &f(&p)?),
                (modsyn_core::semantics::Sem::Comp(f), Sort::Second(t)) => model.render_comp(t, &f(&p)?),
                _ => return Err(SemError::Malformed("denotation of the wrong sort".into()).into()),
            };
            emit(&format!("{shown}\n"));
        }
        None => {
            let den = Denotation::materialize(&sem, program.sort.clone(), program.ctx(), &model)?;
            let mut text = format!("-- {} : {} under {}\n", pretty_named(&program.term, &names)?, program.sort, model.monad);
            for line in den.render(&model, &names) {
                text.push_str(&line);
                text.push('\n');
            }
            emit(&text);
        }
    }
    Ok(())
}

fn subst(program: &PathBuf, substitution: &PathBuf, opts: &Opts) -> Result<(), Failure> {
    let config = input::fragment(opts)?;
    let program = Program::load(program, &config)?;
    let (target, env) = input::load_substitution(substitution, &program, &config)?;
    let result = substitute(&program.term, &env)?;
    println!("{}", pretty_named(&result, &target.names())?);
    if opts.model.is_some() || opts.monad.is_some() {
        let model = input::model(opts, &config)?;
        model.supports(&config)?;
        let algebra = SemAlgebra::new(model);
        match check_substitution_lemma(&program.term, &program.sort, &env, &algebra)? {
            Ok(points) => println!("PASS: both sides agree at all {points} points"),
            Err(witness) => {
                println!("FAIL: {witness}");
                return Err(Failure::Check("the substitution lemma failed".into()));
            }
        }
    }
    Ok(())
}

fn fragments() {
    let mut text = String::new();
    for config in FragmentConfig::all() {
        let rows = menu_for(&config);
        let constructs: Vec<&str> = rows.iter().map(|r| r.constructs).collect();
        let mut needs: Vec<&str> = rows.iter().flat_map(|r| r.needs.iter().map(|n| n.describe())).collect();
        needs.dedup();
        let models: Vec<&str> = rows.iter().map(|r| r.model).filter(|m| !m.is_empty()).collect();
        let needs = if needs.is_empty() { "none".to_string() } else { needs.join("; ") };
        let _ = writeln!(text, "{}\n  constructs: {}\n  needs: {needs}", config.name(), constructs.join("; "));
        if config.fused_call() {
            text.push_str("  application: fused with record creation\n");
        }
        let _ = writeln!(text, "  model: {}", models.join("; "));
    }
    emit(&text);
}
