//! Loading fragments, models, programs and substitutions, and the error
//! type that decides the exit code.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use modsyn_core::cbv::{parse_program, synthesize, typecheck, CbvError, FragmentConfig, Scope, TypeExpr};
use modsyn_core::semantics::{Model, Monad, SemError};
use modsyn_core::signature::Env;
use modsyn_core::sorts::{Context, Sort};
use modsyn_core::terms::{SubstEnv, Term, TermError};

use crate::Opts;

#[derive(Debug)]
pub enum Failure {
    /// Unreadable input, parse or type errors.
    Input(String),
    /// The model lacks structure the fragment needs.
    Unsupported(String),
    /// A law check failed.
    Check(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Unsupported(_) => 2,
            Failure::Check(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Unsupported(m) | Failure::Check(m) => f.write_str(m),
        }
    }
}

impl From<CbvError> for Failure {
    fn from(e: CbvError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<TermError> for Failure {
    fn from(e: TermError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SemError> for Failure {
    fn from(e: SemError) -> Self {
        match e {
            SemError::UnsupportedCapability { .. } => Failure::Unsupported(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

/// The fragment from `--fragment`, either a file or an extension list,
/// with `--nat-bound` applied. Defaults to every extension.
pub fn fragment(opts: &Opts) -> Result<FragmentConfig, Failure> {
    let mut config = match &opts.fragment {
        None => FragmentConfig::full(),
        Some(given) if Path::new(given).is_file() => {
            toml::from_str(&read(Path::new(given))?).map_err(|e| Failure::Input(format!("{given}: {e}")))?
        }
        Some(given) => FragmentConfig::new(FragmentConfig::parse_extensions(given)?),
    };
    if let Some(bound) = opts.nat_bound {
        config.nat_bound = bound;
    }
    if config.nat_bound == 0 {
        return Err(Failure::Input("the bound on naturals must be positive".into()));
    }
    Ok(config)
}

pub fn monad(opts: &Opts) -> Result<Option<Monad>, Failure> {
    opts.monad.as_deref().map(str::parse).transpose().map_err(|e: SemError| Failure::Input(e.to_string()))
}

/// The model from `--model`, or base types of size two under the Option
/// monad; `--monad` and `--nat-bound` override either.
pub fn model(opts: &Opts, config: &FragmentConfig) -> Result<Arc<Model>, Failure> {
    let mut model = match &opts.model {
        Some(path) => toml::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => Model::for_config(config, Monad::Option, 2),
    };
    if let Some(m) = monad(opts)? {
        model.monad = m;
    }
    model.nat_bound = opts.nat_bound.unwrap_or(if opts.model.is_some() { model.nat_bound } else { config.nat_bound });
    if model.nat_bound == 0 || model.base.values().any(|&n| n == 0) {
        return Err(Failure::Input("model sizes must be positive".into()));
    }
    Ok(Arc::new(model))
}

/// Header directives in the leading comment lines of a file.
struct Header {
    context: Option<String>,
    sort: Option<Sort<TypeExpr>>,
}

fn header(text: &str) -> Result<Header, Failure> {
    let mut h = Header { context: None, sort: None };
    for line in text.lines().map(str::trim).take_while(|l| l.is_empty() || l.starts_with("--")) {
        let body = line.trim_start_matches('-').trim();
        if let Some(ctx) = body.strip_prefix("context:") {
            h.context = Some(ctx.trim().to_string());
        } else if let Some(t) = body.strip_prefix("type:") {
            h.sort = Some(Sort::Second(TypeExpr::parse(t)?));
        } else if let Some(t) = body.strip_prefix("value:") {
            h.sort = Some(Sort::First(TypeExpr::parse(t)?));
        }
    }
    Ok(h)
}

/// A typechecked program with its named context.
pub struct Program {
    pub scope: Scope,
    pub sort: Sort<TypeExpr>,
    pub term: Term<TypeExpr>,
}

impl Program {
    /// Read a program file. Leading `-- context: x : T, …` and
    /// `-- type: T` (or `-- value: T`) lines fix the context and sort;
    /// without a sort line the sort is synthesized.
    pub fn load(path: &Path, config: &FragmentConfig) -> Result<Program, Failure> {
        let text = read(path)?;
        let h = header(&text)?;
        let scope = Scope::parse(h.context.as_deref().unwrap_or(""))?;
        let expr = parse_program(&text)?;
        let (term, sort) = match h.sort {
            Some(sort) => (typecheck(&expr, &scope, &sort, config)?, sort),
            None => synthesize(&expr, &scope, config)?,
        };
        Ok(Program { scope, sort, term })
    }

    pub fn ctx(&self) -> Context<TypeExpr> {
        self.scope.context()
    }

    pub fn names(&self) -> Vec<String> {
        self.scope.names()
    }
}

/// Read a substitution file: a `-- context:` line for the target context
/// and one `x := V` line per variable of the program's context.
pub fn load_substitution(path: &Path, program: &Program, config: &FragmentConfig) -> Result<(Scope, SubstEnv<TypeExpr>), Failure> {
    let text = read(path)?;
    let target = Scope::parse(header(&text)?.context.as_deref().unwrap_or(""))?;
    let mut given = std::collections::BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with("--")) {
        let (name, value) = line
            .split_once(":=")
            .ok_or_else(|| Failure::Input(format!("expected `name := value`, found `{line}`")))?;
        if given.insert(name.trim().to_string(), value.trim().to_string()).is_some() {
            return Err(Failure::Input(format!("`{}` is assigned twice", name.trim())));
        }
    }
    let mut entries = Vec::new();
    for (name, ty) in program.scope.entries() {
        let src = given.remove(name).ok_or_else(|| Failure::Input(format!("no value given for `{name}`")))?;
        let expr = parse_program(&src)?;
        entries.push(typecheck(&expr, &target, &Sort::First(ty.clone()), config)?);
    }
    if let Some(extra) = given.keys().next() {
        return Err(Failure::Input(format!("`{extra}` is not a variable of the program")));
    }
    let env = Env::new(program.ctx(), target.context(), entries);
    Ok((target, env))
}
