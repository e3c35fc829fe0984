//! Executable forms of the semantic laws: the action axioms of the
//! substitution structure, compatibility of every construct with
//! substitution, and the substitution lemma.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cbv::{enumerate_types, pretty, type_pool, Construct, Extension, FragmentConfig, GenParams, Generator, Row, TypeExpr};
use crate::report::LawRecord;
use crate::sorts::{enumerate_contexts, Context, Renaming, Sort};
use crate::terms::{substitute, SubstEnv, Term};

use super::denote::{semantic_map, Denotation, Sem, SemAlgebra, Table};
use super::domain::{Model, Value};
use super::monad::Comp;
use super::SemError;

/// A semantic substitution: for every variable of `source`, a value table
/// over `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemSubst {
    pub source: Context<TypeExpr>,
    pub target: Context<TypeExpr>,
    pub entries: Vec<Denotation>,
}

fn value_at(den: &Denotation, i: usize) -> Result<Value, SemError> {
    match &den.table {
        Table::Value(t) => Ok(t[i].clone()),
        Table::Comp(_) => Err(SemError::Malformed("substitution entries must be values".into())),
    }
}

impl SemSubst {
    /// Interpret a syntactic substitution entry by entry.
    pub fn from_env(env: &SubstEnv<TypeExpr>, algebra: &SemAlgebra) -> Result<Self, SemError> {
        let entries = env
            .entries
            .iter()
            .zip(env.source.iter())
            .map(|(t, ty)| {
                let sem = semantic_map(t, &env.target, algebra)?;
                Denotation::materialize(&sem, Sort::First(ty.clone()), env.target.clone(), &algebra.model)
            })
            .collect::<Result<_, _>>()?;
        Ok(SemSubst { source: env.source.clone(), target: env.target.clone(), entries })
    }

    /// The unit: every variable sent to its projection.
    pub fn identity(ctx: &Context<TypeExpr>, model: &Model) -> Result<Self, SemError> {
        let entries = (0..ctx.len()).map(|x| Denotation::projection(ctx, x, model)).collect::<Result<_, _>>()?;
        Ok(SemSubst { source: ctx.clone(), target: ctx.clone(), entries })
    }

    /// `den ∘ ⟨σ_x⟩`: substitution into a denotation by precomposition.
    pub fn apply(&self, den: &Denotation, model: &Model) -> Result<Denotation, SemError> {
        if den.ctx != self.source {
            return Err(SemError::Malformed(format!("denotation over {} under a substitution for {}", den.ctx, self.source)));
        }
        let n = model.context_size(&self.target)?;
        let mut indices = Vec::with_capacity(n);
        for q in 0..n {
            let p = self.entries.iter().map(|e| value_at(e, q)).collect::<Result<Vec<_>, _>>()?;
            indices.push(model.point_index(&self.source, &p)?);
        }
        let table = match &den.table {
            Table::Value(t) => Table::Value(indices.iter().map(|&i| t[i].clone()).collect()),
            Table::Comp(t) => Table::Comp(indices.iter().map(|&i| t[i].clone()).collect()),
        };
        Ok(Denotation { sort: den.sort.clone(), ctx: self.target.clone(), table })
    }

    /// `σ ; τ`: substitute `next` into every entry.
    pub fn then(&self, next: &SemSubst, model: &Model) -> Result<SemSubst, SemError> {
        let entries = self.entries.iter().map(|e| next.apply(e, model)).collect::<Result<_, _>>()?;
        Ok(SemSubst { source: self.source.clone(), target: next.target.clone(), entries })
    }

    /// Push under a binder: weaken the entries and send the bound
    /// variables to themselves.
    pub fn extend(&self, binder: &Context<TypeExpr>, model: &Model) -> Result<SemSubst, SemError> {
        let target = self.target.concat(binder);
        let mut entries = self.entries.iter().map(|e| weaken(e, binder, model)).collect::<Result<Vec<_>, _>>()?;
        for j in 0..binder.len() {
            entries.push(Denotation::projection(&target, self.target.len() + j, model)?);
        }
        Ok(SemSubst { source: self.source.concat(binder), target, entries })
    }

    /// Reindex along a renaming `ρ : source → Γ'`: the substitution for
    /// `Γ'` whose entry `y` is the entry of `ρ(y)`.
    pub fn reindex(&self, renaming: &Renaming<TypeExpr>) -> Result<SemSubst, SemError> {
        if renaming.source() != &self.source {
            return Err(SemError::Malformed("renaming does not start at the substitution's source".into()));
        }
        let entries = renaming.map().iter().map(|&x| self.entries[x].clone()).collect();
        Ok(SemSubst { source: renaming.target().clone(), target: self.target.clone(), entries })
    }
}

/// The same map, over `ctx ++ binder`, ignoring the new coordinates.
pub fn weaken(den: &Denotation, binder: &Context<TypeExpr>, model: &Model) -> Result<Denotation, SemError> {
    let extra = model.context_size(binder)?;
    let ctx = den.ctx.concat(binder);
    let spread = |n: usize| (0..n * extra).map(move |q| q / extra.max(1));
    let n = den.table.len();
    let table = match &den.table {
        Table::Value(t) => Table::Value(spread(n).map(|i| t[i].clone()).collect()),
        Table::Comp(t) => Table::Comp(spread(n).map(|i| t[i].clone()).collect()),
    };
    Ok(Denotation { sort: den.sort.clone(), ctx, table })
}

/// `den ∘ ⟦ρ⟧` for `ρ : Γ → Γ'` and `den` over `Γ'`: the map over `Γ`.
pub fn rename_denotation(den: &Denotation, renaming: &Renaming<TypeExpr>, model: &Model) -> Result<Denotation, SemError> {
    let n = model.context_size(renaming.source())?;
    let mut indices = Vec::with_capacity(n);
    for i in 0..n {
        let p = model.point(renaming.source(), i);
        let q: Vec<Value> = renaming.map().iter().map(|&x| p[x].clone()).collect();
        indices.push(model.point_index(renaming.target(), &q)?);
    }
    let table = match &den.table {
        Table::Value(t) => Table::Value(indices.iter().map(|&i| t[i].clone()).collect()),
        Table::Comp(t) => Table::Comp(indices.iter().map(|&i| t[i].clone()).collect()),
    };
    Ok(Denotation { sort: den.sort.clone(), ctx: renaming.source().clone(), table })
}

/// All tables `⟦Γ⟧ → ⟦s⟧` for one sort and context, addressed by index.
#[derive(Debug, Clone)]
pub struct TableSpace {
    pub sort: Sort<TypeExpr>,
    pub ctx: Context<TypeExpr>,
    cells: usize,
    cell_size: u128,
}

impl TableSpace {
    pub fn new(sort: Sort<TypeExpr>, ctx: Context<TypeExpr>, model: &Model) -> Result<Self, SemError> {
        let cells = model.context_size(&ctx)?;
        let cell_size = model.sort_size(&sort)?;
        if cell_size == 0 && cells > 0 {
            return Err(SemError::TooLarge { what: format!("the empty set of maps into {sort}") });
        }
        Ok(TableSpace { sort, ctx, cells, cell_size })
    }

    /// Number of tables, when it fits.
    pub fn count(&self) -> Option<u128> {
        self.cell_size.checked_pow(u32::try_from(self.cells).ok()?)
    }

    fn cell(&self, i: u128, model: &Model) -> CellValue {
        match &self.sort {
            Sort::First(t) => CellValue::Value(model.unrank(t, i)),
            Sort::Second(t) => CellValue::Comp(model.comp_unrank(t, i)),
        }
    }

    fn build(&self, digits: impl Iterator<Item = u128>, model: &Model) -> Denotation {
        let cells: Vec<CellValue> = digits.map(|d| self.cell(d, model)).collect();
        let table = match &self.sort {
            Sort::First(_) => Table::Value(cells.into_iter().map(CellValue::into_value).collect()),
            Sort::Second(_) => Table::Comp(cells.into_iter().map(CellValue::into_comp).collect()),
        };
        Denotation { sort: self.sort.clone(), ctx: self.ctx.clone(), table }
    }

    /// The table at position `i`; the first point is the most significant.
    pub fn nth(&self, mut i: u128, model: &Model) -> Denotation {
        let mut digits = vec![0u128; self.cells];
        for d in digits.iter_mut().rev() {
            *d = i % self.cell_size;
            i /= self.cell_size;
        }
        self.build(digits.into_iter(), model)
    }

    pub fn random(&self, rng: &mut impl Rng, model: &Model) -> Denotation {
        let digits: Vec<u128> = (0..self.cells).map(|_| rng.gen_range(0..self.cell_size)).collect();
        self.build(digits.into_iter(), model)
    }
}

enum CellValue {
    Value(Value),
    Comp(Comp),
}

impl CellValue {
    fn into_value(self) -> Value {
        match self {
            CellValue::Value(v) => v,
            CellValue::Comp(_) => unreachable!("value sort"),
        }
    }

    fn into_comp(self) -> Comp {
        match self {
            CellValue::Comp(c) => c,
            CellValue::Value(_) => unreachable!("computation sort"),
        }
    }
}

/// A product of table spaces, enumerated when small and sampled otherwise.
struct Instances {
    spaces: Vec<TableSpace>,
    counts: Option<Vec<u128>>,
    total: Option<u128>,
}

impl Instances {
    fn new(spaces: Vec<TableSpace>) -> Self {
        let counts: Option<Vec<u128>> = spaces.iter().map(TableSpace::count).collect();
        let total = counts.as_ref().and_then(|c| c.iter().try_fold(1u128, |acc, n| acc.checked_mul(*n)));
        Instances { spaces, counts, total }
    }

    /// Up to `cap` instances: all of them if there are few enough.
    fn draw(&self, cap: usize, rng: &mut ChaCha8Rng, model: &Model) -> (Vec<Vec<Denotation>>, bool) {
        match (&self.counts, self.total) {
            (Some(counts), Some(total)) if total <= cap as u128 => {
                let all = (0..total)
                    .map(|mut i| {
                        let mut digits = vec![0u128; counts.len()];
                        for (d, c) in digits.iter_mut().zip(counts).rev() {
                            *d = i % c;
                            i /= c;
                        }
                        self.spaces.iter().zip(digits).map(|(s, d)| s.nth(d, model)).collect()
                    })
                    .collect();
                (all, true)
            }
            _ => {
                let some = (0..cap).map(|_| self.spaces.iter().map(|s| s.random(rng, model)).collect()).collect();
                (some, false)
            }
        }
    }
}

fn first_difference(lhs: &Denotation, rhs: &Denotation, model: &Model) -> Option<String> {
    let n = lhs.table.len().max(rhs.table.len());
    let differs = |i: usize| match (&lhs.table, &rhs.table) {
        (Table::Value(a), Table::Value(b)) => a.get(i) != b.get(i),
        (Table::Comp(a), Table::Comp(b)) => a.get(i) != b.get(i),
        _ => true,
    };
    let i = (0..n).find(|&i| differs(i))?;
    let names: Vec<String> = (0..lhs.ctx.len()).map(|k| format!("x{k}")).collect();
    let point = |d: &Denotation| d.render(model, &names).get(i).cloned().unwrap_or_else(|| "missing".into());
    Some(format!("at point {i}: {} versus {}", point(lhs), point(rhs)))
}

/// Size limits for compatibility checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatBounds {
    /// Size of every base type.
    pub base_size: u32,
    /// Longest ambient and target context.
    pub max_ctx: usize,
    /// Deepest type used for contexts and operator instances.
    pub type_depth: usize,
    /// Largest interpretation admitted for those types.
    pub max_type_size: u128,
    /// Instances per construct and context before sampling takes over.
    pub cap: usize,
}

impl Default for CompatBounds {
    fn default() -> Self {
        CompatBounds { base_size: 2, max_ctx: 2, type_depth: 2, max_type_size: 9, cap: 48 }
    }
}

/// The operators of a fragment instantiated over `types`.
pub fn compatibility_constructs(fragment: Option<Extension>, config: &FragmentConfig, types: &[TypeExpr]) -> Vec<Construct> {
    use Construct::*;
    let rows: Vec<(Row, bool)> = types
        .iter()
        .filter_map(|t| match t {
            TypeExpr::Record(r) => Some((r.clone(), true)),
            TypeExpr::Variant(r) => Some((r.clone(), false)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for r in types {
        match fragment {
            None => out.push(Val(r.clone())),
            Some(Extension::Sequential) => {
                for a in types {
                    out.push(Let(vec![a.clone()], r.clone()));
                    for b in types {
                        out.push(Let(vec![a.clone(), b.clone()], r.clone()));
                    }
                }
            }
            Some(Extension::Functions) => {
                for a in types {
                    out.push(Lam(a.clone(), r.clone()));
                    out.push(App(a.clone(), r.clone()));
                }
            }
            Some(Extension::Records) => {
                for (row, _) in rows.iter().filter(|(_, rec)| *rec) {
                    out.push(RecordMatch(row.clone(), r.clone()));
                }
            }
            Some(Extension::Variants) => {
                for (row, _) in rows.iter().filter(|(_, rec)| !*rec) {
                    out.push(VariantMatch(row.clone(), r.clone()));
                }
            }
            Some(Extension::Naturals) => out.push(Fold(r.clone())),
            Some(Extension::While) => {
                for s in types {
                    out.push(For(s.clone(), r.clone()));
                }
            }
            Some(Extension::Recursion) => {
                for a in types {
                    out.push(LetRec(vec![TypeExpr::rec_function(&[a.clone()], r.clone())], r.clone()));
                }
            }
        }
    }
    if fragment == Some(Extension::Records) {
        for (row, _) in rows.iter().filter(|(_, rec)| *rec) {
            out.push(ValueRecord(row.clone()));
            out.push(CompRecord(row.clone()));
        }
    }
    if fragment == Some(Extension::Variants) {
        for (row, _) in rows.iter().filter(|(_, rec)| !*rec) {
            for l in row.labels() {
                out.push(ValueTag(row.clone(), l.to_string()));
                out.push(CompTag(row.clone(), l.to_string()));
            }
        }
    }
    if fragment == Some(Extension::Naturals) {
        out.extend([Roll, Unroll, Lit(0)]);
    }
    out.retain(|c| c.instantiate(config).is_ok());
    out.sort_by_key(|c| c.to_string());
    out.dedup();
    out
}

/// Check that every operator of `fragment` commutes with semantic
/// substitution: `⟦op(d⃗)⟧[σ] = ⟦op(d⃗ routed through σ)⟧`, table by table.
pub fn check_compatibility(
    fragment: Option<Extension>,
    config: &FragmentConfig,
    algebra: &SemAlgebra,
    bounds: &CompatBounds,
    seed: u64,
) -> Vec<LawRecord> {
    let model = algebra.model.as_ref();
    let suite = format!("compatibility/{}", fragment.map_or("base", |e| e.name()));
    let types: Vec<TypeExpr> = enumerate_types(config, bounds.type_depth, &["l", "m"], 2)
        .into_iter()
        .filter(|t| matches!(model.size(t), Ok(n) if n >= 1 && n <= bounds.max_type_size))
        .filter(|t| model.comp_size(t).is_ok())
        .collect();
    let contexts = enumerate_contexts(&types, bounds.max_ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut by_rule: Vec<(&'static str, Vec<Construct>)> = Vec::new();
    for c in compatibility_constructs(fragment, config, &types) {
        match by_rule.iter_mut().find(|(r, _)| *r == c.rule()) {
            Some((_, cs)) => cs.push(c),
            None => by_rule.push((c.rule(), vec![c])),
        }
    }
    for (rule, constructs) in by_rule {
        let law = format!("{rule} commutes with substitution");
        let mut checked = 0u64;
        let mut exhaustive = true;
        let mut failure = None;
        'outer: for c in &constructs {
            let op = c.operator();
            for gamma in &contexts {
                match compat_instances(c, &op, gamma, &contexts, algebra, bounds, &mut rng) {
                    Ok((n, all)) => {
                        checked += n;
                        exhaustive &= all;
                    }
                    Err(CompatFailure::Witness(w)) => {
                        failure = Some(format!("{c} over {gamma}: {w}"));
                        break 'outer;
                    }
                    Err(CompatFailure::Skipped) => {}
                }
            }
        }
        let record = match failure {
            Some(w) => LawRecord::fail(&suite, &law, checked, w),
            None if checked == 0 => LawRecord::fail(&suite, &law, 0, "no instance fits the bounds"),
            None => LawRecord::pass(&suite, &law, checked)
                .with_note(if exhaustive { "exhaustive" } else { "sampled where the table space is large" }),
        };
        records.push(record);
    }
    records
}

enum CompatFailure {
    Witness(String),
    Skipped,
}

impl From<SemError> for CompatFailure {
    fn from(_: SemError) -> Self {
        CompatFailure::Skipped
    }
}

fn compat_instances(
    c: &Construct,
    op: &crate::signature::Operator<TypeExpr>,
    gamma: &Context<TypeExpr>,
    contexts: &[Context<TypeExpr>],
    algebra: &SemAlgebra,
    bounds: &CompatBounds,
    rng: &mut ChaCha8Rng,
) -> Result<(u64, bool), CompatFailure> {
    let model = algebra.model.as_ref();
    let mut spaces = Vec::new();
    for a in &op.args {
        spaces.push(TableSpace::new(a.sort.clone(), gamma.concat(&a.binder), model)?);
    }
    let mut checked = 0u64;
    let mut exhaustive = true;
    let per_target = (bounds.cap / contexts.len()).max(2);
    for delta in contexts {
        let mut all = spaces.clone();
        for t in gamma.iter() {
            all.push(TableSpace::new(Sort::First(t.clone()), delta.clone(), model)?);
        }
        let (instances, complete) = Instances::new(all).draw(per_target, rng, model);
        exhaustive &= complete;
        for inst in instances {
            let (args, sigma) = inst.split_at(op.args.len());
            let sigma = SemSubst { source: gamma.clone(), target: delta.clone(), entries: sigma.to_vec() };
            let sems: Vec<Sem> = args.iter().map(|d| d.to_sem(&algebra.model)).collect();
            let lhs = match algebra.clause(c, gamma, &sems).and_then(|s| Denotation::materialize(&s, op.result.clone(), gamma.clone(), model)) {
                Ok(d) => sigma.apply(&d, model)?,
                Err(_) => continue,
            };
            let routed = op
                .args
                .iter()
                .zip(args)
                .map(|(a, d)| Ok(sigma.extend(&a.binder, model)?.apply(d, model)?.to_sem(&algebra.model)))
                .collect::<Result<Vec<_>, SemError>>()?;
            let rhs = algebra
                .clause(c, delta, &routed)
                .and_then(|s| Denotation::materialize(&s, op.result.clone(), delta.clone(), model))?;
            if let Some(w) = first_difference(&lhs, &rhs, model) {
                return Err(CompatFailure::Witness(format!("substituting into {delta}, {w}")));
            }
            checked += 1;
        }
    }
    Ok((checked, exhaustive))
}

/// Compare `⟦M[σ]⟧` with `⟦M⟧ ∘ ⟨⟦σ_y⟧⟩`. The outer error reports a term
/// the model cannot interpret; the inner one a failing point.
pub fn check_substitution_lemma(
    term: &Term<TypeExpr>,
    sort: &Sort<TypeExpr>,
    env: &SubstEnv<TypeExpr>,
    algebra: &SemAlgebra,
) -> Result<Result<usize, String>, SemError> {
    let model = algebra.model.as_ref();
    let substituted = substitute(term, env)?;
    let lhs = Denotation::materialize(&semantic_map(&substituted, &env.target, algebra)?, sort.clone(), env.target.clone(), model)?;
    let body = Denotation::materialize(&semantic_map(term, &env.source, algebra)?, sort.clone(), env.source.clone(), model)?;
    let rhs = SemSubst::from_env(env, algebra)?.apply(&body, model)?;
    Ok(match first_difference(&lhs, &rhs, model) {
        None => Ok(lhs.table.len()),
        Some(w) => Err(w),
    })
}

/// Corpus parameters for randomized substitution-lemma runs.
#[derive(Debug, Clone)]
pub struct LemmaCorpus {
    /// Checked instances required.
    pub count: usize,
    pub params: GenParams,
    pub seed: u64,
    /// Largest context, in points, a corpus term may live in.
    pub point_limit: usize,
}

impl Default for LemmaCorpus {
    fn default() -> Self {
        LemmaCorpus { count: 100, params: GenParams { depth: 4, max_ctx: 2, pool_depth: 2 }, seed: 0, point_limit: 256 }
    }
}

fn lemma_witness(term: &Term<TypeExpr>, ctx: &Context<TypeExpr>, env: &SubstEnv<TypeExpr>, w: &str) -> String {
    let shown = pretty(term, ctx.len()).unwrap_or_else(|_| term.to_string());
    let subst: Vec<String> = env.entries.iter().map(|e| pretty(e, env.target.len()).unwrap_or_else(|_| e.to_string())).collect();
    format!("M = {shown} over {ctx}, σ = [{}] into {}: {w}", subst.join(", "), env.target)
}

/// The substitution lemma on random well-typed terms and substitutions.
pub fn subst_lemma_random(config: &FragmentConfig, algebra: &SemAlgebra, corpus: &LemmaCorpus) -> LawRecord {
    let suite = format!("subst-lemma/{}", config.name());
    let law = format!("⟦M[σ]⟧ = ⟦M⟧∘⟦σ⟧ under {}", algebra.model.monad);
    let model = algebra.model.as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(corpus.seed);
    let mut gen = Generator::new(config, type_pool(config, &corpus.params));
    let (mut checked, mut attempts) = (0usize, 0usize);
    let fits = |ctx: &Context<TypeExpr>| matches!(model.context_size(ctx), Ok(n) if n <= corpus.point_limit);
    while checked < corpus.count && attempts < corpus.count * 200 {
        attempts += 1;
        let (ctx, sort, term) = gen.program(&corpus.params, &mut rng);
        if !fits(&ctx) {
            continue;
        }
        let env = gen.subst(&ctx, &corpus.params, &mut rng);
        if !fits(&env.target) {
            continue;
        }
        match check_substitution_lemma(&term, &sort, &env, algebra) {
            Ok(Ok(_)) => checked += 1,
            Ok(Err(w)) => return LawRecord::fail(&suite, &law, checked as u64, lemma_witness(&term, &ctx, &env, &w)),
            Err(_) => continue,
        }
    }
    if checked < corpus.count {
        return LawRecord::fail(
            &suite,
            &law,
            checked as u64,
            format!("only {checked} of {} instances fit the model after {attempts} attempts", corpus.count),
        );
    }
    LawRecord::pass(&suite, &law, checked as u64).with_note(format!("random corpus, seed {}", corpus.seed))
}

/// The substitution lemma on every term up to `depth` over every context
/// of at most `max_ctx` pool types, each under `substs` random
/// substitutions and the identity.
pub fn subst_lemma_exhaustive(
    config: &FragmentConfig,
    algebra: &SemAlgebra,
    depth: usize,
    max_ctx: usize,
    substs: usize,
    seed: u64,
) -> LawRecord {
    let suite = format!("subst-lemma/{}", config.name());
    let law = format!(
        "⟦M[σ]⟧ = ⟦M⟧∘⟦σ⟧ under {} with base sizes {:?}",
        algebra.model.monad,
        algebra.model.base.values().collect::<Vec<_>>()
    );
    let model = algebra.model.as_ref();
    let params = GenParams { depth: 2, max_ctx, pool_depth: 2 };
    let pool: Vec<TypeExpr> = type_pool(config, &params)
        .into_iter()
        .filter(|t| matches!(model.size(t), Ok(n) if n <= 64))
        .collect();
    let mut gen = Generator::new(config, pool.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    let mut skipped = 0u64;
    for ctx in enumerate_contexts(&pool, max_ctx) {
        for ty in &pool {
            for sort in [Sort::First(ty.clone()), Sort::Second(ty.clone())] {
                for term in gen.enumerate(&ctx, &sort, depth) {
                    let mut envs = vec![crate::terms::variable_env(&ctx)];
                    for _ in 0..substs {
                        let target = enumerate_contexts(&pool, max_ctx).choose(&mut rng).cloned().unwrap_or_else(Context::empty);
                        let entries: Option<Vec<_>> = ctx.iter().map(|t| gen.value(&target, t, params.depth, &mut rng)).collect();
                        if let Some(entries) = entries {
                            envs.push(crate::signature::Env::new(ctx.clone(), target, entries));
                        }
                    }
                    for env in envs {
                        match check_substitution_lemma(&term, &sort, &env, algebra) {
                            Ok(Ok(_)) => checked += 1,
                            Ok(Err(w)) => return LawRecord::fail(&suite, &law, checked, lemma_witness(&term, &ctx, &env, &w)),
                            Err(_) => skipped += 1,
                        }
                    }
                }
            }
        }
    }
    let mut note = format!("all terms of depth ≤ {depth}, contexts ≤ {max_ctx}");
    if skipped > 0 {
        note.push_str(&format!("; {skipped} instances exceeded the model's enumeration limit"));
    }
    LawRecord::pass(&suite, &law, checked).with_note(note)
}

/// The axioms of the semantic substitution structure on random tables
/// over contexts of the model's base types, plus the agreement of the
/// point with the unit.
pub fn check_action_axioms(model: &Arc<Model>, trials: usize, seed: u64) -> Vec<LawRecord> {
    let suite = "semantic-action";
    let mut types: Vec<TypeExpr> = model.base.keys().map(TypeExpr::base).collect();
    if let Some(b) = types.first().cloned() {
        types.push(TypeExpr::fun(b.clone(), b));
    }
    let contexts = enumerate_contexts(&types, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_subst = |source: &Context<TypeExpr>, rng: &mut ChaCha8Rng| -> Result<SemSubst, SemError> {
        let target = contexts.choose(rng).expect("contexts").clone();
        let entries = source
            .iter()
            .map(|t| Ok(TableSpace::new(Sort::First(t.clone()), target.clone(), model)?.random(rng, model)))
            .collect::<Result<_, SemError>>()?;
        Ok(SemSubst { source: source.clone(), target, entries })
    };
    let random_den = |ctx: &Context<TypeExpr>, first: bool, rng: &mut ChaCha8Rng| -> Result<Denotation, SemError> {
        let t = types.choose(rng).expect("types").clone();
        let sort = if first { Sort::First(t) } else { Sort::Second(t) };
        Ok(TableSpace::new(sort, ctx.clone(), model)?.random(rng, model))
    };
    type Law<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Result<(), String>, SemError> + 'a>;
    let same = |a: &Denotation, b: &Denotation| match first_difference(a, b, model) {
        None => Ok(()),
        Some(w) => Err(w),
    };
    let laws: Vec<(&str, Law)> = vec![
        (
            "variables pick their entry: x[σ] = σ_x",
            Box::new(|rng| {
                let ctx = contexts.iter().filter(|c| !c.is_empty()).collect::<Vec<_>>().choose(rng).copied().expect("ctx").clone();
                let sigma = random_subst(&ctx, rng)?;
                let x = rng.gen_range(0..ctx.len());
                Ok(same(&sigma.apply(&Denotation::projection(&ctx, x, model)?, model)?, &sigma.entries[x]))
            }),
        ),
        (
            "values under the identity: v[id] = v",
            Box::new(|rng| {
                let ctx = contexts.choose(rng).expect("ctx").clone();
                let v = random_den(&ctx, true, rng)?;
                Ok(same(&SemSubst::identity(&ctx, model)?.apply(&v, model)?, &v))
            }),
        ),
        (
            "values compose: v[σ][τ] = v[σ;τ]",
            Box::new(|rng| {
                let ctx = contexts.choose(rng).expect("ctx").clone();
                let v = random_den(&ctx, true, rng)?;
                let s = random_subst(&ctx, rng)?;
                let t = random_subst(&s.target, rng)?;
                Ok(same(&t.apply(&s.apply(&v, model)?, model)?, &s.then(&t, model)?.apply(&v, model)?))
            }),
        ),
        (
            "computations under the identity: M[id] = M",
            Box::new(|rng| {
                let ctx = contexts.choose(rng).expect("ctx").clone();
                let m = random_den(&ctx, false, rng)?;
                Ok(same(&SemSubst::identity(&ctx, model)?.apply(&m, model)?, &m))
            }),
        ),
        (
            "computations compose: M[σ][τ] = M[σ;τ]",
            Box::new(|rng| {
                let ctx = contexts.choose(rng).expect("ctx").clone();
                let m = random_den(&ctx, false, rng)?;
                let s = random_subst(&ctx, rng)?;
                let t = random_subst(&s.target, rng)?;
                Ok(same(&t.apply(&s.apply(&m, model)?, model)?, &s.then(&t, model)?.apply(&m, model)?))
            }),
        ),
        (
            "well-defined on the quotient: (f∘⟦ρ⟧)[σ] = f[σ∘ρ]",
            Box::new(|rng| {
                let source = contexts.choose(rng).expect("ctx").clone();
                let target = contexts.choose(rng).expect("ctx").clone();
                let renamings = crate::sorts::enumerate_renamings(&source, &target);
                let Some(rho) = renamings.choose(rng) else { return Ok(Ok(())) };
                let f = random_den(&target, rng.gen_bool(0.5), rng)?;
                let sigma = random_subst(&source, rng)?;
                let lhs = sigma.apply(&rename_denotation(&f, rho, model)?, model)?;
                let rhs = sigma.reindex(rho)?.apply(&f, model)?;
                Ok(same(&lhs, &rhs))
            }),
        ),
        (
            "the point is the unit",
            Box::new(|rng| {
                let ctx = contexts.choose(rng).expect("ctx").clone();
                let algebra = SemAlgebra::new(model.clone());
                for x in 0..ctx.len() {
                    let sem = semantic_map(&Term::Var(x), &ctx, &algebra)?;
                    let via_point = Denotation::materialize(&sem, Sort::First(ctx.entries()[x].clone()), ctx.clone(), model)?;
                    let unit = &SemSubst::identity(&ctx, model)?.entries[x];
                    if let Err(w) = same(&via_point, unit) {
                        return Ok(Err(w));
                    }
                }
                Ok(Ok(()))
            }),
        ),
    ];
    laws.into_iter()
        .map(|(name, law)| {
            let mut checked = 0u64;
            for _ in 0..trials {
                match law(&mut rng) {
                    Ok(Ok(())) => checked += 1,
                    Ok(Err(w)) => return LawRecord::fail(suite, name, checked, w),
                    Err(e) => return LawRecord::fail(suite, name, checked, e.to_string()),
                }
            }
            LawRecord::pass(suite, name, checked)
        })
        .collect()
}
