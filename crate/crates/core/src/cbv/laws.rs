//! Syntactic law suites over seeded corpora of well-typed terms.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::LawRecord;
use crate::sorts::{Context, Sort};
use crate::terms::{meta_substitute, substitute, substitute_env, variable_env, HoleDecl, Holes, MetaSubst, SubstEnv, Term};

use super::generate::{type_pool, GenParams, Generator};
use super::surface::pretty;
use super::types::{FragmentConfig, TypeExpr};

/// One corpus entry: a term over `ctx` and two composable substitutions.
#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub ctx: Context<TypeExpr>,
    pub sort: Sort<TypeExpr>,
    pub term: Term<TypeExpr>,
    pub first: SubstEnv<TypeExpr>,
    pub second: SubstEnv<TypeExpr>,
}

/// Corpus size and shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCorpus {
    pub count: usize,
    pub params: GenParams,
    pub seed: u64,
}

impl Default for TermCorpus {
    fn default() -> Self {
        TermCorpus { count: 200, params: GenParams { depth: 4, max_ctx: 3, pool_depth: 2 }, seed: 0 }
    }
}

fn corpus_seed(config: &FragmentConfig, seed: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(config.mask())
}

/// A deterministic corpus for `config`.
pub fn term_corpus(config: &FragmentConfig, corpus: &TermCorpus) -> Vec<CorpusItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed(config, corpus.seed));
    let mut gen = Generator::new(config, type_pool(config, &corpus.params));
    (0..corpus.count)
        .map(|_| {
            let (ctx, sort, term) = gen.program(&corpus.params, &mut rng);
            let first = gen.subst(&ctx, &corpus.params, &mut rng);
            let second = gen.subst(&first.target, &corpus.params, &mut rng);
            CorpusItem { ctx, sort, term, first, second }
        })
        .collect()
}

fn show(term: &Term<TypeExpr>, ctx_len: usize) -> String {
    pretty(term, ctx_len).unwrap_or_else(|_| term.to_string())
}

/// Run `law` over the corpus, stopping at the first failure.
fn over<T>(suite: &str, law: &str, items: &[T], mut check: impl FnMut(&T) -> Result<u64, String>) -> LawRecord {
    let mut checked = 0;
    for item in items {
        match check(item) {
            Ok(n) => checked += n,
            Err(w) => return LawRecord::fail(suite, law, checked, w),
        }
    }
    LawRecord::pass(suite, law, checked)
}

/// The three monoid laws of substitution on a corpus: variables pick out
/// their entry, the variable environment is a right unit, and sequential
/// substitution equals substitution by the composite.
pub fn check_term_laws(config: &FragmentConfig, corpus: &[CorpusItem]) -> Vec<LawRecord> {
    let suite = format!("term-laws/{}", config.name());
    let var_law = over(&suite, "x[σ] = σ_x", corpus, |item| {
        for x in 0..item.ctx.len() {
            let got = substitute(&Term::Var(x), &item.first).map_err(|e| e.to_string())?;
            if got != item.first.entries[x] {
                return Err(format!("variable {x}: {} versus {}", show(&got, item.first.target.len()), show(&item.first.entries[x], item.first.target.len())));
            }
        }
        Ok(item.ctx.len() as u64)
    });
    let unit_law = over(&suite, "M[id] = M", corpus, |item| {
        let got = substitute(&item.term, &variable_env(&item.ctx)).map_err(|e| e.to_string())?;
        if got == item.term {
            Ok(1)
        } else {
            Err(format!("{} became {}", show(&item.term, item.ctx.len()), show(&got, item.ctx.len())))
        }
    });
    let assoc_law = over(&suite, "M[σ1][σ2] = M[σ1[σ2]]", corpus, |item| {
        let stepwise = substitute(&item.term, &item.first)
            .and_then(|t| substitute(&t, &item.second))
            .map_err(|e| e.to_string())?;
        let composite = substitute_env(&item.first, &item.second)
            .and_then(|env| substitute(&item.term, &env))
            .map_err(|e| e.to_string())?;
        if stepwise == composite {
            Ok(1)
        } else {
            let n = item.second.target.len();
            Err(format!("M = {}: {} versus {}", show(&item.term, item.ctx.len()), show(&stepwise, n), show(&composite, n)))
        }
    });
    vec![var_law, unit_law, assoc_law]
}

/// A corpus of terms with holes, plus two metavariable substitutions from
/// the hole set to itself.
#[derive(Debug, Clone)]
pub struct HoledItem {
    pub ctx: Context<TypeExpr>,
    pub term: Term<TypeExpr>,
    pub subst: SubstEnv<TypeExpr>,
    pub first: MetaSubst<TypeExpr>,
    pub second: MetaSubst<TypeExpr>,
}

/// The hole declarations used by the holed corpus: a computation hole over
/// one variable and a closed value hole, both at the first pool type.
pub fn corpus_holes(config: &FragmentConfig) -> Vec<HoleDecl<TypeExpr>> {
    let b = TypeExpr::base(config.base_types.first().cloned().unwrap_or_else(|| "b".into()));
    vec![
        HoleDecl { id: "k".into(), sort: Sort::Second(b.clone()), ctx: Context::new(vec![b.clone()]) },
        HoleDecl { id: "v".into(), sort: Sort::First(b), ctx: Context::empty() },
    ]
}

fn random_meta_subst(gen: &mut Generator<'_>, holes: &Holes<TypeExpr>, depth: usize, rng: &mut ChaCha8Rng) -> Option<MetaSubst<TypeExpr>> {
    let mut bodies = BTreeMap::new();
    for decl in holes.iter() {
        let body = (0..16).find_map(|_| gen.term(&decl.ctx, &decl.sort, rng.gen_range(1..=depth), rng))?;
        bodies.insert(decl.id.clone(), body);
    }
    MetaSubst::new(holes.clone(), holes.clone(), bodies).ok()
}

/// A deterministic holed corpus for `config`.
pub fn holed_corpus(config: &FragmentConfig, corpus: &TermCorpus) -> Vec<HoledItem> {
    let decls = corpus_holes(config);
    let holes = Holes::from_decls(decls.clone()).expect("distinct hole names");
    let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed(config, corpus.seed) ^ 0x5EED);
    let mut gen = Generator::new(config, type_pool(config, &corpus.params)).with_holes(decls);
    let mut items = Vec::with_capacity(corpus.count);
    while items.len() < corpus.count {
        let (ctx, _sort, term) = gen.program(&corpus.params, &mut rng);
        let subst = gen.subst(&ctx, &corpus.params, &mut rng);
        let (Some(first), Some(second)) = (
            random_meta_subst(&mut gen, &holes, 3, &mut rng),
            random_meta_subst(&mut gen, &holes, 3, &mut rng),
        ) else {
            continue;
        };
        items.push(HoledItem { ctx, term, subst, first, second });
    }
    items
}

fn meta_env(env: &SubstEnv<TypeExpr>, zeta: &MetaSubst<TypeExpr>) -> Result<SubstEnv<TypeExpr>, String> {
    let entries = env
        .entries
        .iter()
        .map(|e| meta_substitute(e, &env.target, zeta))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(SubstEnv::new(env.source.clone(), env.target.clone(), entries))
}

/// Kleisli unit and associativity of metavariable substitution, and its
/// commutation with ordinary substitution.
pub fn check_meta_laws(config: &FragmentConfig, corpus: &[HoledItem]) -> Vec<LawRecord> {
    let suite = format!("meta-laws/{}", config.name());
    let holes_in = |item: &HoledItem| item.term.has_meta() as u64;
    let unit = over(&suite, "M{unit} = M", corpus, |item| {
        let got = meta_substitute(&item.term, &item.ctx, &MetaSubst::unit(item.first.from_holes())).map_err(|e| e.to_string())?;
        if got == item.term {
            Ok(1)
        } else {
            Err(format!("{} became {}", item.term, got))
        }
    });
    let unit_left = over(&suite, "unit{ζ} = ζ", corpus, |item| {
        let composite = MetaSubst::unit(item.first.from_holes()).then(&item.first).map_err(|e| e.to_string())?;
        if composite == item.first {
            Ok(1)
        } else {
            Err(format!("{composite:?} versus {:?}", item.first))
        }
    });
    let assoc = over(&suite, "M{ζ1}{ζ2} = M{ζ1;ζ2}", corpus, |item| {
        let stepwise = meta_substitute(&item.term, &item.ctx, &item.first)
            .and_then(|t| meta_substitute(&t, &item.ctx, &item.second))
            .map_err(|e| e.to_string())?;
        let composite = item
            .first
            .then(&item.second)
            .and_then(|z| meta_substitute(&item.term, &item.ctx, &z))
            .map_err(|e| e.to_string())?;
        if stepwise == composite {
            Ok(1)
        } else {
            Err(format!("M = {}: {stepwise} versus {composite}", item.term))
        }
    });
    let commute = over(&suite, "M[σ]{ζ} = M{ζ}[σ{ζ}]", corpus, |item| {
        let lhs = substitute(&item.term, &item.subst)
            .and_then(|t| meta_substitute(&t, &item.subst.target, &item.first))
            .map_err(|e| e.to_string())?;
        let rhs_env = meta_env(&item.subst, &item.first)?;
        let rhs = meta_substitute(&item.term, &item.ctx, &item.first)
            .and_then(|t| substitute(&t, &rhs_env))
            .map_err(|e| e.to_string())?;
        if lhs == rhs {
            Ok(1)
        } else {
            Err(format!("M = {}: {lhs} versus {rhs}", item.term))
        }
    });
    let with_holes: u64 = corpus.iter().map(holes_in).sum();
    let mut records = vec![unit, unit_left, assoc, commute];
    for r in records.iter_mut().filter(|r| r.passed) {
        *r = r.clone().with_note(format!("{with_holes} of {} terms contain holes", corpus.len()));
    }
    records
}
