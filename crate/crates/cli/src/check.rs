//! The `check` command: law suites and their reports.

use std::path::PathBuf;
use std::sync::Arc;

use clap::ValueEnum;
use modsyn_core::cbv::{
    check_meta_laws, check_term_laws, holed_corpus, term_corpus, Extension, FragmentConfig, GenParams, TermCorpus,
};
use modsyn_core::presheaf::{
    check_action_axioms as presheaf_action_axioms, check_pointed_tensor, check_skew, random_homogeneous,
    random_pointed, random_second_class, AssociatorVariant, ContextSpace, SkewObject,
};
use modsyn_core::report::{LawRecord, Report};
use modsyn_core::semantics::{
    check_action_axioms, check_compatibility, check_monad_laws, subst_lemma_exhaustive, subst_lemma_random,
    BindVariant, CompatBounds, LemmaCorpus, Model, Monad, SemAlgebra,
};
use modsyn_core::sorts::SortingSystem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::input::{self, Failure};
use crate::Opts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    TermLaws,
    MetaLaws,
    PresheafLaws,
    Skew,
    Pointed,
    MonadLaws,
    Compatibility,
    SubstLemma,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::TermLaws => "term-laws",
            Suite::MetaLaws => "meta-laws",
            Suite::PresheafLaws => "presheaf-laws",
            Suite::Skew => "skew",
            Suite::Pointed => "pointed",
            Suite::MonadLaws => "monad-laws",
            Suite::Compatibility => "compatibility",
            Suite::SubstLemma => "subst-lemma",
            Suite::All => "all",
        }
    }
}

const REPORT_DIR: &str = "MODSYN_REPORT_DIR";
const RANDOM_STRUCTURES: usize = 20;

struct Plan<'a> {
    opts: &'a Opts,
    all_fragments: bool,
    count: usize,
}

impl Plan<'_> {
    /// Explicit configurations, or `default` when none were asked for.
    fn configs(&self, default: impl FnOnce() -> Vec<FragmentConfig>) -> Result<Vec<FragmentConfig>, Failure> {
        let bound = self.opts.nat_bound;
        let with_bound = |c: FragmentConfig| match bound {
            Some(n) => c.with_nat_bound(n),
            None => c,
        };
        if self.all_fragments {
            Ok(FragmentConfig::all().into_iter().map(with_bound).collect())
        } else if self.opts.fragment.is_some() {
            Ok(vec![input::fragment(self.opts)?])
        } else {
            Ok(default().into_iter().map(with_bound).collect())
        }
    }

    fn corpus(&self) -> TermCorpus {
        TermCorpus {
            count: self.count,
            params: GenParams { depth: self.opts.depth.unwrap_or(4), max_ctx: self.opts.ctx_bound.unwrap_or(3), pool_depth: 2 },
            seed: self.opts.seed,
        }
    }

    fn monads(&self, default: &[Monad]) -> Result<Vec<Monad>, Failure> {
        Ok(match input::monad(self.opts)? {
            Some(m) => vec![m],
            None => default.to_vec(),
        })
    }
}

fn designated() -> Vec<FragmentConfig> {
    use Extension::*;
    [vec![], vec![Sequential], vec![Functions], vec![Sequential, Functions]].into_iter().map(FragmentConfig::new).collect()
}

fn space() -> Arc<ContextSpace> {
    ContextSpace::new(SortingSystem::new(vec!["b".into()], vec!["c".into()]).expect("one sort of each class"), 2)
}

fn term_laws(plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    let mut out = Vec::new();
    for config in plan.configs(|| FragmentConfig::all().into_iter().map(|c| c.with_base_types(&["b", "c"])).collect())? {
        out.extend(check_term_laws(&config, &term_corpus(&config, &plan.corpus())));
    }
    Ok(out)
}

fn meta_laws(plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    let mut out = Vec::new();
    for config in plan.configs(|| vec![FragmentConfig::default(), FragmentConfig::full()])? {
        out.extend(check_meta_laws(&config, &holed_corpus(&config, &plan.corpus())));
    }
    Ok(out)
}

fn presheaf_laws(plan: &Plan) -> Vec<LawRecord> {
    let space = space();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.opts.seed);
    let mut out = Vec::new();
    let mut functorial = 0;
    for _ in 0..RANDOM_STRUCTURES {
        let made = (|| {
            let p = random_second_class(&space, 3, &mut rng)?;
            let q = random_homogeneous(&space, 3, &mut rng)?;
            let l = random_homogeneous(&space, 3, &mut rng)?;
            let m = random_homogeneous(&space, 3, &mut rng)?;
            for s in [&p, &q, &l, &m] {
                functorial += s.check_functor_laws()?;
            }
            Ok::<_, modsyn_core::presheaf::PresheafError>(presheaf_action_axioms(&p, &q, &l, &m, AssociatorVariant::Honest))
        })();
        match made {
            Ok(records) => out.extend(records),
            Err(e) => out.push(LawRecord::fail("presheaf-laws", "random structures are presheaves", functorial, e.to_string())),
        }
    }
    out.push(LawRecord::pass("presheaf-laws", "random structures are presheaves", functorial));
    out
}

fn skew(plan: &Plan) -> Vec<LawRecord> {
    let space = space();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.opts.seed);
    let mut out = Vec::new();
    for _ in 0..RANDOM_STRUCTURES {
        let objects: Result<Vec<SkewObject>, _> = (0..4)
            .map(|_| {
                Ok::<_, modsyn_core::presheaf::PresheafError>(SkewObject {
                    hom: random_homogeneous(&space, 3, &mut rng)?,
                    snd: random_second_class(&space, 3, &mut rng)?,
                })
            })
            .collect();
        match objects {
            Ok(o) => out.extend(check_skew(&o[0], &o[1], &o[2], &o[3])),
            Err(e) => out.push(LawRecord::fail("skew", "random objects", 0, e.to_string())),
        }
    }
    out
}

fn pointed(plan: &Plan) -> Vec<LawRecord> {
    let space = space();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.opts.seed);
    let mut out = Vec::new();
    for _ in 0..RANDOM_STRUCTURES / 2 {
        let made: Result<Vec<_>, _> = (0..3).map(|_| random_pointed(&space, 3, &mut rng)).collect();
        match made {
            Ok(p) => out.extend(check_pointed_tensor(&p[0], &p[1], &p[2])),
            Err(e) => out.push(LawRecord::fail("pointed", "random pointed objects", 0, e.to_string())),
        }
    }
    out
}

fn monad_laws(plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    Ok(plan.monads(&Monad::BUNDLED)?.into_iter().flat_map(|m| check_monad_laws(m, BindVariant::Lawful, plan.opts.seed)).collect())
}

fn compatibility(plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    let mut out = Vec::new();
    let monads = plan.monads(&[Monad::Identity, Monad::Option])?;
    let bounds = CompatBounds { max_ctx: plan.opts.ctx_bound.unwrap_or(2), ..CompatBounds::default() };
    for config in plan.configs(|| vec![FragmentConfig::new([Extension::Sequential, Extension::Functions])])? {
        let fragments = std::iter::once(None).chain(config.extensions.iter().copied().map(Some));
        for fragment in fragments {
            for &monad in &monads {
                let model = Model::for_config(&config, monad, 2);
                if model.supports(&config).is_err() {
                    continue;
                }
                let algebra = SemAlgebra::new(Arc::new(model));
                out.extend(check_compatibility(fragment, &config, &algebra, &bounds, plan.opts.seed));
            }
        }
    }
    for &monad in &monads {
        out.extend(check_action_axioms(&Arc::new(Model::new(monad)), 50, plan.opts.seed));
    }
    Ok(out)
}

fn subst_lemma(plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    let mut out = Vec::new();
    let depth = plan.opts.depth.unwrap_or(3);
    let ctx = plan.opts.ctx_bound.unwrap_or(2);
    let exhaustive: Vec<u8> = designated().iter().map(FragmentConfig::mask).collect();
    let monads = plan.monads(&[Monad::Identity, Monad::Option])?;
    let configs = plan.configs(|| {
        let mut c = designated();
        c.push(FragmentConfig::full());
        c
    })?;
    for config in configs {
        for &monad in &monads {
            let model = Model::for_config(&config, monad, 2);
            if model.supports(&config).is_err() {
                continue;
            }
            let algebra = SemAlgebra::new(Arc::new(model));
            if exhaustive.contains(&config.mask()) {
                out.push(subst_lemma_exhaustive(&config, &algebra, depth, ctx, 2, plan.opts.seed));
            } else {
                let corpus = LemmaCorpus {
                    count: plan.count.min(100).max(1),
                    params: GenParams { depth, max_ctx: ctx, pool_depth: 2 },
                    seed: plan.opts.seed ^ u64::from(config.mask()),
                    ..LemmaCorpus::default()
                };
                out.push(subst_lemma_random(&config, &algebra, &corpus));
            }
        }
    }
    Ok(out)
}

fn records(suite: Suite, plan: &Plan) -> Result<Vec<LawRecord>, Failure> {
    Ok(match suite {
        Suite::TermLaws => term_laws(plan)?,
        Suite::MetaLaws => meta_laws(plan)?,
        Suite::PresheafLaws => presheaf_laws(plan),
        Suite::Skew => skew(plan),
        Suite::Pointed => pointed(plan),
        Suite::MonadLaws => monad_laws(plan)?,
        Suite::Compatibility => compatibility(plan)?,
        Suite::SubstLemma => subst_lemma(plan)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [
                Suite::TermLaws,
                Suite::MetaLaws,
                Suite::PresheafLaws,
                Suite::Skew,
                Suite::Pointed,
                Suite::MonadLaws,
                Suite::Compatibility,
                Suite::SubstLemma,
            ] {
                all.extend(records(s, plan)?);
            }
            all
        }
    })
}

fn report_path(suite: Suite, opts: &Opts) -> Option<PathBuf> {
    opts.report
        .clone()
        .or_else(|| std::env::var_os(REPORT_DIR).map(|dir| PathBuf::from(dir).join(format!("{}.json", suite.name()))))
}

pub fn run(suite: Suite, all_fragments: bool, count: usize, opts: &Opts) -> Result<(), Failure> {
    if count == 0 || opts.depth == Some(0) {
        return Err(Failure::Input("corpus size and depth must be positive".into()));
    }
    let plan = Plan { opts, all_fragments, count };
    let mut report = Report::new();
    report.extend(records(suite, &plan)?);
    crate::emit(&report.to_text());
    if let Some(path) = report_path(suite, opts) {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
        }
        std::fs::write(&path, report.to_json()).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let failed = report.failures().count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} laws failed", report.records.len())));
    }
    Ok(())
}
