//! The bundled finite strong monads and their law checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::report::LawRecord;

use super::domain::Value;
use super::SemError;

/// An element of `T X` for one of the bundled monads.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comp {
    Pure(Value),
    Maybe(Option<Value>),
    Except(Result<Value, u8>),
    /// Accumulated output in the cyclic group of the writer's order.
    Writer(u8, Value),
    /// For every initial state, the final state and the result.
    State(Vec<(u8, Value)>),
    Set(BTreeSet<Value>),
}

/// A strong monad on finite sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Monad {
    Identity,
    Option,
    /// Exceptions drawn from a set of the given size.
    Exception { errors: u8 },
    /// Output in the cyclic group of the given order.
    Writer { order: u8 },
    State { states: u8 },
    Powerset,
}

/// What a monad supports beyond Kleisli exponentials, which every finite
/// monad has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub kleisli_exponentials: bool,
    pub elgot: bool,
    pub fixpoints: bool,
}

impl Monad {
    /// The six monads the checks run against.
    pub const BUNDLED: [Monad; 6] = [
        Monad::Identity,
        Monad::Option,
        Monad::Exception { errors: 2 },
        Monad::Writer { order: 3 },
        Monad::State { states: 2 },
        Monad::Powerset,
    ];

    pub fn capabilities(self) -> Capabilities {
        let partial = self == Monad::Option;
        Capabilities { kleisli_exponentials: true, elgot: partial, fixpoints: partial }
    }

    pub fn unit(self, v: Value) -> Comp {
        match self {
            Monad::Identity => Comp::Pure(v),
            Monad::Option => Comp::Maybe(Some(v)),
            Monad::Exception { .. } => Comp::Except(Ok(v)),
            Monad::Writer { .. } => Comp::Writer(0, v),
            Monad::State { states } => Comp::State((0..states).map(|s| (s, v.clone())).collect()),
            Monad::Powerset => Comp::Set(BTreeSet::from([v])),
        }
    }

    /// The divergent computation, for monads that have one.
    pub fn divergence(self) -> Option<Comp> {
        (self == Monad::Option).then_some(Comp::Maybe(None))
    }

    /// Kleisli extension of `f` applied to `m`.
    pub fn bind(
        self,
        m: &Comp,
        f: &mut dyn FnMut(&Value) -> Result<Comp, SemError>,
    ) -> Result<Comp, SemError> {
        match (self, m) {
            (Monad::Identity, Comp::Pure(v)) => f(v),
            (Monad::Option, Comp::Maybe(None)) => Ok(Comp::Maybe(None)),
            (Monad::Option, Comp::Maybe(Some(v))) => f(v),
            (Monad::Exception { .. }, Comp::Except(Err(e))) => Ok(Comp::Except(Err(*e))),
            (Monad::Exception { .. }, Comp::Except(Ok(v))) => f(v),
            (Monad::Writer { order }, Comp::Writer(w, v)) => match f(v)? {
                Comp::Writer(w2, y) => Ok(Comp::Writer((w + w2) % order, y)),
                other => Err(self.shape_error(&other)),
            },
            (Monad::State { .. }, Comp::State(table)) => {
                let mut out = Vec::with_capacity(table.len());
                for (s2, v) in table {
                    match f(v)? {
                        Comp::State(next) => out.push(next[*s2 as usize].clone()),
                        other => return Err(self.shape_error(&other)),
                    }
                }
                Ok(Comp::State(out))
            }
            (Monad::Powerset, Comp::Set(vs)) => {
                let mut out = BTreeSet::new();
                for v in vs {
                    match f(v)? {
                        Comp::Set(ys) => out.extend(ys),
                        other => return Err(self.shape_error(&other)),
                    }
                }
                Ok(Comp::Set(out))
            }
            _ => Err(self.shape_error(m)),
        }
    }

    /// Apply a pure function under the monad.
    pub fn map(self, m: &Comp, mut f: impl FnMut(&Value) -> Value) -> Result<Comp, SemError> {
        self.bind(m, &mut |v| Ok(self.unit(f(v))))
    }

    fn shape_error(self, c: &Comp) -> SemError {
        SemError::Malformed(format!("{c:?} is not a computation of the {self} monad"))
    }

    /// `|T X|` for `|X| = n`, or `None` on overflow.
    pub fn size(self, n: u128) -> Option<u128> {
        match self {
            Monad::Identity => Some(n),
            Monad::Option => n.checked_add(1),
            Monad::Exception { errors } => n.checked_add(errors as u128),
            Monad::Writer { order } => n.checked_mul(order as u128),
            Monad::State { states } => {
                let per = n.checked_mul(states as u128)?;
                per.checked_pow(states as u32)
            }
            Monad::Powerset => {
                if n >= 127 {
                    None
                } else {
                    Some(1u128 << n)
                }
            }
        }
    }

    /// Position of `c` in the enumeration of `T X`, given the ranking of `X`.
    pub fn rank(
        self,
        c: &Comp,
        n: u128,
        rank: &dyn Fn(&Value) -> Result<u128, SemError>,
    ) -> Result<u128, SemError> {
        match (self, c) {
            (Monad::Identity, Comp::Pure(v)) => rank(v),
            (Monad::Option, Comp::Maybe(None)) => Ok(0),
            (Monad::Option, Comp::Maybe(Some(v))) => Ok(1 + rank(v)?),
            (Monad::Exception { errors }, Comp::Except(Err(e))) if *e < errors => Ok(*e as u128),
            (Monad::Exception { errors }, Comp::Except(Ok(v))) => Ok(errors as u128 + rank(v)?),
            (Monad::Writer { .. }, Comp::Writer(w, v)) => Ok(*w as u128 * n + rank(v)?),
            (Monad::State { states }, Comp::State(table)) if table.len() == states as usize => {
                let base = n * states as u128;
                let mut acc = 0u128;
                for (s, v) in table {
                    acc = acc * base + (*s as u128 * n + rank(v)?);
                }
                Ok(acc)
            }
            (Monad::Powerset, Comp::Set(vs)) => {
                let mut acc = 0u128;
                for v in vs {
                    acc |= 1u128 << rank(v)?;
                }
                Ok(acc)
            }
            _ => Err(self.shape_error(c)),
        }
    }

    /// Inverse of [`Monad::rank`].
    pub fn unrank(self, mut i: u128, n: u128, unrank: &dyn Fn(u128) -> Value) -> Comp {
        match self {
            Monad::Identity => Comp::Pure(unrank(i)),
            Monad::Option => Comp::Maybe(if i == 0 { None } else { Some(unrank(i - 1)) }),
            Monad::Exception { errors } => {
                let e = errors as u128;
                Comp::Except(if i < e { Err(i as u8) } else { Ok(unrank(i - e)) })
            }
            Monad::Writer { .. } => Comp::Writer((i / n) as u8, unrank(i % n)),
            Monad::State { states } => {
                let base = n * states as u128;
                let mut table = vec![(0u8, Value::unit()); states as usize];
                for slot in table.iter_mut().rev() {
                    let digit = i % base;
                    i /= base;
                    *slot = ((digit / n) as u8, unrank(digit % n));
                }
                Comp::State(table)
            }
            Monad::Powerset => Comp::Set((0..n).filter(|k| i >> k & 1 == 1).map(unrank).collect()),
        }
    }

    /// All of `T {0, …, n-1}`, with `Value::Base(k)` standing for `k`.
    pub fn carrier(self, n: u32) -> Vec<Comp> {
        let size = self.size(n as u128).expect("small carrier");
        (0..size).map(|i| self.unrank(i, n as u128, &|k| Value::Base(k as u32))).collect()
    }
}

impl fmt::Display for Monad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monad::Identity => write!(f, "identity"),
            Monad::Option => write!(f, "option"),
            Monad::Exception { errors } => write!(f, "exception:{errors}"),
            Monad::Writer { order } => write!(f, "writer:{order}"),
            Monad::State { states } => write!(f, "state:{states}"),
            Monad::Powerset => write!(f, "powerset"),
        }
    }
}

impl FromStr for Monad {
    type Err = SemError;

    /// `identity`, `option`, `exception[:n]`, `writer[:n]`, `state[:n]`
    /// or `powerset`.
    fn from_str(s: &str) -> Result<Self, SemError> {
        let (name, param) = match s.trim().split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s.trim(), None),
        };
        let raw = param;
        let param = |default: u8| -> Result<u8, SemError> {
            match raw {
                None => Ok(default),
                Some(p) => match p.trim().parse::<u8>() {
                    Ok(k) if (1..=8).contains(&k) => Ok(k),
                    _ => Err(SemError::Config(format!("monad parameter `{p}` must be between 1 and 8"))),
                },
            }
        };
        let no_param = |m: Monad| match raw {
            None => Ok(m),
            Some(_) => Err(SemError::Config(format!("the {m} monad takes no parameter"))),
        };
        match name.to_ascii_lowercase().as_str() {
            "identity" | "id" => no_param(Monad::Identity),
            "option" | "maybe" => no_param(Monad::Option),
            "powerset" => no_param(Monad::Powerset),
            "exception" => Ok(Monad::Exception { errors: param(2)? }),
            "writer" => Ok(Monad::Writer { order: param(3)? }),
            "state" => Ok(Monad::State { states: param(2)? }),
            other => Err(SemError::Config(format!("unknown monad `{other}`"))),
        }
    }
}

impl From<Monad> for String {
    fn from(m: Monad) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Monad {
    type Error = SemError;

    fn try_from(s: String) -> Result<Self, SemError> {
        s.parse()
    }
}

/// The parameterised bind under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindVariant {
    Lawful,
    /// Ignores the parameter and always feeds the first element of `A`.
    DropsParameter,
}

/// A map `A × X → T Y` between carriers `{0..}`, stored row-major.
struct Kleisli<'a> {
    x: usize,
    table: &'a [Comp],
}

impl Kleisli<'_> {
    fn at(&self, a: u32, x: &Value) -> Comp {
        let Value::Base(x) = x else { unreachable!("law carriers hold base elements") };
        self.table[a as usize * self.x + *x as usize].clone()
    }
}

struct LawBench {
    monad: Monad,
    variant: BindVariant,
}

impl LawBench {
    fn bind(&self, f: &Kleisli<'_>, a: u32, m: &Comp) -> Comp {
        let a = match self.variant {
            BindVariant::Lawful => a,
            BindVariant::DropsParameter => 0,
        };
        self.monad.bind(m, &mut |x| Ok(f.at(a, x))).expect("well-shaped law carrier")
    }
}

/// Sizes `(|A|, |X|, |Y|, |Z|)` and how exhaustively to probe them.
#[derive(Debug, Clone, Copy)]
struct Probe {
    a: u32,
    x: u32,
    y: u32,
    z: u32,
}

/// How many law instances may be enumerated before switching to sampling.
pub const EXHAUSTIVE_LIMIT: u128 = 400_000;
/// Instances drawn per law and size when sampling.
pub const SAMPLES: usize = 4_000;

enum Space {
    All(u128),
    Sample(usize),
}

fn space(total: u128, force_sample: bool) -> Space {
    if force_sample || total > EXHAUSTIVE_LIMIT {
        Space::Sample(SAMPLES)
    } else {
        Space::All(total)
    }
}

/// Decode instance `i` of a product of finite ranges, last factor fastest.
fn digits(mut i: u128, radices: &[u128]) -> Vec<u128> {
    let mut out = vec![0; radices.len()];
    for (slot, r) in out.iter_mut().zip(radices).rev() {
        *slot = i % r;
        i /= r;
    }
    out
}

fn function_table(index: u128, cells: usize, codomain: &[Comp]) -> Vec<Comp> {
    digits(index, &vec![codomain.len() as u128; cells]).into_iter().map(|d| codomain[d as usize].clone()).collect()
}

/// Check the four strong monad laws for `monad` with the given bind.
///
/// Every size in `{1,2}` is probed exhaustively unless the instance count
/// exceeds [`EXHAUSTIVE_LIMIT`]; size 3 is always sampled.
pub fn check_monad_laws(monad: Monad, variant: BindVariant, seed: u64) -> Vec<LawRecord> {
    let bench = LawBench { monad, variant };
    let suite = format!("monad-laws/{monad}");
    let mut probes = Vec::new();
    for a in 1..=2 {
        for x in 1..=2 {
            for y in 1..=2 {
                for z in 1..=2 {
                    probes.push((Probe { a, x, y, z }, false));
                }
            }
        }
    }
    probes.push((Probe { a: 3, x: 3, y: 3, z: 3 }, true));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let laws: [(&str, LawFn); 4] = [
        ("left unit", left_unit),
        ("right unit", right_unit),
        ("associativity", associativity),
        ("naturality in the parameter", naturality),
    ];
    laws.iter()
        .map(|(name, law)| {
            let mut checked = 0u64;
            let mut sampled = false;
            for (probe, force) in &probes {
                match law(&bench, *probe, *force, &mut rng) {
                    Ok((n, s)) => {
                        checked += n;
                        sampled |= s;
                    }
                    Err(w) => return LawRecord::fail(&suite, *name, checked, w),
                }
            }
            let note = if sampled { "exhaustive where small, sampled otherwise" } else { "exhaustive" };
            LawRecord::pass(&suite, *name, checked).with_note(note)
        })
        .collect()
}

type LawFn = fn(&LawBench, Probe, bool, &mut ChaCha8Rng) -> Result<(u64, bool), String>;

/// Run `check` over every instance index, or a random sample of them.
fn sweep(
    total: u128,
    force: bool,
    rng: &mut ChaCha8Rng,
    mut check: impl FnMut(u128) -> Result<(), String>,
) -> Result<(u64, bool), String> {
    match space(total, force) {
        Space::All(n) => {
            for i in 0..n {
                check(i)?;
            }
            Ok((n as u64, false))
        }
        Space::Sample(k) => {
            for _ in 0..k {
                check(rng.gen_range(0..total))?;
            }
            Ok((k as u64, true))
        }
    }
}

fn left_unit(b: &LawBench, p: Probe, force: bool, rng: &mut ChaCha8Rng) -> Result<(u64, bool), String> {
    let ty = b.monad.carrier(p.y);
    let cells = (p.a * p.x) as usize;
    let fs = (ty.len() as u128).pow(cells as u32);
    let radices = [fs, p.a as u128, p.x as u128];
    sweep(fs * p.a as u128 * p.x as u128, force, rng, |i| {
        let d = digits(i, &radices);
        let table = function_table(d[0], cells, &ty);
        let f = Kleisli { x: p.x as usize, table: &table };
        let (a, x) = (d[1] as u32, Value::Base(d[2] as u32));
        let lhs = b.bind(&f, a, &b.monad.unit(x.clone()));
        let rhs = f.at(a, &x);
        (lhs == rhs).then_some(()).ok_or_else(|| format!("f={table:?} a={a} x={x:?}: {lhs:?} != {rhs:?}"))
    })
}

fn right_unit(b: &LawBench, p: Probe, force: bool, rng: &mut ChaCha8Rng) -> Result<(u64, bool), String> {
    let tx = b.monad.carrier(p.x);
    let units: Vec<Comp> = (0..p.a).flat_map(|_| (0..p.x).map(|x| b.monad.unit(Value::Base(x)))).collect();
    let f = Kleisli { x: p.x as usize, table: &units };
    let radices = [p.a as u128, tx.len() as u128];
    sweep(radices[0] * radices[1], force, rng, |i| {
        let d = digits(i, &radices);
        let (a, m) = (d[0] as u32, &tx[d[1] as usize]);
        let lhs = b.bind(&f, a, m);
        (lhs == *m).then_some(()).ok_or_else(|| format!("a={a} m={m:?}: {lhs:?}"))
    })
}

fn associativity(b: &LawBench, p: Probe, force: bool, rng: &mut ChaCha8Rng) -> Result<(u64, bool), String> {
    let (tx, ty, tz) = (b.monad.carrier(p.x), b.monad.carrier(p.y), b.monad.carrier(p.z));
    let (fc, gc) = ((p.a * p.x) as usize, (p.a * p.y) as usize);
    let fs = (ty.len() as u128).checked_pow(fc as u32).unwrap_or(u128::MAX);
    let gs = (tz.len() as u128).checked_pow(gc as u32).unwrap_or(u128::MAX);
    let radices = [fs, gs, p.a as u128, tx.len() as u128];
    let total = radices.iter().try_fold(1u128, |acc, r| acc.checked_mul(*r)).unwrap_or(u128::MAX);
    sweep(total, force, rng, |i| {
        let d = digits(i, &radices);
        let ft = function_table(d[0], fc, &ty);
        let gt = function_table(d[1], gc, &tz);
        let (f, g) = (Kleisli { x: p.x as usize, table: &ft }, Kleisli { x: p.y as usize, table: &gt });
        let (a, m) = (d[2] as u32, &tx[d[3] as usize]);
        let lhs = b.bind(&g, a, &b.bind(&f, a, m));
        let composite: Vec<Comp> =
            (0..p.a).flat_map(|a2| (0..p.x).map(move |x| (a2, x))).map(|(a2, x)| b.bind(&g, a2, &f.at(a2, &Value::Base(x)))).collect();
        let rhs = b.bind(&Kleisli { x: p.x as usize, table: &composite }, a, m);
        (lhs == rhs).then_some(()).ok_or_else(|| format!("f={ft:?} g={gt:?} a={a} m={m:?}: {lhs:?} != {rhs:?}"))
    })
}

fn naturality(b: &LawBench, p: Probe, force: bool, rng: &mut ChaCha8Rng) -> Result<(u64, bool), String> {
    let (tx, ty) = (b.monad.carrier(p.x), b.monad.carrier(p.y));
    let cells = (p.a * p.x) as usize;
    let fs = (ty.len() as u128).pow(cells as u32);
    // Reindexing maps h : A' → A with |A'| = |A|.
    let hs = (p.a as u128).pow(p.a);
    let radices = [fs, hs, p.a as u128, tx.len() as u128];
    let total = radices.iter().product();
    sweep(total, force, rng, |i| {
        let d = digits(i, &radices);
        let table = function_table(d[0], cells, &ty);
        let f = Kleisli { x: p.x as usize, table: &table };
        let h: Vec<u32> = digits(d[1], &vec![p.a as u128; p.a as usize]).into_iter().map(|k| k as u32).collect();
        let (a2, m) = (d[2] as u32, &tx[d[3] as usize]);
        let lhs = b.bind(&f, h[a2 as usize], m);
        let reindexed: Vec<Comp> =
            (0..p.a).flat_map(|a| (0..p.x).map(move |x| (a, x))).map(|(a, x)| f.at(h[a as usize], &Value::Base(x))).collect();
        let rhs = b.bind(&Kleisli { x: p.x as usize, table: &reindexed }, a2, m);
        (lhs == rhs).then_some(()).ok_or_else(|| format!("f={table:?} h={h:?} a'={a2} m={m:?}: {lhs:?} != {rhs:?}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_sizes() {
        assert_eq!(Monad::Option.carrier(2).len(), 3);
        assert_eq!(Monad::State { states: 2 }.carrier(2).len(), 16);
        assert_eq!(Monad::Powerset.carrier(3).len(), 8);
        assert_eq!(Monad::Writer { order: 3 }.carrier(2).len(), 6);
    }

    #[test]
    fn rank_inverts_unrank() {
        for m in Monad::BUNDLED {
            for (i, c) in m.carrier(2).iter().enumerate() {
                let r = m.rank(c, 2, &|v| match v {
                    Value::Base(k) => Ok(*k as u128),
                    _ => unreachable!(),
                });
                assert_eq!(r.unwrap(), i as u128, "{m}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Monad::BUNDLED {
            assert_eq!(m.to_string().parse::<Monad>().unwrap(), m);
        }
        assert!("writer:0".parse::<Monad>().is_err());
    }
}
