//! Finite interpretations of types and contexts.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cbv::{Extension, FragmentConfig, TypeExpr};
use crate::sorts::{Context, Sort};

use super::monad::{Capabilities, Comp, Monad};
use super::SemError;

/// An element of the interpretation of a type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Base(u32),
    Nat(u32),
    /// Fields in canonical row order.
    Record(Vec<Value>),
    /// Constructor position in the row, and the payload.
    Variant(u32, Box<Value>),
    /// A Kleisli map, listed along the enumeration of its domain.
    Fun(Arc<[Comp]>),
}

impl Value {
    pub fn unit() -> Value {
        Value::Record(Vec::new())
    }
}

/// Largest set the semantics will enumerate element by element.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// A finite strong-monad model: sizes for the base types, a monad, and the
/// bound on naturals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    #[serde(default = "default_base")]
    pub base: BTreeMap<String, u32>,
    pub monad: Monad,
    #[serde(default = "default_nat_bound")]
    pub nat_bound: u32,
}

fn default_base() -> BTreeMap<String, u32> {
    BTreeMap::from([("b".to_string(), 2)])
}

fn default_nat_bound() -> u32 {
    4
}

impl Model {
    /// A model with `b` of size two and naturals below four.
    pub fn new(monad: Monad) -> Self {
        Model { base: default_base(), monad, nat_bound: default_nat_bound() }
    }

    pub fn with_base(mut self, name: &str, size: u32) -> Self {
        self.base.insert(name.to_string(), size);
        self
    }

    pub fn with_nat_bound(mut self, bound: u32) -> Self {
        self.nat_bound = bound;
        self
    }

    /// Base sizes for every base type of `config`, each of size `size`.
    pub fn for_config(config: &FragmentConfig, monad: Monad, size: u32) -> Self {
        Model {
            base: config.base_types.iter().map(|b| (b.clone(), size)).collect(),
            monad,
            nat_bound: config.nat_bound,
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        self.monad.capabilities()
    }

    /// Fail unless the monad provides what the fragment's constructs need.
    pub fn supports(&self, config: &FragmentConfig) -> Result<(), SemError> {
        let caps = self.capabilities();
        for (ext, ok) in [(Extension::While, caps.elgot), (Extension::Recursion, caps.fixpoints)] {
            if config.has(ext) && !ok {
                return Err(SemError::UnsupportedCapability { extension: ext, monad: self.monad });
            }
        }
        Ok(())
    }

    fn base_size(&self, name: &str) -> Result<u32, SemError> {
        self.base.get(name).copied().ok_or_else(|| SemError::Config(format!("no size given for base type `{name}`")))
    }

    /// `|⟦τ⟧|`.
    pub fn size(&self, ty: &TypeExpr) -> Result<u128, SemError> {
        let too_large = || SemError::TooLarge { what: ty.to_string() };
        match ty {
            TypeExpr::Base(b) => Ok(self.base_size(b)? as u128),
            TypeExpr::Nat => Ok(self.nat_bound as u128),
            TypeExpr::Record(row) => {
                row.types().try_fold(1u128, |acc, t| acc.checked_mul(self.size(t)?).ok_or_else(too_large))
            }
            TypeExpr::Variant(row) => {
                row.types().try_fold(0u128, |acc, t| acc.checked_add(self.size(t)?).ok_or_else(too_large))
            }
            TypeExpr::Fun(a, r) => {
                let dom = self.size(a)?;
                let cod = self.comp_size(r)?;
                let dom = u32::try_from(dom).map_err(|_| too_large())?;
                cod.checked_pow(dom).ok_or_else(too_large)
            }
        }
    }

    /// `|T⟦τ⟧|`.
    pub fn comp_size(&self, ty: &TypeExpr) -> Result<u128, SemError> {
        self.monad.size(self.size(ty)?).ok_or_else(|| SemError::TooLarge { what: format!("T {ty}") })
    }

    /// Position of `v` in the enumeration of `⟦τ⟧`.
    pub fn rank(&self, ty: &TypeExpr, v: &Value) -> Result<u128, SemError> {
        let bad = || SemError::Malformed(format!("{v:?} is not an element of {ty}"));
        match (ty, v) {
            (TypeExpr::Base(b), Value::Base(i)) if *i < self.base_size(b)? => Ok(*i as u128),
            (TypeExpr::Nat, Value::Nat(n)) if *n < self.nat_bound => Ok(*n as u128),
            (TypeExpr::Record(row), Value::Record(vs)) if vs.len() == row.len() => {
                let mut acc = 0u128;
                for (t, v) in row.types().zip(vs) {
                    acc = acc * self.size(t)? + self.rank(t, v)?;
                }
                Ok(acc)
            }
            (TypeExpr::Variant(row), Value::Variant(k, payload)) if (*k as usize) < row.len() => {
                let mut offset = 0u128;
                for t in row.types().take(*k as usize) {
                    offset += self.size(t)?;
                }
                let t = row.types().nth(*k as usize).expect("checked position");
                Ok(offset + self.rank(t, payload)?)
            }
            (TypeExpr::Fun(a, r), Value::Fun(table)) if table.len() as u128 == self.size(a)? => {
                let (base, n) = (self.comp_size(r)?, self.size(r)?);
                let mut acc = 0u128;
                for c in table.iter() {
                    let digit = self.monad.rank(c, n, &|v| self.rank(r, v))?;
                    acc = acc.checked_mul(base).ok_or_else(|| SemError::TooLarge { what: ty.to_string() })? + digit;
                }
                Ok(acc)
            }
            _ => Err(bad()),
        }
    }

    /// The element at position `i` of `⟦τ⟧`; `i` must be below its size.
    pub fn unrank(&self, ty: &TypeExpr, mut i: u128) -> Value {
        match ty {
            TypeExpr::Base(_) => Value::Base(i as u32),
            TypeExpr::Nat => Value::Nat(i as u32),
            TypeExpr::Record(row) => {
                let types: Vec<&TypeExpr> = row.types().collect();
                let mut fields = vec![Value::unit(); types.len()];
                for (slot, t) in fields.iter_mut().zip(&types).rev() {
                    let s = self.size(t).expect("sized");
                    *slot = self.unrank(t, i % s);
                    i /= s;
                }
                Value::Record(fields)
            }
            TypeExpr::Variant(row) => {
                for (k, t) in row.types().enumerate() {
                    let s = self.size(t).expect("sized");
                    if i < s {
                        return Value::Variant(k as u32, Box::new(self.unrank(t, i)));
                    }
                    i -= s;
                }
                unreachable!("index beyond the variant")
            }
            TypeExpr::Fun(a, r) => {
                let dom = self.size(a).expect("sized") as usize;
                let (base, n) = (self.comp_size(r).expect("sized"), self.size(r).expect("sized"));
                let mut table = vec![Comp::Pure(Value::unit()); dom];
                for slot in table.iter_mut().rev() {
                    *slot = self.monad.unrank(i % base, n, &|k| self.unrank(r, k));
                    i /= base;
                }
                Value::Fun(table.into())
            }
        }
    }

    pub fn comp_rank(&self, ty: &TypeExpr, c: &Comp) -> Result<u128, SemError> {
        self.monad.rank(c, self.size(ty)?, &|v| self.rank(ty, v))
    }

    pub fn comp_unrank(&self, ty: &TypeExpr, i: u128) -> Comp {
        let n = self.size(ty).expect("sized");
        self.monad.unrank(i, n, &|k| self.unrank(ty, k))
    }

    /// Guard against enumerating huge sets.
    pub fn enumerable(&self, what: &str, size: u128) -> Result<usize, SemError> {
        if size > ENUMERATION_LIMIT {
            Err(SemError::TooLarge { what: what.to_string() })
        } else {
            Ok(size as usize)
        }
    }

    /// `⟦τ⟧` as an explicit list, in rank order.
    pub fn interpret_type(&self, ty: &TypeExpr) -> Result<Vec<Value>, SemError> {
        let n = self.enumerable(&ty.to_string(), self.size(ty)?)?;
        Ok((0..n as u128).map(|i| self.unrank(ty, i)).collect())
    }

    /// `T⟦τ⟧` as an explicit list, in rank order.
    pub fn interpret_comp(&self, ty: &TypeExpr) -> Result<Vec<Comp>, SemError> {
        let n = self.enumerable(&format!("T {ty}"), self.comp_size(ty)?)?;
        Ok((0..n as u128).map(|i| self.comp_unrank(ty, i)).collect())
    }

    /// `⟦s⟧` for a sort: values for first-class, computations otherwise.
    pub fn sort_size(&self, sort: &Sort<TypeExpr>) -> Result<u128, SemError> {
        match sort {
            Sort::First(t) => self.size(t),
            Sort::Second(t) => self.comp_size(t),
        }
    }

    /// Number of points of `⟦Γ⟧ = Π ⟦τ_x⟧`.
    pub fn context_size(&self, ctx: &Context<TypeExpr>) -> Result<usize, SemError> {
        let total = ctx.iter().try_fold(1u128, |acc, t| {
            acc.checked_mul(self.size(t)?).ok_or_else(|| SemError::TooLarge { what: ctx.to_string() })
        })?;
        self.enumerable(&ctx.to_string(), total)
    }

    /// The point at mixed-radix index `i`, the rightmost position varying
    /// fastest.
    pub fn point(&self, ctx: &Context<TypeExpr>, mut i: usize) -> Vec<Value> {
        let mut p = vec![Value::unit(); ctx.len()];
        for (slot, t) in p.iter_mut().zip(ctx.iter()).rev() {
            let s = self.size(t).expect("sized context") as usize;
            *slot = self.unrank(t, (i % s) as u128);
            i /= s;
        }
        p
    }

    /// Inverse of [`Model::point`].
    pub fn point_index(&self, ctx: &Context<TypeExpr>, p: &[Value]) -> Result<usize, SemError> {
        let mut acc = 0usize;
        for (t, v) in ctx.iter().zip(p) {
            acc = acc * self.size(t)? as usize + self.rank(t, v)? as usize;
        }
        Ok(acc)
    }

    /// Human-readable element of `⟦τ⟧`. Base elements print as the type
    /// name followed by their index.
    pub fn render(&self, ty: &TypeExpr, v: &Value) -> String {
        match (ty, v) {
            (TypeExpr::Base(b), Value::Base(i)) => format!("{b}{i}"),
            (TypeExpr::Nat, Value::Nat(n)) => n.to_string(),
            (TypeExpr::Record(row), Value::Record(vs)) => {
                let fields: Vec<String> =
                    row.fields().iter().zip(vs).map(|((l, t), v)| format!("{l} = {}", self.render(t, v))).collect();
                format!("{{{}}}", fields.join(", "))
            }
            (TypeExpr::Variant(row), Value::Variant(k, payload)) => match row.fields().get(*k as usize) {
                Some((l, t)) => format!("{l}({})", self.render(t, payload)),
                None => format!("{v:?}"),
            },
            (TypeExpr::Fun(a, r), Value::Fun(table)) => {
                let entries: Vec<String> = table
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{} => {}", self.render(a, &self.unrank(a, i as u128)), self.render_comp(r, c)))
                    .collect();
                format!("[{}]", entries.join("; "))
            }
            _ => format!("{v:?}"),
        }
    }

    pub fn render_comp(&self, ty: &TypeExpr, c: &Comp) -> String {
        match c {
            Comp::Pure(v) => self.render(ty, v),
            Comp::Maybe(None) => "None".into(),
            Comp::Maybe(Some(v)) => format!("Some {}", self.render(ty, v)),
            Comp::Except(Ok(v)) => format!("ok {}", self.render(ty, v)),
            Comp::Except(Err(e)) => format!("raise {e}"),
            Comp::Writer(w, v) => format!("({w}, {})", self.render(ty, v)),
            Comp::State(table) => {
                let entries: Vec<String> =
                    table.iter().enumerate().map(|(s, (s2, v))| format!("s{s} -> (s{s2}, {})", self.render(ty, v))).collect();
                format!("[{}]", entries.join("; "))
            }
            Comp::Set(vs) => {
                let items: Vec<String> = vs.iter().map(|v| self.render(ty, v)).collect();
                format!("{{{}}}", items.join(", "))
            }
        }
    }

    /// Parse a rendered element of `⟦τ⟧`. Accepts the output of
    /// [`Model::render`] for base types, naturals, records and variants.
    /// A point of a named context from `name = element, …`; every name
    /// must be given exactly once.
    pub fn parse_point(&self, scope: &[(String, TypeExpr)], text: &str) -> Result<Vec<Value>, SemError> {
        let mut given = BTreeMap::new();
        for part in split_top(text).into_iter().filter(|p| !p.trim().is_empty()) {
            let (name, v) = part
                .split_once('=')
                .ok_or_else(|| SemError::Config(format!("expected `name = element`, found `{}`", part.trim())))?;
            if given.insert(name.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(SemError::Config(format!("`{}` is assigned twice", name.trim())));
            }
        }
        let point = scope
            .iter()
            .map(|(name, ty)| {
                let v = given.remove(name).ok_or_else(|| SemError::Config(format!("no element given for `{name}`")))?;
                self.parse_value(ty, &v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        match given.keys().next() {
            Some(extra) => Err(SemError::Config(format!("`{extra}` is not in the context"))),
            None => Ok(point),
        }
    }

    pub fn parse_value(&self, ty: &TypeExpr, text: &str) -> Result<Value, SemError> {
        let text = text.trim();
        let bad = || SemError::Config(format!("`{text}` is not an element of {ty}"));
        match ty {
            TypeExpr::Base(b) => {
                let i: u32 = text.strip_prefix(b.as_str()).unwrap_or(text).parse().map_err(|_| bad())?;
                (i < self.base_size(b)?).then_some(Value::Base(i)).ok_or_else(bad)
            }
            TypeExpr::Nat => {
                let n: u32 = text.parse().map_err(|_| bad())?;
                (n < self.nat_bound).then_some(Value::Nat(n)).ok_or_else(bad)
            }
            TypeExpr::Record(row) => {
                let inner = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
                let mut given = BTreeMap::new();
                for part in split_top(inner) {
                    if part.trim().is_empty() {
                        continue;
                    }
                    let (l, v) = part.split_once('=').ok_or_else(bad)?;
                    given.insert(l.trim().to_string(), v.to_string());
                }
                if given.len() != row.len() {
                    return Err(bad());
                }
                let fields = row
                    .fields()
                    .iter()
                    .map(|(l, t)| self.parse_value(t, given.get(l).ok_or_else(bad)?))
                    .collect::<Result<_, _>>()?;
                Ok(Value::Record(fields))
            }
            TypeExpr::Variant(row) => {
                let (l, rest) = text.split_once('(').ok_or_else(bad)?;
                let payload = rest.strip_suffix(')').ok_or_else(bad)?;
                let k = row.position(l.trim()).ok_or_else(bad)?;
                let t = row.get(l.trim()).expect("found label");
                Ok(Value::Variant(k as u32, Box::new(self.parse_value(t, payload)?)))
            }
            TypeExpr::Fun(..) => Err(SemError::Config(format!("function values cannot be given on the command line ({ty})"))),
        }
    }
}

fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TypeExpr {
        s.parse().unwrap()
    }

    #[test]
    fn sizes() {
        let m = Model::new(Monad::Option);
        assert_eq!(m.size(&t("{}")).unwrap(), 1);
        assert_eq!(m.size(&t("(b->b)")).unwrap(), 9);
        assert_eq!(m.clone().with_nat_bound(3).size(&TypeExpr::maybe(TypeExpr::Nat)).unwrap(), 4);
    }

    #[test]
    fn rank_round_trips() {
        let m = Model::new(Monad::Writer { order: 3 });
        for ty in ["b", "{l:b,m:Nat}", "<l:b|m:{}>", "(b->b)", "({l:b}->b)"] {
            let ty = t(ty);
            for (i, v) in m.interpret_type(&ty).unwrap().iter().enumerate() {
                assert_eq!(m.rank(&ty, v).unwrap(), i as u128);
            }
        }
    }

    #[test]
    fn points_are_mixed_radix() {
        let m = Model::new(Monad::Identity);
        let ctx = Context::new(vec![t("b"), t("Nat")]);
        assert_eq!(m.context_size(&ctx).unwrap(), 8);
        assert_eq!(m.point(&ctx, 5), vec![Value::Base(1), Value::Nat(1)]);
        assert_eq!(m.point_index(&ctx, &m.point(&ctx, 6)).unwrap(), 6);
    }

    #[test]
    fn render_and_parse() {
        let m = Model::new(Monad::Identity);
        let ty = t("{l:b,m:<x:Nat|y:b>}");
        for v in m.interpret_type(&ty).unwrap() {
            assert_eq!(m.parse_value(&ty, &m.render(&ty, &v)).unwrap(), v);
        }
    }
}
