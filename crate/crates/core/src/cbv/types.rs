use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::sorts::{Sort, SortUniverse};

use super::cursor::Cursor;
use super::CbvError;

/// Labels are ordered by length first, so `"0" < "1+"` and `"9" < "10"`.
pub fn label_order(a: &str, b: &str) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A finite map from labels to types, kept in canonical label order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Row(Vec<(String, TypeExpr)>);

impl Row {
    /// Sorts the fields; a repeated label is returned as the error.
    pub fn new(mut fields: Vec<(String, TypeExpr)>) -> Result<Self, String> {
        fields.sort_by(|a, b| label_order(&a.0, &b.0));
        for pair in fields.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(pair[0].0.clone());
            }
        }
        Ok(Row(fields))
    }

    pub fn empty() -> Self {
        Row(Vec::new())
    }

    /// Fields `"0"`, `"1"`, … holding `types` in order.
    pub fn numbered(types: &[TypeExpr]) -> Self {
        Row(types.iter().enumerate().map(|(i, t)| (i.to_string(), t.clone())).collect())
    }

    pub fn fields(&self) -> &[(String, TypeExpr)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|(l, _)| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&TypeExpr> {
        self.0.iter().find(|(l, _)| l == label).map(|(_, t)| t)
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeExpr> {
        self.0.iter().map(|(_, t)| t)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(l, _)| l.as_str())
    }

    /// True when the labels are exactly `"0"`, `"1"`, … in order.
    pub fn is_numbered(&self) -> bool {
        self.0.iter().enumerate().all(|(i, (l, _))| *l == i.to_string())
    }
}

/// Simple types of the call-by-value calculus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Base(String),
    Fun(Box<TypeExpr>, Box<TypeExpr>),
    Record(Row),
    Variant(Row),
    Nat,
}

impl TypeExpr {
    pub fn base(name: impl Into<String>) -> Self {
        TypeExpr::Base(name.into())
    }

    pub fn fun(arg: TypeExpr, result: TypeExpr) -> Self {
        TypeExpr::Fun(Box::new(arg), Box::new(result))
    }

    pub fn unit() -> Self {
        TypeExpr::Record(Row::empty())
    }

    pub fn maybe(payload: TypeExpr) -> Self {
        TypeExpr::Variant(Row(vec![("0".into(), TypeExpr::unit()), ("1+".into(), payload)]))
    }

    pub fn loop_step(cont: TypeExpr, done: TypeExpr) -> Self {
        TypeExpr::Variant(Row(vec![("Cont".into(), cont), ("Done".into(), done)]))
    }

    /// Type of a recursive function with the given parameters.
    pub fn rec_function(params: &[TypeExpr], result: TypeExpr) -> Self {
        TypeExpr::fun(TypeExpr::Record(Row::numbered(params)), result)
    }

    /// The payload of an option-shaped variant `<0:{}|1+:τ>`.
    pub fn maybe_payload(&self) -> Option<&TypeExpr> {
        match self {
            TypeExpr::Variant(row) if row.len() == 2 && row.get("0") == Some(&TypeExpr::unit()) => row.get("1+"),
            _ => None,
        }
    }

    /// `(cont, done)` of a loop-step variant `<Cont:τ|Done:τ'>`.
    pub fn loop_parts(&self) -> Option<(&TypeExpr, &TypeExpr)> {
        match self {
            TypeExpr::Variant(row) if row.len() == 2 => Some((row.get("Cont")?, row.get("Done")?)),
            _ => None,
        }
    }

    /// Parameters and result of a recursive-function type.
    pub fn rec_parts(&self) -> Option<(Vec<TypeExpr>, &TypeExpr)> {
        match self {
            TypeExpr::Fun(arg, result) => match arg.as_ref() {
                TypeExpr::Record(row) if row.is_numbered() => Some((row.types().cloned().collect(), result)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Base(_) | TypeExpr::Nat => 1,
            TypeExpr::Fun(a, r) => 1 + a.depth().max(r.depth()),
            TypeExpr::Record(row) | TypeExpr::Variant(row) => 1 + row.types().map(TypeExpr::depth).max().unwrap_or(0),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CbvError> {
        let mut cursor = Cursor::new(text);
        let t = cursor.type_expr()?;
        if !cursor.at_end() {
            return cursor.error("trailing input after type");
        }
        Ok(t)
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, row: &Row, sep: &str| -> fmt::Result {
            for (i, (l, t)) in row.fields().iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{l}:{t}")?;
            }
            Ok(())
        };
        match self {
            TypeExpr::Base(b) => f.write_str(b),
            TypeExpr::Nat => f.write_str("Nat"),
            TypeExpr::Fun(a, r) => write!(f, "({a}->{r})"),
            TypeExpr::Record(r) => {
                f.write_str("{")?;
                row(f, r, ",")?;
                f.write_str("}")
            }
            TypeExpr::Variant(r) => {
                f.write_str("<")?;
                row(f, r, "|")?;
                f.write_str(">")
            }
        }
    }
}

impl FromStr for TypeExpr {
    type Err = CbvError;

    fn from_str(s: &str) -> Result<Self, CbvError> {
        TypeExpr::parse(s)
    }
}

impl Serialize for TypeExpr {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypeExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        TypeExpr::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// The optional fragments of the calculus, in menu order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Sequential,
    Functions,
    Records,
    Variants,
    Naturals,
    While,
    Recursion,
}

impl Extension {
    pub const ALL: [Extension; 7] = [
        Extension::Sequential,
        Extension::Functions,
        Extension::Records,
        Extension::Variants,
        Extension::Naturals,
        Extension::While,
        Extension::Recursion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Extension::Sequential => "sequential",
            Extension::Functions => "functions",
            Extension::Records => "records",
            Extension::Variants => "variants",
            Extension::Naturals => "naturals",
            Extension::While => "while",
            Extension::Recursion => "recursion",
        }
    }

    fn bit(self) -> u8 {
        1 << Extension::ALL.iter().position(|&e| e == self).expect("listed")
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Extension {
    type Err = CbvError;

    fn from_str(s: &str) -> Result<Self, CbvError> {
        Extension::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| CbvError::Config(format!("unknown extension `{s}`")))
    }
}

fn default_base_types() -> Vec<String> {
    vec!["b".to_string()]
}

fn default_nat_bound() -> u32 {
    4
}

fn default_type_depth() -> usize {
    3
}

/// A choice of fragments together with the finite parameters of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentConfig {
    #[serde(default)]
    pub extensions: BTreeSet<Extension>,
    #[serde(default = "default_base_types")]
    pub base_types: Vec<String>,
    #[serde(default = "default_nat_bound")]
    pub nat_bound: u32,
    #[serde(default = "default_type_depth")]
    pub type_depth: usize,
}

impl Default for FragmentConfig {
    fn default() -> Self {
        FragmentConfig::new([])
    }
}

/// Why a type is outside a fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRejection {
    UnknownBase(String),
    Needs(Extension, TypeExpr),
}

impl FragmentConfig {
    pub fn new(extensions: impl IntoIterator<Item = Extension>) -> Self {
        FragmentConfig {
            extensions: extensions.into_iter().collect(),
            base_types: default_base_types(),
            nat_bound: default_nat_bound(),
            type_depth: default_type_depth(),
        }
    }

    pub fn full() -> Self {
        FragmentConfig::new(Extension::ALL)
    }

    /// The configuration whose extensions are the set bits of `mask`.
    pub fn from_mask(mask: u8) -> Self {
        FragmentConfig::new(Extension::ALL.into_iter().filter(|e| mask & e.bit() != 0))
    }

    pub fn mask(&self) -> u8 {
        self.extensions.iter().map(|e| e.bit()).sum()
    }

    /// All 128 extension subsets, ordered by bitmask.
    pub fn all() -> Vec<FragmentConfig> {
        (0..128u8).map(FragmentConfig::from_mask).collect()
    }

    pub fn with_base_types(mut self, names: &[&str]) -> Self {
        self.base_types = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_nat_bound(mut self, bound: u32) -> Self {
        self.nat_bound = bound;
        self
    }

    pub fn has(&self, e: Extension) -> bool {
        self.extensions.contains(&e)
    }

    /// `{}` or `{sequential,functions}`.
    pub fn name(&self) -> String {
        let names: Vec<&str> = self.extensions.iter().map(|e| e.name()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parse `base`, `full`, or a comma-separated list of extensions,
    /// optionally wrapped in braces.
    pub fn parse_extensions(text: &str) -> Result<BTreeSet<Extension>, CbvError> {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}').trim();
        match inner {
            "" | "base" => Ok(BTreeSet::new()),
            "full" | "all" => Ok(Extension::ALL.into_iter().collect()),
            list => list.split(',').map(str::parse).collect(),
        }
    }

    /// Application is fused with record creation when recursive functions
    /// exist without both general functions and records.
    pub fn fused_call(&self) -> bool {
        self.has(Extension::Recursion) && !(self.has(Extension::Functions) && self.has(Extension::Records))
    }

    pub fn admits(&self, t: &TypeExpr) -> bool {
        self.check_type(t).is_ok()
    }

    /// Membership in the type grammar of the fragment.
    pub fn check_type(&self, t: &TypeExpr) -> Result<(), TypeRejection> {
        let needs = |e: Extension| Err(TypeRejection::Needs(e, t.clone()));
        let all = |row: &Row| row.types().try_for_each(|f| self.check_type(f));
        match t {
            TypeExpr::Base(b) => {
                if self.base_types.contains(b) {
                    Ok(())
                } else {
                    Err(TypeRejection::UnknownBase(b.clone()))
                }
            }
            TypeExpr::Nat => {
                if self.has(Extension::Naturals) {
                    Ok(())
                } else {
                    needs(Extension::Naturals)
                }
            }
            TypeExpr::Fun(arg, result) => {
                if self.has(Extension::Functions) {
                    self.check_type(arg)?;
                    self.check_type(result)
                } else if self.has(Extension::Recursion) && t.rec_parts().is_some() {
                    match arg.as_ref() {
                        TypeExpr::Record(row) => all(row)?,
                        _ => unreachable!("rec_parts checked the shape"),
                    }
                    self.check_type(result)
                } else {
                    needs(Extension::Functions)
                }
            }
            TypeExpr::Record(row) => {
                if self.has(Extension::Records) {
                    all(row)
                } else if row.is_empty() && self.has(Extension::Naturals) {
                    Ok(())
                } else {
                    needs(Extension::Records)
                }
            }
            TypeExpr::Variant(row) => {
                if self.has(Extension::Variants) {
                    all(row)
                } else if let (true, Some(p)) = (self.has(Extension::Naturals), t.maybe_payload()) {
                    self.check_type(p)
                } else if let (true, Some((c, d))) = (self.has(Extension::While), t.loop_parts()) {
                    self.check_type(c)?;
                    self.check_type(d)
                } else {
                    needs(Extension::Variants)
                }
            }
        }
    }

    pub fn fulfill(&self) -> Fulfillment<'_> {
        Fulfillment { config: self }
    }
}

/// The typing needs of the optional fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Need {
    /// The empty record `{}`, needed by the option shape.
    Unit,
    /// The type of natural numbers.
    Nat,
    /// `Maybe τ`, the pattern functor of the naturals.
    Maybe,
    /// The loop-step variant `<Cont:τ|Done:τ'>`.
    LoopStep,
    /// Recursive function types with a parameter list.
    RecFunction,
}

impl Need {
    pub fn describe(self) -> &'static str {
        match self {
            Need::Unit => "unit ⊨ {}",
            Need::Nat => "Nat★ ⊨ Nat",
            Need::Maybe => "Maybe τ ⊨ <0:{}|1+:τ>",
            Need::LoopStep => "⟨Done: τ', Cont: τ⟩ ⊨ <Cont:τ|Done:τ'>",
            Need::RecFunction => "⟨[x1:τ1,…], τ'⟩ ⊨ ({0:τ1,…}->τ')",
        }
    }
}

/// Deterministic fulfillments of the typing needs under one configuration.
#[derive(Debug, Clone, Copy)]
pub struct Fulfillment<'a> {
    config: &'a FragmentConfig,
}

impl Fulfillment<'_> {
    fn require(&self, need: Need, ok: bool, t: TypeExpr) -> Result<TypeExpr, CbvError> {
        if ok {
            Ok(t)
        } else {
            Err(CbvError::NeedUnfulfilled { need: need.describe().to_string(), at: 0 })
        }
    }

    pub fn unit(&self) -> Result<TypeExpr, CbvError> {
        let c = self.config;
        self.require(Need::Unit, c.has(Extension::Records) || c.has(Extension::Naturals), TypeExpr::unit())
    }

    pub fn nat(&self) -> Result<TypeExpr, CbvError> {
        self.require(Need::Nat, self.config.has(Extension::Naturals), TypeExpr::Nat)
    }

    pub fn maybe(&self, payload: TypeExpr) -> Result<TypeExpr, CbvError> {
        self.require(Need::Maybe, self.config.has(Extension::Naturals), TypeExpr::maybe(payload))
    }

    pub fn loop_step(&self, cont: TypeExpr, done: TypeExpr) -> Result<TypeExpr, CbvError> {
        self.require(Need::LoopStep, self.config.has(Extension::While), TypeExpr::loop_step(cont, done))
    }

    pub fn rec_function(&self, params: &[TypeExpr], result: TypeExpr) -> Result<TypeExpr, CbvError> {
        self.require(Need::RecFunction, self.config.has(Extension::Recursion), TypeExpr::rec_function(params, result))
    }
}

/// The sorts of a fragment: every admitted type, at both sorts.
#[derive(Debug, Clone)]
pub struct FragmentUniverse(pub FragmentConfig);

impl SortUniverse<TypeExpr> for FragmentUniverse {
    fn contains(&self, sort: &Sort<TypeExpr>) -> bool {
        self.0.admits(sort.id())
    }
}

/// Every admitted type up to `depth`, with rows drawn from `labels` (at
/// most `max_fields` fields) and the fused shapes of the configuration.
pub fn enumerate_types(config: &FragmentConfig, depth: usize, labels: &[&str], max_fields: usize) -> Vec<TypeExpr> {
    let mut levels: Vec<Vec<TypeExpr>> = vec![Vec::new()];
    let mut all: BTreeSet<TypeExpr> = BTreeSet::new();
    for d in 1..=depth {
        let below: Vec<TypeExpr> = all.iter().cloned().collect();
        let mut fresh = Vec::new();
        let offer = |t: TypeExpr, fresh: &mut Vec<TypeExpr>| {
            if t.depth() == d && config.admits(&t) && !all.contains(&t) && !fresh.contains(&t) {
                fresh.push(t);
            }
        };
        for b in &config.base_types {
            offer(TypeExpr::base(b.clone()), &mut fresh);
        }
        offer(TypeExpr::Nat, &mut fresh);
        offer(TypeExpr::unit(), &mut fresh);
        offer(TypeExpr::Variant(Row::empty()), &mut fresh);
        for a in &below {
            for r in &below {
                offer(TypeExpr::fun(a.clone(), r.clone()), &mut fresh);
                offer(TypeExpr::loop_step(a.clone(), r.clone()), &mut fresh);
            }
            offer(TypeExpr::maybe(a.clone()), &mut fresh);
        }
        for n in 1..=max_fields.min(labels.len()) {
            for choice in choices(below.len(), n) {
                let types: Vec<TypeExpr> = choice.iter().map(|&i| below[i].clone()).collect();
                let named = Row::new(labels.iter().zip(&types).map(|(l, t)| (l.to_string(), t.clone())).collect())
                    .expect("distinct labels");
                offer(TypeExpr::Record(named.clone()), &mut fresh);
                offer(TypeExpr::Variant(named), &mut fresh);
                offer(TypeExpr::rec_function(&types, types[0].clone()), &mut fresh);
                for r in &below {
                    offer(TypeExpr::rec_function(&types, r.clone()), &mut fresh);
                }
            }
        }
        all.extend(fresh.iter().cloned());
        levels.push(fresh);
    }
    levels.into_iter().flatten().collect()
}

fn choices(size: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter().flat_map(|p| (0..size).map(move |i| [p.clone(), vec![i]].concat())).collect()
    })
}
