//! The operators of every fragment, named by self-describing labels such as
//! `lam<b;b>` or `let<b,Nat;b>`.

use std::fmt;
use std::sync::Arc;

use crate::signature::{Argument, Operator, OperatorFamily, OperatorTable, SignatureError};
use crate::sorts::{Context, Sort};

use super::cursor::Cursor;
use super::types::{Extension, FragmentConfig, FragmentUniverse, Need, Row, TypeExpr};

/// One operator instance, described structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Construct {
    /// `val V : C τ`.
    Val(TypeExpr),
    /// `let x0 = M0; …; xn = Mn in N` with the bound types and the result.
    Let(Vec<TypeExpr>, TypeExpr),
    /// `\x : τ1. M` with argument and result types.
    Lam(TypeExpr, TypeExpr),
    /// `M N` with argument and result types.
    App(TypeExpr, TypeExpr),
    ValueRecord(Row),
    CompRecord(Row),
    RecordMatch(Row, TypeExpr),
    ValueTag(Row, String),
    CompTag(Row, String),
    VariantMatch(Row, TypeExpr),
    Lit(u32),
    Unroll,
    Roll,
    /// Bounded iteration producing `τ`.
    Fold(TypeExpr),
    /// Unbounded iteration with state `τ` and result `τ'`.
    For(TypeExpr, TypeExpr),
    /// Mutually recursive functions with their types, and the body type.
    LetRec(Vec<TypeExpr>, TypeExpr),
    /// Application fused with record creation.
    Call(Row, TypeExpr),
}

fn sep_list(f: &mut fmt::Formatter<'_>, items: &[TypeExpr]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Construct::*;
        match self {
            Val(t) => write!(f, "val<{t}>"),
            Let(ts, r) => {
                f.write_str("let<")?;
                sep_list(f, ts)?;
                write!(f, ";{r}>")
            }
            Lam(a, r) => write!(f, "lam<{a};{r}>"),
            App(a, r) => write!(f, "app<{a};{r}>"),
            ValueRecord(row) => write!(f, "vrec<{}>", TypeExpr::Record(row.clone())),
            CompRecord(row) => write!(f, "crec<{}>", TypeExpr::Record(row.clone())),
            RecordMatch(row, r) => write!(f, "rmatch<{};{r}>", TypeExpr::Record(row.clone())),
            ValueTag(row, l) => write!(f, "vtag<{};{l}>", TypeExpr::Variant(row.clone())),
            CompTag(row, l) => write!(f, "ctag<{};{l}>", TypeExpr::Variant(row.clone())),
            VariantMatch(row, r) => write!(f, "vmatch<{};{r}>", TypeExpr::Variant(row.clone())),
            Lit(n) => write!(f, "lit<{n}>"),
            Unroll => f.write_str("unroll"),
            Roll => f.write_str("roll"),
            Fold(t) => write!(f, "fold<{t}>"),
            For(s, r) => write!(f, "for<{s};{r}>"),
            LetRec(fs, r) => {
                f.write_str("letrec<")?;
                sep_list(f, fs)?;
                write!(f, ";{r}>")
            }
            Call(row, r) => write!(f, "call<{};{r}>", TypeExpr::Record(row.clone())),
        }
    }
}

fn e<T>(r: Result<T, super::CbvError>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn record_row(t: TypeExpr, c: &Cursor<'_>) -> Result<Row, String> {
    match t {
        TypeExpr::Record(row) => Ok(row),
        other => Err(format!("expected a record type at byte {}, found {other}", c.pos)),
    }
}

fn variant_row(t: TypeExpr, c: &Cursor<'_>) -> Result<Row, String> {
    match t {
        TypeExpr::Variant(row) => Ok(row),
        other => Err(format!("expected a variant type at byte {}, found {other}", c.pos)),
    }
}

impl Construct {
    /// Read a label. `Ok(None)` means the name is not one of ours.
    pub fn parse_label(label: &str) -> Result<Option<Construct>, String> {
        use Construct::*;
        let mut c = Cursor::new(label);
        let Ok(name) = c.ident() else { return Ok(None) };
        let known = [
            "val", "let", "lam", "app", "vrec", "crec", "rmatch", "vtag", "ctag", "vmatch", "lit", "unroll", "roll",
            "fold", "for", "letrec", "call",
        ];
        if !known.contains(&name.as_str()) {
            return Ok(None);
        }
        let construct = match name.as_str() {
            "unroll" => Unroll,
            "roll" => Roll,
            _ => {
                e(c.expect("<"))?;
                let construct = match name.as_str() {
                    "lit" => Lit(e(c.number())?),
                    "let" | "letrec" => {
                        let mut ts = vec![e(c.type_expr())?];
                        while c.eat(",") {
                            ts.push(e(c.type_expr())?);
                        }
                        e(c.expect(";"))?;
                        let r = e(c.type_expr())?;
                        if name == "let" {
                            Let(ts, r)
                        } else {
                            LetRec(ts, r)
                        }
                    }
                    _ => {
                        let first = e(c.type_expr())?;
                        let two = |c: &mut Cursor<'_>| -> Result<TypeExpr, String> {
                            e(c.expect(";"))?;
                            e(c.type_expr())
                        };
                        match name.as_str() {
                            "val" => Val(first),
                            "fold" => Fold(first),
                            "lam" => Lam(first, two(&mut c)?),
                            "app" => App(first, two(&mut c)?),
                            "for" => For(first, two(&mut c)?),
                            "vrec" => ValueRecord(record_row(first, &c)?),
                            "crec" => CompRecord(record_row(first, &c)?),
                            "rmatch" => RecordMatch(record_row(first, &c)?, two(&mut c)?),
                            "call" => Call(record_row(first, &c)?, two(&mut c)?),
                            "vmatch" => VariantMatch(variant_row(first, &c)?, two(&mut c)?),
                            "vtag" | "ctag" => {
                                let row = variant_row(first, &c)?;
                                e(c.expect(";"))?;
                                let l = e(c.label())?;
                                if row.get(&l).is_none() {
                                    return Err(format!("label `{l}` is not in the variant"));
                                }
                                if name == "vtag" {
                                    ValueTag(row, l)
                                } else {
                                    CompTag(row, l)
                                }
                            }
                            _ => unreachable!("listed above"),
                        }
                    }
                };
                e(c.expect(">"))?;
                construct
            }
        };
        if !c.at_end() {
            return Err(format!("trailing text in label `{label}`"));
        }
        Ok(Some(construct))
    }

    /// The extension whose menu row introduces this construct.
    pub fn extension(&self) -> Option<Extension> {
        use Construct::*;
        match self {
            Val(_) => None,
            Let(..) => Some(Extension::Sequential),
            Lam(..) | App(..) => Some(Extension::Functions),
            ValueRecord(_) | CompRecord(_) | RecordMatch(..) => Some(Extension::Records),
            ValueTag(..) | CompTag(..) | VariantMatch(..) => Some(Extension::Variants),
            Lit(_) | Unroll | Roll | Fold(_) => Some(Extension::Naturals),
            For(..) => Some(Extension::While),
            LetRec(..) | Call(..) => Some(Extension::Recursion),
        }
    }

    /// Name of the typing rule this construct instantiates.
    pub fn rule(&self) -> &'static str {
        use Construct::*;
        match self {
            Val(_) => "value",
            Let(..) => "sequencing",
            Lam(..) => "abstraction",
            App(..) => "application",
            ValueRecord(_) => "value record",
            CompRecord(_) => "record constructor",
            RecordMatch(..) => "record pattern match",
            ValueTag(..) => "value variant constructor",
            CompTag(..) => "variant constructor",
            VariantMatch(..) => "variant pattern match",
            Lit(_) => "number literal",
            Unroll => "unroll",
            Roll => "roll",
            Fold(_) => "bounded iteration",
            For(..) => "unbounded iteration",
            LetRec(..) => "recursion",
            Call(..) => "fused application",
        }
    }

    /// Every type mentioned by the label.
    fn types(&self) -> Vec<TypeExpr> {
        use Construct::*;
        match self {
            Val(t) | Fold(t) => vec![t.clone()],
            Let(ts, r) | LetRec(ts, r) => ts.iter().cloned().chain([r.clone()]).collect(),
            Lam(a, r) | App(a, r) => vec![TypeExpr::fun(a.clone(), r.clone())],
            ValueRecord(row) | CompRecord(row) => vec![TypeExpr::Record(row.clone())],
            RecordMatch(row, r) => vec![TypeExpr::Record(row.clone()), r.clone()],
            ValueTag(row, _) | CompTag(row, _) => vec![TypeExpr::Variant(row.clone())],
            VariantMatch(row, r) => vec![TypeExpr::Variant(row.clone()), r.clone()],
            Lit(_) | Unroll | Roll => vec![TypeExpr::Nat, TypeExpr::maybe(TypeExpr::Nat)],
            For(s, r) => vec![TypeExpr::loop_step(s.clone(), r.clone())],
            Call(row, r) => vec![TypeExpr::fun(TypeExpr::Record(row.clone()), r.clone())],
        }
    }

    /// The extension that must be enabled, or `None` when the construct is
    /// available in the configuration.
    pub fn missing_extension(&self, config: &FragmentConfig) -> Option<Extension> {
        use Construct::*;
        let need = |e: Extension| (!config.has(e)).then_some(e);
        match self {
            Val(_) => None,
            // Record and variant forms follow their types, which already
            // encode the fused shapes of the other fragments.
            ValueRecord(_) | CompRecord(_) | RecordMatch(..) => {
                need(Extension::Records).filter(|_| !self.types().iter().all(|t| config.admits(t)))
            }
            ValueTag(..) | CompTag(..) | VariantMatch(..) => {
                need(Extension::Variants).filter(|_| !self.types().iter().all(|t| config.admits(t)))
            }
            Let(ts, _) if ts.is_empty() => Some(Extension::Sequential),
            LetRec(fs, _) if fs.iter().any(|f| f.rec_parts().is_none()) => Some(Extension::Recursion),
            Call(..) if !config.fused_call() => Some(Extension::Recursion),
            other => other.extension().and_then(need),
        }
    }

    pub fn operator(&self) -> Operator<TypeExpr> {
        use Construct::*;
        let fst = Sort::First;
        let snd = Sort::Second;
        let plain = Argument::plain;
        let bound = |ctx: Vec<TypeExpr>, s: Sort<TypeExpr>| Argument::new(Context::new(ctx), s);
        let label = self.to_string();
        let (result, args) = match self {
            Val(t) => (snd(t.clone()), vec![plain(fst(t.clone()))]),
            Let(ts, r) => {
                let mut args: Vec<_> = (0..ts.len()).map(|i| bound(ts[..i].to_vec(), snd(ts[i].clone()))).collect();
                args.push(bound(ts.clone(), snd(r.clone())));
                (snd(r.clone()), args)
            }
            Lam(a, r) => (fst(TypeExpr::fun(a.clone(), r.clone())), vec![bound(vec![a.clone()], snd(r.clone()))]),
            App(a, r) => (
                snd(r.clone()),
                vec![plain(snd(TypeExpr::fun(a.clone(), r.clone()))), plain(snd(a.clone()))],
            ),
            ValueRecord(row) => (fst(TypeExpr::Record(row.clone())), row.types().map(|t| plain(fst(t.clone()))).collect()),
            CompRecord(row) => (snd(TypeExpr::Record(row.clone())), row.types().map(|t| plain(snd(t.clone()))).collect()),
            RecordMatch(row, r) => (
                snd(r.clone()),
                vec![plain(snd(TypeExpr::Record(row.clone()))), bound(row.types().cloned().collect(), snd(r.clone()))],
            ),
            ValueTag(row, l) => (
                fst(TypeExpr::Variant(row.clone())),
                vec![plain(fst(row.get(l).expect("label checked").clone()))],
            ),
            CompTag(row, l) => (
                snd(TypeExpr::Variant(row.clone())),
                vec![plain(snd(row.get(l).expect("label checked").clone()))],
            ),
            VariantMatch(row, r) => {
                let mut args = vec![plain(snd(TypeExpr::Variant(row.clone())))];
                args.extend(row.types().map(|t| bound(vec![t.clone()], snd(r.clone()))));
                (snd(r.clone()), args)
            }
            Lit(_) => (fst(TypeExpr::Nat), vec![]),
            Unroll => (snd(TypeExpr::maybe(TypeExpr::Nat)), vec![plain(snd(TypeExpr::Nat))]),
            Roll => (snd(TypeExpr::Nat), vec![plain(snd(TypeExpr::maybe(TypeExpr::Nat)))]),
            Fold(t) => (
                snd(t.clone()),
                vec![plain(snd(TypeExpr::Nat)), bound(vec![TypeExpr::maybe(t.clone())], snd(t.clone()))],
            ),
            For(s, r) => (
                snd(r.clone()),
                vec![plain(snd(s.clone())), bound(vec![s.clone()], snd(TypeExpr::loop_step(s.clone(), r.clone())))],
            ),
            LetRec(fs, r) => {
                let mut args: Vec<_> = fs
                    .iter()
                    .map(|f| {
                        let (params, result) = f.rec_parts().expect("checked recursive shape");
                        bound(fs.iter().cloned().chain(params).collect(), snd(result.clone()))
                    })
                    .collect();
                args.push(bound(fs.clone(), snd(r.clone())));
                (snd(r.clone()), args)
            }
            Call(row, r) => {
                let mut args = vec![plain(snd(TypeExpr::fun(TypeExpr::Record(row.clone()), r.clone())))];
                args.extend(row.types().map(|t| plain(snd(t.clone()))));
                (snd(r.clone()), args)
            }
        };
        Operator::new(label, result, args)
    }

    /// Build the operator after checking it belongs to the fragment.
    pub fn instantiate(&self, config: &FragmentConfig) -> Result<Operator<TypeExpr>, SignatureError> {
        let label = self.to_string();
        if let Some(e) = self.missing_extension(config) {
            return Err(SignatureError::UnknownSort { label, sort: format!("construct of the {e} fragment") });
        }
        for t in self.types() {
            if t.depth() > config.type_depth {
                return Err(SignatureError::DepthExceeded { label, depth: t.depth(), limit: config.type_depth });
            }
            if !config.admits(&t) {
                return Err(SignatureError::UnknownSort { label, sort: t.to_string() });
            }
        }
        Ok(self.operator())
    }
}

/// All operators of a fragment, instantiated from their labels.
#[derive(Debug, Clone)]
pub struct CbvFamily {
    pub config: FragmentConfig,
}

impl OperatorFamily<TypeExpr> for CbvFamily {
    fn name(&self) -> &str {
        "cbv"
    }

    fn instantiate(&self, label: &str) -> Result<Option<Operator<TypeExpr>>, SignatureError> {
        match Construct::parse_label(label) {
            Ok(Some(c)) => c.instantiate(&self.config).map(Some),
            Ok(None) => Ok(None),
            Err(_) => Err(SignatureError::UnknownOperator(label.to_string())),
        }
    }
}

/// The signature of a fragment: a lazily instantiated family over the
/// fragment's type universe.
pub fn build_operator_table(config: &FragmentConfig) -> OperatorTable<TypeExpr> {
    let mut table = OperatorTable::new(Arc::new(FragmentUniverse(config.clone())));
    table.add_family(Arc::new(CbvFamily { config: config.clone() }));
    table
}

/// One row of the customisation menu.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MenuRow {
    pub name: &'static str,
    pub constructs: &'static str,
    pub needs: &'static [Need],
    pub model: &'static str,
}

pub const BASE_ROW: MenuRow = MenuRow {
    name: "base",
    constructs: "val V",
    needs: &[],
    model: "strong monad over a Cartesian category",
};

pub fn menu_row(e: Extension) -> MenuRow {
    match e {
        Extension::Sequential => MenuRow { name: "sequential", constructs: "let x1 = M1; …; xn = Mn in N", needs: &[], model: "" },
        Extension::Functions => MenuRow {
            name: "functions",
            constructs: "\\x : τ. M, M N",
            needs: &[],
            model: "Kleisli exponentials",
        },
        Extension::Records => MenuRow {
            name: "records",
            constructs: "{C1 = -, …}, case M of {C1 x1, …} -> N",
            needs: &[],
            model: "",
        },
        Extension::Variants => MenuRow {
            name: "variants",
            constructs: "tag C - as τ, case M of <C x -> M | …>",
            needs: &[],
            model: "distributive category",
        },
        Extension::Naturals => MenuRow {
            name: "naturals",
            constructs: "0, 1+, n, {}, unroll, roll, fold M with x : τ -> N, case on <0|1+>",
            needs: &[Need::Nat, Need::Unit, Need::Maybe],
            model: "binary coproducts distributed over by the products, and a natural numbers object",
        },
        Extension::While => MenuRow {
            name: "while",
            constructs: "Done, Cont, for i = M in N",
            needs: &[Need::LoopStep],
            model: "binary coproducts, distributive products, and the monad has a complete Elgot structure",
        },
        Extension::Recursion => MenuRow {
            name: "recursion",
            constructs: "{-}, M N, letrec",
            needs: &[Need::RecFunction],
            model: "uniform parameterised monadic fixed-points, Kleisli exponentials",
        },
    }
}

/// The menu listing for a configuration: base row first, then one row per
/// enabled extension.
pub fn menu_for(config: &FragmentConfig) -> Vec<MenuRow> {
    std::iter::once(BASE_ROW).chain(config.extensions.iter().map(|&e| menu_row(e))).collect()
}
