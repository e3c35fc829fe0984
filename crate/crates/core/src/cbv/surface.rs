//! Concrete syntax.
//!
//! ```text
//! V ::= x | n | \x : T. M | {l = V, …} | tag C V as T
//! M ::= val V | let x = M; … in M | M M | {l = M, …} | tag C M as T
//!     | case M of {l x, …} -> M | case M of <C x -> M | …>
//!     | roll M | unroll M | fold M with x : T. M | for i = M in M
//!     | letrec f (x : T, …) : T = M; … in M
//! ```
//!
//! Application is juxtaposition and associates to the left. `--` starts a
//! line comment.

use std::collections::HashSet;

use crate::terms::Term;

use super::cursor::{is_ident_start, Cursor};
use super::ops::Construct;
use super::types::TypeExpr;
use super::CbvError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    /// Byte offset of the first token.
    pub at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecDef {
    pub name: String,
    pub params: Vec<(String, TypeExpr)>,
    pub result: TypeExpr,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Lit(u32),
    Val(Box<Expr>),
    Let(Vec<(String, Expr)>, Box<Expr>),
    Lam(String, TypeExpr, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Record(Vec<(String, Expr)>),
    Tag { label: String, payload: Box<Expr>, ty: TypeExpr },
    RecordCase { scrutinee: Box<Expr>, binders: Vec<(String, String)>, body: Box<Expr> },
    VariantCase { scrutinee: Box<Expr>, clauses: Vec<(String, String, Expr)> },
    Roll(Box<Expr>),
    Unroll(Box<Expr>),
    Fold { scrutinee: Box<Expr>, var: String, ty: TypeExpr, body: Box<Expr> },
    For { var: String, init: Box<Expr>, body: Box<Expr> },
    LetRec(Vec<RecDef>, Box<Expr>),
}

impl Expr {
    fn new(kind: ExprKind, at: usize) -> Self {
        Expr { kind, at }
    }

    /// Forms that can only be values, and records or tags built from them.
    pub fn is_value_form(&self) -> bool {
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Lit(_) | ExprKind::Lam(..) => true,
            ExprKind::Record(fields) => fields.iter().all(|(_, e)| e.is_value_form()),
            ExprKind::Tag { payload, .. } => payload.is_value_form(),
            _ => false,
        }
    }
}

const KEYWORDS: &[&str] =
    &["val", "let", "in", "case", "of", "roll", "unroll", "fold", "with", "for", "letrec", "tag", "as"];

struct Parser<'a> {
    c: Cursor<'a>,
}

impl Parser<'_> {
    fn at_keyword(&mut self) -> Option<&'static str> {
        KEYWORDS.iter().copied().find(|k| self.c.looking_at(k))
    }

    fn name(&mut self) -> Result<String, CbvError> {
        let start = self.c.pos;
        let name = self.c.ident()?;
        if KEYWORDS.contains(&name.as_str()) || name == "Nat" {
            self.c.pos = start;
            return self.c.error(format!("`{name}` is reserved"));
        }
        Ok(name)
    }

    fn starts_atom(&mut self) -> bool {
        match self.c.peek() {
            Some(b'(' | b'{') => true,
            Some(c) if c.is_ascii_digit() => true,
            Some(c) if is_ident_start(c) => self.at_keyword().is_none(),
            _ => false,
        }
    }

    fn expr(&mut self) -> Result<Expr, CbvError> {
        self.c.skip_ws();
        let at = self.c.pos;
        if self.c.eat("\\") {
            return self.lambda(at);
        }
        if self.c.eat("letrec") {
            return self.letrec(at);
        }
        if self.c.eat("let") {
            let mut binds = Vec::new();
            loop {
                let x = self.name()?;
                self.c.expect("=")?;
                binds.push((x, self.expr()?));
                if self.c.eat("in") {
                    break;
                }
                self.c.expect(";")?;
            }
            let body = self.expr()?;
            return Ok(Expr::new(ExprKind::Let(binds, Box::new(body)), at));
        }
        if self.c.eat("case") {
            return self.case(at);
        }
        if self.c.eat("fold") {
            let scrutinee = Box::new(self.expr()?);
            self.c.expect("with")?;
            let var = self.name()?;
            self.c.expect(":")?;
            let ty = self.c.type_expr()?;
            self.c.expect(".")?;
            let body = Box::new(self.expr()?);
            return Ok(Expr::new(ExprKind::Fold { scrutinee, var, ty, body }, at));
        }
        if self.c.eat("for") {
            let var = self.name()?;
            self.c.expect("=")?;
            let init = Box::new(self.expr()?);
            self.c.expect("in")?;
            let body = Box::new(self.expr()?);
            return Ok(Expr::new(ExprKind::For { var, init, body }, at));
        }
        if self.c.eat("tag") {
            return self.tag(at);
        }
        self.application()
    }

    fn lambda(&mut self, at: usize) -> Result<Expr, CbvError> {
        let x = self.name()?;
        self.c.expect(":")?;
        let ty = self.c.type_expr()?;
        self.c.expect(".")?;
        let body = self.expr()?;
        Ok(Expr::new(ExprKind::Lam(x, ty, Box::new(body)), at))
    }

    fn tag(&mut self, at: usize) -> Result<Expr, CbvError> {
        let label = self.c.label()?;
        let payload = Box::new(self.expr()?);
        self.c.expect("as")?;
        let ty = self.c.type_expr()?;
        Ok(Expr::new(ExprKind::Tag { label, payload, ty }, at))
    }

    fn case(&mut self, at: usize) -> Result<Expr, CbvError> {
        let scrutinee = Box::new(self.expr()?);
        self.c.expect("of")?;
        if self.c.eat("{") {
            let mut binders = Vec::new();
            if !self.c.eat("}") {
                loop {
                    let l = self.c.label()?;
                    binders.push((l, self.name()?));
                    if self.c.eat("}") {
                        break;
                    }
                    self.c.expect(",")?;
                }
            }
            self.c.expect("->")?;
            let body = Box::new(self.expr()?);
            return Ok(Expr::new(ExprKind::RecordCase { scrutinee, binders, body }, at));
        }
        self.c.expect("<")?;
        let mut clauses = Vec::new();
        if !self.c.eat(">") {
            loop {
                let l = self.c.label()?;
                let x = self.name()?;
                self.c.expect("->")?;
                clauses.push((l, x, self.expr()?));
                if self.c.eat(">") {
                    break;
                }
                self.c.expect("|")?;
            }
        }
        Ok(Expr::new(ExprKind::VariantCase { scrutinee, clauses }, at))
    }

    fn letrec(&mut self, at: usize) -> Result<Expr, CbvError> {
        let mut defs = Vec::new();
        loop {
            let name = self.name()?;
            self.c.expect("(")?;
            let mut params = Vec::new();
            if !self.c.eat(")") {
                loop {
                    let x = self.name()?;
                    self.c.expect(":")?;
                    params.push((x, self.c.type_expr()?));
                    if self.c.eat(")") {
                        break;
                    }
                    self.c.expect(",")?;
                }
            }
            self.c.expect(":")?;
            let result = self.c.type_expr()?;
            self.c.expect("=")?;
            let body = self.expr()?;
            defs.push(RecDef { name, params, result, body });
            if self.c.eat("in") {
                break;
            }
            self.c.expect(";")?;
        }
        let body = self.expr()?;
        Ok(Expr::new(ExprKind::LetRec(defs, Box::new(body)), at))
    }

    fn application(&mut self) -> Result<Expr, CbvError> {
        let mut head = self.unary()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            let at = head.at;
            head = Expr::new(ExprKind::App(Box::new(head), Box::new(arg)), at);
        }
        Ok(head)
    }

    fn unary(&mut self) -> Result<Expr, CbvError> {
        self.c.skip_ws();
        let at = self.c.pos;
        if self.c.eat("val") {
            return Ok(Expr::new(ExprKind::Val(Box::new(self.operand()?)), at));
        }
        if self.c.eat("roll") {
            return Ok(Expr::new(ExprKind::Roll(Box::new(self.operand()?)), at));
        }
        if self.c.eat("unroll") {
            return Ok(Expr::new(ExprKind::Unroll(Box::new(self.operand()?)), at));
        }
        self.atom()
    }

    fn operand(&mut self) -> Result<Expr, CbvError> {
        self.c.skip_ws();
        let at = self.c.pos;
        if self.c.eat("\\") {
            return self.lambda(at);
        }
        if self.c.eat("tag") {
            return self.tag(at);
        }
        self.unary()
    }

    fn atom(&mut self) -> Result<Expr, CbvError> {
        self.c.skip_ws();
        let at = self.c.pos;
        match self.c.peek() {
            Some(b'(') => {
                self.c.pos += 1;
                let e = self.expr()?;
                self.c.expect(")")?;
                Ok(e)
            }
            Some(b'{') => {
                self.c.pos += 1;
                let mut fields = Vec::new();
                if !self.c.eat("}") {
                    loop {
                        let l = self.c.label()?;
                        self.c.expect("=")?;
                        fields.push((l, self.expr()?));
                        if self.c.eat("}") {
                            break;
                        }
                        self.c.expect(",")?;
                    }
                }
                Ok(Expr::new(ExprKind::Record(fields), at))
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::new(ExprKind::Lit(self.c.number()?), at)),
            Some(c) if is_ident_start(c) => Ok(Expr::new(ExprKind::Var(self.name()?), at)),
            Some(_) => self.c.error("expected an expression"),
            None => self.c.error("unexpected end of input"),
        }
    }
}

/// Parse a whole program.
pub fn parse_program(text: &str) -> Result<Expr, CbvError> {
    let mut p = Parser { c: Cursor::new(text) };
    let e = p.expr()?;
    if !p.c.at_end() {
        return p.c.error("unexpected trailing input");
    }
    Ok(e)
}

/// How a printed fragment may be embedded in a larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    /// Variables, literals, records, parenthesized forms.
    Atom,
    /// `val`, `roll`, `unroll` applied to an operand.
    Prefix,
    Application,
    /// Forms that extend as far right as possible.
    Open,
}

struct Printer<'a> {
    free: &'a [String],
    taken: HashSet<&'a str>,
}

fn paren(text: String) -> String {
    format!("({text})")
}

impl Printer<'_> {
    fn binder(&self, position: usize) -> String {
        let mut name = format!("x{position}");
        while self.taken.contains(name.as_str()) {
            name.push('\'');
        }
        name
    }

    fn name(&self, position: usize) -> String {
        self.free.get(position).cloned().unwrap_or_else(|| self.binder(position))
    }

    /// Text that may appear where only `max` or tighter forms are allowed.
    fn at(&self, t: &Term<TypeExpr>, depth: usize, max: Level) -> Result<String, CbvError> {
        let (text, level) = self.print(t, depth)?;
        Ok(if level <= max { text } else { paren(text) })
    }

    fn delimited(&self, t: &Term<TypeExpr>, depth: usize) -> Result<String, CbvError> {
        self.at(t, depth, Level::Open)
    }

    fn guarded(&self, t: &Term<TypeExpr>, depth: usize) -> Result<String, CbvError> {
        self.at(t, depth, Level::Application)
    }

    /// Operand of a prefix form, with the level of the whole prefix form.
    fn operand(&self, keyword: &str, t: &Term<TypeExpr>, depth: usize) -> Result<(String, Level), CbvError> {
        let (text, level) = self.print(t, depth)?;
        let open_value = matches!(t, Term::Op(op, _) if ["lam<", "vtag<", "ctag<"].iter().any(|p| op.label.starts_with(p)));
        Ok(if level <= Level::Prefix {
            (format!("{keyword} {text}"), Level::Prefix)
        } else if open_value {
            (format!("{keyword} {text}"), Level::Open)
        } else {
            (format!("{keyword} {}", paren(text)), Level::Prefix)
        })
    }

    fn fields(&self, row: &super::types::Row, args: &[Term<TypeExpr>], depth: usize) -> Result<String, CbvError> {
        let parts = row
            .labels()
            .zip(args)
            .map(|(l, a)| Ok(format!("{l} = {}", self.delimited(a, depth)?)))
            .collect::<Result<Vec<_>, CbvError>>()?;
        Ok(format!("{{{}}}", parts.join(", ")))
    }

    fn print(&self, t: &Term<TypeExpr>, depth: usize) -> Result<(String, Level), CbvError> {
        use Construct::*;
        let (op, args) = match t {
            Term::Var(p) => return Ok((self.name(*p), Level::Atom)),
            Term::Meta(id, _) => return Err(CbvError::Malformed(format!("hole ?{id} has no concrete syntax"))),
            Term::Op(op, args) => (op, args),
        };
        let construct = Construct::parse_label(&op.label)
            .map_err(CbvError::Malformed)?
            .ok_or_else(|| CbvError::Malformed(format!("unknown operator {}", op.label)))?;
        if args.len() != op.args.len() {
            return Err(CbvError::Malformed(format!("{} applied to {} arguments", op.label, args.len())));
        }
        let out = match construct {
            Val(_) => self.operand("val", &args[0], depth)?,
            Roll => self.operand("roll", &args[0], depth)?,
            Unroll => self.operand("unroll", &args[0], depth)?,
            Lit(n) => (n.to_string(), Level::Atom),
            Let(ts, _) => {
                let binds = (0..ts.len())
                    .map(|i| Ok(format!("{} = {}", self.binder(depth + i), self.delimited(&args[i], depth + i)?)))
                    .collect::<Result<Vec<_>, CbvError>>()?;
                let body = self.delimited(&args[ts.len()], depth + ts.len())?;
                (format!("let {} in {body}", binds.join("; ")), Level::Open)
            }
            Lam(a, _) => {
                (format!("\\{} : {a}. {}", self.binder(depth), self.delimited(&args[0], depth + 1)?), Level::Open)
            }
            App(..) => {
                let head = self.at(&args[0], depth, Level::Application)?;
                (format!("{head} {}", self.at(&args[1], depth, Level::Atom)?), Level::Application)
            }
            Call(row, _) => {
                let head = self.at(&args[0], depth, Level::Application)?;
                (format!("{head} {}", self.fields(&row, &args[1..], depth)?), Level::Application)
            }
            ValueRecord(row) | CompRecord(row) => (self.fields(&row, args, depth)?, Level::Atom),
            ValueTag(row, l) | CompTag(row, l) => {
                let payload = self.guarded(&args[0], depth)?;
                (format!("tag {l} {payload} as {}", TypeExpr::Variant(row)), Level::Open)
            }
            RecordMatch(row, _) => {
                let binders: Vec<String> =
                    row.labels().enumerate().map(|(i, l)| format!("{l} {}", self.binder(depth + i))).collect();
                let body = self.delimited(&args[1], depth + row.len())?;
                let scrutinee = self.guarded(&args[0], depth)?;
                (format!("case {scrutinee} of {{{}}} -> {body}", binders.join(", ")), Level::Open)
            }
            VariantMatch(row, _) => {
                let arms = row
                    .labels()
                    .enumerate()
                    .map(|(i, l)| Ok(format!("{l} {} -> {}", self.binder(depth), self.delimited(&args[i + 1], depth + 1)?)))
                    .collect::<Result<Vec<_>, CbvError>>()?;
                let scrutinee = self.guarded(&args[0], depth)?;
                (format!("case {scrutinee} of <{}>", arms.join(" | ")), Level::Open)
            }
            Fold(ty) => {
                let scrutinee = self.guarded(&args[0], depth)?;
                let body = self.delimited(&args[1], depth + 1)?;
                (format!("fold {scrutinee} with {} : {}. {body}", self.binder(depth), TypeExpr::maybe(ty)), Level::Open)
            }
            For(..) => {
                let init = self.guarded(&args[0], depth)?;
                let body = self.delimited(&args[1], depth + 1)?;
                (format!("for {} = {init} in {body}", self.binder(depth)), Level::Open)
            }
            LetRec(fs, _) => {
                let n = fs.len();
                let defs = fs
                    .iter()
                    .enumerate()
                    .map(|(j, f)| {
                        let (params, result) = f.rec_parts().ok_or_else(|| CbvError::Malformed(f.to_string()))?;
                        let ps: Vec<String> = params
                            .iter()
                            .enumerate()
                            .map(|(i, p)| format!("{} : {p}", self.binder(depth + n + i)))
                            .collect();
                        let body = self.delimited(&args[j], depth + n + params.len())?;
                        Ok(format!("{} ({}) : {result} = {body}", self.binder(depth + j), ps.join(", ")))
                    })
                    .collect::<Result<Vec<_>, CbvError>>()?;
                let body = self.delimited(&args[n], depth + n)?;
                (format!("letrec {} in {body}", defs.join("; ")), Level::Open)
            }
        };
        Ok(out)
    }
}

/// Concrete syntax for a term over a context of `ctx_len` variables, all
/// named by position as `x0`, `x1`, ….
pub fn pretty(term: &Term<TypeExpr>, ctx_len: usize) -> Result<String, CbvError> {
    let names: Vec<String> = (0..ctx_len).map(|p| format!("x{p}")).collect();
    pretty_named(term, &names)
}

/// Concrete syntax for a term whose free variables carry the given names.
/// Bound variables are named by position, primed when a free name clashes.
pub fn pretty_named(term: &Term<TypeExpr>, names: &[String]) -> Result<String, CbvError> {
    let printer = Printer { free: names, taken: names.iter().map(String::as_str).collect() };
    Ok(printer.print(term, names.len())?.0)
}
