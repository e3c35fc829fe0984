use super::types::{Row, TypeExpr};
use super::CbvError;

/// A byte cursor shared by the type, label and program parsers.
pub(crate) struct Cursor<'a> {
    pub(crate) src: &'a str,
    pub(crate) pos: usize,
}

pub(crate) fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

pub(crate) fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

fn is_label_char(c: u8) -> bool {
    is_ident_char(c) || c == b'+'
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T, CbvError> {
        Err(CbvError::Syntax { position: self.pos, message: message.into() })
    }

    pub(crate) fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with("--") && !self.src[self.pos..].starts_with("-->") {
                while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Consume `token` if it comes next. Word tokens must not run on into
    /// an identifier.
    pub(crate) fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if !self.src[self.pos..].starts_with(token) {
            return false;
        }
        let end = self.pos + token.len();
        let wordy = token.as_bytes().last().is_some_and(|&c| is_ident_char(c));
        if wordy && self.src.as_bytes().get(end).is_some_and(|&c| is_ident_char(c)) {
            return false;
        }
        self.pos = end;
        true
    }

    pub(crate) fn expect(&mut self, token: &str) -> Result<(), CbvError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected `{token}`"))
        }
    }

    pub(crate) fn looking_at(&mut self, token: &str) -> bool {
        let save = self.pos;
        let found = self.eat(token);
        self.pos = save;
        found
    }

    pub(crate) fn ident(&mut self) -> Result<String, CbvError> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        if !bytes.get(start).is_some_and(|&c| is_ident_start(c)) {
            return self.error("expected an identifier");
        }
        let mut end = start;
        while end < bytes.len() && is_ident_char(bytes[end]) {
            end += 1;
        }
        self.pos = end;
        Ok(self.src[start..end].to_string())
    }

    pub(crate) fn number(&mut self) -> Result<u32, CbvError> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == start {
            return self.error("expected a number");
        }
        let n = self.src[start..end].parse().or_else(|_| self.error("number out of range"))?;
        self.pos = end;
        Ok(n)
    }

    /// A field or constructor label: letters, digits, `_`, `'` and `+`.
    pub(crate) fn label(&mut self) -> Result<String, CbvError> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut end = start;
        while end < bytes.len() && is_label_char(bytes[end]) {
            end += 1;
        }
        if end == start {
            return self.error("expected a label");
        }
        self.pos = end;
        Ok(self.src[start..end].to_string())
    }

    pub(crate) fn type_expr(&mut self) -> Result<TypeExpr, CbvError> {
        let arg = self.type_atom()?;
        if self.eat("->") {
            let result = self.type_expr()?;
            return Ok(TypeExpr::fun(arg, result));
        }
        Ok(arg)
    }

    fn type_atom(&mut self) -> Result<TypeExpr, CbvError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.type_expr()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(b'{') => {
                self.pos += 1;
                let fields = self.row_fields(",", "}")?;
                Ok(TypeExpr::Record(self.row(fields)?))
            }
            Some(b'<') => {
                self.pos += 1;
                let fields = self.row_fields("|", ">")?;
                Ok(TypeExpr::Variant(self.row(fields)?))
            }
            Some(c) if is_ident_start(c) => {
                let name = self.ident()?;
                Ok(if name == "Nat" { TypeExpr::Nat } else { TypeExpr::Base(name) })
            }
            _ => self.error("expected a type"),
        }
    }

    fn row(&self, fields: Vec<(String, TypeExpr)>) -> Result<Row, CbvError> {
        Row::new(fields).map_err(|label| CbvError::Syntax { position: self.pos, message: format!("duplicate label `{label}`") })
    }

    fn row_fields(&mut self, sep: &str, close: &str) -> Result<Vec<(String, TypeExpr)>, CbvError> {
        let mut fields = Vec::new();
        if self.eat(close) {
            return Ok(fields);
        }
        loop {
            let label = self.label()?;
            self.expect(":")?;
            fields.push((label, self.type_expr()?));
            if self.eat(close) {
                return Ok(fields);
            }
            self.expect(sep)?;
        }
    }
}
