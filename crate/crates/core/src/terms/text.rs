use thiserror::Error;

use crate::signature::OperatorTable;
use crate::sorts::SortName;

use super::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {position}: {message}")]
pub struct TextError {
    pub position: usize,
    pub message: String,
}

struct Reader<'a, S> {
    src: &'a [u8],
    pos: usize,
    table: &'a OperatorTable<S>,
}

impl<S: SortName> Reader<'_, S> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, TextError> {
        Err(TextError { position: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TextError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{}`", c as char))
        }
    }

    fn list(&mut self, close: u8) -> Result<Vec<Term<S>>, TextError> {
        let mut items = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.term()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => return self.fail(format!("expected `,` or `{}`", close as char)),
            }
        }
    }

    fn term(&mut self) -> Result<Term<S>, TextError> {
        match self.peek() {
            Some(b'#') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match digits.parse::<usize>() {
                    Ok(n) if !digits.is_empty() && (digits == "0" || !digits.starts_with('0')) => Ok(Term::Var(n)),
                    _ => self.fail("malformed variable index"),
                }
            }
            Some(b'?') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'') {
                    self.pos += 1;
                }
                if start == self.pos {
                    return self.fail("empty hole identifier");
                }
                let id = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.expect(b'{')?;
                let env = self.list(b'}')?;
                Ok(Term::Meta(id, env))
            }
            Some(_) => {
                let start = self.pos;
                let mut depth = 0usize;
                while let Some(c) = self.peek() {
                    match c {
                        b'<' => depth += 1,
                        b'>' if self.pos > start && self.src[self.pos - 1] != b'-' => depth = depth.saturating_sub(1),
                        b'[' | b']' | b'}' if depth == 0 => break,
                        _ => {}
                    }
                    self.pos += 1;
                }
                let label = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                if label.is_empty() {
                    return self.fail("expected a term");
                }
                let op = match self.table.lookup(&label) {
                    Ok(op) => op,
                    Err(e) => {
                        self.pos = start;
                        return self.fail(e.to_string());
                    }
                };
                self.expect(b'[')?;
                let args = self.list(b']')?;
                Ok(Term::Op(op, args))
            }
            None => self.fail("unexpected end of input"),
        }
    }
}

/// Read the canonical text form produced by `Display` on [`Term`].
pub fn parse_term<S: SortName>(text: &str, table: &OperatorTable<S>) -> Result<Term<S>, TextError> {
    let mut r = Reader { src: text.as_bytes(), pos: 0, table };
    let t = r.term()?;
    if r.pos != r.src.len() {
        return r.fail("trailing input");
    }
    Ok(t)
}
