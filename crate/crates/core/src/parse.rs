//! Infix expression grammar for functions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 't' | 'pi' | call | '(' expr ')'
//! call    := ('sin' | 'cos' | 'exp' | 'log' | 'abs') '(' expr ')'
//!          | 'ind' '(' name ')'
//!          | 'piecewise' '(' (name ':' expr ',')* 'else' ':' expr ')'
//! ```

use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::set::TsSet;

/// Parses `src`, looking up set names through `sets`.
pub fn parse_function(src: &str, sets: &dyn Fn(&str) -> Result<TsSet>) -> Result<MeasurableFn> {
    let mut p = Parser { src, pos: 0, sets };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    sets: &'a dyn Fn(&str) -> Result<TsSet>,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|(i, c)| !(c.is_ascii_alphanumeric() || *c == '_' || (*i > 0 && *c == '.')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn expr(&mut self) -> Result<MeasurableFn> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MeasurableFn> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.unary()?;
                acc = acc.div(&rhs).map_err(|e| Error::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MeasurableFn> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(base.powf(&exp));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<MeasurableFn> {
        let rest = &self.src[self.pos..];
        let mut len = 0;
        let bytes = rest.as_bytes();
        while len < bytes.len() && (bytes[len].is_ascii_digit() || bytes[len] == b'.') {
            len += 1;
        }
        if len < bytes.len() && (bytes[len] == b'e' || bytes[len] == b'E') {
            let mut k = len + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                len = k;
            }
        }
        let v: f64 = rest[..len].parse().map_err(|_| self.error(format!("bad number `{}`", &rest[..len])))?;
        self.pos += len;
        Ok(MeasurableFn::constant(v))
    }

    fn atom(&mut self) -> Result<MeasurableFn> {
        match self.peek() {
            None => return Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                return Ok(e);
            }
            Some(c) if c.is_ascii_digit() || c == '.' => return self.number(),
            _ => {}
        }
        let start = self.pos;
        let Some(name) = self.ident().map(str::to_owned) else {
            return Err(self.error("expected a number, `t`, a function call or `(`"));
        };
        match name.as_str() {
            "t" => Ok(MeasurableFn::identity()),
            "pi" => Ok(MeasurableFn::constant(std::f64::consts::PI)),
            "sin" | "cos" | "exp" | "log" | "abs" => {
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                match name.as_str() {
                    "sin" => Ok(arg.sin()),
                    "cos" => Ok(arg.cos()),
                    "exp" => Ok(arg.exp()),
                    "abs" => Ok(arg.abs()),
                    _ => arg.ln().map_err(|e| Error::Parse {
                        pos: start,
                        msg: e.to_string(),
                    }),
                }
            }
            "ind" => {
                self.expect('(')?;
                let set = self.set_name()?;
                self.expect(')')?;
                Ok(MeasurableFn::indicator(set))
            }
            "piecewise" => {
                self.expect('(')?;
                let mut branches = Vec::new();
                loop {
                    let at = self.pos;
                    if self.ident() == Some("else") {
                        self.expect(':')?;
                        let otherwise = self.expr()?;
                        self.expect(')')?;
                        return Ok(MeasurableFn::piecewise(branches, otherwise));
                    }
                    self.pos = at;
                    let set = self.set_name()?;
                    self.expect(':')?;
                    let value = self.expr()?;
                    self.expect(',')?;
                    branches.push((set, value));
                }
            }
            other => {
                self.pos = start;
                Err(self.error(format!("unknown name `{other}`")))
            }
        }
    }

    fn set_name(&mut self) -> Result<TsSet> {
        let at = self.pos;
        let Some(name) = self.ident().map(str::to_owned) else {
            return Err(self.error("expected a set name"));
        };
        (self.sets)(&name).map_err(|e| Error::Parse {
            pos: at,
            msg: e.to_string(),
        })
    }
}
