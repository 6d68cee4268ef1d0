//! Text form of boolean expressions.
//!
//! ```text
//! or    := xor ('|' xor)*
//! xor   := and ('^' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | atom
//! atom  := identifier | '0' | '1' | '(' or ')'
//! ```
//!
//! Identifiers match `[A-Za-z_][A-Za-z0-9_]*` and whitespace is free between
//! tokens. Chains of `|` and `&` build one n-ary node; `^` is binary and
//! associates to the left.

use super::{Bit, BoolExpr, ExprError};

/// Parses an expression in the grammar above.
pub fn parse_expr(text: &str) -> Result<BoolExpr, ExprError> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        at: 0,
    };
    let expr = parser.or()?;
    parser.skip_space();
    if parser.at < parser.bytes.len() {
        return Err(parser.error("expected end of expression"));
    }
    Ok(expr)
}

/// True for names usable as signals and variables.
pub(crate) fn is_identifier(text: &str) -> bool {
    let mut bytes = text.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

struct Parser<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.at,
            message: message.to_string(),
        }
    }

    fn skip_space(&mut self) {
        while self.bytes.get(self.at).is_some_and(u8::is_ascii_whitespace) {
            self.at += 1;
        }
    }

    fn eat(&mut self, token: u8) -> bool {
        self.skip_space();
        if self.bytes.get(self.at) == Some(&token) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<BoolExpr, ExprError> {
        let mut parts = vec![self.xor()?];
        while self.eat(b'|') {
            parts.push(self.xor()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("nonempty")
        } else {
            BoolExpr::Or(parts)
        })
    }

    fn xor(&mut self) -> Result<BoolExpr, ExprError> {
        let mut acc = self.and()?;
        while self.eat(b'^') {
            acc = acc.xor(self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<BoolExpr, ExprError> {
        let mut parts = vec![self.unary()?];
        while self.eat(b'&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("nonempty")
        } else {
            BoolExpr::And(parts)
        })
    }

    fn unary(&mut self) -> Result<BoolExpr, ExprError> {
        if self.eat(b'!') {
            return Ok(self.unary()?.not());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BoolExpr, ExprError> {
        if self.eat(b'(') {
            let inner = self.or()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(inner);
        }
        self.skip_space();
        match self.bytes.get(self.at) {
            Some(b'0') if !self.identifier_continues(self.at + 1) => {
                self.at += 1;
                Ok(BoolExpr::Const(Bit::ZERO))
            }
            Some(b'1') if !self.identifier_continues(self.at + 1) => {
                self.at += 1;
                Ok(BoolExpr::Const(Bit::ONE))
            }
            Some(&b) if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.at;
                while self.identifier_continues(self.at) {
                    self.at += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.at])
                    .expect("identifier bytes are ascii");
                Ok(BoolExpr::var(name))
            }
            Some(_) => Err(self.error("expected a variable, constant, `!`, or `(`")),
            None => Err(self.error("expected an operand")),
        }
    }

    fn identifier_continues(&self, at: usize) -> bool {
        self.bytes
            .get(at)
            .is_some_and(|&b| b.is_ascii_alphanumeric() || b == b'_')
    }
}
