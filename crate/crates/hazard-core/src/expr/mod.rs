//! Boolean expressions and their exact polynomial arithmetization.
//!
//! The analysis works by translating logic into ordinary arithmetic: a
//! boolean function becomes a multilinear integer polynomial that takes the
//! same 0/1 values. The translation rules are
//!
//! ```text
//! !x      ->  1 - x
//! x & y   ->  x * y
//! x | y   ->  x + y - x*y
//! x ^ y   ->  x + y - 2*x*y
//! ```
//!
//! with powers collapsing through `x^m = x` because variables only take the
//! values 0 and 1. [`MultilinearPoly`] keeps the normal form, [`arithmetize`]
//! performs the translation, and [`MultilinearPoly::to_bool_expr`] inverts it
//! back to a sum-of-products expression.

mod parse;
mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

pub use parse::parse_expr;
pub use poly::{arithmetize, MultilinearPoly};

pub(crate) use parse::is_identifier;

/// Errors from expression handling and arithmetization.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    /// An n-ary operator was built with fewer operands than it needs.
    #[error("`{op}` needs at least {min} operands, got {got}")]
    Arity {
        op: &'static str,
        min: usize,
        got: usize,
    },
    /// Evaluation met a variable with no assigned value.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    /// A polynomial was not 0/1-valued, so it has no boolean counterpart.
    #[error("polynomial takes the value {value}, which is not 0 or 1")]
    NotBooleanValued { value: String },
    /// The expression text failed to parse.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// A single logic level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub fn as_bool(self) -> bool {
        self.0
    }

    pub fn as_u8(self) -> u8 {
        u8::from(self.0)
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl BitOr for Bit {
    type Output = Bit;
    fn bitor(self, rhs: Bit) -> Bit {
        Bit(self.0 | rhs.0)
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

/// A boolean expression tree.
///
/// `And`, `Or`, `Nand`, and `Nor` are n-ary with at least two operands;
/// `Xor` is binary. Arity is checked by the operations that consume the
/// tree, so hand-built trees fail loudly instead of silently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(Bit),
    Var(String),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
    Nand(Vec<BoolExpr>),
    Nor(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Var(name.into())
    }

    pub fn not(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn xor(self, other: Self) -> Self {
        BoolExpr::Xor(Box::new(self), Box::new(other))
    }

    /// The set of variable names occurring in the expression.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(name) => {
                out.insert(name.as_str());
            }
            BoolExpr::Not(inner) => inner.collect_variables(out),
            BoolExpr::Xor(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            BoolExpr::And(xs) | BoolExpr::Or(xs) | BoolExpr::Nand(xs) | BoolExpr::Nor(xs) => {
                for x in xs {
                    x.collect_variables(out);
                }
            }
        }
    }

    /// Evaluates the expression under a variable assignment.
    pub fn eval(&self, env: &BTreeMap<String, Bit>) -> Result<Bit, ExprError> {
        match self {
            BoolExpr::Const(b) => Ok(*b),
            BoolExpr::Var(name) => env
                .get(name)
                .copied()
                .ok_or_else(|| ExprError::UnknownVariable(name.clone())),
            BoolExpr::Not(inner) => Ok(!inner.eval(env)?),
            BoolExpr::Xor(a, b) => Ok(a.eval(env)? ^ b.eval(env)?),
            BoolExpr::And(xs) => {
                check_arity("AND", xs)?;
                let mut acc = Bit::ONE;
                for x in xs {
                    acc = acc & x.eval(env)?;
                }
                Ok(acc)
            }
            BoolExpr::Or(xs) => {
                check_arity("OR", xs)?;
                let mut acc = Bit::ZERO;
                for x in xs {
                    acc = acc | x.eval(env)?;
                }
                Ok(acc)
            }
            BoolExpr::Nand(xs) => {
                check_arity("NAND", xs)?;
                let mut acc = Bit::ONE;
                for x in xs {
                    acc = acc & x.eval(env)?;
                }
                Ok(!acc)
            }
            BoolExpr::Nor(xs) => {
                check_arity("NOR", xs)?;
                let mut acc = Bit::ZERO;
                for x in xs {
                    acc = acc | x.eval(env)?;
                }
                Ok(!acc)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(_) => 1,
            BoolExpr::Xor(_, _) => 2,
            BoolExpr::And(_) => 3,
            BoolExpr::Not(_) | BoolExpr::Nand(_) | BoolExpr::Nor(_) => 4,
            BoolExpr::Const(_) | BoolExpr::Var(_) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let own = self.precedence();
        let parens = own < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            BoolExpr::Const(b) => write!(f, "{b}")?,
            BoolExpr::Var(name) => f.write_str(name)?,
            BoolExpr::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_prec(f, 4)?;
            }
            BoolExpr::Xor(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" ^ ")?;
                b.fmt_prec(f, 3)?;
            }
            BoolExpr::And(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    x.fmt_prec(f, 4)?;
                }
            }
            BoolExpr::Or(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    x.fmt_prec(f, 2)?;
                }
            }
            BoolExpr::Nand(xs) => {
                f.write_str("!(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    x.fmt_prec(f, 4)?;
                }
                f.write_str(")")?;
            }
            BoolExpr::Nor(xs) => {
                f.write_str("!(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    x.fmt_prec(f, 2)?;
                }
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for BoolExpr {
    /// Prints in the expression grammar: `!` binds tighter than `&`, which
    /// binds tighter than `^`, which binds tighter than `|`. NAND and NOR
    /// have no operator symbol and print as `!(...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn check_arity(op: &'static str, xs: &[BoolExpr]) -> Result<(), ExprError> {
    if xs.len() < 2 {
        Err(ExprError::Arity {
            op,
            min: 2,
            got: xs.len(),
        })
    } else {
        Ok(())
    }
}
