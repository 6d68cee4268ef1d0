//! Multilinear integer polynomials over boolean variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{check_arity, Bit, BoolExpr, ExprError};

/// A polynomial with integer coefficients in which every variable appears to
/// at most the first power.
///
/// Monomials are stored as sorted, duplicate-free variable lists mapped to
/// nonzero coefficients; the empty list is the constant term. Multiplication
/// merges variable lists as *sets*, which silently applies the reduction
/// `x^m = x` that is valid on 0/1 inputs, so products of arbitrary boolean
/// translations stay multilinear by construction.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultilinearPoly {
    terms: BTreeMap<Vec<String>, BigInt>,
}

impl MultilinearPoly {
    pub fn zero() -> Self {
        MultilinearPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(value: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Vec::new(), value);
        }
        MultilinearPoly { terms }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![name.into()], BigInt::one());
        MultilinearPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The monomials as `(variables, coefficient)` pairs in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (&[String], &BigInt)> {
        self.terms.iter().map(|(vars, c)| (vars.as_slice(), c))
    }

    /// All variables with a nonzero occurrence.
    pub fn support(&self) -> BTreeSet<&str> {
        self.terms
            .keys()
            .flat_map(|vars| vars.iter().map(String::as_str))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (vars, c) in &other.terms {
            add_term(&mut terms, vars.clone(), c.clone());
        }
        MultilinearPoly { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (vars, c) in &other.terms {
            add_term(&mut terms, vars.clone(), -c.clone());
        }
        MultilinearPoly { terms }
    }

    pub fn neg(&self) -> Self {
        MultilinearPoly {
            terms: self
                .terms
                .iter()
                .map(|(vars, c)| (vars.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (va, ca) in &self.terms {
            for (vb, cb) in &other.terms {
                add_term(&mut terms, union_sorted(va, vb), ca * cb);
            }
        }
        MultilinearPoly { terms }
    }

    /// Evaluates the polynomial at a 0/1 point. Every variable in the
    /// support must be assigned. The result is an integer, not a bit: only
    /// polynomials that came from boolean expressions are guaranteed to land
    /// in `{0, 1}`.
    pub fn eval(&self, env: &BTreeMap<String, Bit>) -> Result<BigInt, ExprError> {
        let mut total = BigInt::zero();
        'term: for (vars, c) in &self.terms {
            for var in vars {
                let bit = env
                    .get(var)
                    .copied()
                    .ok_or_else(|| ExprError::UnknownVariable(var.clone()))?;
                if bit == Bit::ZERO {
                    continue 'term;
                }
            }
            total += c;
        }
        Ok(total)
    }

    /// Fixes one variable to a constant, returning the restricted polynomial.
    fn restrict(&self, var: &str, value: Bit) -> Self {
        let mut terms = BTreeMap::new();
        for (vars, c) in &self.terms {
            match vars.iter().position(|v| v == var) {
                None => add_term(&mut terms, vars.clone(), c.clone()),
                Some(at) => {
                    if value == Bit::ONE {
                        let mut rest = vars.clone();
                        rest.remove(at);
                        add_term(&mut terms, rest, c.clone());
                    }
                }
            }
        }
        MultilinearPoly { terms }
    }

    /// Converts a 0/1-valued polynomial back into a boolean expression.
    ///
    /// The polynomial is split recursively on each support variable; every
    /// branch whose restriction is the constant 1 contributes one AND-cube
    /// of decided literals, and the cubes are joined by OR. A branch that
    /// ends in a constant other than 0 or 1 proves the polynomial is not
    /// boolean-valued and fails the conversion.
    ///
    /// The cubes of distinct branches disagree in at least one literal, so
    /// arithmetizing the result reproduces `self` exactly.
    pub fn to_bool_expr(&self) -> Result<BoolExpr, ExprError> {
        let vars: Vec<&str> = self.support().into_iter().collect();
        let mut cubes = Vec::new();
        self.collect_cubes(&vars, &mut Vec::new(), &mut cubes)?;
        Ok(match cubes.len() {
            0 => BoolExpr::Const(Bit::ZERO),
            1 => cubes.pop().expect("len checked"),
            _ => BoolExpr::Or(cubes),
        })
    }

    fn collect_cubes(
        &self,
        vars: &[&str],
        literals: &mut Vec<BoolExpr>,
        cubes: &mut Vec<BoolExpr>,
    ) -> Result<(), ExprError> {
        if self.terms.keys().all(|m| m.is_empty()) {
            let value = self.terms.get(&Vec::new()).cloned().unwrap_or_default();
            if value.is_zero() {
                return Ok(());
            }
            if value.is_one() {
                cubes.push(match literals.len() {
                    0 => BoolExpr::Const(Bit::ONE),
                    1 => literals[0].clone(),
                    _ => BoolExpr::And(literals.clone()),
                });
                return Ok(());
            }
            return Err(ExprError::NotBooleanValued {
                value: value.to_string(),
            });
        }
        let var = vars
            .iter()
            .find(|v| self.support().contains(**v))
            .expect("nonconstant polynomial has support");
        for value in [Bit::ZERO, Bit::ONE] {
            let literal = if value == Bit::ONE {
                BoolExpr::var(*var)
            } else {
                BoolExpr::var(*var).not()
            };
            literals.push(literal);
            self.restrict(var, value)
                .collect_cubes(vars, literals, cubes)?;
            literals.pop();
        }
        Ok(())
    }
}

fn add_term(terms: &mut BTreeMap<Vec<String>, BigInt>, vars: Vec<String>, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match terms.entry(vars) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            slot.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// Set union of two sorted variable lists; shared variables collapse, which
/// is where `x * x = x` happens.
fn union_sorted(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().cloned());
    out
}

impl fmt::Display for MultilinearPoly {
    /// Prints terms in degree order, then lexicographic: `1 - x + x*y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<(&Vec<String>, &BigInt)> = self.terms.iter().collect();
        ordered.sort_by_key(|(vars, _)| (vars.len(), (*vars).clone()));
        for (i, (vars, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let magnitude = c.magnitude();
            if vars.is_empty() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                f.write_str(&vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Translates a boolean expression into its multilinear polynomial.
///
/// The translation is exact on 0/1 inputs: `!x -> 1 - x`, `x & y -> x*y`,
/// `x | y -> x + y - x*y`, `x ^ y -> x + y - 2*x*y`, with NAND and NOR as
/// the complements of AND and OR. N-ary operators fold pairwise from the
/// left. Constants map to 0 and 1.
pub fn arithmetize(expr: &BoolExpr) -> Result<MultilinearPoly, ExprError> {
    Ok(match expr {
        BoolExpr::Const(Bit::ZERO) => MultilinearPoly::zero(),
        BoolExpr::Const(_) => MultilinearPoly::one(),
        BoolExpr::Var(name) => MultilinearPoly::var(name.clone()),
        BoolExpr::Not(inner) => MultilinearPoly::one().sub(&arithmetize(inner)?),
        BoolExpr::Xor(a, b) => {
            let a = arithmetize(a)?;
            let b = arithmetize(b)?;
            let twice = MultilinearPoly::constant(BigInt::from(2)).mul(&a.mul(&b));
            a.add(&b).sub(&twice)
        }
        BoolExpr::And(xs) => {
            check_arity("AND", xs)?;
            fold_and(xs)?
        }
        BoolExpr::Or(xs) => {
            check_arity("OR", xs)?;
            fold_or(xs)?
        }
        BoolExpr::Nand(xs) => {
            check_arity("NAND", xs)?;
            MultilinearPoly::one().sub(&fold_and(xs)?)
        }
        BoolExpr::Nor(xs) => {
            check_arity("NOR", xs)?;
            MultilinearPoly::one().sub(&fold_or(xs)?)
        }
    })
}

fn fold_and(xs: &[BoolExpr]) -> Result<MultilinearPoly, ExprError> {
    let mut acc = arithmetize(&xs[0])?;
    for x in &xs[1..] {
        acc = acc.mul(&arithmetize(x)?);
    }
    Ok(acc)
}

fn fold_or(xs: &[BoolExpr]) -> Result<MultilinearPoly, ExprError> {
    let mut acc = arithmetize(&xs[0])?;
    for x in &xs[1..] {
        let next = arithmetize(x)?;
        acc = acc.add(&next).sub(&acc.mul(&next));
    }
    Ok(acc)
}
