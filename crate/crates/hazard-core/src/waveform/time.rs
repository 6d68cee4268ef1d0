//! Symbolic instants in time.
//!
//! An instant is an affine expression `c + k1*s1 + ... + kn*sn` where `c` is
//! a rational constant and each `ki` is a positive integer count of the delay
//! symbol `si`. Instants of this shape arise when signal edges propagate
//! through delay elements: every element adds either a concrete delay or one
//! of finitely many named symbolic delays, so an edge that crosses two
//! elements of delay `tau` starting at `t = 5` lands at `5 + 2*tau`.
//!
//! Because distinct symbols are unrelated, instants are only partially
//! ordered. `5 + 2*tau` precedes `5 + 3*tau` for every positive `tau`, but
//! `4 + 2*tau` and `5 + tau` swap places depending on whether `tau` is below
//! or above 1, so they compare as [`TimeOrder::Incomparable`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::WaveformError;

/// Exact rational scalar used for all concrete times and delay values.
pub type Rational = BigRational;

/// Concrete values for delay symbols, keyed by symbol name.
pub type DelayMap = BTreeMap<String, Rational>;

/// Outcome of comparing two [`SymbolicTime`] values.
///
/// The order is the product order over the constant part and every symbol
/// count: `a <= b` holds when each component of `a` is at most the matching
/// component of `b`. That is exactly the set of orderings valid for *every*
/// positive assignment of the symbols, so [`TimeOrder::Incomparable`] means
/// the answer genuinely depends on the delay values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// An instant expressed as `constant + sum(count * symbol)`.
///
/// The representation is canonical: symbols with a zero count are never
/// stored, so structural equality coincides with semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicTime {
    constant: Rational,
    coeffs: BTreeMap<String, u64>,
}

impl SymbolicTime {
    /// The instant `0`.
    pub fn zero() -> Self {
        Self::from_constant(Rational::zero())
    }

    /// A purely concrete instant.
    pub fn from_constant(constant: Rational) -> Self {
        SymbolicTime {
            constant,
            coeffs: BTreeMap::new(),
        }
    }

    /// A concrete instant given as an integer.
    pub fn from_integer(n: i64) -> Self {
        Self::from_constant(Rational::from_integer(BigInt::from(n)))
    }

    /// The instant `1 * symbol`.
    pub fn symbol(name: impl Into<String>) -> Self {
        Self::scaled_symbol(1, name)
    }

    /// The instant `count * symbol`; a zero count yields the zero instant.
    pub fn scaled_symbol(count: u64, name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        if count > 0 {
            coeffs.insert(name.into(), count);
        }
        SymbolicTime {
            constant: Rational::zero(),
            coeffs,
        }
    }

    /// Builds an instant from raw parts, dropping zero counts.
    pub fn new(constant: Rational, coeffs: BTreeMap<String, u64>) -> Self {
        let coeffs = coeffs.into_iter().filter(|&(_, k)| k > 0).collect();
        SymbolicTime { constant, coeffs }
    }

    /// The concrete part of the instant.
    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    /// Symbol counts, sorted by symbol name.
    pub fn coefficients(&self) -> impl Iterator<Item = (&str, u64)> {
        self.coeffs.iter().map(|(name, &k)| (name.as_str(), k))
    }

    /// Names of the symbols that occur with a nonzero count.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    /// True when no symbols occur, i.e. the instant is fully concrete.
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when the instant is nonnegative for every positive assignment
    /// of its symbols.
    pub fn is_nonnegative(&self) -> bool {
        !self.constant.is_negative()
    }

    /// Compares two instants under the product order. See [`TimeOrder`].
    pub fn compare(&self, other: &Self) -> TimeOrder {
        let mut less = false;
        let mut greater = false;
        match self.constant.cmp(&other.constant) {
            std::cmp::Ordering::Less => less = true,
            std::cmp::Ordering::Greater => greater = true,
            std::cmp::Ordering::Equal => {}
        }
        let names = self.coeffs.keys().chain(other.coeffs.keys());
        for name in names {
            let a = self.coeffs.get(name).copied().unwrap_or(0);
            let b = other.coeffs.get(name).copied().unwrap_or(0);
            match a.cmp(&b) {
                std::cmp::Ordering::Less => less = true,
                std::cmp::Ordering::Greater => greater = true,
                std::cmp::Ordering::Equal => {}
            }
            if less && greater {
                return TimeOrder::Incomparable;
            }
        }
        match (less, greater) {
            (false, false) => TimeOrder::Equal,
            (true, false) => TimeOrder::Less,
            (false, true) => TimeOrder::Greater,
            (true, true) => TimeOrder::Incomparable,
        }
    }

    /// Component-wise difference, or `None` when a symbol count of `other`
    /// exceeds the count in `self`. For `a <= b` under the product order,
    /// `b.checked_sub(a)` always succeeds and is the width `b - a`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut coeffs = self.coeffs.clone();
        for (name, &k) in &other.coeffs {
            let slot = coeffs.entry(name.clone()).or_insert(0);
            *slot = slot.checked_sub(k)?;
        }
        coeffs.retain(|_, &mut k| k > 0);
        Some(SymbolicTime {
            constant: &self.constant - &other.constant,
            coeffs,
        })
    }

    /// Replaces the given symbols by concrete values, folding them into the
    /// constant part. Symbols absent from `assignment` are kept.
    pub fn substitute(&self, assignment: &DelayMap) -> Self {
        let mut constant = self.constant.clone();
        let mut coeffs = BTreeMap::new();
        for (name, &k) in &self.coeffs {
            match assignment.get(name) {
                Some(value) => {
                    constant += value * Rational::from_integer(BigInt::from(k));
                }
                None => {
                    coeffs.insert(name.clone(), k);
                }
            }
        }
        SymbolicTime { constant, coeffs }
    }

    /// Evaluates the instant under a complete assignment of its symbols.
    pub fn eval(&self, delays: &DelayMap) -> Result<Rational, WaveformError> {
        let mut value = self.constant.clone();
        for (name, &k) in &self.coeffs {
            let assigned = delays
                .get(name)
                .ok_or_else(|| WaveformError::MissingDelayAssignment(name.clone()))?;
            value += assigned * Rational::from_integer(BigInt::from(k));
        }
        Ok(value)
    }

    /// Number of additive terms the display form has; used to decide whether
    /// the instant needs parentheses inside `h(t - ...)`.
    pub(crate) fn term_count(&self) -> usize {
        usize::from(!self.constant.is_zero()) + self.coeffs.len()
    }
}

impl Add for SymbolicTime {
    type Output = SymbolicTime;

    fn add(self, rhs: SymbolicTime) -> SymbolicTime {
        &self + &rhs
    }
}

impl Add<&SymbolicTime> for &SymbolicTime {
    type Output = SymbolicTime;

    fn add(self, rhs: &SymbolicTime) -> SymbolicTime {
        let mut coeffs = self.coeffs.clone();
        for (name, &k) in &rhs.coeffs {
            *coeffs.entry(name.clone()).or_insert(0) += k;
        }
        SymbolicTime {
            constant: &self.constant + &rhs.constant,
            coeffs,
        }
    }
}

impl fmt::Display for SymbolicTime {
    /// Formats as `constant + k1*s1 + ...` with the constant first and the
    /// symbols in name order, e.g. `5+2*tau` or `tau` or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        if !self.constant.is_zero() {
            f.write_str(&format_rational(&self.constant))?;
            first = false;
        }
        for (name, &k) in &self.coeffs {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            if k == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{k}*{name}")?;
            }
        }
        Ok(())
    }
}

/// Compares two instants under the product order. See [`TimeOrder`].
pub fn compare_times(a: &SymbolicTime, b: &SymbolicTime) -> TimeOrder {
    a.compare(b)
}

/// Formats a rational exactly: as a terminating decimal when the reduced
/// denominator divides a power of ten (`3/2` prints as `1.5`), otherwise as
/// `p/q` (`1/3` prints as `1/3`).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut denom = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scale = BigInt::from(10).pow(places);
    let scaled = (r.numer() * &scale / r.denom()).magnitude().to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    let digits = format!("{scaled:0>width$}", width = places as usize + 1);
    let split = digits.len() - places as usize;
    let (int_part, frac_part) = digits.split_at(split);
    let frac_part = frac_part.trim_end_matches('0');
    format!("{sign}{int_part}.{frac_part}")
}

/// Parses a rational written as an integer (`5`), a terminating decimal
/// (`1.5`), or a fraction (`7/2`), with an optional leading sign.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((numer, denom)) = text.split_once('/') {
        let numer: BigInt = numer.trim().parse().ok()?;
        let denom: BigInt = denom.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        return Some(Rational::new(numer, denom));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_part: BigInt = match int_part {
            "" | "-" | "+" => BigInt::zero(),
            _ => int_part.parse().ok()?,
        };
        let frac: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10).pow(frac_part.len() as u32);
        let magnitude = int_part.magnitude() * scale.magnitude() + frac.magnitude();
        let numer = BigInt::from_biguint(
            if negative {
                num_bigint::Sign::Minus
            } else {
                num_bigint::Sign::Plus
            },
            magnitude,
        );
        return Some(Rational::new(numer, scale));
    }
    let n: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Converts a rational to `f64`, for approximate display contexts only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
