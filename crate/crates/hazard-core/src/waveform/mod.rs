//! Binary waveforms as sums of unit steps with symbolic edge times.
//!
//! A waveform is a right-continuous function of time with values in `{0, 1}`
//! and finitely many transitions. We store it as an initial value plus the
//! ordered list of instants where it toggles, which is exactly the data of
//! the closed form
//!
//! ```text
//! w(t) = w(-inf) +- h(t - t1) -+ h(t - t2) ...
//! ```
//!
//! where `h` is the unit step (`h(t) = 1` for `t >= 0`, `0` for `t < 0`) and
//! the signs alternate. The first sign is `+` when the waveform starts at 0
//! and `-` when it starts at 1. [`Waveform`]'s `Display` prints that form.
//!
//! Edge times are [`SymbolicTime`] values, so a waveform can describe the
//! response of a circuit for *all* positive values of its delay symbols at
//! once. Combining two waveforms only requires ordering the edges that
//! actually interleave; when two edge times are incomparable the operation
//! reports [`WaveformError::AmbiguousOrdering`] rather than guessing.
//!
//! All operations keep the representation canonical: edge times are strictly
//! increasing and every listed edge really toggles the value. In particular
//! two coincident opposite edges cancel, so zero-width pulses cannot be
//! represented, matching the algebra where `h(t - a) - h(t - a) = 0`.

mod time;

use std::fmt;

pub use time::{
    compare_times, format_rational, parse_rational, rational_to_f64, DelayMap, Rational,
    SymbolicTime, TimeOrder,
};

use crate::expr::Bit;

/// Errors from waveform construction, combination, and evaluation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WaveformError {
    /// Two edge times had to be ordered but the order depends on the delay
    /// values. Assigning concrete delays resolves the ambiguity.
    #[error("cannot order instants `{0}` and `{1}` without concrete delay values")]
    AmbiguousOrdering(SymbolicTime, SymbolicTime),
    /// A delay with a negative constant part was applied to a waveform.
    #[error("delay `{0}` has a negative constant part")]
    NegativeDelay(SymbolicTime),
    /// Evaluation needed a value for a symbol that was not assigned.
    #[error("no value assigned to delay symbol `{0}`")]
    MissingDelayAssignment(String),
    /// Evaluation was given a zero or negative value for a delay symbol;
    /// edge order is only meaningful for positive symbol values.
    #[error("delay symbol `{symbol}` must be positive, got {value}")]
    NonPositiveDelay { symbol: String, value: String },
}

/// A two-valued waveform: an initial value and the instants where it toggles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waveform {
    initial: Bit,
    steps: Vec<SymbolicTime>,
}

impl Waveform {
    /// A waveform that holds `value` for all time.
    pub fn constant(value: Bit) -> Self {
        Waveform {
            initial: value,
            steps: Vec::new(),
        }
    }

    /// The unit step `h(t - at)`: 0 before `at`, 1 from `at` on.
    pub fn step_at(at: SymbolicTime) -> Self {
        Waveform {
            initial: Bit::ZERO,
            steps: vec![at],
        }
    }

    /// Builds a waveform from an initial value and an unordered list of
    /// toggle instants. The instants are sorted and coincident pairs cancel;
    /// if two of them cannot be ordered the construction fails.
    pub fn new(initial: Bit, toggles: Vec<SymbolicTime>) -> Result<Self, WaveformError> {
        let mut sorted: Vec<SymbolicTime> = Vec::with_capacity(toggles.len());
        for t in toggles {
            let mut at = sorted.len();
            while at > 0 {
                match t.compare(&sorted[at - 1]) {
                    TimeOrder::Less => at -= 1,
                    TimeOrder::Equal | TimeOrder::Greater => break,
                    TimeOrder::Incomparable => {
                        return Err(WaveformError::AmbiguousOrdering(
                            sorted[at - 1].clone(),
                            t,
                        ))
                    }
                }
            }
            sorted.insert(at, t);
        }
        let mut steps: Vec<SymbolicTime> = Vec::with_capacity(sorted.len());
        for t in sorted {
            if steps.last() == Some(&t) {
                steps.pop();
            } else {
                steps.push(t);
            }
        }
        Ok(Waveform { initial, steps })
    }

    /// The value before the first toggle.
    pub fn initial_value(&self) -> Bit {
        self.initial
    }

    /// The value after the last toggle.
    pub fn final_value(&self) -> Bit {
        if self.steps.len() % 2 == 0 {
            self.initial
        } else {
            !self.initial
        }
    }

    /// The toggle instants in strictly increasing order.
    pub fn steps(&self) -> &[SymbolicTime] {
        &self.steps
    }

    /// Number of transitions the waveform makes.
    pub fn transition_count(&self) -> usize {
        self.steps.len()
    }

    pub fn is_constant(&self) -> bool {
        self.steps.is_empty()
    }

    /// Pointwise complement. Toggle instants are unchanged.
    pub fn complement(&self) -> Self {
        Waveform {
            initial: !self.initial,
            steps: self.steps.clone(),
        }
    }

    /// Pointwise AND of two waveforms.
    pub fn and(&self, other: &Self) -> Result<Self, WaveformError> {
        self.combine(other, |a, b| a & b)
    }

    /// Pointwise OR of two waveforms.
    pub fn or(&self, other: &Self) -> Result<Self, WaveformError> {
        self.combine(other, |a, b| a | b)
    }

    /// Pointwise XOR of two waveforms.
    pub fn xor(&self, other: &Self) -> Result<Self, WaveformError> {
        self.combine(other, |a, b| a ^ b)
    }

    /// Shifts the waveform later by `d`, i.e. `w(t - d)`. The delay must not
    /// have a negative constant part.
    pub fn delay(&self, d: &SymbolicTime) -> Result<Self, WaveformError> {
        if !d.is_nonnegative() {
            return Err(WaveformError::NegativeDelay(d.clone()));
        }
        Ok(Waveform {
            initial: self.initial,
            steps: self.steps.iter().map(|t| t + d).collect(),
        })
    }

    /// Combines two waveforms with a pointwise boolean function by merging
    /// their toggle lists. Every pair of edges that interleaves must be
    /// comparable; otherwise the merge stops with `AmbiguousOrdering`.
    fn combine(
        &self,
        other: &Self,
        f: impl Fn(Bit, Bit) -> Bit,
    ) -> Result<Self, WaveformError> {
        let mut va = self.initial;
        let mut vb = other.initial;
        let initial = f(va, vb);
        let mut current = initial;
        let mut steps = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            enum Take {
                A,
                B,
                Both,
            }
            let take = match (self.steps.get(i), other.steps.get(j)) {
                (None, None) => break,
                (Some(_), None) => Take::A,
                (None, Some(_)) => Take::B,
                (Some(ta), Some(tb)) => match ta.compare(tb) {
                    TimeOrder::Less => Take::A,
                    TimeOrder::Greater => Take::B,
                    TimeOrder::Equal => Take::Both,
                    TimeOrder::Incomparable => {
                        return Err(WaveformError::AmbiguousOrdering(
                            ta.clone(),
                            tb.clone(),
                        ))
                    }
                },
            };
            let at = match take {
                Take::A | Take::Both => {
                    va = !va;
                    i += 1;
                    let at = self.steps[i - 1].clone();
                    if matches!(take, Take::Both) {
                        vb = !vb;
                        j += 1;
                    }
                    at
                }
                Take::B => {
                    vb = !vb;
                    j += 1;
                    other.steps[j - 1].clone()
                }
            };
            let next = f(va, vb);
            if next != current {
                steps.push(at);
                current = next;
            }
        }
        Ok(Waveform { initial, steps })
    }

    /// Evaluates the waveform at concrete time `t` under a complete, strictly
    /// positive assignment of its delay symbols. The result is
    /// right-continuous: at a toggle instant the new value already holds.
    pub fn eval(&self, delays: &DelayMap, t: &Rational) -> Result<Bit, WaveformError> {
        for step in &self.steps {
            for symbol in step.symbols() {
                let value = delays
                    .get(symbol)
                    .ok_or_else(|| WaveformError::MissingDelayAssignment(symbol.to_string()))?;
                if *value <= Rational::from_integer(0.into()) {
                    return Err(WaveformError::NonPositiveDelay {
                        symbol: symbol.to_string(),
                        value: format_rational(value),
                    });
                }
            }
        }
        let mut value = self.initial;
        for step in &self.steps {
            if step.eval(delays)? <= *t {
                value = !value;
            }
        }
        Ok(value)
    }
}

impl fmt::Display for Waveform {
    /// Prints the step-sum form, e.g. `1 - h(t-(5+2*tau)) + h(t-(5+3*tau))`.
    /// A constant waveform prints as `0` or `1`; a waveform that starts at 0
    /// omits the leading zero term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "{}", self.initial);
        }
        let mut positive = self.initial == Bit::ZERO;
        let mut lead = if self.initial == Bit::ONE {
            f.write_str("1")?;
            false
        } else {
            true
        };
        for step in &self.steps {
            if lead {
                lead = false;
            } else {
                f.write_str(if positive { " + " } else { " - " })?;
            }
            f.write_str(&format_step(step))?;
            positive = !positive;
        }
        Ok(())
    }
}

/// Formats a single unit step `h(t - at)`, parenthesizing multi-term instants
/// and folding signs: `h(t)`, `h(t-5)`, `h(t-2*tau)`, `h(t-(5+2*tau))`.
fn format_step(at: &SymbolicTime) -> String {
    if at.is_zero() {
        return "h(t)".to_string();
    }
    if at.term_count() == 1 {
        if at.is_constant() && !at.is_nonnegative() {
            let negated = SymbolicTime::from_constant(-at.constant().clone());
            return format!("h(t+{negated})");
        }
        return format!("h(t-{at})");
    }
    format!("h(t-({at}))")
}
