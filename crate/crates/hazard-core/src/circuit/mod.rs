//! Gate-level netlists with per-input delay elements.
//!
//! The delay model places an independent delay element on every gate input,
//! followed by an ideal (instantaneous) gate. A physical gate with one delay
//! on its output is the special case where all input delays of the fanout
//! gates are equal. Delays are [`SymbolicTime`] values, so a netlist can mix
//! concrete delays with named symbols like `tau`.
//!
//! A netlist is purely combinational: gates form a directed acyclic graph
//! from the primary inputs to the outputs. Construction validates names,
//! arities, and acyclicity, and fixes the topological evaluation order once.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

pub use parse::parse_netlist;

use crate::expr::{is_identifier, Bit};
use crate::waveform::{Rational, SymbolicTime, Waveform};

/// Errors from netlist parsing, construction, and stimulus handling.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undefined signal `{0}`")]
    UndefinedSignal(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("gate `{0}` is part of a combinational cycle")]
    CycleDetected(String),
    #[error("gate `{gate}`: {message}")]
    Arity { gate: String, message: String },
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),
}

/// The supported gate functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Not,
    And,
    Or,
    Nand,
    Nor,
    Xor,
}

impl GateKind {
    /// The netlist keyword for this kind.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
        }
    }

    /// Parses a kind keyword, ignoring case.
    pub fn from_keyword(word: &str) -> Option<Self> {
        match word.to_ascii_uppercase().as_str() {
            "NOT" => Some(GateKind::Not),
            "AND" => Some(GateKind::And),
            "OR" => Some(GateKind::Or),
            "NAND" => Some(GateKind::Nand),
            "NOR" => Some(GateKind::Nor),
            "XOR" => Some(GateKind::Xor),
            _ => None,
        }
    }

    /// Checks the number of inputs: NOT takes exactly 1, XOR exactly 2, and
    /// the other kinds at least 2.
    pub fn arity_ok(self, inputs: usize) -> bool {
        match self {
            GateKind::Not => inputs == 1,
            GateKind::Xor => inputs == 2,
            _ => inputs >= 2,
        }
    }

    fn arity_requirement(self) -> &'static str {
        match self {
            GateKind::Not => "exactly 1 input",
            GateKind::Xor => "exactly 2 inputs",
            _ => "at least 2 inputs",
        }
    }

    /// The ideal gate function. The input count must satisfy [`arity_ok`].
    ///
    /// [`arity_ok`]: GateKind::arity_ok
    pub fn eval(self, inputs: &[Bit]) -> Bit {
        debug_assert!(self.arity_ok(inputs.len()));
        match self {
            GateKind::Not => !inputs[0],
            GateKind::And => Bit::from(inputs.iter().all(|&b| b == Bit::ONE)),
            GateKind::Or => Bit::from(inputs.iter().any(|&b| b == Bit::ONE)),
            GateKind::Nand => Bit::from(!inputs.iter().all(|&b| b == Bit::ONE)),
            GateKind::Nor => Bit::from(!inputs.iter().any(|&b| b == Bit::ONE)),
            GateKind::Xor => inputs[0] ^ inputs[1],
        }
    }
}

/// One gate: a named output signal computed from delayed input signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub kind: GateKind,
    pub inputs: Vec<String>,
    /// One delay element per entry of `inputs`, in the same order.
    pub input_delays: Vec<SymbolicTime>,
}

impl Gate {
    /// A gate whose input delays are all the same expression.
    pub fn uniform(
        name: impl Into<String>,
        kind: GateKind,
        inputs: Vec<String>,
        delay: SymbolicTime,
    ) -> Self {
        let input_delays = vec![delay; inputs.len()];
        Gate {
            name: name.into(),
            kind,
            inputs,
            input_delays,
        }
    }
}

/// Where a signal name comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalSource {
    /// Index into the primary input list.
    Input(usize),
    /// Index into the gate list.
    Gate(usize),
}

/// A validated combinational netlist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    primary_inputs: Vec<String>,
    gates: Vec<Gate>,
    /// `(output name, driving signal)` in declaration order.
    outputs: Vec<(String, String)>,
    sources: BTreeMap<String, SignalSource>,
    topo: Vec<usize>,
}

impl Netlist {
    /// Validates and indexes a netlist: names must be well formed and
    /// unique, gate inputs and output drivers must refer to defined signals,
    /// arities must match the gate kinds, and the gate graph must be
    /// acyclic. The topological order is fixed here, breaking ties by
    /// declaration order.
    pub fn new(
        primary_inputs: Vec<String>,
        gates: Vec<Gate>,
        outputs: Vec<(String, String)>,
    ) -> Result<Self, NetlistError> {
        let mut sources = BTreeMap::new();
        for (i, name) in primary_inputs.iter().enumerate() {
            if !is_identifier(name) {
                return Err(NetlistError::UndefinedSignal(name.clone()));
            }
            if sources.insert(name.clone(), SignalSource::Input(i)).is_some() {
                return Err(NetlistError::DuplicateName(name.clone()));
            }
        }
        for (i, gate) in gates.iter().enumerate() {
            if !is_identifier(&gate.name) {
                return Err(NetlistError::UndefinedSignal(gate.name.clone()));
            }
            if sources
                .insert(gate.name.clone(), SignalSource::Gate(i))
                .is_some()
            {
                return Err(NetlistError::DuplicateName(gate.name.clone()));
            }
        }
        for gate in &gates {
            if !gate.kind.arity_ok(gate.inputs.len()) {
                return Err(NetlistError::Arity {
                    gate: gate.name.clone(),
                    message: format!(
                        "{} takes {}, got {}",
                        gate.kind.keyword(),
                        gate.kind.arity_requirement(),
                        gate.inputs.len()
                    ),
                });
            }
            if gate.input_delays.len() != gate.inputs.len() {
                return Err(NetlistError::Arity {
                    gate: gate.name.clone(),
                    message: format!(
                        "{} inputs but {} delay elements",
                        gate.inputs.len(),
                        gate.input_delays.len()
                    ),
                });
            }
            for input in &gate.inputs {
                if !sources.contains_key(input) {
                    return Err(NetlistError::UndefinedSignal(input.clone()));
                }
            }
        }
        let mut output_names = BTreeSet::new();
        for (name, driver) in &outputs {
            if !is_identifier(name) {
                return Err(NetlistError::UndefinedSignal(name.clone()));
            }
            if !output_names.insert(name.clone()) {
                return Err(NetlistError::DuplicateName(name.clone()));
            }
            if sources.contains_key(name) && name != driver {
                return Err(NetlistError::DuplicateName(name.clone()));
            }
            if !sources.contains_key(driver) {
                return Err(NetlistError::UndefinedSignal(driver.clone()));
            }
        }
        let topo = topo_sort(&gates, &sources)?;
        Ok(Netlist {
            primary_inputs,
            gates,
            outputs,
            sources,
            topo,
        })
    }

    pub fn primary_inputs(&self) -> &[String] {
        &self.primary_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `(output name, driving signal)` pairs in declaration order.
    pub fn outputs(&self) -> &[(String, String)] {
        &self.outputs
    }

    /// The driving signal of a named output.
    pub fn output_driver(&self, output: &str) -> Option<&str> {
        self.outputs
            .iter()
            .find(|(name, _)| name == output)
            .map(|(_, driver)| driver.as_str())
    }

    pub fn source_of(&self, signal: &str) -> Option<SignalSource> {
        self.sources.get(signal).copied()
    }

    /// All signal names: primary inputs first, then gates in declaration
    /// order.
    pub fn signals(&self) -> impl Iterator<Item = &str> {
        self.primary_inputs
            .iter()
            .map(String::as_str)
            .chain(self.gates.iter().map(|g| g.name.as_str()))
    }

    /// Gates in a topological order: every gate appears after the gates it
    /// reads from. Ready gates are emitted in declaration order, so the
    /// order is deterministic.
    pub fn topo_order(&self) -> impl Iterator<Item = &Gate> {
        self.topo.iter().map(|&i| &self.gates[i])
    }

    /// Delay symbols occurring anywhere in the netlist.
    pub fn delay_symbols(&self) -> BTreeSet<String> {
        self.gates
            .iter()
            .flat_map(|g| g.input_delays.iter())
            .flat_map(|d| d.symbols().map(str::to_string))
            .collect()
    }

    /// A copy with every input delay of every gate replaced by `delay`.
    pub fn with_uniform_delay(&self, delay: SymbolicTime) -> Netlist {
        let mut copy = self.clone();
        for gate in &mut copy.gates {
            for slot in &mut gate.input_delays {
                *slot = delay.clone();
            }
        }
        copy
    }

    /// A copy with the assigned delay symbols replaced by their values.
    /// Symbols absent from the assignment stay symbolic.
    pub fn substitute_delays(&self, assignment: &crate::waveform::DelayMap) -> Netlist {
        let mut copy = self.clone();
        for gate in &mut copy.gates {
            for slot in &mut gate.input_delays {
                *slot = slot.substitute(assignment);
            }
        }
        copy
    }

    /// Evaluates every signal for one steady input vector, ignoring delays.
    /// `inputs` must assign all primary inputs.
    pub fn eval_vector(
        &self,
        inputs: &BTreeMap<String, Bit>,
    ) -> Result<BTreeMap<String, Bit>, NetlistError> {
        let mut values = BTreeMap::new();
        for name in &self.primary_inputs {
            let bit = inputs
                .get(name)
                .copied()
                .ok_or_else(|| NetlistError::UndefinedSignal(name.clone()))?;
            values.insert(name.clone(), bit);
        }
        for gate in self.topo_order() {
            let operands: Vec<Bit> = gate
                .inputs
                .iter()
                .map(|input| values[input.as_str()])
                .collect();
            values.insert(gate.name.clone(), gate.kind.eval(&operands));
        }
        Ok(values)
    }

    /// Renders the netlist in its text format. The result parses back to an
    /// equal netlist.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.primary_inputs.is_empty() {
            let _ = writeln!(out, "input {}", self.primary_inputs.join(" "));
        }
        for gate in &self.gates {
            let _ = write!(
                out,
                "gate {} {} {}",
                gate.name,
                gate.kind.keyword(),
                gate.inputs.join(" ")
            );
            let first = &gate.input_delays[0];
            if gate.input_delays.iter().all(|d| d == first) {
                let _ = writeln!(out, " delay={first}");
            } else {
                let list: Vec<String> =
                    gate.input_delays.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(out, " delays={}", list.join(","));
            }
        }
        for (name, driver) in &self.outputs {
            let _ = writeln!(out, "output {name} = {driver}");
        }
        out
    }
}

/// Kahn's algorithm over the gate graph, with a declaration-order ready
/// queue. Returns gate indices.
fn topo_sort(
    gates: &[Gate],
    sources: &BTreeMap<String, SignalSource>,
) -> Result<Vec<usize>, NetlistError> {
    let mut indegree = vec![0usize; gates.len()];
    let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, gate) in gates.iter().enumerate() {
        for input in &gate.inputs {
            if let Some(SignalSource::Gate(j)) = sources.get(input) {
                indegree[i] += 1;
                fanout[*j].push(i);
            }
        }
    }
    let mut ready: BTreeSet<usize> = indegree
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == 0)
        .map(|(i, _)| i)
        .collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &consumer in &fanout[next] {
            indegree[consumer] -= 1;
            if indegree[consumer] == 0 {
                ready.insert(consumer);
            }
        }
    }
    if order.len() < gates.len() {
        let stuck = (0..gates.len())
            .find(|i| !order.contains(i))
            .expect("some gate is unprocessed");
        return Err(NetlistError::CycleDetected(gates[stuck].name.clone()));
    }
    Ok(order)
}

/// One input transition: both rails of a pair of input vectors and the
/// instant the inputs switch from one to the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stimulus {
    from: BTreeMap<String, Bit>,
    to: BTreeMap<String, Bit>,
    switch_time: Rational,
}

impl Stimulus {
    /// Builds a stimulus, checking that both vectors assign exactly the
    /// primary inputs of `netlist`.
    pub fn new(
        netlist: &Netlist,
        from: BTreeMap<String, Bit>,
        to: BTreeMap<String, Bit>,
        switch_time: Rational,
    ) -> Result<Self, NetlistError> {
        for vector in [&from, &to] {
            for name in netlist.primary_inputs() {
                if !vector.contains_key(name) {
                    return Err(NetlistError::InvalidStimulus(format!(
                        "primary input `{name}` is not assigned"
                    )));
                }
            }
            if let Some(stranger) = vector
                .keys()
                .find(|k| !netlist.primary_inputs().contains(*k))
            {
                return Err(NetlistError::InvalidStimulus(format!(
                    "`{stranger}` is not a primary input"
                )));
            }
        }
        Ok(Stimulus {
            from,
            to,
            switch_time,
        })
    }

    /// Builds a stimulus from bit strings like `1011`, one character per
    /// primary input in declaration order.
    pub fn from_bit_strings(
        netlist: &Netlist,
        from: &str,
        to: &str,
        switch_time: Rational,
    ) -> Result<Self, NetlistError> {
        let parse = |text: &str| -> Result<BTreeMap<String, Bit>, NetlistError> {
            if text.len() != netlist.primary_inputs().len() {
                return Err(NetlistError::InvalidStimulus(format!(
                    "vector `{text}` has {} bits but the netlist has {} inputs",
                    text.len(),
                    netlist.primary_inputs().len()
                )));
            }
            text.chars()
                .zip(netlist.primary_inputs())
                .map(|(c, name)| match c {
                    '0' => Ok((name.clone(), Bit::ZERO)),
                    '1' => Ok((name.clone(), Bit::ONE)),
                    other => Err(NetlistError::InvalidStimulus(format!(
                        "vector bit `{other}` is not 0 or 1"
                    ))),
                })
                .collect()
        };
        Stimulus::new(netlist, parse(from)?, parse(to)?, switch_time)
    }

    pub fn from_vector(&self) -> &BTreeMap<String, Bit> {
        &self.from
    }

    pub fn to_vector(&self) -> &BTreeMap<String, Bit> {
        &self.to
    }

    pub fn switch_time(&self) -> &Rational {
        &self.switch_time
    }

    pub fn is_unchanged(&self) -> bool {
        self.from == self.to
    }

    /// The waveform each primary input follows: constant when both vectors
    /// agree, otherwise a single toggle at the switch time.
    pub fn input_waveforms(&self) -> BTreeMap<String, Waveform> {
        self.from
            .iter()
            .map(|(name, &before)| {
                let after = self.to[name];
                let waveform = if before == after {
                    Waveform::constant(before)
                } else {
                    Waveform::new(
                        before,
                        vec![SymbolicTime::from_constant(self.switch_time.clone())],
                    )
                    .expect("single toggle cannot be ambiguous")
                };
                (name.clone(), waveform)
            })
            .collect()
    }
}
