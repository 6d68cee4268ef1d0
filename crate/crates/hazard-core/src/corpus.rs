//! Random circuits, stimuli, and expressions for tests and benchmarks.
//!
//! Everything here is driven by a caller-supplied [`Rng`], so a seeded
//! generator reproduces the same corpus on every run. Generated netlists
//! are valid by construction: gates only read primary inputs or earlier
//! gates, so they are already in topological order and acyclic.

use num_bigint::BigInt;
use rand::Rng;

use crate::circuit::{Gate, GateKind, Netlist, Stimulus};
use crate::expr::{Bit, BoolExpr};
use crate::waveform::{DelayMap, Rational, SymbolicTime};

/// Shape parameters for [`random_netlist`].
#[derive(Clone, Debug)]
pub struct CircuitGenConfig {
    /// Number of primary inputs, named `X1..`.
    pub inputs: usize,
    /// Number of gates, named `G1..`, each reading earlier signals only.
    pub gates: usize,
    /// Largest fan-in for the n-ary kinds (`AND`, `OR`, `NAND`, `NOR`).
    pub max_fan_in: usize,
    /// Gate kinds are drawn uniformly from this pool. Restricting it to
    /// `AND`/`OR` yields monotone circuits.
    pub kinds: Vec<GateKind>,
    /// Element delays are drawn uniformly from this pool.
    pub delay_pool: Vec<SymbolicTime>,
}

impl Default for CircuitGenConfig {
    /// Four inputs, eight gates, fan-in up to three, every gate kind, and
    /// delays that are small multiples of one symbol so every pair of edge
    /// times stays comparable.
    fn default() -> Self {
        CircuitGenConfig {
            inputs: 4,
            gates: 8,
            max_fan_in: 3,
            kinds: vec![
                GateKind::Not,
                GateKind::And,
                GateKind::Or,
                GateKind::Nand,
                GateKind::Nor,
                GateKind::Xor,
            ],
            delay_pool: (1..=3).map(|k| SymbolicTime::scaled_symbol(k, "tau")).collect(),
        }
    }
}

/// Builds a random acyclic netlist with a single output `Y` driven by the
/// last gate.
pub fn random_netlist<R: Rng + ?Sized>(rng: &mut R, config: &CircuitGenConfig) -> Netlist {
    assert!(config.inputs >= 1, "need at least one input");
    assert!(config.gates >= 1, "need at least one gate");
    assert!(config.max_fan_in >= 2, "n-ary gates need fan-in of two");
    assert!(!config.kinds.is_empty(), "need at least one gate kind");
    assert!(!config.delay_pool.is_empty(), "need at least one delay");

    let inputs: Vec<String> = (1..=config.inputs).map(|i| format!("X{i}")).collect();
    let mut pool = inputs.clone();
    let mut gates = Vec::with_capacity(config.gates);
    for index in 1..=config.gates {
        let kind = config.kinds[rng.random_range(0..config.kinds.len())];
        let fan_in = match kind {
            GateKind::Not => 1,
            GateKind::Xor => 2,
            _ => rng.random_range(2..=config.max_fan_in),
        };
        let name = format!("G{index}");
        let gate_inputs: Vec<String> = (0..fan_in)
            .map(|_| pool[rng.random_range(0..pool.len())].clone())
            .collect();
        let delays: Vec<SymbolicTime> = (0..fan_in)
            .map(|_| config.delay_pool[rng.random_range(0..config.delay_pool.len())].clone())
            .collect();
        gates.push(Gate {
            name: name.clone(),
            kind,
            inputs: gate_inputs,
            input_delays: delays,
        });
        pool.push(name);
    }
    let driver = gates.last().expect("at least one gate").name.clone();
    Netlist::new(inputs, gates, vec![("Y".to_string(), driver)])
        .expect("generated netlist is valid by construction")
}

/// Draws independent before and after vectors; they may coincide.
pub fn random_stimulus<R: Rng + ?Sized>(
    rng: &mut R,
    netlist: &Netlist,
    switch_time: Rational,
) -> Stimulus {
    let from = netlist
        .primary_inputs()
        .iter()
        .map(|name| (name.clone(), Bit::from(rng.random_bool(0.5))))
        .collect();
    let to = netlist
        .primary_inputs()
        .iter()
        .map(|name| (name.clone(), Bit::from(rng.random_bool(0.5))))
        .collect();
    Stimulus::new(netlist, from, to, switch_time).expect("vectors cover exactly the inputs")
}

/// Assigns every delay symbol of the netlist a positive rational value with
/// numerator up to 8 and denominator up to 4.
pub fn random_delay_assignment<R: Rng + ?Sized>(rng: &mut R, netlist: &Netlist) -> DelayMap {
    netlist
        .delay_symbols()
        .into_iter()
        .map(|symbol| {
            let numer = rng.random_range(1..=8i64);
            let denom = rng.random_range(1..=4i64);
            (
                symbol,
                Rational::new(BigInt::from(numer), BigInt::from(denom)),
            )
        })
        .collect()
}

/// Builds a random expression over the given variables, at most `depth`
/// operators deep. Leaves are mostly variables with an occasional constant.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, vars: &[String], depth: usize) -> BoolExpr {
    assert!(!vars.is_empty(), "need at least one variable");
    if depth == 0 || rng.random_bool(0.15) {
        return if rng.random_bool(0.1) {
            BoolExpr::Const(Bit::from(rng.random_bool(0.5)))
        } else {
            BoolExpr::Var(vars[rng.random_range(0..vars.len())].clone())
        };
    }
    match rng.random_range(0..6) {
        0 => BoolExpr::not(random_expr(rng, vars, depth - 1)),
        1 => BoolExpr::And(children(rng, vars, depth - 1)),
        2 => BoolExpr::Or(children(rng, vars, depth - 1)),
        3 => BoolExpr::Nand(children(rng, vars, depth - 1)),
        4 => BoolExpr::Nor(children(rng, vars, depth - 1)),
        _ => {
            let left = random_expr(rng, vars, depth - 1);
            let right = random_expr(rng, vars, depth - 1);
            BoolExpr::xor(left, right)
        }
    }
}

fn children<R: Rng + ?Sized>(rng: &mut R, vars: &[String], depth: usize) -> Vec<BoolExpr> {
    let count = rng.random_range(2..=3);
    (0..count).map(|_| random_expr(rng, vars, depth)).collect()
}
