//! Event-driven reference simulation with concrete delays.
//!
//! This simulator shares nothing with the symbolic engine beyond the netlist
//! and the ideal gate functions: it schedules concrete arrival events
//! through the per-input delay elements and replays them in time order. Its
//! traces are the ground truth the symbolic waveforms are checked against.
//!
//! Two delay models are supported. Under [`DelayModel::Pure`] every input
//! change reaches the gate after its element's delay, however short the
//! change was. Under [`DelayModel::Inertial`] a scheduled arrival is
//! cancelled when the driver moves again before it fires, so pulses strictly
//! narrower than the element delay are swallowed; a pulse exactly as wide as
//! the delay still passes, because its leading arrival fires at the instant
//! the trailing edge is scheduled.
//!
//! Simulation is deterministic: pending arrivals live in a time-ordered map,
//! all arrivals for one instant are applied together, and each gate is then
//! evaluated once in topological order, so a signal changes at most once per
//! instant and simultaneous events coalesce.

mod ascii;
mod vcd;

use std::collections::BTreeMap;

use num_traits::Zero;

pub use ascii::render_ascii;
pub use vcd::write_vcd;

use crate::circuit::{Netlist, NetlistError, Stimulus};
use crate::expr::Bit;
use crate::waveform::{format_rational, DelayMap, Rational, Waveform, WaveformError};

/// How a delay element treats changes shorter than its delay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayModel {
    /// Transport delay: everything propagates.
    Pure,
    /// Pulses strictly narrower than the element delay are swallowed.
    Inertial,
}

/// Errors from concrete-delay simulation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("no value assigned to delay symbol `{0}`")]
    MissingDelayAssignment(String),
    #[error("delay symbol `{symbol}` must be positive, got {value}")]
    NonPositiveDelay { symbol: String, value: String },
    #[error("switch time {0} is negative")]
    NegativeSwitchTime(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// One recorded value change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub time: Rational,
    pub signal: String,
    pub new_value: Bit,
}

/// The full result of one simulation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// Every change in time order; ties resolve inputs first (declaration
    /// order), then gates in topological order.
    events: Vec<Event>,
    per_signal: BTreeMap<String, Vec<(Rational, Bit)>>,
    initial: BTreeMap<String, Bit>,
    settled: BTreeMap<String, Bit>,
    settle_time: Rational,
}

impl Trace {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// The changes of one signal as `(time, new value)` pairs.
    pub fn events_for(&self, signal: &str) -> &[(Rational, Bit)] {
        self.per_signal
            .get(signal)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn transition_count(&self, signal: &str) -> usize {
        self.events_for(signal).len()
    }

    pub fn initial_values(&self) -> &BTreeMap<String, Bit> {
        &self.initial
    }

    /// Values after the last event.
    pub fn settled_values(&self) -> &BTreeMap<String, Bit> {
        &self.settled
    }

    /// The time of the last event, or the switch time if nothing moved.
    pub fn settle_time(&self) -> &Rational {
        &self.settle_time
    }

    pub fn signals(&self) -> impl Iterator<Item = &str> {
        self.initial.keys().map(String::as_str)
    }

    /// The value of a signal at time `t`, right-continuous like the
    /// symbolic waveforms: at an event instant the new value already holds.
    pub fn value_at(&self, signal: &str, t: &Rational) -> Option<Bit> {
        let initial = *self.initial.get(signal)?;
        let events = self.events_for(signal);
        let fired = events.partition_point(|(at, _)| at <= t);
        Some(if fired == 0 {
            initial
        } else {
            events[fired - 1].1
        })
    }
}

/// Simulates one stimulus with concrete delays. Every delay symbol used by
/// the netlist must be assigned a strictly positive value; the switch time
/// must not be negative.
pub fn simulate(
    netlist: &Netlist,
    stimulus: &Stimulus,
    delays: &DelayMap,
    model: DelayModel,
) -> Result<Trace, SimError> {
    for symbol in netlist.delay_symbols() {
        let value = delays
            .get(&symbol)
            .ok_or_else(|| SimError::MissingDelayAssignment(symbol.clone()))?;
        if *value <= Rational::zero() {
            return Err(SimError::NonPositiveDelay {
                symbol,
                value: format_rational(value),
            });
        }
    }
    let switch_time = stimulus.switch_time().clone();
    if switch_time < Rational::zero() {
        return Err(SimError::NegativeSwitchTime(format_rational(&switch_time)));
    }

    let initial = netlist.eval_vector(stimulus.from_vector())?;
    // One runtime slot per gate, in topological order: the values the ideal
    // gate currently sees on the far side of each input delay element.
    let topo: Vec<&crate::circuit::Gate> = netlist.topo_order().collect();
    let mut views: Vec<Vec<Bit>> = Vec::with_capacity(topo.len());
    let mut element_delays: Vec<Vec<Rational>> = Vec::with_capacity(topo.len());
    let mut consumers: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for (at, gate) in topo.iter().enumerate() {
        views.push(gate.inputs.iter().map(|input| initial[input]).collect());
        let concrete = gate
            .input_delays
            .iter()
            .map(|d| {
                d.eval(delays).map_err(|err| match err {
                    WaveformError::MissingDelayAssignment(name) => {
                        SimError::MissingDelayAssignment(name)
                    }
                    other => unreachable!("delay evaluation failed: {other}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        element_delays.push(concrete);
        for (input_index, input) in gate.inputs.iter().enumerate() {
            consumers
                .entry(input.as_str())
                .or_default()
                .push((at, input_index));
        }
    }

    let mut run = Run {
        current: initial.clone(),
        views,
        element_delays,
        consumers,
        queue: BTreeMap::new(),
        pending: BTreeMap::new(),
        next_seq: 0,
        events: Vec::new(),
        model,
    };

    let changed_inputs: Vec<&String> = netlist
        .primary_inputs()
        .iter()
        .filter(|name| stimulus.from_vector()[*name] != stimulus.to_vector()[*name])
        .collect();
    if !changed_inputs.is_empty() {
        run.queue.insert(switch_time.clone(), Vec::new());
    }

    while let Some((now, arrivals)) = run.queue.pop_first() {
        for arrival in arrivals {
            if model == DelayModel::Inertial {
                let edge = (arrival.at_gate, arrival.input);
                if run.pending.get(&edge) != Some(&arrival.seq) {
                    continue;
                }
                run.pending.remove(&edge);
            }
            run.views[arrival.at_gate][arrival.input] = arrival.value;
        }
        if now == switch_time {
            for name in &changed_inputs {
                let value = stimulus.to_vector()[*name];
                run.current.insert((*name).clone(), value);
                run.events.push(Event {
                    time: now.clone(),
                    signal: (*name).clone(),
                    new_value: value,
                });
                run.fan_out(name, value, &now);
            }
        }
        for at in 0..topo.len() {
            let gate = topo[at];
            let new_value = gate.kind.eval(&run.views[at]);
            if new_value != run.current[&gate.name] {
                run.current.insert(gate.name.clone(), new_value);
                run.events.push(Event {
                    time: now.clone(),
                    signal: gate.name.clone(),
                    new_value,
                });
                run.fan_out(&gate.name, new_value, &now);
            }
        }
    }

    let settle_time = run
        .events
        .last()
        .map(|event| event.time.clone())
        .unwrap_or(switch_time);
    let mut per_signal: BTreeMap<String, Vec<(Rational, Bit)>> = BTreeMap::new();
    for event in &run.events {
        per_signal
            .entry(event.signal.clone())
            .or_default()
            .push((event.time.clone(), event.new_value));
    }
    Ok(Trace {
        events: run.events,
        per_signal,
        initial,
        settled: run.current,
        settle_time,
    })
}

struct Arrival {
    at_gate: usize,
    input: usize,
    value: Bit,
    seq: u64,
}

struct Run<'a> {
    current: BTreeMap<String, Bit>,
    views: Vec<Vec<Bit>>,
    element_delays: Vec<Vec<Rational>>,
    consumers: BTreeMap<&'a str, Vec<(usize, usize)>>,
    queue: BTreeMap<Rational, Vec<Arrival>>,
    pending: BTreeMap<(usize, usize), u64>,
    next_seq: u64,
    events: Vec<Event>,
    model: DelayModel,
}

impl Run<'_> {
    /// Routes one signal change into every delay element it feeds. Zero
    /// delays take effect immediately (the consumer gate is topologically
    /// later and will be evaluated in the same pass); positive delays queue
    /// an arrival, which under the inertial model supersedes any arrival
    /// already in flight on the same element.
    fn fan_out(&mut self, signal: &str, value: Bit, now: &Rational) {
        let edges: Vec<(usize, usize)> = match self.consumers.get(signal) {
            Some(edges) => edges.clone(),
            None => return,
        };
        for (at_gate, input) in edges {
            let delay = &self.element_delays[at_gate][input];
            if delay.is_zero() {
                self.views[at_gate][input] = value;
                continue;
            }
            let fire_at = now + delay;
            match self.model {
                DelayModel::Pure => {
                    let seq = self.next_seq;
                    self.next_seq += 1;
                    self.queue.entry(fire_at).or_default().push(Arrival {
                        at_gate,
                        input,
                        value,
                        seq,
                    });
                }
                DelayModel::Inertial => {
                    self.pending.remove(&(at_gate, input));
                    if self.views[at_gate][input] == value {
                        continue;
                    }
                    let seq = self.next_seq;
                    self.next_seq += 1;
                    self.pending.insert((at_gate, input), seq);
                    self.queue.entry(fire_at).or_default().push(Arrival {
                        at_gate,
                        input,
                        value,
                        seq,
                    });
                }
            }
        }
    }
}

/// Agreement between one signal's trace and its symbolic waveform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalAgreement {
    pub signal: String,
    pub agrees: bool,
    /// Earliest sampled instant where the two sides differ, with the trace
    /// value and the waveform value.
    pub first_divergence: Option<(Rational, Bit, Bit)>,
}

/// The outcome of checking a whole trace against propagated waveforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementReport {
    pub signals: Vec<SignalAgreement>,
}

impl AgreementReport {
    pub fn all_agree(&self) -> bool {
        self.signals.iter().all(|s| s.agrees)
    }

    pub fn first_mismatch(&self) -> Option<&SignalAgreement> {
        self.signals.iter().find(|s| !s.agrees)
    }
}

/// Samples every signal's symbolic waveform against the trace, just before
/// and exactly at each edge either side mentions, plus a point before the
/// first edge and one after settling. The "just before" offset is half the
/// smallest gap between sampled instants, so no edge can hide between two
/// samples.
pub fn trace_vs_waveform(
    trace: &Trace,
    waveforms: &BTreeMap<String, Waveform>,
    delays: &DelayMap,
) -> Result<AgreementReport, WaveformError> {
    let mut signals = Vec::with_capacity(waveforms.len());
    for (name, waveform) in waveforms {
        let mut instants: Vec<Rational> = Vec::new();
        for step in waveform.steps() {
            instants.push(step.eval(delays)?);
        }
        for (at, _) in trace.events_for(name) {
            instants.push(at.clone());
        }
        instants.sort();
        instants.dedup();
        let one = Rational::from_integer(1.into());
        let epsilon = instants
            .windows(2)
            .map(|pair| (&pair[1] - &pair[0]) / Rational::from_integer(2.into()))
            .min()
            .unwrap_or_else(|| one.clone());
        let mut points = Vec::with_capacity(instants.len() * 2 + 2);
        if let Some(first) = instants.first() {
            points.push(first - &one);
        }
        for at in &instants {
            points.push(at - &epsilon);
            points.push(at.clone());
        }
        points.push(trace.settle_time() + &one);
        points.sort();
        points.dedup();

        let mut agreement = SignalAgreement {
            signal: name.clone(),
            agrees: true,
            first_divergence: None,
        };
        match trace.initial_values().get(name) {
            None => agreement.agrees = false,
            Some(_) => {
                for point in points {
                    let observed = trace
                        .value_at(name, &point)
                        .expect("signal present in trace");
                    let predicted = waveform.eval(delays, &point)?;
                    if observed != predicted {
                        agreement.agrees = false;
                        agreement.first_divergence = Some((point, observed, predicted));
                        break;
                    }
                }
            }
        }
        signals.push(agreement);
    }
    Ok(AgreementReport { signals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::propagate;
    use crate::circuit::parse_netlist;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn tau(value: Rational) -> DelayMap {
        [("tau".to_string(), value)].into_iter().collect()
    }

    fn two_level() -> Netlist {
        parse_netlist(
            "input  X1 X2 X3 X4\n\
             gate   N1 NOT X3            delay=tau\n\
             gate   A1 AND X1 X2         delay=tau\n\
             gate   A2 AND N1 X4         delay=tau\n\
             gate   O1 OR  A1 A2         delay=tau\n\
             output Y = O1\n",
        )
        .unwrap()
    }

    fn falling(n: &Netlist) -> Stimulus {
        Stimulus::from_bit_strings(n, "1111", "1001", rat(5, 1)).unwrap()
    }

    fn pulse_chain() -> Netlist {
        // D carries a pulse exactly tau wide; E sees it through 2*tau
        // elements, E2 through tau elements.
        parse_netlist(
            "input X\n\
             gate N NOT X delay=tau\n\
             gate D AND X N delay=tau\n\
             gate E AND D D delay=2*tau\n\
             gate E2 AND D D delay=tau\n\
             output Y = E\n",
        )
        .unwrap()
    }

    fn rising(n: &Netlist) -> Stimulus {
        Stimulus::from_bit_strings(n, "0", "1", rat(0, 1)).unwrap()
    }

    #[test]
    fn replays_the_classic_drop() {
        let n = two_level();
        let trace = simulate(&n, &falling(&n), &tau(rat(1, 1)), DelayModel::Pure).unwrap();
        let expect: Vec<(&str, i64, u8)> = vec![
            ("X2", 5, 0),
            ("X3", 5, 0),
            ("N1", 6, 1),
            ("A1", 6, 0),
            ("A2", 7, 1),
            ("O1", 7, 0),
            ("O1", 8, 1),
        ];
        let got: Vec<(&str, Rational, u8)> = trace
            .events()
            .iter()
            .map(|e| (e.signal.as_str(), e.time.clone(), e.new_value.as_u8()))
            .collect();
        let expect: Vec<(&str, Rational, u8)> = expect
            .into_iter()
            .map(|(s, t, v)| (s, rat(t, 1), v))
            .collect();
        assert_eq!(got, expect);
        assert_eq!(*trace.settle_time(), rat(8, 1));
        assert_eq!(trace.settled_values()["O1"], Bit::ONE);
        assert_eq!(trace.transition_count("O1"), 2);
        assert_eq!(trace.value_at("O1", &rat(7, 1)), Some(Bit::ZERO));
        assert_eq!(trace.value_at("O1", &rat(8, 1)), Some(Bit::ONE));
        assert_eq!(trace.value_at("O1", &rat(0, 1)), Some(Bit::ONE));
    }

    #[test]
    fn unchanged_stimulus_settles_immediately() {
        let n = two_level();
        let s = Stimulus::from_bit_strings(&n, "1111", "1111", rat(5, 1)).unwrap();
        let trace = simulate(&n, &s, &tau(rat(1, 1)), DelayModel::Pure).unwrap();
        assert!(trace.events().is_empty());
        assert_eq!(*trace.settle_time(), rat(5, 1));
        assert_eq!(trace.settled_values(), trace.initial_values());
    }

    #[test]
    fn trace_agrees_with_symbolic_waveforms() {
        let n = two_level();
        let s = falling(&n);
        let waveforms = propagate(&n, &s).unwrap();
        for delay in [rat(1, 1), rat(3, 2), rat(1, 3)] {
            let trace = simulate(&n, &s, &tau(delay.clone()), DelayModel::Pure).unwrap();
            let report = trace_vs_waveform(&trace, &waveforms, &tau(delay)).unwrap();
            assert!(report.all_agree(), "{:?}", report.first_mismatch());
        }
    }

    #[test]
    fn disagreement_is_localized() {
        let n = two_level();
        let s = falling(&n);
        let mut waveforms = propagate(&n, &s).unwrap();
        let trace = simulate(&n, &s, &tau(rat(1, 1)), DelayModel::Pure).unwrap();
        waveforms.insert("N1".to_string(), Waveform::constant(Bit::ZERO));
        let report = trace_vs_waveform(&trace, &waveforms, &tau(rat(1, 1))).unwrap();
        assert!(!report.all_agree());
        let bad = report.first_mismatch().unwrap();
        assert_eq!(bad.signal, "N1");
        let (at, observed, predicted) = bad.first_divergence.clone().unwrap();
        assert_eq!(at, rat(6, 1));
        assert_eq!(observed, Bit::ONE);
        assert_eq!(predicted, Bit::ZERO);
        assert!(report.signals.iter().any(|s| s.signal == "O1" && s.agrees));
    }

    #[test]
    fn zero_delays_settle_at_the_switch_instant() {
        let n = two_level().with_uniform_delay(crate::waveform::SymbolicTime::zero());
        let s = Stimulus::from_bit_strings(&n, "1111", "1001", rat(2, 1)).unwrap();
        let trace = simulate(&n, &s, &DelayMap::new(), DelayModel::Pure).unwrap();
        assert!(trace.events().iter().all(|e| e.time == rat(2, 1)));
        assert_eq!(*trace.settle_time(), rat(2, 1));
        assert_eq!(trace.transition_count("O1"), 0);
        let waveforms = propagate(&n, &s).unwrap();
        let report = trace_vs_waveform(&trace, &waveforms, &DelayMap::new()).unwrap();
        assert!(report.all_agree(), "{:?}", report.first_mismatch());
    }

    #[test]
    fn inertial_equals_pure_when_every_element_sees_one_edge() {
        let n = two_level();
        let s = falling(&n);
        let pure = simulate(&n, &s, &tau(rat(1, 1)), DelayModel::Pure).unwrap();
        let inertial = simulate(&n, &s, &tau(rat(1, 1)), DelayModel::Inertial).unwrap();
        assert_eq!(pure, inertial);
    }

    #[test]
    fn inertial_swallows_narrow_pulses() {
        let n = pulse_chain();
        let s = rising(&n);
        let delays = tau(rat(1, 1));

        let pure = simulate(&n, &s, &delays, DelayModel::Pure).unwrap();
        // The pulse on D is [1, 2); through 2*tau elements it lands on E as
        // [3, 4), and through tau elements on E2 as [2, 3).
        assert_eq!(pure.transition_count("D"), 2);
        assert_eq!(pure.transition_count("E"), 2);
        assert_eq!(pure.transition_count("E2"), 2);
        assert_eq!(pure.value_at("E", &rat(3, 1)), Some(Bit::ONE));

        let inertial = simulate(&n, &s, &delays, DelayModel::Inertial).unwrap();
        // Width tau < delay 2*tau: swallowed. Width tau == delay tau: passes.
        assert_eq!(inertial.transition_count("D"), 2);
        assert_eq!(inertial.transition_count("E"), 0);
        assert_eq!(inertial.transition_count("E2"), 2);
        assert_eq!(
            inertial.events_for("E2"),
            &[(rat(2, 1), Bit::ONE), (rat(3, 1), Bit::ZERO)]
        );
        assert_eq!(inertial.settled_values()["E"], Bit::ZERO);
    }

    #[test]
    fn simulation_is_deterministic() {
        let n = two_level();
        let s = falling(&n);
        let a = simulate(&n, &s, &tau(rat(2, 3)), DelayModel::Pure).unwrap();
        let b = simulate(&n, &s, &tau(rat(2, 3)), DelayModel::Pure).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation_errors() {
        let n = two_level();
        let s = falling(&n);
        assert!(matches!(
            simulate(&n, &s, &DelayMap::new(), DelayModel::Pure),
            Err(SimError::MissingDelayAssignment(name)) if name == "tau"
        ));
        assert!(matches!(
            simulate(&n, &s, &tau(rat(0, 1)), DelayModel::Pure),
            Err(SimError::NonPositiveDelay { .. })
        ));
        assert!(matches!(
            simulate(&n, &s, &tau(rat(-1, 2)), DelayModel::Pure),
            Err(SimError::NonPositiveDelay { .. })
        ));
        let early = Stimulus::from_bit_strings(&n, "1111", "1001", rat(-5, 1)).unwrap();
        assert!(matches!(
            simulate(&n, &early, &tau(rat(1, 1)), DelayModel::Pure),
            Err(SimError::NegativeSwitchTime(_))
        ));
    }

    #[test]
    fn fractional_delays_keep_exact_times() {
        let n = two_level();
        let s = falling(&n);
        let trace = simulate(&n, &s, &tau(rat(1, 3)), DelayModel::Pure).unwrap();
        let o1: Vec<Rational> = trace
            .events_for("O1")
            .iter()
            .map(|(at, _)| at.clone())
            .collect();
        assert_eq!(o1, vec![rat(17, 3), rat(6, 1)]);
    }
}
