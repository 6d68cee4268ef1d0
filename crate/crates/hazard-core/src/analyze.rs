//! Symbolic hazard search and classification.
//!
//! Given a netlist and one input transition, [`propagate`] pushes the input
//! waveforms through every delay element and gate in topological order,
//! producing the exact symbolic waveform of each signal. [`classify`] then
//! compares an output's waveform against the ideal behavior: a steady input
//! pair whose output waveform toggles at all, or a changing pair whose
//! output toggles more than once, is a hazard.
//!
//! * `Static0`: both vectors settle the output at 0, yet the waveform
//!   momentarily rises.
//! * `Static1`: both vectors settle the output at 1, yet the waveform
//!   momentarily falls.
//! * `Dynamic`: the output is supposed to make one clean transition but
//!   toggles three or more times.
//!
//! The verdict covers *every* positive assignment of the delay symbols at
//! once. When the order of two edges depends on the actual delay values the
//! search does not guess: it reports the ambiguity and the caller can pin
//! symbols to concrete values and retry.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::circuit::{GateKind, Netlist, NetlistError, Stimulus};
use crate::expr::Bit;
use crate::waveform::{Rational, SymbolicTime, Waveform, WaveformError};

/// Most inputs a netlist may have before transition enumeration refuses to
/// run; the all-pairs set grows as `4^n`.
pub const MAX_ENUMERATED_INPUTS: usize = 16;

/// Errors from symbolic analysis.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzeError {
    /// A waveform operation failed while evaluating the named gate. The
    /// interesting case is [`WaveformError::AmbiguousOrdering`]: the hazard
    /// verdict depends on the delay values.
    #[error("gate `{gate}`: {source}")]
    Propagation {
        gate: String,
        #[source]
        source: WaveformError,
    },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("output `{0}` is not declared")]
    UnknownOutput(String),
    #[error("enumeration over {got} inputs exceeds the limit of {max}")]
    TooManyInputs { got: usize, max: usize },
}

impl AnalyzeError {
    /// True when the failure is an edge-order ambiguity that concrete delay
    /// values would resolve.
    pub fn is_ambiguity(&self) -> bool {
        matches!(
            self,
            AnalyzeError::Propagation {
                source: WaveformError::AmbiguousOrdering(_, _),
                ..
            }
        )
    }
}

/// Hazard verdict for one output under one input transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HazardClass {
    None,
    Static0,
    Static1,
    Dynamic,
}

impl HazardClass {
    pub fn is_hazard(self) -> bool {
        self != HazardClass::None
    }

    /// Stable lowercase label used in JSON output.
    pub fn label(self) -> &'static str {
        match self {
            HazardClass::None => "none",
            HazardClass::Static0 => "static0",
            HazardClass::Static1 => "static1",
            HazardClass::Dynamic => "dynamic",
        }
    }
}

/// One spurious pulse: the output holds a wrong value on `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pulse {
    pub start: SymbolicTime,
    pub end: SymbolicTime,
    pub width: SymbolicTime,
}

/// The classification of one output for one stimulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HazardReport {
    pub output: String,
    pub class: HazardClass,
    /// Settled output value for the `from` vector.
    pub ideal_before: Bit,
    /// Settled output value for the `to` vector.
    pub ideal_after: Bit,
    /// Exact symbolic waveform of the output.
    pub waveform: Waveform,
    /// Complete pulses of the waveform, paired off from its toggle list. A
    /// dynamic hazard's final clean transition is not a pulse.
    pub pulses: Vec<Pulse>,
}

impl HazardReport {
    /// The output waveform in its closed step-sum form.
    pub fn expression_text(&self) -> String {
        self.waveform.to_string()
    }
}

/// A hazard report together with the waveforms of every signal that fed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub report: HazardReport,
    /// Waveform of every signal, primary inputs included.
    pub signals: BTreeMap<String, Waveform>,
}

/// Computes the symbolic waveform of every signal in the netlist for the
/// given stimulus. Gates are visited in topological order; each gate first
/// delays the waveform of each input by that input's delay element, then
/// applies its ideal function.
pub fn propagate(
    netlist: &Netlist,
    stimulus: &Stimulus,
) -> Result<BTreeMap<String, Waveform>, AnalyzeError> {
    check_stimulus(netlist, stimulus)?;
    let mut waveforms = stimulus.input_waveforms();
    for gate in netlist.topo_order() {
        let output = apply_gate(gate, &waveforms).map_err(|source| {
            AnalyzeError::Propagation {
                gate: gate.name.clone(),
                source,
            }
        })?;
        waveforms.insert(gate.name.clone(), output);
    }
    Ok(waveforms)
}

/// One gate step: delay each input waveform by its element, then fold the
/// ideal gate function over the delayed waveforms.
fn apply_gate(
    gate: &crate::circuit::Gate,
    waveforms: &BTreeMap<String, Waveform>,
) -> Result<Waveform, WaveformError> {
    let delayed: Vec<Waveform> = gate
        .inputs
        .iter()
        .zip(&gate.input_delays)
        .map(|(input, element)| waveforms[input.as_str()].delay(element))
        .collect::<Result<_, _>>()?;
    Ok(match gate.kind {
        GateKind::Not => delayed[0].complement(),
        GateKind::Xor => delayed[0].xor(&delayed[1])?,
        GateKind::And => fold(&delayed, Waveform::and)?,
        GateKind::Nand => fold(&delayed, Waveform::and)?.complement(),
        GateKind::Or => fold(&delayed, Waveform::or)?,
        GateKind::Nor => fold(&delayed, Waveform::or)?.complement(),
    })
}

fn fold(
    operands: &[Waveform],
    op: fn(&Waveform, &Waveform) -> Result<Waveform, WaveformError>,
) -> Result<Waveform, WaveformError> {
    let mut acc = operands[0].clone();
    for next in &operands[1..] {
        acc = op(&acc, next)?;
    }
    Ok(acc)
}

/// The settled value of an output for one steady input vector.
pub fn ideal_output(
    netlist: &Netlist,
    vector: &BTreeMap<String, Bit>,
    output: &str,
) -> Result<Bit, AnalyzeError> {
    let driver = netlist
        .output_driver(output)
        .ok_or_else(|| AnalyzeError::UnknownOutput(output.to_string()))?;
    let values = netlist.eval_vector(vector)?;
    Ok(values[driver])
}

/// Classifies one output under one stimulus. See [`analyze`] for the full
/// result including intermediate signal waveforms.
pub fn classify(
    netlist: &Netlist,
    stimulus: &Stimulus,
    output: &str,
) -> Result<HazardReport, AnalyzeError> {
    analyze(netlist, stimulus, output).map(|analysis| analysis.report)
}

/// Propagates the stimulus and classifies the named output.
pub fn analyze(
    netlist: &Netlist,
    stimulus: &Stimulus,
    output: &str,
) -> Result<Analysis, AnalyzeError> {
    let driver = netlist
        .output_driver(output)
        .ok_or_else(|| AnalyzeError::UnknownOutput(output.to_string()))?
        .to_string();
    let ideal_before = ideal_output(netlist, stimulus.from_vector(), output)?;
    let ideal_after = ideal_output(netlist, stimulus.to_vector(), output)?;
    let signals = propagate(netlist, stimulus)?;
    let waveform = signals[driver.as_str()].clone();
    debug_assert_eq!(waveform.initial_value(), ideal_before);
    debug_assert_eq!(waveform.final_value(), ideal_after);

    let actual = waveform.transition_count();
    let class = if ideal_before == ideal_after {
        if actual >= 2 {
            if ideal_before == Bit::ONE {
                HazardClass::Static1
            } else {
                HazardClass::Static0
            }
        } else {
            HazardClass::None
        }
    } else if actual >= 3 {
        HazardClass::Dynamic
    } else {
        HazardClass::None
    };

    let steps = waveform.steps();
    let pulses = steps
        .chunks_exact(2)
        .map(|pair| {
            let width = pair[1]
                .checked_sub(&pair[0])
                .expect("toggle instants are ordered");
            Pulse {
                start: pair[0].clone(),
                end: pair[1].clone(),
                width,
            }
        })
        .collect();

    Ok(Analysis {
        report: HazardReport {
            output: output.to_string(),
            class,
            ideal_before,
            ideal_after,
            waveform,
            pulses,
        },
        signals,
    })
}

/// Which input transitions [`enumerate_transitions`] sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransitionSet {
    /// Ordered vector pairs that differ in exactly one bit.
    Hamming1,
    /// All ordered pairs of distinct vectors.
    AllPairs,
}

/// A hazardous transition found by enumeration. The vectors are bit strings
/// in primary input declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundHazard {
    pub from: String,
    pub to: String,
    pub report: HazardReport,
}

/// Sweeps input transitions (switching at `t = 0`) and returns the ones that
/// produce a hazard on the named output, ordered by the `(from, to)` vector
/// pair read as integers. Netlists with more than
/// [`MAX_ENUMERATED_INPUTS`] inputs are refused.
pub fn enumerate_transitions(
    netlist: &Netlist,
    output: &str,
    set: TransitionSet,
) -> Result<Vec<FoundHazard>, AnalyzeError> {
    let n = netlist.primary_inputs().len();
    if n > MAX_ENUMERATED_INPUTS {
        return Err(AnalyzeError::TooManyInputs {
            got: n,
            max: MAX_ENUMERATED_INPUTS,
        });
    }
    let vectors = 1u64 << n;
    let total = match set {
        TransitionSet::Hamming1 => vectors * n as u64,
        TransitionSet::AllPairs => vectors * vectors,
    };
    let mut found: Vec<(u64, u64, HazardReport)> = (0..total)
        .into_par_iter()
        .map(|index| {
            let (from, to) = match set {
                TransitionSet::Hamming1 => {
                    let mask = index / n as u64;
                    let bit = index % n as u64;
                    (mask, mask ^ (1 << bit))
                }
                TransitionSet::AllPairs => (index >> n, index & (vectors - 1)),
            };
            if from == to {
                return Ok(None);
            }
            let stimulus = Stimulus::new(
                netlist,
                vector_from_mask(netlist, from),
                vector_from_mask(netlist, to),
                Rational::from_integer(0.into()),
            )?;
            let report = classify(netlist, &stimulus, output)?;
            if report.class.is_hazard() {
                Ok(Some((from, to, report)))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>, AnalyzeError>>()?
        .into_iter()
        .flatten()
        .collect();
    found.sort_by_key(|&(from, to, _)| (from, to));
    Ok(found
        .into_iter()
        .map(|(from, to, report)| FoundHazard {
            from: bits_string(from, n),
            to: bits_string(to, n),
            report,
        })
        .collect())
}

/// Renders one hazard report as a JSON object with a stable schema.
pub fn hazard_json(report: &HazardReport) -> Value {
    let pulses: Vec<Value> = report
        .pulses
        .iter()
        .map(|p| {
            json!({
                "start": p.start.to_string(),
                "end": p.end.to_string(),
                "width": p.width.to_string(),
            })
        })
        .collect();
    json!({
        "output": report.output,
        "class": report.class.label(),
        "ideal_before": report.ideal_before.as_u8(),
        "ideal_after": report.ideal_after.as_u8(),
        "expression": report.expression_text(),
        "pulses": pulses,
    })
}

/// Renders an analysis as [`hazard_json`] plus the waveform of every signal.
pub fn report_json(analysis: &Analysis) -> Value {
    let mut value = hazard_json(&analysis.report);
    let signals: BTreeMap<&str, String> = analysis
        .signals
        .iter()
        .map(|(name, w)| (name.as_str(), w.to_string()))
        .collect();
    value["signals"] = json!(signals);
    value
}

fn check_stimulus(netlist: &Netlist, stimulus: &Stimulus) -> Result<(), AnalyzeError> {
    for vector in [stimulus.from_vector(), stimulus.to_vector()] {
        if vector.len() != netlist.primary_inputs().len()
            || netlist
                .primary_inputs()
                .iter()
                .any(|name| !vector.contains_key(name))
        {
            return Err(NetlistError::InvalidStimulus(
                "stimulus does not match the netlist's primary inputs".to_string(),
            )
            .into());
        }
    }
    Ok(())
}

/// Input vector for a bit mask; input `i` takes bit `n-1-i`, so the mask
/// reads like the bit string, most significant bit first.
fn vector_from_mask(netlist: &Netlist, mask: u64) -> BTreeMap<String, Bit> {
    let n = netlist.primary_inputs().len();
    netlist
        .primary_inputs()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            (
                name.clone(),
                Bit::from(mask >> (n - 1 - i) & 1 == 1),
            )
        })
        .collect()
}

fn bits_string(mask: u64, n: usize) -> String {
    (0..n)
        .map(|i| if mask >> (n - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_netlist;
    use num_bigint::BigInt;

    fn rat(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
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

    fn falling_stimulus(netlist: &Netlist) -> Stimulus {
        Stimulus::from_bit_strings(netlist, "1111", "1001", rat(5)).unwrap()
    }

    #[test]
    fn propagates_exact_intermediate_waveforms() {
        let n = two_level();
        let signals = propagate(&n, &falling_stimulus(&n)).unwrap();
        assert_eq!(signals["X1"].to_string(), "1");
        assert_eq!(signals["X2"].to_string(), "1 - h(t-5)");
        assert_eq!(signals["X3"].to_string(), "1 - h(t-5)");
        assert_eq!(signals["X4"].to_string(), "1");
        assert_eq!(signals["N1"].to_string(), "h(t-(5+tau))");
        assert_eq!(signals["A1"].to_string(), "1 - h(t-(5+tau))");
        assert_eq!(signals["A2"].to_string(), "h(t-(5+2*tau))");
        assert_eq!(
            signals["O1"].to_string(),
            "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))"
        );
    }

    #[test]
    fn classifies_the_static1_drop() {
        let n = two_level();
        let analysis = analyze(&n, &falling_stimulus(&n), "Y").unwrap();
        let report = &analysis.report;
        assert_eq!(report.class, HazardClass::Static1);
        assert_eq!(report.ideal_before, Bit::ONE);
        assert_eq!(report.ideal_after, Bit::ONE);
        assert_eq!(
            report.expression_text(),
            "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))"
        );
        assert_eq!(report.pulses.len(), 1);
        let pulse = &report.pulses[0];
        assert_eq!(pulse.start.to_string(), "5+2*tau");
        assert_eq!(pulse.end.to_string(), "5+3*tau");
        assert_eq!(pulse.width.to_string(), "tau");
    }

    #[test]
    fn unchanged_inputs_are_clean() {
        let n = two_level();
        let s = Stimulus::from_bit_strings(&n, "1111", "1111", rat(5)).unwrap();
        let report = classify(&n, &s, "Y").unwrap();
        assert_eq!(report.class, HazardClass::None);
        assert_eq!(report.waveform.transition_count(), 0);
        assert!(report.pulses.is_empty());
    }

    #[test]
    fn complemented_output_gives_static0() {
        let n = parse_netlist(
            "input  X1 X2 X3 X4\n\
             gate   N1 NOT X3  delay=tau\n\
             gate   A1 AND X1 X2 delay=tau\n\
             gate   A2 AND N1 X4 delay=tau\n\
             gate   O1 OR  A1 A2 delay=tau\n\
             gate   N2 NOT O1 delay=tau\n\
             output Z = N2\n",
        )
        .unwrap();
        let s = Stimulus::from_bit_strings(&n, "1111", "1001", rat(5)).unwrap();
        let report = classify(&n, &s, "Z").unwrap();
        assert_eq!(report.class, HazardClass::Static0);
        assert_eq!(report.ideal_before, Bit::ZERO);
        assert_eq!(
            report.expression_text(),
            "h(t-(5+3*tau)) - h(t-(5+4*tau))"
        );
    }

    #[test]
    fn multi_toggle_transition_is_dynamic() {
        // The AND of X with its own inverse makes a pulse; OR-ing that pulse
        // with a slower copy of X gives 0 -> 1 in three moves.
        let n = parse_netlist(
            "input X\n\
             gate N NOT X delay=tau\n\
             gate D AND X N delay=tau\n\
             gate Y1 OR D X delays=tau,4*tau\n\
             output Y = Y1\n",
        )
        .unwrap();
        let s = Stimulus::from_bit_strings(&n, "0", "1", rat(0)).unwrap();
        let report = classify(&n, &s, "Y").unwrap();
        assert_eq!(report.ideal_before, Bit::ZERO);
        assert_eq!(report.ideal_after, Bit::ONE);
        assert_eq!(report.class, HazardClass::Dynamic);
        assert_eq!(report.waveform.transition_count(), 3);
        assert_eq!(
            report.expression_text(),
            "h(t-2*tau) - h(t-3*tau) + h(t-4*tau)"
        );
        // The final clean rise is not a pulse.
        assert_eq!(report.pulses.len(), 1);
        assert_eq!(report.pulses[0].width.to_string(), "tau");
    }

    #[test]
    fn ambiguous_edge_order_names_the_gate() {
        let n = parse_netlist(
            "input X\n\
             gate A NOT X delay=tau\n\
             gate B NOT X delay=delta\n\
             gate C AND A B delay=0\n\
             output Y = C\n",
        )
        .unwrap();
        let s = Stimulus::from_bit_strings(&n, "0", "1", rat(0)).unwrap();
        let err = analyze(&n, &s, "Y").unwrap_err();
        assert!(err.is_ambiguity());
        match err {
            AnalyzeError::Propagation { gate, .. } => assert_eq!(gate, "C"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ideal_output_and_unknown_outputs() {
        let n = two_level();
        let s = falling_stimulus(&n);
        assert_eq!(ideal_output(&n, s.from_vector(), "Y").unwrap(), Bit::ONE);
        assert_eq!(ideal_output(&n, s.to_vector(), "Y").unwrap(), Bit::ONE);
        assert!(matches!(
            ideal_output(&n, s.from_vector(), "Q"),
            Err(AnalyzeError::UnknownOutput(name)) if name == "Q"
        ));
        assert!(matches!(
            classify(&n, &s, "Q"),
            Err(AnalyzeError::UnknownOutput(_))
        ));
    }

    #[test]
    fn enumeration_finds_the_known_pair() {
        let n = two_level();
        let all = enumerate_transitions(&n, "Y", TransitionSet::AllPairs).unwrap();
        assert!(all.iter().all(|f| f.report.class.is_hazard()));
        let known = all
            .iter()
            .find(|f| f.from == "1111" && f.to == "1001")
            .expect("the falling pair is hazardous");
        assert_eq!(known.report.class, HazardClass::Static1);
        // The reverse direction is clean: the OR sees the rising cover
        // before the falling one ends.
        assert!(!all.iter().any(|f| f.from == "1001" && f.to == "1111"));
        // Deterministic order: (from, to) as integers, ascending.
        let keys: Vec<(u64, u64)> = all
            .iter()
            .map(|f| {
                (
                    u64::from_str_radix(&f.from, 2).unwrap(),
                    u64::from_str_radix(&f.to, 2).unwrap(),
                )
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn hamming1_subset_of_all_pairs() {
        let n = two_level();
        let near = enumerate_transitions(&n, "Y", TransitionSet::Hamming1).unwrap();
        let all = enumerate_transitions(&n, "Y", TransitionSet::AllPairs).unwrap();
        for f in &near {
            let mut bits = 0u32;
            for (a, b) in f.from.chars().zip(f.to.chars()) {
                bits += u32::from(a != b);
            }
            assert_eq!(bits, 1);
            assert!(all
                .iter()
                .any(|g| g.from == f.from && g.to == f.to && g.report == f.report));
        }
    }

    #[test]
    fn zero_delays_cannot_hazard() {
        let n = two_level().with_uniform_delay(SymbolicTime::zero());
        let s = Stimulus::from_bit_strings(&n, "1111", "1001", rat(0)).unwrap();
        let report = classify(&n, &s, "Y").unwrap();
        assert_eq!(report.class, HazardClass::None);
        assert_eq!(report.expression_text(), "1");
    }

    #[test]
    fn too_many_inputs_is_refused() {
        let names: Vec<String> = (0..17).map(|i| format!("I{i}")).collect();
        let wide = Netlist::new(
            names.clone(),
            vec![crate::circuit::Gate::uniform(
                "G",
                GateKind::And,
                names.clone(),
                SymbolicTime::symbol("tau"),
            )],
            vec![("Y".to_string(), "G".to_string())],
        )
        .unwrap();
        let err = enumerate_transitions(&wide, "Y", TransitionSet::AllPairs).unwrap_err();
        assert_eq!(err, AnalyzeError::TooManyInputs { got: 17, max: 16 });
        let err = enumerate_transitions(&wide, "Y", TransitionSet::Hamming1).unwrap_err();
        assert!(matches!(err, AnalyzeError::TooManyInputs { .. }));
    }

    #[test]
    fn json_schema_is_stable() {
        let n = two_level();
        let analysis = analyze(&n, &falling_stimulus(&n), "Y").unwrap();
        let value = report_json(&analysis);
        assert_eq!(
            value,
            serde_json::json!({
                "output": "Y",
                "class": "static1",
                "ideal_before": 1,
                "ideal_after": 1,
                "expression": "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))",
                "pulses": [
                    {"start": "5+2*tau", "end": "5+3*tau", "width": "tau"}
                ],
                "signals": {
                    "X1": "1",
                    "X2": "1 - h(t-5)",
                    "X3": "1 - h(t-5)",
                    "X4": "1",
                    "N1": "h(t-(5+tau))",
                    "A1": "1 - h(t-(5+tau))",
                    "A2": "h(t-(5+2*tau))",
                    "O1": "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))",
                }
            })
        );
    }
}
