//! Symbolic hazard analysis for asynchronous combinational circuits.
//!
//! A combinational circuit whose gates have nonzero propagation delays can
//! glitch: an output that should stay constant, or make one clean
//! transition, briefly visits the opposite level while differently delayed
//! paths reconverge. This crate finds those glitches symbolically. Instead
//! of simulating one delay assignment at a time, it represents every signal
//! as a closed-form step-function waveform whose edge times are symbolic
//! sums like `5 + 2*tau`, propagates the input switch through the netlist
//! exactly, and reads hazards straight off the resulting waveform.
//!
//! The pieces, bottom up:
//!
//! - [`expr`]: Boolean expressions, their evaluation, and their exact
//!   translation to integer multilinear polynomials, where gate identities
//!   can be checked by coefficient equality instead of truth tables.
//! - [`waveform`]: unit step functions with symbolic edge times and the
//!   algebra for complementing, combining, and shifting them. A waveform is
//!   an initial level plus an ordered list of toggle instants, equivalent
//!   to an alternating sum of steps.
//! - [`circuit`]: the netlist format, with one pure delay element per gate
//!   input feeding an ideal gate, plus input stimuli.
//! - [`analyze`]: waveform propagation through a netlist, hazard
//!   classification, pulse extraction, and exhaustive transition search.
//! - [`oracle`]: an independent event-driven simulator over concrete delay
//!   values, used to cross-check the symbolic results, with trace output as
//!   VCD or terminal art.
//! - [`corpus`]: seeded random circuits and expressions for tests and
//!   benchmarks.
//!
//! # Example
//!
//! ```
//! use hazard_core::{classify, parse_netlist, HazardClass, Stimulus};
//! use num_rational::BigRational;
//!
//! let netlist = parse_netlist(
//!     "input  X1 X2 X3 X4
//!      gate   N1 NOT X3    delay=tau
//!      gate   A1 AND X1 X2 delay=tau
//!      gate   A2 AND N1 X4 delay=tau
//!      gate   O1 OR  A1 A2 delay=tau
//!      output Y = O1",
//! )?;
//! let five = BigRational::from_integer(5.into());
//! let stimulus = Stimulus::from_bit_strings(&netlist, "1111", "1001", five)?;
//! let report = classify(&netlist, &stimulus, "Y")?;
//!
//! assert_eq!(report.class, HazardClass::Static1);
//! assert_eq!(
//!     report.waveform.to_string(),
//!     "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))",
//! );
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! The output should have stayed high through the input change, but for
//! every positive delay `tau` it drops low on `[5+2*tau, 5+3*tau)`: a
//! static-1 hazard, exposed without picking a value for `tau`.

pub mod analyze;
pub mod circuit;
pub mod corpus;
pub mod expr;
pub mod oracle;
pub mod waveform;

pub use analyze::{
    analyze, classify, enumerate_transitions, hazard_json, ideal_output, propagate, report_json,
    Analysis, AnalyzeError, FoundHazard, HazardClass, HazardReport, Pulse, TransitionSet,
    MAX_ENUMERATED_INPUTS,
};
pub use circuit::{
    parse_netlist, Gate, GateKind, Netlist, NetlistError, SignalSource, Stimulus,
};
pub use expr::{arithmetize, parse_expr, Bit, BoolExpr, ExprError, MultilinearPoly};
pub use oracle::{
    render_ascii, simulate, trace_vs_waveform, write_vcd, AgreementReport, DelayModel, Event,
    SimError, SignalAgreement, Trace,
};
pub use waveform::{
    compare_times, format_rational, parse_rational, rational_to_f64, DelayMap, Rational,
    SymbolicTime, TimeOrder, Waveform, WaveformError,
};
