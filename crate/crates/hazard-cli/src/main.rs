//! Command line front end for the hazard analysis engine.
//!
//! Four subcommands cover the workflow: `analyze` classifies one input
//! transition symbolically, `enumerate` sweeps transitions for hazards,
//! `simulate` runs the event-driven simulator with concrete delays, and
//! `check` runs both engines on the same transition and verifies that they
//! agree.
//!
//! Exit codes: 0 when the run is clean, 1 for usage, input, or consistency
//! errors, 2 when a hazard was found, and 3 when the symbolic engine cannot
//! order two edges without concrete delay values.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hazard_core::analyze::{
    analyze, enumerate_transitions, hazard_json, report_json, Analysis, AnalyzeError,
    HazardClass, HazardReport, TransitionSet,
};
use hazard_core::circuit::{parse_netlist, Netlist, Stimulus};
use hazard_core::oracle::{
    render_ascii, simulate, trace_vs_waveform, write_vcd, DelayModel, Trace,
};
use hazard_core::waveform::{format_rational, parse_rational, DelayMap, Rational};

const EXIT_CLEAN: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_HAZARD: u8 = 2;
const EXIT_AMBIGUOUS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hazard",
    version,
    about = "Symbolic hazard analysis for asynchronous combinational circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one input transition symbolically.
    Analyze(AnalyzeArgs),
    /// Sweep input transitions and list the hazardous ones.
    Enumerate(EnumerateArgs),
    /// Replay one transition with concrete delays.
    Simulate(SimulateArgs),
    /// Run both engines on one transition and compare them.
    Check(CheckArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Netlist file.
    netlist: PathBuf,
    /// Input vector before the switch, one bit per input in declaration
    /// order.
    #[arg(long)]
    from: String,
    /// Input vector after the switch.
    #[arg(long)]
    to: String,
    /// Switch instant.
    #[arg(long, default_value = "0")]
    at: String,
    /// Output to classify; default is every declared output.
    #[arg(long)]
    output: Option<String>,
    /// Concrete value for one delay symbol, e.g. `tau=1.5`; repeatable.
    /// Unassigned symbols stay symbolic.
    #[arg(long = "delay", value_name = "SYM=VALUE")]
    delays: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Netlist file.
    netlist: PathBuf,
    /// Which transitions to sweep.
    #[arg(long, value_enum, default_value_t = Mode::Hamming1)]
    mode: Mode,
    /// Output to classify; default is the sole declared output.
    #[arg(long)]
    output: Option<String>,
    /// Concrete value for one delay symbol, e.g. `tau=1.5`; repeatable.
    #[arg(long = "delay", value_name = "SYM=VALUE")]
    delays: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Netlist file.
    netlist: PathBuf,
    /// Input vector before the switch.
    #[arg(long)]
    from: String,
    /// Input vector after the switch.
    #[arg(long)]
    to: String,
    /// Switch instant.
    #[arg(long, default_value = "0")]
    at: String,
    /// Concrete value for one delay symbol, e.g. `tau=1.5`; repeatable.
    /// Every symbol used by the netlist must be assigned.
    #[arg(long = "delay", value_name = "SYM=VALUE")]
    delays: Vec<String>,
    /// How delay elements treat pulses narrower than their delay.
    #[arg(long, value_enum, default_value_t = Model::Pure)]
    model: Model,
    /// Also write the trace as a value change dump.
    #[arg(long, value_name = "FILE")]
    vcd: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    /// Netlist file.
    netlist: PathBuf,
    /// Input vector before the switch.
    #[arg(long)]
    from: String,
    /// Input vector after the switch.
    #[arg(long)]
    to: String,
    /// Switch instant.
    #[arg(long, default_value = "0")]
    at: String,
    /// Concrete value for one delay symbol, e.g. `tau=1.5`; repeatable.
    /// Every symbol used by the netlist must be assigned.
    #[arg(long = "delay", value_name = "SYM=VALUE")]
    delays: Vec<String>,
    /// Output to classify; default is every declared output.
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Vector pairs that differ in exactly one bit.
    Hamming1,
    /// All ordered pairs of distinct vectors.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Pure,
    Inertial,
}

/// A failure with the exit code it maps to. Messages go to stderr.
struct Failure {
    code: u8,
    message: String,
    hint: Option<String>,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: message.into(),
            hint: None,
        }
    }

    fn from_analysis(err: AnalyzeError) -> Self {
        if err.is_ambiguity() {
            Failure {
                code: EXIT_AMBIGUOUS,
                message: err.to_string(),
                hint: Some(
                    "pass --delay SYM=VALUE to fix concrete delays and retry".to_string(),
                ),
            }
        } else {
            Failure::error(err.to_string())
        }
    }
}

fn main() -> ExitCode {
    // Rust ignores SIGPIPE by default, turning an early-closing consumer
    // like `head` into a write panic; restore the quiet filter behavior.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_ERROR } else { EXIT_CLEAN };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Enumerate(args) => run_enumerate(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Check(args) => run_check(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            if let Some(hint) = failure.hint {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let netlist = load_netlist(&args.netlist)?;
    let delays = parse_delays(&args.delays)?;
    let netlist = netlist.substitute_delays(&delays);
    let stimulus = build_stimulus(&netlist, &args.from, &args.to, &args.at)?;
    let outputs = select_outputs(&netlist, args.output.as_deref())?;

    let mut analyses = Vec::with_capacity(outputs.len());
    for output in &outputs {
        analyses.push(analyze(&netlist, &stimulus, output).map_err(Failure::from_analysis)?);
    }
    match args.format {
        Format::Text => {
            for analysis in &analyses {
                println!("{}", hazard_line(&analysis.report));
            }
        }
        Format::Json => print_json(collapse(analyses.iter().map(report_json).collect())),
    }
    Ok(hazard_exit(analyses.iter().map(|a| a.report.class)))
}

fn run_enumerate(args: EnumerateArgs) -> Result<u8, Failure> {
    let netlist = load_netlist(&args.netlist)?;
    let delays = parse_delays(&args.delays)?;
    let netlist = netlist.substitute_delays(&delays);
    let outputs = select_outputs(&netlist, args.output.as_deref())?;
    let set = match args.mode {
        Mode::Hamming1 => TransitionSet::Hamming1,
        Mode::All => TransitionSet::AllPairs,
    };

    let mut found = Vec::new();
    for output in &outputs {
        found.extend(
            enumerate_transitions(&netlist, output, set).map_err(Failure::from_analysis)?,
        );
    }
    match args.format {
        Format::Text => {
            if found.is_empty() {
                println!("no hazardous transitions");
            }
            for hazard in &found {
                println!(
                    "{} -> {}: {}",
                    hazard.from,
                    hazard.to,
                    hazard_line(&hazard.report)
                );
            }
        }
        Format::Json => print_json(Value::Array(
            found
                .iter()
                .map(|h| {
                    json!({
                        "from": h.from,
                        "to": h.to,
                        "report": hazard_json(&h.report),
                    })
                })
                .collect(),
        )),
    }
    Ok(if found.is_empty() {
        EXIT_CLEAN
    } else {
        EXIT_HAZARD
    })
}

fn run_simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let netlist = load_netlist(&args.netlist)?;
    let delays = parse_delays(&args.delays)?;
    let stimulus = build_stimulus(&netlist, &args.from, &args.to, &args.at)?;
    let model = match args.model {
        Model::Pure => DelayModel::Pure,
        Model::Inertial => DelayModel::Inertial,
    };
    let trace = simulate(&netlist, &stimulus, &delays, model)
        .map_err(|err| Failure::error(err.to_string()))?;

    if let Some(path) = &args.vcd {
        let mut file = fs::File::create(path).map_err(|err| {
            Failure::error(format!("cannot write {}: {err}", path.display()))
        })?;
        write_vcd(&trace, &netlist, &mut file)
            .map_err(|err| Failure::error(format!("cannot write {}: {err}", path.display())))?;
    }
    match args.format {
        Format::Text => {
            for event in trace.events() {
                println!(
                    "t={} {} -> {}",
                    format_rational(&event.time),
                    event.signal,
                    event.new_value
                );
            }
            println!("settled at t={}", format_rational(trace.settle_time()));
            print!("{}", render_ascii(&trace, &netlist, color_enabled()));
        }
        Format::Json => print_json(trace_json(&trace)),
    }
    Ok(EXIT_CLEAN)
}

fn run_check(args: CheckArgs) -> Result<u8, Failure> {
    let netlist = load_netlist(&args.netlist)?;
    let delays = parse_delays(&args.delays)?;
    let stimulus = build_stimulus(&netlist, &args.from, &args.to, &args.at)?;
    let outputs = select_outputs(&netlist, args.output.as_deref())?;

    let trace = simulate(&netlist, &stimulus, &delays, DelayModel::Pure)
        .map_err(|err| Failure::error(err.to_string()))?;
    let mut analyses: Vec<Analysis> = Vec::with_capacity(outputs.len());
    for output in &outputs {
        analyses.push(analyze(&netlist, &stimulus, output).map_err(Failure::from_analysis)?);
    }
    let waveforms = &analyses.first().expect("at least one output").signals;
    let agreement = trace_vs_waveform(&trace, waveforms, &delays)
        .map_err(|err| Failure::error(err.to_string()))?;

    match args.format {
        Format::Text => {
            for signal in &agreement.signals {
                match &signal.first_divergence {
                    None if signal.agrees => println!("ok {}", signal.signal),
                    Some((at, observed, predicted)) => println!(
                        "MISMATCH {} at t={}: simulated {}, symbolic {}",
                        signal.signal,
                        format_rational(at),
                        observed,
                        predicted
                    ),
                    None => println!("MISMATCH {}: signal missing from trace", signal.signal),
                }
            }
            if agreement.all_agree() {
                println!("engines agree on every signal");
            }
            for analysis in &analyses {
                println!("{}", hazard_line(&analysis.report));
            }
        }
        Format::Json => {
            let signals: Vec<Value> = agreement
                .signals
                .iter()
                .map(|s| {
                    let divergence = s.first_divergence.as_ref().map(|(at, obs, pred)| {
                        json!({
                            "at": format_rational(at),
                            "simulated": obs.as_u8(),
                            "symbolic": pred.as_u8(),
                        })
                    });
                    json!({
                        "signal": s.signal,
                        "agrees": s.agrees,
                        "divergence": divergence,
                    })
                })
                .collect();
            print_json(json!({
                "agree": agreement.all_agree(),
                "signals": signals,
                "reports": collapse(analyses.iter().map(report_json).collect()),
            }));
        }
    }
    if !agreement.all_agree() {
        return Err(Failure::error(
            "symbolic and simulated results disagree".to_string(),
        ));
    }
    Ok(hazard_exit(analyses.iter().map(|a| a.report.class)))
}

fn load_netlist(path: &PathBuf) -> Result<Netlist, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::error(format!("cannot read {}: {err}", path.display())))?;
    parse_netlist(&text)
        .map_err(|err| Failure::error(format!("{}: {err}", path.display())))
}

fn build_stimulus(
    netlist: &Netlist,
    from: &str,
    to: &str,
    at: &str,
) -> Result<Stimulus, Failure> {
    let at = parse_rational(at)
        .ok_or_else(|| Failure::error(format!("`{at}` is not a valid time")))?;
    Stimulus::from_bit_strings(netlist, from, to, at)
        .map_err(|err| Failure::error(err.to_string()))
}

fn parse_delays(pairs: &[String]) -> Result<DelayMap, Failure> {
    let mut delays = DelayMap::new();
    for pair in pairs {
        let (symbol, value) = pair.split_once('=').ok_or_else(|| {
            Failure::error(format!("`{pair}` is not of the form SYM=VALUE"))
        })?;
        let value: Rational = parse_rational(value)
            .ok_or_else(|| Failure::error(format!("`{value}` is not a valid delay value")))?;
        if delays.insert(symbol.to_string(), value).is_some() {
            return Err(Failure::error(format!("delay `{symbol}` given twice")));
        }
    }
    Ok(delays)
}

/// The outputs to classify: the requested one, or all declared outputs.
fn select_outputs(netlist: &Netlist, requested: Option<&str>) -> Result<Vec<String>, Failure> {
    match requested {
        Some(name) => {
            if netlist.output_driver(name).is_none() {
                return Err(Failure::error(format!("output `{name}` is not declared")));
            }
            Ok(vec![name.to_string()])
        }
        None => {
            if netlist.outputs().is_empty() {
                return Err(Failure::error("the netlist declares no outputs"));
            }
            Ok(netlist
                .outputs()
                .iter()
                .map(|(name, _)| name.clone())
                .collect())
        }
    }
}

fn hazard_line(report: &HazardReport) -> String {
    let label = match report.class {
        HazardClass::None => return format!("no hazard on {}", report.output),
        HazardClass::Static0 => "STATIC-0",
        HazardClass::Static1 => "STATIC-1",
        HazardClass::Dynamic => "DYNAMIC",
    };
    let mut line = format!("{label} hazard on {}: {}", report.output, report.waveform);
    for pulse in &report.pulses {
        line.push_str(&format!(
            "; pulse [{}, {}), width {}",
            pulse.start, pulse.end, pulse.width
        ));
    }
    line
}

/// Exit code 2 when any classification is a hazard, 0 otherwise.
fn hazard_exit(classes: impl IntoIterator<Item = HazardClass>) -> u8 {
    if classes.into_iter().any(HazardClass::is_hazard) {
        EXIT_HAZARD
    } else {
        EXIT_CLEAN
    }
}

/// A single-element array collapses to its element, so the common
/// one-output case stays a flat object.
fn collapse(mut values: Vec<Value>) -> Value {
    if values.len() == 1 {
        values.pop().expect("length checked")
    } else {
        Value::Array(values)
    }
}

fn trace_json(trace: &Trace) -> Value {
    let events: Vec<Value> = trace
        .events()
        .iter()
        .map(|e| {
            json!({
                "time": format_rational(&e.time),
                "signal": e.signal,
                "value": e.new_value.as_u8(),
            })
        })
        .collect();
    let settled: BTreeMap<&str, u8> = trace
        .settled_values()
        .iter()
        .map(|(name, bit)| (name.as_str(), bit.as_u8()))
        .collect();
    json!({
        "events": events,
        "settle_time": format_rational(trace.settle_time()),
        "settled": settled,
    })
}

fn print_json(value: Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("JSON serializes")
    );
}

/// Color is opt-in through `HAZARD_COLOR=1`.
fn color_enabled() -> bool {
    std::env::var("HAZARD_COLOR").is_ok_and(|v| v == "1")
}
