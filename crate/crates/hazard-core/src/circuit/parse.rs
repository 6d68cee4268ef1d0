//! Text format for netlists.
//!
//! ```text
//! # two-level AND-OR with an inverted input
//! input  X1 X2 X3 X4
//! gate   N1 NOT X3            delay=tau
//! gate   A1 AND X1 X2         delay=tau
//! gate   A2 AND N1 X4         delays=tau,2*tau
//! gate   O1 OR  A1 A2         delay=1.5
//! output Y = O1
//! ```
//!
//! Each line is one declaration; `#` starts a comment. A gate line names the
//! gate, its kind, and its input signals. The optional trailing field sets
//! the input delays: `delay=EXPR` applies one expression to every input,
//! `delays=E1,E2,...` gives one per input positionally, and omitting the
//! field defaults every input to the symbol `tau`. Delay expressions are
//! sums of nonnegative rational constants, bare symbols, and scaled symbols:
//! `0`, `1.5`, `tau`, `2*tau`, `1.5+2*tau`.
//!
//! An output line is `output NAME = RHS`. The right-hand side is usually a
//! signal name, but any expression in the boolean grammar is accepted; the
//! expression is instantiated as a tree of gates with default delays, named
//! `NAME_1`, `NAME_2`, ... avoiding existing signals.

use std::collections::BTreeSet;

use super::{Gate, GateKind, Netlist, NetlistError};
use crate::expr::{is_identifier, parse_expr, BoolExpr, ExprError};
use crate::waveform::{parse_rational, SymbolicTime};

/// The delay symbol applied when a gate line omits its delay field.
pub(crate) const DEFAULT_DELAY_SYMBOL: &str = "tau";

/// Parses the netlist text format.
pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    let mut inputs: Vec<String> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut raw_outputs: Vec<RawOutput> = Vec::new();

    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = match raw_line.find('#') {
            Some(at) => &raw_line[..at],
            None => raw_line,
        };
        let tokens = tokenize(line);
        let Some(&(keyword_col, keyword)) = tokens.first() else {
            continue;
        };
        match keyword {
            "input" => {
                if tokens.len() < 2 {
                    return Err(syntax(line_no, keyword_col, "input line names no signals"));
                }
                for &(col, name) in &tokens[1..] {
                    if !is_identifier(name) {
                        return Err(syntax(
                            line_no,
                            col,
                            format!("`{name}` is not a valid signal name"),
                        ));
                    }
                    inputs.push(name.to_string());
                }
            }
            "gate" => gates.push(parse_gate_line(line_no, &tokens)?),
            "output" => raw_outputs.push(parse_output_line(line_no, line, &tokens)?),
            other => {
                return Err(syntax(
                    line_no,
                    keyword_col,
                    format!("expected `input`, `gate`, or `output`, found `{other}`"),
                ));
            }
        }
    }

    let mut used: BTreeSet<String> = inputs.iter().cloned().collect();
    used.extend(gates.iter().map(|g| g.name.clone()));
    let mut outputs = Vec::with_capacity(raw_outputs.len());
    for raw in raw_outputs {
        let driver = match raw.rhs {
            RawDriver::Signal(name) => name,
            RawDriver::Expr { expr, column } => instantiate_expr(
                &expr,
                &raw.name,
                raw.line,
                column,
                &mut used,
                &mut gates,
            )?,
        };
        outputs.push((raw.name, driver));
    }

    Netlist::new(inputs, gates, outputs)
}

struct RawOutput {
    name: String,
    rhs: RawDriver,
    line: usize,
}

enum RawDriver {
    Signal(String),
    Expr { expr: BoolExpr, column: usize },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into `(1-based column, token)` pairs on whitespace.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (at, byte) in line.bytes().enumerate() {
        if byte.is_ascii_whitespace() {
            if let Some(from) = start.take() {
                tokens.push((from + 1, &line[from..at]));
            }
        } else if start.is_none() {
            start = Some(at);
        }
    }
    if let Some(from) = start {
        tokens.push((from + 1, &line[from..]));
    }
    tokens
}

fn parse_gate_line(line_no: usize, tokens: &[(usize, &str)]) -> Result<Gate, NetlistError> {
    if tokens.len() < 4 {
        return Err(syntax(
            line_no,
            tokens[0].0,
            "gate line needs a name, a kind, and at least one input",
        ));
    }
    let (name_col, name) = tokens[1];
    if !is_identifier(name) {
        return Err(syntax(
            line_no,
            name_col,
            format!("`{name}` is not a valid gate name"),
        ));
    }
    let (kind_col, kind_word) = tokens[2];
    let kind = GateKind::from_keyword(kind_word).ok_or_else(|| {
        syntax(line_no, kind_col, format!("unknown gate kind `{kind_word}`"))
    })?;

    let mut input_names = Vec::new();
    let mut delay_field: Option<(usize, &str)> = None;
    for (i, &(col, token)) in tokens[3..].iter().enumerate() {
        if token.starts_with("delay=") || token.starts_with("delays=") {
            if i + 4 != tokens.len() {
                return Err(syntax(line_no, col, "the delay field must come last"));
            }
            delay_field = Some((col, token));
        } else {
            if !is_identifier(token) {
                return Err(syntax(
                    line_no,
                    col,
                    format!("`{token}` is not a valid signal name"),
                ));
            }
            input_names.push(token.to_string());
        }
    }
    if input_names.is_empty() {
        return Err(syntax(line_no, tokens[0].0, "gate has no inputs"));
    }

    let delays = match delay_field {
        None => vec![SymbolicTime::symbol(DEFAULT_DELAY_SYMBOL); input_names.len()],
        Some((col, field)) => {
            if let Some(expr) = field.strip_prefix("delay=") {
                let delay = parse_delay_expr(expr)
                    .map_err(|message| syntax(line_no, col, message))?;
                vec![delay; input_names.len()]
            } else {
                let list = field.strip_prefix("delays=").expect("checked prefix");
                let parts: Vec<&str> = list.split(',').collect();
                if parts.len() != input_names.len() {
                    return Err(syntax(
                        line_no,
                        col,
                        format!(
                            "expected {} delay expressions, got {}",
                            input_names.len(),
                            parts.len()
                        ),
                    ));
                }
                parts
                    .iter()
                    .map(|part| {
                        parse_delay_expr(part).map_err(|message| syntax(line_no, col, message))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        }
    };

    Ok(Gate {
        name: name.to_string(),
        kind,
        inputs: input_names,
        input_delays: delays,
    })
}

/// Parses a delay expression: a `+`-separated sum of nonnegative rational
/// constants, symbols, and `count*symbol` terms.
fn parse_delay_expr(text: &str) -> Result<SymbolicTime, String> {
    if text.is_empty() {
        return Err("empty delay expression".to_string());
    }
    let mut total = SymbolicTime::zero();
    for term in text.split('+') {
        if term.is_empty() {
            return Err(format!("empty term in delay expression `{text}`"));
        }
        if let Some((count, symbol)) = term.split_once('*') {
            let count: u64 = count
                .parse()
                .map_err(|_| format!("`{count}` is not a nonnegative integer count"))?;
            if !is_identifier(symbol) {
                return Err(format!("`{symbol}` is not a valid delay symbol"));
            }
            total = total + SymbolicTime::scaled_symbol(count, symbol);
        } else if is_identifier(term) {
            total = total + SymbolicTime::symbol(term);
        } else if let Some(value) = parse_rational(term) {
            if value < num_rational::BigRational::from_integer(0.into()) {
                return Err(format!("delay constant `{term}` is negative"));
            }
            total = total + SymbolicTime::from_constant(value);
        } else {
            return Err(format!("cannot parse delay term `{term}`"));
        }
    }
    Ok(total)
}

fn parse_output_line(
    line_no: usize,
    line: &str,
    tokens: &[(usize, &str)],
) -> Result<RawOutput, NetlistError> {
    let Some(eq_at) = line.find('=') else {
        return Err(syntax(line_no, tokens[0].0, "output line needs `= SIGNAL`"));
    };
    let lhs = &line[..eq_at];
    let lhs_tokens = tokenize(lhs);
    if lhs_tokens.len() != 2 || lhs_tokens[0].1 != "output" {
        return Err(syntax(
            line_no,
            tokens[0].0,
            "output line must read `output NAME = ...`",
        ));
    }
    let (name_col, name) = lhs_tokens[1];
    if !is_identifier(name) {
        return Err(syntax(
            line_no,
            name_col,
            format!("`{name}` is not a valid output name"),
        ));
    }
    let rhs = &line[eq_at + 1..];
    let rhs_trimmed = rhs.trim();
    let rhs_col = eq_at + 2 + (rhs.len() - rhs.trim_start().len());
    if rhs_trimmed.is_empty() {
        return Err(syntax(line_no, eq_at + 1, "output has no driving signal"));
    }
    let driver = if is_identifier(rhs_trimmed) {
        RawDriver::Signal(rhs_trimmed.to_string())
    } else {
        let expr = parse_expr(rhs_trimmed).map_err(|err| match err {
            ExprError::Syntax { offset, message } => {
                syntax(line_no, rhs_col + offset, message)
            }
            other => syntax(line_no, rhs_col, other.to_string()),
        })?;
        RawDriver::Expr {
            expr,
            column: rhs_col,
        }
    };
    Ok(RawOutput {
        name: name.to_string(),
        rhs: driver,
        line: line_no,
    })
}

/// Instantiates an output expression as gates. Each operator becomes one
/// gate with default delays; leaf variables must name existing signals
/// (checked during netlist validation).
fn instantiate_expr(
    expr: &BoolExpr,
    out_name: &str,
    line: usize,
    column: usize,
    used: &mut BTreeSet<String>,
    gates: &mut Vec<Gate>,
) -> Result<String, NetlistError> {
    let (kind, children): (GateKind, Vec<&BoolExpr>) = match expr {
        BoolExpr::Var(name) => return Ok(name.clone()),
        BoolExpr::Const(_) => {
            return Err(syntax(
                line,
                column,
                "output expressions cannot contain constants",
            ));
        }
        BoolExpr::Not(inner) => (GateKind::Not, vec![inner]),
        BoolExpr::And(xs) => (GateKind::And, xs.iter().collect()),
        BoolExpr::Or(xs) => (GateKind::Or, xs.iter().collect()),
        BoolExpr::Nand(xs) => (GateKind::Nand, xs.iter().collect()),
        BoolExpr::Nor(xs) => (GateKind::Nor, xs.iter().collect()),
        BoolExpr::Xor(a, b) => (GateKind::Xor, vec![a, b]),
    };
    let inputs = children
        .into_iter()
        .map(|child| instantiate_expr(child, out_name, line, column, used, gates))
        .collect::<Result<Vec<_>, _>>()?;
    let name = fresh_name(out_name, used);
    gates.push(Gate::uniform(
        name.clone(),
        kind,
        inputs,
        SymbolicTime::symbol(DEFAULT_DELAY_SYMBOL),
    ));
    Ok(name)
}

fn fresh_name(base: &str, used: &mut BTreeSet<String>) -> String {
    for counter in 1.. {
        let candidate = format!("{base}_{counter}");
        if !used.contains(&candidate) {
            used.insert(candidate.clone());
            return candidate;
        }
    }
    unreachable!("some counter is unused");
}
