//! Terminal rendering of simulation traces.
//!
//! Each signal becomes one row of track characters: `_` while low, `▔`
//! while high, and `|` at an instant where the signal changes. Columns are
//! the distinct event times of the trace, labelled in a ruler line above
//! the tracks. The layout divides time at events rather than to scale, so
//! narrow pulses stay visible no matter how short they are.

use super::Trace;
use crate::circuit::Netlist;
use crate::expr::Bit;
use crate::waveform::{format_rational, Rational};

const EDGE_COLOR: &str = "\x1b[1;31m";
const RESET: &str = "\x1b[0m";

/// Renders every declared signal of the netlist as a labelled track. With
/// `color` set, edges are wrapped in ANSI bold red.
pub fn render_ascii(trace: &Trace, netlist: &Netlist, color: bool) -> String {
    let mut times: Vec<Rational> = trace.events().iter().map(|e| e.time.clone()).collect();
    times.sort();
    times.dedup();
    let labels: Vec<String> = times.iter().map(format_rational).collect();
    let segment = labels.iter().map(String::len).max().unwrap_or(0).max(3);
    let name_width = netlist
        .signals()
        .map(str::len)
        .max()
        .expect("netlist has signals");

    let mut lines = Vec::new();
    if times.is_empty() {
        lines.push("(no transitions)".to_string());
    } else {
        let mut ruler = " ".repeat(name_width + 1);
        for label in &labels {
            ruler.push_str(&format!("{label:>width$}", width = segment + 1));
        }
        lines.push(ruler);
    }

    for name in netlist.signals() {
        let mut row = format!("{name:>name_width$} ");
        let mut level = trace.initial_values()[name];
        row.push_str(&track(level).repeat(segment));
        for at in &times {
            let next = trace.value_at(name, at).expect("signal present in trace");
            if next != level {
                if color {
                    row.push_str(EDGE_COLOR);
                    row.push('|');
                    row.push_str(RESET);
                } else {
                    row.push('|');
                }
            } else {
                row.push_str(track(level));
            }
            row.push_str(&track(next).repeat(segment));
            level = next;
        }
        lines.push(row);
    }
    lines.join("\n") + "\n"
}

fn track(level: Bit) -> &'static str {
    if level.as_bool() {
        "▔"
    } else {
        "_"
    }
}
