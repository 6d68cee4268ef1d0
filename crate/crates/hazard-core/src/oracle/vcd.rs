//! Value change dump output for simulation traces.
//!
//! Times in a trace are exact rationals; VCD timestamps are integers. The
//! writer multiplies every time by the least common multiple of the event
//! denominators, so all timestamps stay exact, and notes the factor in a
//! `$comment` when it is not 1. The declared timescale is one picosecond
//! per tick. Outputs are declared as extra variables bound to their driving
//! signal's identifier code, so they change in lockstep without duplicated
//! value lines.

use std::io::{self, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::Trace;
use crate::circuit::Netlist;

/// Writes a complete VCD document for one trace.
pub fn write_vcd(trace: &Trace, netlist: &Netlist, out: &mut dyn Write) -> io::Result<()> {
    let scale = tick_scale(trace);
    writeln!(out, "$version hazard trace $end")?;
    writeln!(out, "$timescale 1 ps $end")?;
    if !scale.is_one() {
        writeln!(out, "$comment times scaled by {scale} ticks per unit $end")?;
    }
    writeln!(out, "$scope module top $end")?;
    let signals: Vec<&str> = netlist.signals().collect();
    for (index, name) in signals.iter().enumerate() {
        writeln!(out, "$var wire 1 {} {} $end", id_code(index), name)?;
    }
    for (name, driver) in netlist.outputs() {
        if name == driver {
            continue;
        }
        let index = signals
            .iter()
            .position(|s| s == driver)
            .expect("output driver is a declared signal");
        writeln!(out, "$var wire 1 {} {} $end", id_code(index), name)?;
    }
    writeln!(out, "$upscope $end")?;
    writeln!(out, "$enddefinitions $end")?;

    writeln!(out, "#0")?;
    writeln!(out, "$dumpvars")?;
    for (index, name) in signals.iter().enumerate() {
        let value = trace.initial_values()[*name];
        writeln!(out, "{}{}", value.as_u8(), id_code(index))?;
    }
    writeln!(out, "$end")?;

    let mut events = trace.events().iter().peekable();
    while let Some(first) = events.next() {
        let ticks = (&first.time * &scale).to_integer();
        writeln!(out, "#{ticks}")?;
        let index = signals
            .iter()
            .position(|s| *s == first.signal)
            .expect("event signal is declared");
        writeln!(out, "{}{}", first.new_value.as_u8(), id_code(index))?;
        while let Some(event) = events.peek() {
            if event.time != first.time {
                break;
            }
            let event = events.next().expect("peeked");
            let index = signals
                .iter()
                .position(|s| *s == event.signal)
                .expect("event signal is declared");
            writeln!(out, "{}{}", event.new_value.as_u8(), id_code(index))?;
        }
    }
    Ok(())
}

/// The least common multiple of all event-time denominators.
fn tick_scale(trace: &Trace) -> BigInt {
    let mut scale = BigInt::one();
    for event in trace.events() {
        scale = scale.lcm(event.time.denom());
    }
    scale
}

/// Maps a signal index to a VCD identifier code over the printable ASCII
/// range `!`..=`~`, shortest codes first.
fn id_code(mut index: usize) -> String {
    let mut code = String::new();
    loop {
        code.push((b'!' + (index % 94) as u8) as char);
        index /= 94;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    code
}
