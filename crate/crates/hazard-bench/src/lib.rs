//! Shared fixtures for the criterion benches.

use hazard_core::circuit::{parse_netlist, Netlist, Stimulus};
use hazard_core::corpus::{random_netlist, random_stimulus, CircuitGenConfig};
use hazard_core::waveform::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The two-level reference circuit with a falling stimulus that produces a
/// static-1 hazard.
pub fn two_level() -> (Netlist, Stimulus) {
    let netlist = parse_netlist(
        "input  X1 X2 X3 X4\n\
         gate   N1 NOT X3    delay=tau\n\
         gate   A1 AND X1 X2 delay=tau\n\
         gate   A2 AND N1 X4 delay=tau\n\
         gate   O1 OR  A1 A2 delay=tau\n\
         output Y = O1\n",
    )
    .expect("reference netlist parses");
    let stimulus = Stimulus::from_bit_strings(
        &netlist,
        "1111",
        "1001",
        Rational::from_integer(5.into()),
    )
    .expect("reference stimulus is valid");
    (netlist, stimulus)
}

/// A seeded random circuit of the given size with one random stimulus.
pub fn seeded_random(inputs: usize, gates: usize, seed: u64) -> (Netlist, Stimulus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = CircuitGenConfig {
        inputs,
        gates,
        ..CircuitGenConfig::default()
    };
    let netlist = random_netlist(&mut rng, &config);
    let stimulus = random_stimulus(&mut rng, &netlist, Rational::from_integer(0.into()));
    (netlist, stimulus)
}
