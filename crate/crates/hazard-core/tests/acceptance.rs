//! Acceptance gate: eight end-to-end criteria, one test each, covering the
//! reference circuit goldens, the algebra, the classifier, and the
//! agreement between the symbolic engine and the event-driven simulator.
//! Each test prints a single line naming its criterion and verdict.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hazard_core::analyze::{analyze, classify, enumerate_transitions, propagate, TransitionSet};
use hazard_core::circuit::{parse_netlist, Netlist, Stimulus};
use hazard_core::corpus::{
    random_delay_assignment, random_expr, random_netlist, random_stimulus, CircuitGenConfig,
};
use hazard_core::expr::{arithmetize, Bit, BoolExpr};
use hazard_core::oracle::{simulate, trace_vs_waveform, DelayModel};
use hazard_core::waveform::{DelayMap, Rational, SymbolicTime, Waveform};
use hazard_core::HazardClass;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn tau(value: Rational) -> DelayMap {
    [("tau".to_string(), value)].into_iter().collect()
}

fn two_level() -> Netlist {
    parse_netlist(
        "input  X1 X2 X3 X4\n\
         gate   N1 NOT X3    delay=tau\n\
         gate   A1 AND X1 X2 delay=tau\n\
         gate   A2 AND N1 X4 delay=tau\n\
         gate   O1 OR  A1 A2 delay=tau\n\
         output Y = O1\n",
    )
    .expect("reference netlist parses")
}

fn falling(netlist: &Netlist) -> Stimulus {
    Stimulus::from_bit_strings(netlist, "1111", "1001", rat(5, 1)).expect("stimulus is valid")
}

fn verdict(criterion: &str, condition: bool, detail: &str) {
    let line = format!(
        "criterion {criterion}: {} ({detail})",
        if condition { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(condition, "{line}");
}

#[test]
fn criterion_1_reference_output_waveform() {
    let start = Instant::now();
    let netlist = two_level();
    let report = classify(&netlist, &falling(&netlist), "Y").expect("classification succeeds");
    let elapsed = start.elapsed();

    let golden = "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))";
    verdict(
        "1 reference output waveform",
        report.waveform.to_string() == golden
            && report.class == HazardClass::Static1
            && report.pulses.len() == 1
            && report.pulses[0].start.to_string() == "5+2*tau"
            && report.pulses[0].end.to_string() == "5+3*tau"
            && report.pulses[0].width.to_string() == "tau"
            && elapsed < Duration::from_secs(1),
        &format!(
            "waveform {}, class {:?}, {} pulse(s), {elapsed:.2?}",
            report.waveform,
            report.class,
            report.pulses.len()
        ),
    );
}

#[test]
fn criterion_2_reference_intermediate_waveforms() {
    let netlist = two_level();
    let waveforms = propagate(&netlist, &falling(&netlist)).expect("propagation succeeds");
    let golden: BTreeMap<&str, &str> = [
        ("X1", "1"),
        ("X2", "1 - h(t-5)"),
        ("X3", "1 - h(t-5)"),
        ("X4", "1"),
        ("N1", "h(t-(5+tau))"),
        ("A1", "1 - h(t-(5+tau))"),
        ("A2", "h(t-(5+2*tau))"),
        ("O1", "1 - h(t-(5+2*tau)) + h(t-(5+3*tau))"),
    ]
    .into_iter()
    .collect();

    let rendered: BTreeMap<&str, String> = waveforms
        .iter()
        .map(|(name, w)| (name.as_str(), w.to_string()))
        .collect();
    let matches = golden.len() == rendered.len()
        && golden
            .iter()
            .all(|(name, text)| rendered.get(name).map(String::as_str) == Some(*text));
    verdict(
        "2 reference intermediate waveforms",
        matches,
        &format!("{} signals, all exact", rendered.len()),
    );
}

#[test]
fn criterion_3_arithmetization_agrees_with_truth_tables() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5501);
    let vars: Vec<String> = (b'a'..=b'f').map(|c| (c as char).to_string()).collect();

    let mut checked = 0usize;
    for _ in 0..1000 {
        let expr = random_expr(&mut rng, &vars, 4);
        let poly = arithmetize(&expr).expect("well-formed expression arithmetizes");
        for mask in 0u32..1 << vars.len() {
            let env: BTreeMap<String, Bit> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), Bit::from(mask >> i & 1 == 1)))
                .collect();
            let expect = expr.eval(&env).expect("expression evaluates");
            let got = poly.eval(&env).expect("polynomial evaluates");
            assert_eq!(
                got,
                BigInt::from(expect.as_u8()),
                "{expr} vs {poly} at mask {mask:06b}"
            );
        }
        let other = random_expr(&mut rng, &vars, 3);
        let lhs = arithmetize(&BoolExpr::not(BoolExpr::And(vec![
            expr.clone(),
            other.clone(),
        ])))
        .expect("negated conjunction arithmetizes");
        let rhs = arithmetize(&BoolExpr::Or(vec![
            BoolExpr::not(expr),
            BoolExpr::not(other),
        ]))
        .expect("disjoined negations arithmetize");
        assert_eq!(lhs, rhs, "negation must distribute as exact polynomials");
        checked += 1;
    }
    let elapsed = start.elapsed();
    verdict(
        "3 arithmetization agrees with truth tables",
        checked == 1000 && elapsed < Duration::from_secs(10),
        &format!("{checked} expressions, 64 assignments each, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_4_step_products_take_the_latest_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5504);
    let mut checked = 0usize;
    for _ in 0..500 {
        // A shared chain of comparable instants; each factor is a unit step
        // at one of them.
        let chain_len = rng.random_range(1..=5usize);
        let mut chain: Vec<SymbolicTime> = Vec::with_capacity(chain_len);
        let mut at = SymbolicTime::zero();
        for _ in 0..chain_len {
            let constant = rng.random_range(0..=3i64);
            let count = rng.random_range(0..=2u64);
            let bump = if constant == 0 && count == 0 {
                SymbolicTime::from_integer(1)
            } else {
                SymbolicTime::from_integer(constant) + SymbolicTime::scaled_symbol(count, "tau")
            };
            at = at + bump;
            chain.push(at.clone());
        }
        let n = rng.random_range(1..=5usize);
        let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..chain.len())).collect();
        let factors: Vec<Waveform> = picks
            .iter()
            .map(|&i| Waveform::step_at(chain[i].clone()))
            .collect();

        let mut product = factors[0].clone();
        for factor in &factors[1..] {
            product = product.and(factor).expect("chain instants are comparable");
        }
        let latest = chain[*picks.iter().max().expect("at least one factor")].clone();
        assert_eq!(
            product,
            Waveform::step_at(latest.clone()),
            "product of steps must be the step at the latest instant"
        );

        let delays = tau(rat(rng.random_range(1..=6), rng.random_range(1..=3)));
        let end = latest.eval(&delays).expect("instant evaluates") + rat(1, 1);
        for j in 0..100 {
            let point = &end * rat(j, 99);
            let expect = Bit::from(
                factors
                    .iter()
                    .all(|f| f.eval(&delays, &point).expect("factor evaluates") == Bit::ONE),
            );
            assert_eq!(
                product.eval(&delays, &point).expect("product evaluates"),
                expect,
                "at t = {point}"
            );
        }
        checked += 1;
    }
    verdict(
        "4 step products take the latest edge",
        checked == 500,
        &format!("{checked} products, symbolic and 100-point sampled"),
    );
}

#[test]
fn criterion_5_simulator_confirms_symbolic_waveforms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5505);
    let mut checked = 0usize;
    for _ in 0..200 {
        let config = CircuitGenConfig {
            inputs: rng.random_range(2..=6),
            gates: rng.random_range(3..=12),
            ..CircuitGenConfig::default()
        };
        let netlist = random_netlist(&mut rng, &config);
        let switch_time = rat(rng.random_range(0..=4), 1);
        let stimulus = random_stimulus(&mut rng, &netlist, switch_time);
        let waveforms = propagate(&netlist, &stimulus)
            .expect("multiples of one symbol keep every edge pair comparable");
        let delays = random_delay_assignment(&mut rng, &netlist);
        let trace =
            simulate(&netlist, &stimulus, &delays, DelayModel::Pure).expect("simulation runs");

        let agreement =
            trace_vs_waveform(&trace, &waveforms, &delays).expect("waveforms evaluate");
        assert!(
            agreement.all_agree(),
            "netlist:\n{}\nmismatch: {:?}",
            netlist.to_text(),
            agreement.first_mismatch()
        );
        for (name, waveform) in &waveforms {
            assert_eq!(
                trace.transition_count(name),
                waveform.transition_count(),
                "transition counts must match on {name}"
            );
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    verdict(
        "5 simulator confirms symbolic waveforms",
        checked == 200 && elapsed < Duration::from_secs(60),
        &format!("{checked} random circuits, every signal sampled, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_6_consensus_term_removes_the_hazard() {
    let plain = parse_netlist(
        "input  X B C\n\
         gate   N  NOT X    delay=tau\n\
         gate   A1 AND X B  delay=tau\n\
         gate   A2 AND N C  delay=tau\n\
         gate   O  OR A1 A2 delay=tau\n\
         output Y = O\n",
    )
    .expect("mux netlist parses");
    let consensus = parse_netlist(
        "input  X B C\n\
         gate   N  NOT X       delay=tau\n\
         gate   A1 AND X B     delay=tau\n\
         gate   A2 AND N C     delay=tau\n\
         gate   A3 AND B C     delay=tau\n\
         gate   O  OR A1 A2 A3 delay=tau\n\
         output Y = O\n",
    )
    .expect("consensus netlist parses");

    let falling_select = |n: &Netlist| {
        Stimulus::from_bit_strings(n, "111", "011", rat(0, 1)).expect("stimulus is valid")
    };

    let plain_report = classify(&plain, &falling_select(&plain), "Y").expect("classification");
    let consensus_report =
        classify(&consensus, &falling_select(&consensus), "Y").expect("classification");

    let plain_trace = simulate(
        &plain,
        &falling_select(&plain),
        &tau(rat(1, 1)),
        DelayModel::Pure,
    )
    .expect("simulation runs");
    let consensus_trace = simulate(
        &consensus,
        &falling_select(&consensus),
        &tau(rat(1, 1)),
        DelayModel::Pure,
    )
    .expect("simulation runs");

    verdict(
        "6 consensus term removes the hazard",
        plain_report.class == HazardClass::Static1
            && plain_report.waveform.to_string() == "1 - h(t-2*tau) + h(t-3*tau)"
            && consensus_report.class == HazardClass::None
            && consensus_report.waveform.to_string() == "1"
            && plain_trace.transition_count("O") == 2
            && consensus_trace.transition_count("O") == 0,
        &format!(
            "plain {:?} with {} simulated output transitions, consensus {:?} with {}",
            plain_report.class,
            plain_trace.transition_count("O"),
            consensus_report.class,
            consensus_trace.transition_count("O"),
        ),
    );
}

#[test]
fn criterion_7_zero_delays_cannot_glitch() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_5507);
    let mut swept = 0usize;
    for _ in 0..30 {
        let config = CircuitGenConfig {
            inputs: rng.random_range(2..=6),
            gates: rng.random_range(3..=10),
            ..CircuitGenConfig::default()
        };
        let netlist = random_netlist(&mut rng, &config).with_uniform_delay(SymbolicTime::zero());
        let found = enumerate_transitions(&netlist, "Y", TransitionSet::Hamming1)
            .expect("zero delays keep every edge pair comparable");
        assert!(
            found.is_empty(),
            "zero-delay netlist glitched:\n{}",
            netlist.to_text()
        );
        swept += 1;
    }
    verdict(
        "7 zero delays cannot glitch",
        swept == 30,
        &format!("{swept} random circuits, single-bit sweeps all clean"),
    );
}

#[test]
fn criterion_8_boundary_samples_are_right_continuous() {
    let netlist = two_level();
    let analysis = analyze(&netlist, &falling(&netlist), "Y").expect("analysis succeeds");
    let delays = tau(rat(1, 1));
    let w = &analysis.report.waveform;
    let at = |n: i64, d: i64| w.eval(&delays, &rat(n, d)).expect("waveform evaluates");

    verdict(
        "8 boundary samples are right-continuous",
        at(7, 1) == Bit::ZERO
            && at(8, 1) == Bit::ONE
            && at(55, 8) == Bit::ONE
            && at(63, 8) == Bit::ZERO
            && at(0, 1) == Bit::ONE,
        "pulse edges hold the new value exactly at the edge instant",
    );
}
