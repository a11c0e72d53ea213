//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line on success. Run with
//! `cargo test -p snnsim-cli --test acceptance`.

#![allow(clippy::needless_range_loop)]

mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use oracle::{ref_run, RefLeak};
use snnsim_cli::config::ConfigFile;
use snnsim_cli::report::{report_csv, write_outputs};
use snnsim_cli::runner::run_experiment;
use snnsim_core::interconnect::{ConnectionMatrix, SpikeVector};
use snnsim_core::lif::{LeakMode, LifParams, LifState};
use snnsim_core::presets;
use snnsim_core::processor::{LeakSetting, Processor, RegisterBank, TraceDepth};
use snnsim_core::uart;
use snnsim_core::uart::{host_session, DeviceEndpoint, LoopbackChannel};

fn pass(criterion: u32, what: &str) {
    println!("[PASS] criterion {criterion}: {what}");
}

fn workspace_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn load_experiment(config: &str) -> snnsim_cli::config::Experiment {
    let path = workspace_path(config);
    ConfigFile::load(&path)
        .unwrap()
        .expand(path.parent().unwrap())
        .unwrap()
}

// Criterion 1: transaction arithmetic: segments (740, 74, 74, 10),
// total 898, 93.54 ms ± 0.01 ms; n = 1 gives 4 and 416.68 µs ± 0.01 µs.
#[test]
fn criterion_1_transaction_arithmetic() {
    let plan = uart::transaction_count(74).unwrap();
    assert_eq!(
        (
            plan.connection_list,
            plan.threshold,
            plan.weight,
            plan.impulse
        ),
        (740, 74, 74, 10)
    );
    assert_eq!(plan.total, 898);
    let time = uart::programming_time(&plan);
    assert!(
        (time - 93.54e-3).abs() <= 0.01e-3,
        "93.54 ms expected, got {time}"
    );

    let single = uart::transaction_count(1).unwrap();
    assert_eq!(single.total, 4);
    let time = uart::programming_time(&single);
    assert!(
        (time - 416.68e-6).abs() <= 0.01e-6,
        "416.68 µs expected, got {time}"
    );
    pass(1, "transaction counts and programming times match");
}

// Criterion 2: serializer/planner identity for every n in [1, 128].
#[test]
fn criterion_2_serializer_planner_identity() {
    for n in 1..=128 {
        let bank = RegisterBank::new(n).unwrap();
        let image = uart::serialize_registers(&bank);
        let plan = uart::transaction_count(n).unwrap();
        assert_eq!(image.len() as u64, plan.total, "n={n}");
    }
    pass(2, "image length equals transaction total for n in [1, 128]");
}

// Criterion 3: 5-cycle end-to-end latency, identical for both presets.
#[test]
fn criterion_3_latency_reproduction() {
    let mut latencies = Vec::new();
    for def in [presets::iris(), presets::mnist8x8()] {
        // Preset defaults already satisfy weight >= threshold on every
        // enabled connection (both are 1).
        for (m, &w) in def.bank.weights.iter().enumerate() {
            assert!(w >= def.bank.thresholds[m]);
        }
        let n = def.bank.n;
        let mut impulse = SpikeVector::zeros(n);
        for i in def.input_span.clone() {
            impulse.set(i, true);
        }
        let mut proc = Processor::new(def.bank.clone(), LeakSetting::FixedLeak).unwrap();
        let trace = proc.run(&[impulse], 8, TraceDepth::Full).unwrap();
        let first_impulse = trace.first_impulse_cycle().unwrap();
        let first_output = trace.first_spike_cycle(def.output_span.clone()).unwrap();
        latencies.push((def.name.clone(), first_output - first_impulse));
    }
    assert_eq!(latencies[0].1, 5, "iris latency");
    assert_eq!(latencies[1].1, 5, "mnist latency");
    assert_eq!(
        latencies[0].1, latencies[1].1,
        "latency identical across presets"
    );
    pass(
        3,
        "first output spike lands exactly 5 cycles after the impulse on both presets",
    );
}

// Criterion 4: exact equivalence with the straight-line oracle over
// at least 1000 randomized cases per leak mode, trains up to 32 cycles.
#[test]
fn criterion_4_lif_oracle_equivalence() {
    let mut cases = 0u64;
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(0xACC4_0000 + seed);
        let inputs = rng.gen_range(1..=4);
        let weights: Vec<u8> = (0..inputs).map(|_| rng.gen_range(0..=255)).collect();
        let cycles = rng.gen_range(1..=32);
        let train: Vec<Vec<bool>> = (0..cycles)
            .map(|_| (0..inputs).map(|_| rng.gen_bool(0.4)).collect())
            .collect();

        // Fixed-leak case.
        let v_th = rng.gen_range(1..=300) as f64;
        let r_ref = rng.gen_range(0..=4);
        let lambda = rng.gen_range(0..=8) as f64;
        let params = LifParams::new(v_th, r_ref, weights.clone(), LeakMode::fixed(lambda)).unwrap();
        let expected = ref_run(RefLeak::Fixed { lambda }, v_th, r_ref, &weights, &train);
        let mut state = LifState::new();
        for (k, spikes) in train.iter().enumerate() {
            state = params.step(&state, spikes).unwrap();
            assert_eq!(
                (state.v, state.r, state.y),
                expected[k],
                "fixed seed {seed}"
            );
        }
        cases += 1;

        // Euler case.
        let tau_m: f64 = rng.gen_range(1.0..=10.0);
        let dt = rng.gen_range(0.1..=1.0) * tau_m.min(2.0);
        let c_m = rng.gen_range(0.5..=4.0);
        let i_bias = rng.gen_range(-1.0..=2.0);
        let v_th = rng.gen_range(1..=40) as f64 / 2.0;
        let params = LifParams::new(
            v_th,
            r_ref,
            weights.clone(),
            LeakMode::euler(tau_m, c_m, dt),
        )
        .unwrap()
        .with_bias(i_bias);
        let expected = ref_run(
            RefLeak::Euler {
                tau_m,
                c_m,
                dt,
                i_bias,
            },
            v_th,
            r_ref,
            &weights,
            &train,
        );
        let mut state = LifState::new();
        for (k, spikes) in train.iter().enumerate() {
            state = params.step(&state, spikes).unwrap();
            assert_eq!(
                (state.v, state.r, state.y),
                expected[k],
                "euler seed {seed}"
            );
        }
        cases += 1;
    }
    assert!(cases >= 2000);
    pass(
        4,
        "2000 randomized cases match the straight-line oracle exactly",
    );
}

// Criterion 5: refractory silence and reset-to-zero over at least 10^4
// randomized neuron-cycles.
#[test]
fn criterion_5_refractory_invariants() {
    let mut neuron_cycles = 0u64;
    for seed in 0..160u64 {
        let mut rng = StdRng::seed_from_u64(0x0EF5_0000 + seed);
        let n = rng.gen_range(2..=6);
        let mut bank = RegisterBank::new(n).unwrap();
        bank.thresholds = (0..n).map(|_| rng.gen_range(1..=5)).collect();
        bank.weights = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        for src in 0..n {
            for dst in 0..n {
                bank.connections.set(src, dst, rng.gen_bool(0.4)).unwrap();
            }
        }
        bank.refractory = rng.gen_range(0..=4);
        bank.leak_step = rng.gen_range(0..=2);
        let r_ref = bank.refractory;

        let ticks = rng.gen_range(20..=40);
        let schedule: Vec<SpikeVector> = (0..ticks)
            .map(|_| SpikeVector::from_bits((0..n).map(|_| rng.gen_bool(0.35)).collect()))
            .collect();

        let mut proc = Processor::new(bank, LeakSetting::FixedLeak).unwrap();
        let trace = proc.run(&schedule, 6, TraceDepth::Full).unwrap();
        neuron_cycles += (n as u64) * trace.records().len() as u64;

        for m in 0..n {
            let mut last_spike: Option<u64> = None;
            for record in trace.records() {
                let s = &record.neurons[m];
                assert!(s.r <= r_ref);
                if s.y {
                    assert_eq!(s.v, 0.0, "reset-to-zero violated at cycle {}", record.cycle);
                    if let Some(prev) = last_spike {
                        assert!(
                            record.cycle - prev > r_ref as u64,
                            "spike within refractory window: {} after {}",
                            record.cycle,
                            prev
                        );
                    }
                    last_spike = Some(record.cycle);
                }
            }
        }
    }
    assert!(
        neuron_cycles >= 10_000,
        "only {neuron_cycles} neuron-cycles"
    );
    pass(
        5,
        "no refractory violations over 10^4+ randomized neuron-cycles",
    );
}

// Criterion 6: routing equals the exhaustive pairwise AND oracle, and
// the Iris preset forwards input spikes to exactly outputs 4-6.
#[test]
fn criterion_6_routing_oracle() {
    for seed in 0..500u64 {
        let mut rng = StdRng::seed_from_u64(0x6006_0000 + seed);
        let n = rng.gen_range(1..=16);
        let mut matrix = ConnectionMatrix::new(n).unwrap();
        let mut bits = vec![vec![false; n]; n];
        for (src, row) in bits.iter_mut().enumerate() {
            for (dst, cell) in row.iter_mut().enumerate() {
                *cell = rng.gen_bool(0.5);
                matrix.set(src, dst, *cell).unwrap();
            }
        }
        let outputs: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let routed = matrix
            .route(&SpikeVector::from_bits(outputs.clone()))
            .unwrap();
        for dst in 0..n {
            for src in 0..n {
                assert_eq!(
                    routed[dst].get(src),
                    outputs[src] && bits[src][dst],
                    "seed {seed} {src}->{dst}"
                );
            }
        }
    }

    let iris = presets::iris();
    for src in 0..4 {
        let mut outputs = SpikeVector::zeros(7);
        outputs.set(src, true);
        let routed = iris.bank.connections.route(&outputs).unwrap();
        for dst in 0..7 {
            let expected = (4..7).contains(&dst);
            assert_eq!(
                routed[dst].any(),
                expected,
                "iris source {src} destination {dst}"
            );
        }
    }
    pass(
        6,
        "routing matches the pairwise AND oracle; iris forwards to outputs 4-6 only",
    );
}

// Criterion 7: the wire adds no semantics, and framing is exact.
#[test]
fn criterion_7_wire_transparency() {
    for def in [presets::iris(), presets::mnist8x8()] {
        let n = def.bank.n;
        let mut rng = StdRng::seed_from_u64(0x71BE + n as u64);
        let mut schedule: Vec<SpikeVector> = (0..50)
            .map(|_| SpikeVector::from_bits((0..n).map(|_| rng.gen_bool(0.2)).collect()))
            .collect();
        schedule.extend(std::iter::repeat_n(SpikeVector::zeros(n), 8));

        let mut direct = Processor::new(def.bank.clone(), LeakSetting::FixedLeak).unwrap();
        let direct_trace = direct.run(&schedule, 0, TraceDepth::Full).unwrap();

        let mut channel = LoopbackChannel::new(DeviceEndpoint::for_bank(&def.bank));
        let outcome = host_session(&mut channel, &def.bank, &schedule).unwrap();
        let wire_trace = outcome.spike_trace().unwrap();

        assert_eq!(direct_trace.records().len(), wire_trace.records().len());
        for (d, w) in direct_trace.records().iter().zip(wire_trace.records()) {
            assert_eq!(
                d.output_spikes(),
                w.output_spikes(),
                "{} cycle {}",
                def.name,
                d.cycle
            );
        }
    }

    for byte in 0..=255u8 {
        assert_eq!(uart::decode_8n1(&uart::encode_8n1(byte)).unwrap(), byte);
    }
    let mut rng = StdRng::seed_from_u64(0x517E);
    let stream: Vec<u8> = (0..10_000).map(|_| rng.gen()).collect();
    assert_eq!(
        uart::decode_stream(&uart::encode_stream(&stream)).unwrap(),
        stream
    );

    pass(
        7,
        "loopback sessions equal direct runs; 8N1 framing is exact to 10^4 bytes",
    );
}

// Criterion 8: shipped demonstration sets: each Iris prototype lights
// exactly one output neuron; each crafted digit yields its intended
// argmax output.
#[test]
fn criterion_8_classification_behavior() {
    let iris = load_experiment("configs/iris-demo.json");
    let outcome = run_experiment(&iris).unwrap();
    assert!(outcome.warnings.is_empty(), "{:?}", outcome.warnings);
    assert_eq!(outcome.samples.len(), 3);
    for sample in &outcome.samples {
        assert!(!sample.decision.no_decision);
        assert_eq!(
            Some(&sample.decision.label),
            sample.true_label.as_ref(),
            "sample {}",
            sample.index
        );
        let active_outputs = sample.decision.counts.iter().filter(|&&c| c > 0).count();
        assert_eq!(active_outputs, 1, "exactly one output neuron may spike");
    }

    let mnist = load_experiment("configs/mnist-demo.json");
    let outcome = run_experiment(&mnist).unwrap();
    assert_eq!(outcome.samples.len(), 10);
    for (digit, sample) in outcome.samples.iter().enumerate() {
        assert_eq!(sample.decision.class_index, digit, "digit {digit} argmax");
        assert_eq!(sample.decision.label, digit.to_string());
        assert!(!sample.decision.no_decision);
        let active_outputs = sample.decision.counts.iter().filter(|&&c| c > 0).count();
        assert_eq!(active_outputs, 1, "digit {digit} lights exactly one output");
    }
    pass(
        8,
        "demonstration sets classify every prototype with a single active output",
    );
}

// Criterion 9: byte-identical trace and report files across runs.
#[test]
fn criterion_9_determinism() {
    for config in ["configs/iris-demo.json", "configs/mnist-demo.json"] {
        let mut files: Vec<Vec<(PathBuf, Vec<u8>)>> = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut exp = load_experiment(config);
            exp.report.report_csv = Some(dir.path().join("report.csv"));
            exp.report.trace_csv = Some(dir.path().join("trace.csv"));
            exp.report.schedule_txt = Some(dir.path().join("schedule.txt"));

            let outcome = run_experiment(&exp).unwrap();
            let written = write_outputs(&exp, &outcome).unwrap();
            assert!(!report_csv(&outcome).is_empty());

            let mut contents: Vec<(PathBuf, Vec<u8>)> = written
                .into_iter()
                .map(|p| {
                    let rel = p.strip_prefix(dir.path()).unwrap().to_path_buf();
                    (rel, fs::read(&p).unwrap())
                })
                .collect();
            contents.sort();
            files.push(contents);
        }
        assert_eq!(files[0], files[1], "outputs differ for {config}");
    }
    pass(
        9,
        "repeated runs produce byte-identical report, trace, and schedule files",
    );
}
