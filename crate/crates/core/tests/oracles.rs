//! Independent reference implementations checked against the library.
//!
//! Every oracle here is a straight-line transcription of the update
//! rules, written without the library's abstractions, so an agreement
//! failure points at a real defect rather than a shared assumption.

#![allow(clippy::needless_range_loop)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use snnsim_core::encoders::{TabularEncoder, TabularSample};
use snnsim_core::interconnect::{ConnectionMatrix, SpikeVector};
use snnsim_core::lif::{LeakMode, LifParams, LifState};
use snnsim_core::processor::{LeakSetting, Processor, RegisterBank, TraceDepth};

#[derive(Clone, Copy)]
enum OracleLeak {
    Euler {
        tau_m: f64,
        c_m: f64,
        dt: f64,
        i_bias: f64,
    },
    Fixed {
        lambda: f64,
    },
}

/// Straight-line single-neuron update: membrane rule, then threshold,
/// reset, and refractory, cycle by cycle.
fn oracle_neuron_run(
    leak: OracleLeak,
    v_th: f64,
    r_ref: u32,
    weights: &[u8],
    train: &[Vec<bool>],
) -> Vec<(f64, u32, bool)> {
    let mut v = 0.0f64;
    let mut r = 0u32;
    let mut out = Vec::with_capacity(train.len());
    for spikes in train {
        let mut sum = 0.0;
        for j in 0..weights.len() {
            if spikes[j] {
                sum += weights[j] as f64;
            }
        }
        let v_tilde = match leak {
            OracleLeak::Euler {
                tau_m,
                c_m,
                dt,
                i_bias,
            } => (1.0 - dt / tau_m) * v + (dt / c_m) * (sum + i_bias),
            OracleLeak::Fixed { lambda } => {
                let leak_term = if v != 0.0 { lambda } else { 0.0 };
                let x = v + sum - leak_term;
                if x < 0.0 {
                    0.0
                } else {
                    x
                }
            }
        };
        let y = v_tilde >= v_th && r == 0;
        v = if y || r > 0 { 0.0 } else { v_tilde };
        r = if y { r_ref } else { r.saturating_sub(1) };
        out.push((v, r, y));
    }
    out
}

fn random_train(rng: &mut StdRng, inputs: usize, cycles: usize) -> Vec<Vec<bool>> {
    (0..cycles)
        .map(|_| (0..inputs).map(|_| rng.gen_bool(0.4)).collect())
        .collect()
}

#[test]
fn lif_fixed_leak_matches_oracle_over_1000_seeds() {
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let inputs = rng.gen_range(1..=4);
        let weights: Vec<u8> = (0..inputs).map(|_| rng.gen_range(0..=255)).collect();
        let v_th = rng.gen_range(1..=300) as f64;
        let r_ref = rng.gen_range(0..=4);
        let lambda = rng.gen_range(0..=8) as f64;
        let cycles = rng.gen_range(1..=32);
        let train = random_train(&mut rng, inputs, cycles);

        let params = LifParams::new(v_th, r_ref, weights.clone(), LeakMode::fixed(lambda)).unwrap();
        let expected =
            oracle_neuron_run(OracleLeak::Fixed { lambda }, v_th, r_ref, &weights, &train);

        let mut state = LifState::new();
        for (k, spikes) in train.iter().enumerate() {
            state = params.step(&state, spikes).unwrap();
            let (v, r, y) = expected[k];
            assert_eq!(
                (state.v, state.r, state.y),
                (v, r, y),
                "seed {seed} cycle {k}"
            );
        }
    }
}

#[test]
fn lif_euler_matches_oracle_over_1000_seeds() {
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(0x0E11_0000 + seed);
        let inputs = rng.gen_range(1..=4);
        let weights: Vec<u8> = (0..inputs).map(|_| rng.gen_range(0..=20)).collect();
        let v_th = rng.gen_range(1..=40) as f64 / 2.0;
        let r_ref = rng.gen_range(0..=4);
        let tau_m: f64 = rng.gen_range(1.0..=10.0);
        let dt = rng.gen_range(0.1..=1.0) * tau_m.min(2.0);
        let c_m = rng.gen_range(0.5..=4.0);
        let i_bias = rng.gen_range(-1.0..=2.0);
        let cycles = rng.gen_range(1..=32);
        let train = random_train(&mut rng, inputs, cycles);

        let params = LifParams::new(
            v_th,
            r_ref,
            weights.clone(),
            LeakMode::euler(tau_m, c_m, dt),
        )
        .unwrap()
        .with_bias(i_bias);
        let expected = oracle_neuron_run(
            OracleLeak::Euler {
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
            let (v, r, y) = expected[k];
            assert_eq!(
                (state.v, state.r, state.y),
                (v, r, y),
                "seed {seed} cycle {k}"
            );
        }
    }
}

#[test]
fn lif_iris_input_relay_example() {
    // Unit-weight input neuron, threshold 1, refractory 2, no leak:
    // a 4-cycle solid train relays as spike / silence / silence / spike.
    let weights = vec![1u8];
    let train: Vec<Vec<bool>> = vec![vec![true]; 4];
    let expected = oracle_neuron_run(OracleLeak::Fixed { lambda: 0.0 }, 1.0, 2, &weights, &train);
    let spikes: Vec<bool> = expected.iter().map(|&(_, _, y)| y).collect();
    assert_eq!(spikes, vec![true, false, false, true]);

    let params = LifParams::new(1.0, 2, weights, LeakMode::fixed(0.0)).unwrap();
    let mut state = LifState::new();
    let mut module_spikes = Vec::new();
    for s in &train {
        state = params.step(&state, s).unwrap();
        module_spikes.push(state.y);
    }
    assert_eq!(module_spikes, spikes);
}

type RefRecord = (u64, Vec<bool>, Vec<(f64, u32, bool)>);

/// Straight-line whole-network reference: explicit input registers, an
/// impulse sampling stage, and a synchronous update, all in one loop.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn reference_network_run(
    n: usize,
    conn: &[Vec<bool>],
    thresholds: &[u8],
    weights: &[u8],
    r_ref: u32,
    lambda: f64,
    schedule: &[Vec<bool>],
    extra: usize,
) -> Vec<RefRecord> {
    let mut v = vec![0.0f64; n];
    let mut r = vec![0u32; n];
    let mut y = vec![false; n];
    let mut ext_sampled = vec![false; n];
    let mut input_reg = vec![vec![false; n + 1]; n];

    let ticks = schedule.len() + extra;
    let mut records = Vec::new();
    for k in 0..ticks {
        let impulse = schedule.get(k).cloned().unwrap_or_else(|| vec![false; n]);
        records.push((
            k as u64,
            impulse.clone(),
            (0..n).map(|m| (v[m], r[m], y[m])).collect(),
        ));

        let mut v2 = vec![0.0; n];
        let mut r2 = vec![0u32; n];
        let mut y2 = vec![false; n];
        for m in 0..n {
            let mut sum = 0.0;
            for line in 0..=n {
                if input_reg[m][line] {
                    sum += weights[m] as f64;
                }
            }
            let leak_term = if v[m] != 0.0 { lambda } else { 0.0 };
            let mut v_tilde = v[m] + sum - leak_term;
            if v_tilde < 0.0 {
                v_tilde = 0.0;
            }
            let spike = v_tilde >= thresholds[m] as f64 && r[m] == 0;
            v2[m] = if spike || r[m] > 0 { 0.0 } else { v_tilde };
            r2[m] = if spike { r_ref } else { r[m].saturating_sub(1) };
            y2[m] = spike;
        }

        let mut next_reg = vec![vec![false; n + 1]; n];
        for src in 0..n {
            for dst in 0..n {
                next_reg[dst][src] = y[src] && conn[src][dst];
            }
        }
        for m in 0..n {
            next_reg[m][n] = ext_sampled[m];
        }

        input_reg = next_reg;
        ext_sampled = impulse;
        v = v2;
        r = r2;
        y = y2;
    }
    if ticks > 0 {
        records.push((
            ticks as u64,
            vec![false; n],
            (0..n).map(|m| (v[m], r[m], y[m])).collect(),
        ));
    }
    records
}

fn random_bank(rng: &mut StdRng, n: usize) -> (RegisterBank, Vec<Vec<bool>>) {
    let mut bank = RegisterBank::new(n).unwrap();
    bank.thresholds = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    bank.weights = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    let mut conn = vec![vec![false; n]; n];
    for (src, row) in conn.iter_mut().enumerate() {
        for (dst, cell) in row.iter_mut().enumerate() {
            *cell = rng.gen_bool(0.45);
            bank.connections.set(src, dst, *cell).unwrap();
        }
    }
    bank.refractory = rng.gen_range(0..=3);
    bank.leak_step = rng.gen_range(0..=2);
    (bank, conn)
}

#[test]
fn processor_matches_reference_loop_on_small_networks() {
    for seed in 0..300u64 {
        let mut rng = StdRng::seed_from_u64(0xBEEF_0000 + seed);
        let n = rng.gen_range(1..=4);
        let (bank, conn) = random_bank(&mut rng, n);
        let cycles = rng.gen_range(0..=32);
        let schedule: Vec<Vec<bool>> = (0..cycles)
            .map(|_| (0..n).map(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let extra = rng.gen_range(0..=6);

        let expected = reference_network_run(
            n,
            &conn,
            &bank.thresholds,
            &bank.weights,
            bank.refractory,
            bank.leak_step as f64,
            &schedule,
            extra,
        );

        let mut proc = Processor::new(bank, LeakSetting::FixedLeak).unwrap();
        let sched: Vec<SpikeVector> = schedule
            .iter()
            .map(|bits| SpikeVector::from_bits(bits.clone()))
            .collect();
        let trace = proc.run(&sched, extra, TraceDepth::Full).unwrap();

        assert_eq!(trace.records().len(), expected.len(), "seed {seed}");
        for (record, (cycle, impulse, states)) in trace.records().iter().zip(&expected) {
            assert_eq!(record.cycle, *cycle, "seed {seed}");
            assert_eq!(record.impulse.as_slice(), impulse.as_slice(), "seed {seed}");
            for (m, sample) in record.neurons.iter().enumerate() {
                let (v, r, y) = states[m];
                assert_eq!(
                    (sample.v, sample.r, sample.y),
                    (v, r, y),
                    "seed {seed} cycle {cycle} neuron {m}"
                );
            }
        }
    }
}

#[test]
fn run_equals_folded_ticks() {
    for seed in 0..100u64 {
        let mut rng = StdRng::seed_from_u64(0xF01D_0000 + seed);
        let n = rng.gen_range(1..=5);
        let (bank, _) = random_bank(&mut rng, n);
        let cycles = rng.gen_range(0..=16);
        let schedule: Vec<SpikeVector> = (0..cycles)
            .map(|_| SpikeVector::from_bits((0..n).map(|_| rng.gen_bool(0.3)).collect()))
            .collect();
        let extra = rng.gen_range(0..=4);

        let mut run_proc = Processor::new(bank.clone(), LeakSetting::FixedLeak).unwrap();
        let trace = run_proc.run(&schedule, extra, TraceDepth::Full).unwrap();

        let mut fold_proc = Processor::new(bank, LeakSetting::FixedLeak).unwrap();
        let silent = SpikeVector::zeros(n);
        let mut published = Vec::new();
        for k in 0..schedule.len() + extra {
            let impulse = schedule.get(k).unwrap_or(&silent);
            published.push(fold_proc.tick(impulse).unwrap());
        }

        // Published outputs of tick k appear in trace record k + 1.
        for (k, outputs) in published.iter().enumerate() {
            let record = &trace.records()[k + 1];
            assert_eq!(&record.output_spikes(), outputs, "seed {seed} tick {k}");
        }
        assert_eq!(run_proc.cycle(), fold_proc.cycle());
        assert_eq!(run_proc.states(), fold_proc.states());
    }
}

#[test]
fn routing_matches_pairwise_and_oracle() {
    for seed in 0..500u64 {
        let mut rng = StdRng::seed_from_u64(0x0A0B_0000 + seed);
        let n = 6;
        let mut matrix = ConnectionMatrix::new(n).unwrap();
        let mut conn = vec![vec![false; n]; n];
        for (src, row) in conn.iter_mut().enumerate() {
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
                let expected = outputs[src] && conn[src][dst];
                assert_eq!(routed[dst].get(src), expected, "seed {seed} {src}->{dst}");
            }
        }
    }
}

#[test]
fn matrix_tracks_shadow_copy_at_full_size() {
    let n = 74;
    let mut matrix = ConnectionMatrix::new(n).unwrap();
    let mut shadow = vec![vec![false; n]; n];
    let mut rng = StdRng::seed_from_u64(0x5AD0);
    // Several passes of random point toggles over every entry.
    for _ in 0..3 {
        for src in 0..n {
            for dst in 0..n {
                let enabled = rng.gen_bool(0.5);
                matrix.set(src, dst, enabled).unwrap();
                shadow[src][dst] = enabled;
            }
        }
    }
    for (src, row) in shadow.iter().enumerate() {
        for (dst, &expected) in row.iter().enumerate() {
            assert_eq!(matrix.get(src, dst).unwrap(), expected);
        }
    }
}

#[test]
fn tabular_quantization_matches_oracle() {
    for seed in 0..400u64 {
        let mut rng = StdRng::seed_from_u64(0x7AB0_0000 + seed);
        let mins = [0.0, -1.0, 10.0, 0.5];
        let maxs = [4.0, 1.0, 20.0, 2.5];
        let levels = rng.gen_range(1..=8);
        let encoder = TabularEncoder::new(mins, maxs, levels, 2).unwrap();
        let features = [
            rng.gen_range(-1.0..6.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(5.0..25.0),
            rng.gen_range(0.0..3.0),
        ];
        let counts = encoder.spike_counts(&TabularSample::new(features)).unwrap();
        for i in 0..4 {
            let norm = ((features[i] - mins[i]) / (maxs[i] - mins[i])).clamp(0.0, 1.0);
            let expected = (norm * levels as f64).round() as u32;
            assert_eq!(counts[i], expected, "seed {seed} feature {i}");
        }
    }
}

#[test]
fn frame_bit_order_matches_arithmetic_oracle() {
    // Independent derivation: data bit i of byte b is (b >> i) & 1, and
    // the frame is [0, d0..d7, 1].
    let mut rng = StdRng::seed_from_u64(0xF4A3);
    for _ in 0..256 {
        let byte: u8 = rng.gen();
        let bits = snnsim_core::uart::encode_8n1(byte);
        assert!(!bits[0]);
        assert!(bits[9]);
        for (i, &bit) in bits[1..9].iter().enumerate() {
            assert_eq!(bit, (byte >> i) & 1 == 1);
        }
    }
}
