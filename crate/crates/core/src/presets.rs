//! Benchmark network presets.
//!
//! Presets carry the documented topology and dynamics of the two
//! benchmark networks (layer spans, thresholds where stated, refractory
//! lengths) with neutral unit weights. Task-specific weight sets ship
//! separately as config files that override preset fields.

use std::ops::Range;

use crate::encoders::{DecodeMode, DecodePolicy};
use crate::processor::RegisterBank;

/// A complete network definition: the register image plus the layer
/// structure and decode policy that give it meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDef {
    pub name: String,
    pub bank: RegisterBank,
    pub input_span: Range<usize>,
    pub output_span: Range<usize>,
    pub decode: DecodePolicy,
}

fn feedforward_bank(
    n: usize,
    inputs: Range<usize>,
    outputs: Range<usize>,
    refractory: u32,
) -> RegisterBank {
    let mut bank = RegisterBank::new(n).expect("preset size is positive");
    bank.thresholds = vec![1; n];
    bank.weights = vec![1; n];
    for src in inputs {
        for dst in outputs.clone() {
            bank.connections
                .set(src, dst, true)
                .expect("preset indices in range");
        }
    }
    bank.refractory = refractory;
    bank
}

/// Iris flower classifier: 4 input neurons (one per feature) fully
/// feeding output neurons 4–6, threshold 1, refractory 2. The first
/// output to spike names the class.
pub fn iris() -> NetworkDef {
    NetworkDef {
        name: "iris".to_string(),
        bank: feedforward_bank(7, 0..4, 4..7, 2),
        input_span: 0..4,
        output_span: 4..7,
        decode: DecodePolicy {
            outputs: 4..7,
            mode: DecodeMode::FirstSpike,
            class_names: vec![
                "Iris-setosa".to_string(),
                "Iris-versicolor".to_string(),
                "Iris-virginica".to_string(),
            ],
        },
    }
}

/// 8×8 digit classifier: 64 input neurons (one per pixel) fully feeding
/// output neurons 64–73, refractory 4. The highest accumulated spike
/// count names the digit.
pub fn mnist8x8() -> NetworkDef {
    NetworkDef {
        name: "mnist8x8".to_string(),
        bank: feedforward_bank(74, 0..64, 64..74, 4),
        input_span: 0..64,
        output_span: 64..74,
        decode: DecodePolicy {
            outputs: 64..74,
            mode: DecodeMode::SpikeCount,
            class_names: (0..10).map(|d| d.to_string()).collect(),
        },
    }
}

pub fn by_name(name: &str) -> Option<NetworkDef> {
    match name {
        "iris" => Some(iris()),
        "mnist8x8" => Some(mnist8x8()),
        _ => None,
    }
}
