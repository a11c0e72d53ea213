//! Experiment configuration: a single JSON file describing the network,
//! the encoder, the run, and where reports go.
//!
//! A `preset` name expands to a full network definition first; any
//! explicit field then overrides the expanded value. Dataset paths
//! resolve relative to the config file's directory, report paths
//! relative to the working directory (and both accept absolute paths).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use snnsim_core::encoders::{DecodeMode, DecodePolicy};
use snnsim_core::presets::{self, NetworkDef};
use snnsim_core::processor::{LeakSetting, RegisterBank, TraceDepth};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub network: NetworkSection,
    pub encoder: EncoderSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub report: ReportSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Half-open `[start, end)` neuron span driven by the encoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_span: Option<(usize, usize)>,
    /// Half-open `[start, end)` neuron span read by the decoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_span: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u8>>,
    /// One bitstring per source neuron; character `d` enables the
    /// connection to destination `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connections: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refractory: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leak_step: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leak_mode: Option<LeakModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decode: Option<DecodeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum LeakModeName {
    Fixed,
    Euler,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EulerSection {
    pub tau_m: f64,
    pub c_m: f64,
    pub dt: f64,
    #[serde(default)]
    pub i_bias: f64,
}

impl Default for EulerSection {
    fn default() -> Self {
        Self {
            tau_m: 2.0,
            c_m: 1.0,
            dt: 1.0,
            i_bias: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeName {
    FirstSpike,
    SpikeCount,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EncoderSection {
    pub kind: EncoderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mins: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxs: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_threshold: Option<u8>,
}

impl Default for EncoderSection {
    fn default() -> Self {
        Self {
            kind: EncoderKind::Tabular,
            dataset: None,
            mins: None,
            maxs: None,
            levels: None,
            gap: None,
            pixel_threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderKind {
    Tabular,
    Image8x8,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_extra_cycles")]
    pub extra_cycles: usize,
    #[serde(default)]
    pub trace_depth: TraceDepthName,
    #[serde(default)]
    pub transport: Transport,
}

fn default_extra_cycles() -> usize {
    8
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            extra_cycles: default_extra_cycles(),
            trace_depth: TraceDepthName::default(),
            transport: Transport::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TraceDepthName {
    #[default]
    Full,
    SpikesOnly,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum Transport {
    #[default]
    Direct,
    LoopbackUart,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_txt: Option<PathBuf>,
}

/// Fully expanded encoder settings.
#[derive(Debug, Clone, PartialEq)]
pub enum EncoderSettings {
    Tabular {
        mins: [f64; 4],
        maxs: [f64; 4],
        levels: u32,
        gap: u32,
    },
    Image8x8 {
        pixel_threshold: u8,
    },
}

/// A validated, fully expanded experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub network: NetworkDef,
    pub dynamics: LeakSetting,
    pub encoder: EncoderSettings,
    pub dataset: Option<PathBuf>,
    pub run: RunSection,
    pub report: ReportSection,
}

impl Experiment {
    pub fn trace_depth(&self) -> TraceDepth {
        match self.run.trace_depth {
            TraceDepthName::Full => TraceDepth::Full,
            TraceDepthName::SpikesOnly => TraceDepth::SpikesOnly,
        }
    }
}

fn field_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_connection_rows(rows: &[String], n: usize) -> Result<Vec<Vec<bool>>, CliError> {
    if rows.len() != n {
        return Err(field_err(
            "network.connections",
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    rows.iter()
        .enumerate()
        .map(|(src, row)| {
            if row.len() != n {
                return Err(field_err(
                    "network.connections",
                    format!("row {src} has {} bits, expected {n}", row.len()),
                ));
            }
            row.chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(field_err(
                        "network.connections",
                        format!("row {src} contains {other:?}"),
                    )),
                })
                .collect()
        })
        .collect()
}

fn connection_rows_to_strings(bank: &RegisterBank) -> Vec<String> {
    (0..bank.n)
        .map(|src| {
            bank.connections
                .row(src)
                .expect("row in range")
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect()
        })
        .collect()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "config".to_string(),
            message: format!("{}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            field: "config".to_string(),
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Expand presets, apply overrides, and validate dimensions.
    /// `base_dir` anchors relative dataset paths.
    pub fn expand(&self, base_dir: &Path) -> Result<Experiment, CliError> {
        let net = &self.network;

        let mut def: NetworkDef = match &net.preset {
            Some(name) => presets::by_name(name)
                .ok_or_else(|| field_err("network.preset", format!("unknown preset {name:?}")))?,
            None => {
                let n = net
                    .n
                    .ok_or_else(|| field_err("network.n", "required when no preset is given"))?;
                if n == 0 {
                    return Err(field_err("network.n", "must be at least 1"));
                }
                let input_span = net.input_span.ok_or_else(|| {
                    field_err("network.input_span", "required when no preset is given")
                })?;
                let output_span = net.output_span.ok_or_else(|| {
                    field_err("network.output_span", "required when no preset is given")
                })?;
                let mut bank = RegisterBank::new(n).map_err(CliError::Processor)?;
                bank.thresholds = vec![1; n];
                bank.weights = vec![1; n];
                for src in input_span.0..input_span.1 {
                    for dst in output_span.0..output_span.1 {
                        if src < n && dst < n {
                            bank.connections
                                .set(src, dst, true)
                                .map_err(|e| field_err("network.connections", e.to_string()))?;
                        }
                    }
                }
                NetworkDef {
                    name: "custom".to_string(),
                    bank,
                    input_span: input_span.0..input_span.1,
                    output_span: output_span.0..output_span.1,
                    decode: DecodePolicy {
                        outputs: output_span.0..output_span.1,
                        mode: DecodeMode::SpikeCount,
                        class_names: Vec::new(),
                    },
                }
            }
        };

        if let Some(n) = net.n {
            if n != def.bank.n {
                return Err(field_err(
                    "network.n",
                    format!("{} conflicts with preset size {}", n, def.bank.n),
                ));
            }
        }
        let n = def.bank.n;

        if let Some(span) = net.input_span {
            def.input_span = span.0..span.1;
        }
        if let Some(span) = net.output_span {
            def.output_span = span.0..span.1;
            def.decode.outputs = span.0..span.1;
        }
        if def.input_span.end > n || def.input_span.is_empty() {
            return Err(field_err(
                "network.input_span",
                format!("{:?} out of range for {n} neurons", def.input_span),
            ));
        }
        if def.output_span.end > n || def.output_span.is_empty() {
            return Err(field_err(
                "network.output_span",
                format!("{:?} out of range for {n} neurons", def.output_span),
            ));
        }

        if let Some(thresholds) = &net.thresholds {
            if thresholds.len() != n {
                return Err(field_err(
                    "network.thresholds",
                    format!("expected {n} entries, got {}", thresholds.len()),
                ));
            }
            def.bank.thresholds = thresholds.clone();
        }
        if let Some(weights) = &net.weights {
            if weights.len() != n {
                return Err(field_err(
                    "network.weights",
                    format!("expected {n} entries, got {}", weights.len()),
                ));
            }
            def.bank.weights = weights.clone();
        }
        if let Some(rows) = &net.connections {
            for (src, row) in parse_connection_rows(rows, n)?.into_iter().enumerate() {
                def.bank
                    .connections
                    .set_row(src, &row)
                    .map_err(|e| field_err("network.connections", e.to_string()))?;
            }
        }
        if let Some(refractory) = net.refractory {
            def.bank.refractory = refractory;
        }
        if let Some(leak_step) = net.leak_step {
            def.bank.leak_step = leak_step;
        }
        if let Some(decode) = net.decode {
            def.decode.mode = match decode {
                DecodeName::FirstSpike => DecodeMode::FirstSpike,
                DecodeName::SpikeCount => DecodeMode::SpikeCount,
            };
        }
        if let Some(names) = &net.class_names {
            def.decode.class_names = names.clone();
        }

        let dynamics = match net.leak_mode.unwrap_or(LeakModeName::Fixed) {
            LeakModeName::Fixed => LeakSetting::FixedLeak,
            LeakModeName::Euler => {
                let e = net.euler.unwrap_or_default();
                LeakSetting::Euler {
                    tau_m: e.tau_m,
                    c_m: e.c_m,
                    dt: e.dt,
                    i_bias: e.i_bias,
                }
            }
        };

        let encoder = match self.encoder.kind {
            EncoderKind::Tabular => {
                if def.input_span.len() != 4 {
                    return Err(field_err(
                        "network.input_span",
                        format!(
                            "tabular encoder drives 4 input neurons, span has {}",
                            def.input_span.len()
                        ),
                    ));
                }
                EncoderSettings::Tabular {
                    mins: self.encoder.mins.unwrap_or([0.0; 4]),
                    maxs: self.encoder.maxs.unwrap_or([1.0; 4]),
                    levels: self.encoder.levels.unwrap_or(4),
                    gap: self.encoder.gap.unwrap_or(3),
                }
            }
            EncoderKind::Image8x8 => {
                if def.input_span.len() != 64 {
                    return Err(field_err(
                        "network.input_span",
                        format!(
                            "image encoder drives 64 input neurons, span has {}",
                            def.input_span.len()
                        ),
                    ));
                }
                EncoderSettings::Image8x8 {
                    pixel_threshold: self.encoder.pixel_threshold.unwrap_or(128),
                }
            }
        };
        if let EncoderSettings::Tabular {
            mins,
            maxs,
            levels,
            gap,
        } = &encoder
        {
            snnsim_core::encoders::TabularEncoder::new(*mins, *maxs, *levels, *gap)
                .map_err(|e| field_err("encoder", e.to_string()))?;
        }

        let dataset = self.encoder.dataset.as_ref().map(|p| {
            if p.is_absolute() {
                p.clone()
            } else {
                base_dir.join(p)
            }
        });

        Ok(Experiment {
            network: def,
            dynamics,
            encoder,
            dataset,
            run: self.run.clone(),
            report: self.report.clone(),
        })
    }
}

/// Render an experiment back into a config file with every field
/// explicit (no preset reference), suitable for re-parsing.
#[allow(clippy::field_reassign_with_default)]
pub fn to_explicit_config(exp: &Experiment) -> ConfigFile {
    let (leak_mode, euler) = match exp.dynamics {
        LeakSetting::FixedLeak => (LeakModeName::Fixed, None),
        LeakSetting::Euler {
            tau_m,
            c_m,
            dt,
            i_bias,
        } => (
            LeakModeName::Euler,
            Some(EulerSection {
                tau_m,
                c_m,
                dt,
                i_bias,
            }),
        ),
    };
    let encoder = match exp.encoder {
        EncoderSettings::Tabular {
            mins,
            maxs,
            levels,
            gap,
        } => EncoderSection {
            kind: EncoderKind::Tabular,
            dataset: exp.dataset.clone(),
            mins: Some(mins),
            maxs: Some(maxs),
            levels: Some(levels),
            gap: Some(gap),
            pixel_threshold: None,
        },
        EncoderSettings::Image8x8 { pixel_threshold } => EncoderSection {
            kind: EncoderKind::Image8x8,
            dataset: exp.dataset.clone(),
            mins: None,
            maxs: None,
            levels: None,
            gap: None,
            pixel_threshold: Some(pixel_threshold),
        },
    };
    ConfigFile {
        network: NetworkSection {
            preset: None,
            n: Some(exp.network.bank.n),
            input_span: Some((exp.network.input_span.start, exp.network.input_span.end)),
            output_span: Some((exp.network.output_span.start, exp.network.output_span.end)),
            thresholds: Some(exp.network.bank.thresholds.clone()),
            weights: Some(exp.network.bank.weights.clone()),
            connections: Some(connection_rows_to_strings(&exp.network.bank)),
            refractory: Some(exp.network.bank.refractory),
            leak_step: Some(exp.network.bank.leak_step),
            leak_mode: Some(leak_mode),
            euler,
            decode: Some(match exp.network.decode.mode {
                DecodeMode::FirstSpike => DecodeName::FirstSpike,
                DecodeMode::SpikeCount => DecodeName::SpikeCount,
            }),
            class_names: Some(exp.network.decode.class_names.clone()),
        },
        encoder,
        run: exp.run.clone(),
        report: exp.report.clone(),
    }
}
