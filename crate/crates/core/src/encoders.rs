//! Dataset-to-spike front end and output decoding.
//!
//! Images: an 8×8 grayscale frame binarizes through a strict `>`
//! threshold; pixel (row, col) drives input neuron `8·row + col`, all 64
//! bits asserted simultaneously for one cycle.
//!
//! Tabular samples: each of the four features min-max normalizes, then
//! quantizes to `k = round(norm · levels)` spikes emitted on that
//! feature's input line at cycles `0, gap, 2·gap, …`. Relaying a whole
//! burst through an input neuron needs `gap` to exceed the network's
//! refractory length; the compatibility check below flags schedules that
//! would lose spikes.

use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::Path;

use thiserror::Error;

use crate::interconnect::SpikeVector;
use crate::processor::{classify, classify_first_spike, ProcessorError, SimTrace};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("feature {index} is not finite")]
    NonFiniteFeature { index: usize },
    #[error("invalid encoder parameters: {0}")]
    InvalidParams(String),
    #[error("dataset row {row}: {message}")]
    Dataset { row: usize, message: String },
    #[error("schedule line {line}: {message}")]
    ScheduleParse { line: usize, message: String },
    #[error("pgm: {0}")]
    Pgm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Decode(#[from] ProcessorError),
}

/// 8×8 grayscale frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage8x8 {
    pixels: [u8; 64],
}

impl GrayImage8x8 {
    pub fn new(pixels: [u8; 64]) -> Self {
        Self { pixels }
    }

    pub fn from_slice(pixels: &[u8]) -> Result<Self, EncodeError> {
        let pixels: [u8; 64] = pixels.try_into().map_err(|_| {
            EncodeError::InvalidParams(format!("expected 64 pixels, got {}", pixels.len()))
        })?;
        Ok(Self { pixels })
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[8 * row + col]
    }

    pub fn pixels(&self) -> &[u8; 64] {
        &self.pixels
    }
}

/// One tabular sample: four features plus an optional true label.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularSample {
    pub features: [f64; 4],
    pub label: Option<String>,
}

impl TabularSample {
    pub fn new(features: [f64; 4]) -> Self {
        Self {
            features,
            label: None,
        }
    }
}

/// Ordered per-cycle impulse vectors for one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeSchedule {
    width: usize,
    cycles: Vec<SpikeVector>,
}

impl SpikeSchedule {
    pub fn new(width: usize, cycles: Vec<SpikeVector>) -> Result<Self, EncodeError> {
        for (i, c) in cycles.iter().enumerate() {
            if c.len() != width {
                return Err(EncodeError::InvalidParams(format!(
                    "cycle {i} is {} bits wide, schedule is {width}",
                    c.len()
                )));
            }
        }
        Ok(Self { width, cycles })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn cycles(&self) -> &[SpikeVector] {
        &self.cycles
    }

    /// Place the schedule's bits at `offset` inside `n`-wide impulse
    /// vectors, zero elsewhere.
    pub fn expand(&self, n: usize, offset: usize) -> Result<Vec<SpikeVector>, EncodeError> {
        if offset + self.width > n {
            return Err(EncodeError::InvalidParams(format!(
                "schedule of width {} at offset {offset} does not fit {n} neurons",
                self.width
            )));
        }
        Ok(self
            .cycles
            .iter()
            .map(|c| {
                let mut v = SpikeVector::zeros(n);
                for (i, bit) in c.iter().enumerate() {
                    if bit {
                        v.set(offset + i, true);
                    }
                }
                v
            })
            .collect())
    }

    /// Text form: one `cycle:bitstring` line per cycle, bit 0 leftmost.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.cycles.iter().enumerate() {
            let bits: String = c.iter().map(|b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{k}:{bits}");
        }
        out
    }

    /// Parse one block of `cycle:bitstring` lines.
    pub fn from_text(text: &str) -> Result<Self, EncodeError> {
        let mut cycles = Vec::new();
        let mut width = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (cycle, bits) = line.split_once(':').ok_or(EncodeError::ScheduleParse {
                line: lineno + 1,
                message: "expected cycle:bitstring".into(),
            })?;
            let cycle: usize = cycle.parse().map_err(|_| EncodeError::ScheduleParse {
                line: lineno + 1,
                message: format!("bad cycle index {cycle:?}"),
            })?;
            if cycle != cycles.len() {
                return Err(EncodeError::ScheduleParse {
                    line: lineno + 1,
                    message: format!("expected cycle {}, got {cycle}", cycles.len()),
                });
            }
            let parsed: Result<Vec<bool>, _> = bits
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(EncodeError::ScheduleParse {
                        line: lineno + 1,
                        message: format!("bad bit {other:?}"),
                    }),
                })
                .collect();
            let parsed = parsed?;
            if *width.get_or_insert(parsed.len()) != parsed.len() {
                return Err(EncodeError::ScheduleParse {
                    line: lineno + 1,
                    message: "inconsistent bitstring width".into(),
                });
            }
            cycles.push(SpikeVector::from_bits(parsed));
        }
        Ok(Self {
            width: width.unwrap_or(0),
            cycles,
        })
    }
}

/// Binarize an image: bit `p` is set iff pixel `p` is strictly above the
/// threshold.
pub fn encode_image(img: &GrayImage8x8, pixel_threshold: u8) -> SpikeVector {
    SpikeVector::from_bits(img.pixels.iter().map(|&p| p > pixel_threshold).collect())
}

/// Single-cycle image schedule: all 64 bits at cycle 0.
pub fn image_schedule(img: &GrayImage8x8, pixel_threshold: u8) -> SpikeSchedule {
    SpikeSchedule {
        width: 64,
        cycles: vec![encode_image(img, pixel_threshold)],
    }
}

/// Burst-count encoder for 4-feature tabular data.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularEncoder {
    pub mins: [f64; 4],
    pub maxs: [f64; 4],
    /// Maximum spikes per feature.
    pub levels: u32,
    /// Cycles between consecutive spikes of one burst.
    pub gap: u32,
}

impl TabularEncoder {
    pub fn new(mins: [f64; 4], maxs: [f64; 4], levels: u32, gap: u32) -> Result<Self, EncodeError> {
        if levels < 1 {
            return Err(EncodeError::InvalidParams(
                "levels must be at least 1".into(),
            ));
        }
        if gap < 1 {
            return Err(EncodeError::InvalidParams("gap must be at least 1".into()));
        }
        for i in 0..4 {
            let ordered = mins[i].is_finite() && maxs[i].is_finite() && mins[i] < maxs[i];
            if !ordered {
                return Err(EncodeError::InvalidParams(format!(
                    "feature {i}: min {} must be below max {}",
                    mins[i], maxs[i]
                )));
            }
        }
        Ok(Self {
            mins,
            maxs,
            levels,
            gap,
        })
    }

    /// Quantized spike count per feature: `round(norm · levels)` with the
    /// normalized value clamped to [0, 1].
    pub fn spike_counts(&self, sample: &TabularSample) -> Result<[u32; 4], EncodeError> {
        let mut counts = [0u32; 4];
        for (i, count) in counts.iter_mut().enumerate() {
            let f = sample.features[i];
            if !f.is_finite() {
                return Err(EncodeError::NonFiniteFeature { index: i });
            }
            let norm = ((f - self.mins[i]) / (self.maxs[i] - self.mins[i])).clamp(0.0, 1.0);
            *count = (norm * self.levels as f64).round() as u32;
        }
        Ok(counts)
    }

    /// Encode one sample into parallel bursts. The schedule always spans
    /// `(levels − 1)·gap + 1` cycles; feature `i`'s `k_i` spikes land on
    /// bit `i` at cycles `0, gap, …, (k_i − 1)·gap`.
    pub fn encode(&self, sample: &TabularSample) -> Result<SpikeSchedule, EncodeError> {
        let counts = self.spike_counts(sample)?;
        let len = ((self.levels - 1) * self.gap + 1) as usize;
        let gap = self.gap as usize;
        let cycles = (0..len)
            .map(|c| {
                let mut v = SpikeVector::zeros(4);
                if c % gap == 0 {
                    let slot = (c / gap) as u32;
                    for (i, &k) in counts.iter().enumerate() {
                        if slot < k {
                            v.set(i, true);
                        }
                    }
                }
                v
            })
            .collect();
        Ok(SpikeSchedule { width: 4, cycles })
    }
}

/// Whether burst spikes survive the input layer's refractory window. A
/// relay neuron that fires needs more than `refractory` cycles before the
/// next burst spike, so anything at or below it loses spikes.
pub fn gap_compatible(gap: u32, refractory: u32) -> bool {
    gap > refractory
}

/// How a trace turns into a class decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    /// First output neuron to spike wins.
    FirstSpike,
    /// Highest accumulated spike count wins.
    SpikeCount,
}

/// Output decoding config: which neurons are outputs, how the winner is
/// picked, and what the classes are called.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodePolicy {
    pub outputs: Range<usize>,
    pub mode: DecodeMode,
    pub class_names: Vec<String>,
}

impl DecodePolicy {
    pub fn class_name(&self, index: usize) -> String {
        self.class_names
            .get(index)
            .cloned()
            .unwrap_or_else(|| format!("class-{index}"))
    }
}

/// A decoded inference result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub label: String,
    pub class_index: usize,
    /// Spike count per output neuron.
    pub counts: Vec<u64>,
    /// Set when no output neuron spiked; the label is then `no-decision`.
    pub no_decision: bool,
}

/// Decode a trace into a labelled decision.
pub fn decode_label(trace: &SimTrace, policy: &DecodePolicy) -> Result<Decision, EncodeError> {
    let c = match policy.mode {
        DecodeMode::FirstSpike => classify_first_spike(trace, policy.outputs.clone())?,
        DecodeMode::SpikeCount => classify(trace, policy.outputs.clone())?,
    };
    Ok(Decision {
        label: if c.no_spike {
            "no-decision".to_string()
        } else {
            policy.class_name(c.class_index)
        },
        class_index: c.class_index,
        counts: c.counts,
        no_decision: c.no_spike,
    })
}

fn parse_float(field: &str, row: usize, what: &str) -> Result<f64, EncodeError> {
    field.trim().parse().map_err(|_| EncodeError::Dataset {
        row,
        message: format!("bad {what} {field:?}"),
    })
}

fn looks_like_header(record: &csv::StringRecord) -> bool {
    record
        .get(0)
        .map(|f| f.trim().parse::<f64>().is_err())
        .unwrap_or(false)
}

/// Load 4-feature samples from CSV: four float columns plus an optional
/// label column. A non-numeric first row is treated as a header.
pub fn load_tabular_csv(path: &Path) -> Result<Vec<TabularSample>, EncodeError> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| EncodeError::Dataset {
            row,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && looks_like_header(&record) {
            continue;
        }
        if record.len() < 4 || record.len() > 5 {
            return Err(EncodeError::Dataset {
                row,
                message: format!(
                    "expected 4 features (+ optional label), got {} fields",
                    record.len()
                ),
            });
        }
        let mut features = [0.0; 4];
        for (j, feature) in features.iter_mut().enumerate() {
            *feature = parse_float(&record[j], row, "feature")?;
        }
        samples.push(TabularSample {
            features,
            label: record.get(4).map(str::to_string),
        });
    }
    Ok(samples)
}

/// Load 8×8 images from CSV: 64 intensity columns plus an optional label
/// column.
pub fn load_images_csv(path: &Path) -> Result<Vec<(GrayImage8x8, Option<String>)>, EncodeError> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut images = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| EncodeError::Dataset {
            row,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && looks_like_header(&record) {
            continue;
        }
        if record.len() < 64 || record.len() > 65 {
            return Err(EncodeError::Dataset {
                row,
                message: format!(
                    "expected 64 pixels (+ optional label), got {} fields",
                    record.len()
                ),
            });
        }
        let mut pixels = [0u8; 64];
        for (j, pixel) in pixels.iter_mut().enumerate() {
            let value = parse_float(&record[j], row, "pixel")?;
            if !(0.0..=255.0).contains(&value) {
                return Err(EncodeError::Dataset {
                    row,
                    message: format!("pixel {j} out of range: {value}"),
                });
            }
            *pixel = value as u8;
        }
        images.push((
            GrayImage8x8::new(pixels),
            record.get(64).map(str::to_string),
        ));
    }
    Ok(images)
}

/// Load one 8×8 image from a PGM file (P2 ASCII or P5 binary).
pub fn load_pgm(path: &Path) -> Result<GrayImage8x8, EncodeError> {
    let bytes = fs::read(path)?;
    parse_pgm(&bytes)
}

/// Load an image dataset by extension: `.pgm` is a single unlabelled
/// image, anything else reads as intensity CSV.
pub fn load_image_dataset(path: &Path) -> Result<Vec<(GrayImage8x8, Option<String>)>, EncodeError> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        Ok(vec![(load_pgm(path)?, None)])
    } else {
        load_images_csv(path)
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage8x8, EncodeError> {
    // Header tokens are whitespace-separated; '#' starts a comment.
    let mut pos = 0usize;
    let mut token = || -> Result<String, EncodeError> {
        let mut tok = String::new();
        while pos < bytes.len() {
            let b = bytes[pos];
            if b == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                if !tok.is_empty() {
                    break;
                }
                pos += 1;
            } else {
                tok.push(b as char);
                pos += 1;
            }
        }
        if tok.is_empty() {
            return Err(EncodeError::Pgm("unexpected end of header".into()));
        }
        Ok(tok)
    };

    let magic = token()?;
    if magic != "P2" && magic != "P5" {
        return Err(EncodeError::Pgm(format!("unsupported magic {magic:?}")));
    }
    let width: usize = token()?
        .parse()
        .map_err(|_| EncodeError::Pgm("bad width".into()))?;
    let height: usize = token()?
        .parse()
        .map_err(|_| EncodeError::Pgm("bad height".into()))?;
    let maxval: u32 = token()?
        .parse()
        .map_err(|_| EncodeError::Pgm("bad maxval".into()))?;
    if width != 8 || height != 8 {
        return Err(EncodeError::Pgm(format!(
            "expected an 8x8 image, got {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 255 {
        return Err(EncodeError::Pgm(format!("unsupported maxval {maxval}")));
    }

    let mut pixels = [0u8; 64];
    if magic == "P2" {
        for pixel in &mut pixels {
            let v: u32 = token()?
                .parse()
                .map_err(|_| EncodeError::Pgm("bad pixel value".into()))?;
            if v > maxval {
                return Err(EncodeError::Pgm(format!("pixel {v} above maxval {maxval}")));
            }
            *pixel = v as u8;
        }
    } else {
        // P5: exactly one whitespace byte after maxval, then raw data.
        let data = &bytes[pos + 1..];
        if data.len() < 64 {
            return Err(EncodeError::Pgm(format!(
                "expected 64 raster bytes, got {}",
                data.len()
            )));
        }
        pixels.copy_from_slice(&data[..64]);
    }
    Ok(GrayImage8x8::new(pixels))
}
