//! The clock-stepped processor: a register bank feeding an array of
//! homogeneous LIF neurons wired through the connection-list mux grid.
//!
//! Cycle accounting follows the hardware pipeline. Every neuron carries a
//! one-cycle input register: on each clock edge the register latches the
//! routed previous-cycle outputs (plus the externally sampled impulse
//! bit), while the LIF step consumes what the register latched on the
//! edge before. A spike therefore needs 2 cycles to traverse a neuron,
//! and external impulses pay one extra sampling cycle at the boundary:
//! a two-layer feedforward network shows its first output spike exactly
//! 5 cycles after the first asserted impulse (1 + 2 + 2), and an L-layer
//! chain after 1 + 2L.
//!
//! External impulses enter on a dedicated virtual input line per neuron,
//! weighted like every other enabled input with the neuron's own weight.

use std::io::{self, Write};
use std::ops::Range;

use thiserror::Error;

use crate::interconnect::{ConnectionMatrix, RoutingError, SpikeVector};
use crate::lif::{LeakMode, LifError, LifParams, LifState};

#[derive(Debug, Error)]
pub enum ProcessorError {
    #[error("inconsistent register bank: {0}")]
    InvalidBank(String),
    #[error("impulse vector length {got} does not match neuron count {n}")]
    ImpulseSizeMismatch { got: usize, n: usize },
    #[error("output range {start}..{end} invalid for {n}-neuron trace")]
    InvalidOutputRange { start: usize, end: usize, n: usize },
    #[error(transparent)]
    Lif(#[from] LifError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// The processor's full configuration image: everything the serial link
/// programs, plus the two meta-parameters (refractory length and leak
/// step) that are configured out-of-band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterBank {
    /// Total neuron count.
    pub n: usize,
    /// Per-neuron firing threshold, 8 bits each.
    pub thresholds: Vec<u8>,
    /// Per-neuron synaptic weight, 8 bits each, applied to every enabled
    /// incoming connection of that neuron.
    pub weights: Vec<u8>,
    /// Directed connection list.
    pub connections: ConnectionMatrix,
    /// External input register, one bit per neuron.
    pub impulse: SpikeVector,
    /// Global refractory length in cycles.
    pub refractory: u32,
    /// Global fixed-leak step.
    pub leak_step: u8,
}

impl RegisterBank {
    pub fn new(n: usize) -> Result<Self, ProcessorError> {
        Ok(Self {
            n,
            thresholds: vec![0; n],
            weights: vec![0; n],
            connections: ConnectionMatrix::new(n).map_err(ProcessorError::Routing)?,
            impulse: SpikeVector::zeros(n),
            refractory: 0,
            leak_step: 0,
        })
    }

    pub fn validate(&self) -> Result<(), ProcessorError> {
        if self.n == 0 {
            return Err(ProcessorError::InvalidBank("neuron count is zero".into()));
        }
        if self.thresholds.len() != self.n {
            return Err(ProcessorError::InvalidBank(format!(
                "{} thresholds for {} neurons",
                self.thresholds.len(),
                self.n
            )));
        }
        if self.weights.len() != self.n {
            return Err(ProcessorError::InvalidBank(format!(
                "{} weights for {} neurons",
                self.weights.len(),
                self.n
            )));
        }
        if self.connections.n() != self.n {
            return Err(ProcessorError::InvalidBank(format!(
                "{}x{} connection list for {} neurons",
                self.connections.n(),
                self.connections.n(),
                self.n
            )));
        }
        if self.impulse.len() != self.n {
            return Err(ProcessorError::InvalidBank(format!(
                "{}-bit impulse register for {} neurons",
                self.impulse.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Which membrane backend the neuron array runs.
///
/// The fixed-leak backend reads its step from the bank's `leak_step`
/// register; the Euler constants are simulation-side settings with no
/// hardware register behind them.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum LeakSetting {
    #[default]
    FixedLeak,
    Euler {
        tau_m: f64,
        c_m: f64,
        dt: f64,
        i_bias: f64,
    },
}

/// How much of the per-cycle state a run records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceDepth {
    /// Record potential, refractory counter, and spike for every neuron.
    #[default]
    Full,
    /// Record spikes only; potentials and counters read back as zero.
    SpikesOnly,
}

/// One neuron's recorded sample for one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronSample {
    pub v: f64,
    pub r: u32,
    pub y: bool,
}

/// Everything observable during one cycle: the impulse asserted that
/// cycle and the state every neuron holds in it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub cycle: u64,
    pub impulse: SpikeVector,
    pub neurons: Vec<NeuronSample>,
}

impl TraceRecord {
    pub fn output_spikes(&self) -> SpikeVector {
        SpikeVector::from_bits(self.neurons.iter().map(|s| s.y).collect())
    }
}

/// Per-cycle record of a run, contiguous in cycle index.
///
/// A run of `T` ticks yields `T + 1` records: a snapshot of every cycle
/// the run touched, from the state the run started in (cycle of the
/// first consumed impulse) through the state the last tick published.
/// An empty run yields an empty trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    n: usize,
    depth: TraceDepth,
    records: Vec<TraceRecord>,
}

impl SimTrace {
    /// Build a spikes-only trace from per-cycle `(cycle, impulse, outputs)`
    /// triples; potentials and counters read back as zero.
    pub fn from_spikes(n: usize, cycles: Vec<(u64, SpikeVector, SpikeVector)>) -> Self {
        let records = cycles
            .into_iter()
            .map(|(cycle, impulse, outputs)| TraceRecord {
                cycle,
                impulse,
                neurons: outputs
                    .iter()
                    .map(|y| NeuronSample { v: 0.0, r: 0, y })
                    .collect(),
            })
            .collect();
        Self {
            n,
            depth: TraceDepth::SpikesOnly,
            records,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> TraceDepth {
        self.depth
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Cycle of the first asserted external impulse bit, if any.
    pub fn first_impulse_cycle(&self) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.impulse.any())
            .map(|r| r.cycle)
    }

    /// Cycle of the first spike from any neuron in `outputs`, if any.
    pub fn first_spike_cycle(&self, outputs: Range<usize>) -> Option<u64> {
        self.records
            .iter()
            .find(|r| outputs.clone().any(|i| r.neurons[i].y))
            .map(|r| r.cycle)
    }

    /// Spike count per neuron in `outputs` across the whole trace.
    pub fn spike_counts(&self, outputs: Range<usize>) -> Vec<u64> {
        outputs
            .map(|i| {
                self.records
                    .iter()
                    .filter(|record| record.neurons[i].y)
                    .count() as u64
            })
            .collect()
    }

    /// CSV export, one row per (cycle, neuron): `cycle,neuron,v,r,y`.
    /// Spikes-only traces emit just the rows where a spike fired.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "cycle,neuron,v,r,y")?;
        for record in &self.records {
            for (i, s) in record.neurons.iter().enumerate() {
                if self.depth == TraceDepth::SpikesOnly && !s.y {
                    continue;
                }
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    record.cycle,
                    i,
                    s.v,
                    s.r,
                    u8::from(s.y)
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Result of decoding a trace into a class decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Class index relative to the start of the output range.
    pub class_index: usize,
    /// Absolute index of the winning neuron.
    pub neuron: usize,
    /// Spike count per output neuron, in range order.
    pub counts: Vec<u64>,
    /// Set when no output neuron spiked at all; the class index then
    /// falls back to 0 by the lowest-index tie rule.
    pub no_spike: bool,
}

fn check_output_range(trace: &SimTrace, outputs: &Range<usize>) -> Result<(), ProcessorError> {
    if outputs.is_empty() || outputs.end > trace.n {
        return Err(ProcessorError::InvalidOutputRange {
            start: outputs.start,
            end: outputs.end,
            n: trace.n,
        });
    }
    Ok(())
}

/// Argmax of accumulated spike counts over the output range. Ties break
/// to the lowest neuron index.
pub fn classify(trace: &SimTrace, outputs: Range<usize>) -> Result<Classification, ProcessorError> {
    check_output_range(trace, &outputs)?;
    let counts = trace.spike_counts(outputs.clone());
    let class_index = counts
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(Classification {
        class_index,
        neuron: outputs.start + class_index,
        no_spike: counts.iter().all(|&c| c == 0),
        counts,
    })
}

/// First output neuron to spike decides the class; simultaneous spikes
/// break to the lowest neuron index.
pub fn classify_first_spike(
    trace: &SimTrace,
    outputs: Range<usize>,
) -> Result<Classification, ProcessorError> {
    check_output_range(trace, &outputs)?;
    let counts = trace.spike_counts(outputs.clone());
    let first = trace.records.iter().find_map(|record| {
        outputs
            .clone()
            .find(|&i| record.neurons[i].y)
            .map(|i| i - outputs.start)
    });
    Ok(Classification {
        class_index: first.unwrap_or(0),
        neuron: outputs.start + first.unwrap_or(0),
        no_spike: first.is_none(),
        counts,
    })
}

/// The register bank plus the neuron array it configures.
#[derive(Debug, Clone)]
pub struct Processor {
    bank: RegisterBank,
    dynamics: LeakSetting,
    neuron_params: Vec<LifParams>,
    states: Vec<LifState>,
    /// Latched input per neuron: n routed lines plus the virtual
    /// impulse line in the last slot.
    input_reg: Vec<Vec<bool>>,
    /// Boundary sampling stage for external impulses.
    ext_sampled: Vec<bool>,
    cycle: u64,
}

impl Processor {
    pub fn new(bank: RegisterBank, dynamics: LeakSetting) -> Result<Self, ProcessorError> {
        let mut proc = Self {
            bank: RegisterBank::new(1)?,
            dynamics,
            neuron_params: Vec::new(),
            states: Vec::new(),
            input_reg: Vec::new(),
            ext_sampled: Vec::new(),
            cycle: 0,
        };
        proc.load_registers(bank)?;
        Ok(proc)
    }

    /// Replace the full configuration image and reset all dynamic state
    /// (potentials, counters, pipeline registers, cycle counter).
    ///
    /// A zeroed threshold register cannot be realized as a neuron (the
    /// model wants a strictly positive threshold), so such banks are
    /// rejected here rather than silently reinterpreted.
    pub fn load_registers(&mut self, bank: RegisterBank) -> Result<(), ProcessorError> {
        bank.validate()?;
        if let Some(m) = bank.thresholds.iter().position(|&t| t == 0) {
            return Err(ProcessorError::InvalidBank(format!(
                "threshold register for neuron {m} is 0; the smallest firing threshold is 1"
            )));
        }
        let n = bank.n;
        let mut params = Vec::with_capacity(n);
        for m in 0..n {
            let leak = match &self.dynamics {
                LeakSetting::FixedLeak => LeakMode::fixed(bank.leak_step as f64),
                LeakSetting::Euler { tau_m, c_m, dt, .. } => LeakMode::euler(*tau_m, *c_m, *dt),
            };
            let mut p = LifParams::new(
                bank.thresholds[m] as f64,
                bank.refractory,
                vec![bank.weights[m]; n + 1],
                leak,
            )?;
            if let LeakSetting::Euler { i_bias, .. } = self.dynamics {
                p = p.with_bias(i_bias);
            }
            params.push(p);
        }
        self.bank = bank;
        self.neuron_params = params;
        self.states = vec![LifState::new(); n];
        self.input_reg = vec![vec![false; n + 1]; n];
        self.ext_sampled = vec![false; n];
        self.cycle = 0;
        Ok(())
    }

    pub fn bank(&self) -> &RegisterBank {
        &self.bank
    }

    pub fn n(&self) -> usize {
        self.bank.n
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn states(&self) -> &[LifState] {
        &self.states
    }

    /// Current outputs, i.e. the spikes published by the previous tick.
    pub fn outputs(&self) -> SpikeVector {
        SpikeVector::from_bits(self.states.iter().map(|s| s.y).collect())
    }

    fn snapshot(&self, impulse: SpikeVector, depth: TraceDepth) -> TraceRecord {
        let neurons = self
            .states
            .iter()
            .map(|s| match depth {
                TraceDepth::Full => NeuronSample {
                    v: s.v,
                    r: s.r,
                    y: s.y,
                },
                TraceDepth::SpikesOnly => NeuronSample {
                    v: 0.0,
                    r: 0,
                    y: s.y,
                },
            })
            .collect();
        TraceRecord {
            cycle: self.cycle,
            impulse,
            neurons,
        }
    }

    /// Advance exactly one clock cycle. All register updates read
    /// previous-cycle values only, so a spike emitted this cycle cannot
    /// influence any neuron before the next, even across self-loops.
    ///
    /// Returns the outputs the edge publishes.
    pub fn tick(&mut self, external: &SpikeVector) -> Result<SpikeVector, ProcessorError> {
        let n = self.bank.n;
        if external.len() != n {
            return Err(ProcessorError::ImpulseSizeMismatch {
                got: external.len(),
                n,
            });
        }

        let mut next_states = Vec::with_capacity(n);
        for m in 0..n {
            next_states.push(self.neuron_params[m].step(&self.states[m], &self.input_reg[m])?);
        }

        let routed = self.bank.connections.route(&self.outputs())?;
        for (m, reg) in self.input_reg.iter_mut().enumerate() {
            reg[..n].copy_from_slice(routed[m].as_slice());
            reg[n] = self.ext_sampled[m];
        }
        self.ext_sampled.clear();
        self.ext_sampled.extend(external.iter());

        self.states = next_states;
        self.cycle += 1;
        Ok(self.outputs())
    }

    /// Drive the schedule cycle-by-cycle, then `extra_cycles` of silence.
    /// Equivalent to folding [`Processor::tick`]; the trace records every
    /// cycle touched, including the final published state.
    pub fn run(
        &mut self,
        schedule: &[SpikeVector],
        extra_cycles: usize,
        depth: TraceDepth,
    ) -> Result<SimTrace, ProcessorError> {
        let n = self.bank.n;
        for imp in schedule {
            if imp.len() != n {
                return Err(ProcessorError::ImpulseSizeMismatch { got: imp.len(), n });
            }
        }
        let ticks = schedule.len() + extra_cycles;
        let mut records = Vec::with_capacity(ticks.saturating_add(1));
        let silent = SpikeVector::zeros(n);
        for k in 0..ticks {
            let impulse = schedule.get(k).unwrap_or(&silent);
            records.push(self.snapshot(impulse.clone(), depth));
            self.tick(impulse)?;
        }
        if ticks > 0 {
            records.push(self.snapshot(silent, depth));
        }
        Ok(SimTrace { n, depth, records })
    }
}

/// Render a cycle count at the 100 MHz system clock (10 ns per cycle).
pub fn cycles_to_ns(cycles: u64) -> u64 {
    cycles * 10
}
