//! Drives an experiment end to end: dataset → spike schedules →
//! simulation (direct or over the loopback serial link) → decoded
//! labels and latency figures.

use snnsim_core::encoders::{
    decode_label, gap_compatible, image_schedule, load_image_dataset, load_tabular_csv, Decision,
    SpikeSchedule, TabularEncoder, TabularSample,
};
use snnsim_core::interconnect::SpikeVector;
use snnsim_core::processor::{Processor, SimTrace};
use snnsim_core::uart::{host_session, DeviceEndpoint, LoopbackChannel};

use crate::config::{EncoderSettings, Experiment, Transport};
use crate::CliError;

/// One dataset sample, encoded but not yet widened to the network.
#[derive(Debug, Clone)]
pub struct EncodedSample {
    pub index: usize,
    pub true_label: Option<String>,
    pub schedule: SpikeSchedule,
}

/// One simulated sample with its decoded outcome.
#[derive(Debug, Clone)]
pub struct SampleResult {
    pub index: usize,
    pub true_label: Option<String>,
    pub decision: Decision,
    pub first_impulse_cycle: Option<u64>,
    pub first_output_spike_cycle: Option<u64>,
    pub latency_cycles: Option<u64>,
    pub trace: SimTrace,
    pub schedule: SpikeSchedule,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub samples: Vec<SampleResult>,
    pub warnings: Vec<String>,
}

/// Load and encode every dataset sample for the experiment.
pub fn encode_dataset(exp: &Experiment) -> Result<Vec<EncodedSample>, CliError> {
    let path = exp.dataset.as_ref().ok_or_else(|| CliError::Config {
        field: "encoder.dataset".to_string(),
        message: "required to run an experiment".to_string(),
    })?;
    let mut samples = Vec::new();
    match &exp.encoder {
        EncoderSettings::Tabular {
            mins,
            maxs,
            levels,
            gap,
        } => {
            let encoder = TabularEncoder::new(*mins, *maxs, *levels, *gap)?;
            for (index, sample) in load_tabular_csv(path)?.into_iter().enumerate() {
                samples.push(EncodedSample {
                    index,
                    true_label: sample.label.clone(),
                    schedule: encoder.encode(&sample)?,
                });
            }
        }
        EncoderSettings::Image8x8 { pixel_threshold } => {
            for (index, (image, label)) in load_image_dataset(path)?.into_iter().enumerate() {
                samples.push(EncodedSample {
                    index,
                    true_label: label,
                    schedule: image_schedule(&image, *pixel_threshold),
                });
            }
        }
    }
    Ok(samples)
}

fn simulate_one(exp: &Experiment, encoded: &EncodedSample) -> Result<SampleResult, CliError> {
    let bank = &exp.network.bank;
    let n = bank.n;
    let expanded = encoded.schedule.expand(n, exp.network.input_span.start)?;

    let trace = match exp.run.transport {
        Transport::Direct => {
            let mut proc = Processor::new(bank.clone(), exp.dynamics.clone())?;
            proc.run(&expanded, exp.run.extra_cycles, exp.trace_depth())?
        }
        Transport::LoopbackUart => {
            let mut schedule = expanded;
            schedule.extend(std::iter::repeat_n(
                SpikeVector::zeros(n),
                exp.run.extra_cycles,
            ));
            let device = DeviceEndpoint::for_bank(bank).with_dynamics(exp.dynamics.clone());
            let mut channel = LoopbackChannel::new(device);
            host_session(&mut channel, bank, &schedule)?.spike_trace()?
        }
    };

    let decision = decode_label(&trace, &exp.network.decode)?;
    let first_impulse_cycle = trace.first_impulse_cycle();
    let first_output_spike_cycle = trace.first_spike_cycle(exp.network.output_span.clone());
    let latency_cycles = match (first_impulse_cycle, first_output_spike_cycle) {
        (Some(imp), Some(out)) if out >= imp => Some(out - imp),
        _ => None,
    };

    Ok(SampleResult {
        index: encoded.index,
        true_label: encoded.true_label.clone(),
        decision,
        first_impulse_cycle,
        first_output_spike_cycle,
        latency_cycles,
        trace,
        schedule: encoded.schedule.clone(),
    })
}

/// Run every dataset sample on a fresh processor instance, in order.
pub fn run_experiment(exp: &Experiment) -> Result<RunOutcome, CliError> {
    let mut warnings = Vec::new();
    if let EncoderSettings::Tabular { gap, .. } = &exp.encoder {
        let refractory = exp.network.bank.refractory;
        if !gap_compatible(*gap, refractory) {
            let message = format!(
                "encoder gap {gap} does not clear the {refractory}-cycle refractory period; \
                 input neurons will drop burst spikes"
            );
            log::warn!("{message}");
            warnings.push(message);
        }
    }

    let mut samples = Vec::new();
    for encoded in encode_dataset(exp)? {
        samples.push(simulate_one(exp, &encoded)?);
    }
    Ok(RunOutcome { samples, warnings })
}

/// Quantized spike counts for a tabular sample, exposed for reporting.
pub fn tabular_counts(
    settings: &EncoderSettings,
    sample: &TabularSample,
) -> Result<Option<[u32; 4]>, CliError> {
    match settings {
        EncoderSettings::Tabular {
            mins,
            maxs,
            levels,
            gap,
        } => {
            let encoder = TabularEncoder::new(*mins, *maxs, *levels, *gap)?;
            Ok(Some(encoder.spike_counts(sample)?))
        }
        EncoderSettings::Image8x8 { .. } => Ok(None),
    }
}
