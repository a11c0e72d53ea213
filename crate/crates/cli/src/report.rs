//! Deterministic report and trace output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use snnsim_core::processor::cycles_to_ns;

use crate::config::Experiment;
use crate::runner::RunOutcome;
use crate::CliError;

/// Per-sample report CSV. Counts are semicolon-joined in output-neuron
/// order; absent values render as empty fields.
pub fn report_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    out.push_str(
        "sample,true_label,predicted_label,class_index,no_decision,spike_counts,\
         first_impulse_cycle,first_output_spike_cycle,latency_cycles,latency_ns_at_100mhz\n",
    );
    for s in &outcome.samples {
        let counts = s
            .decision
            .counts
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.index,
            s.true_label.clone().unwrap_or_default(),
            s.decision.label,
            s.decision.class_index,
            u8::from(s.decision.no_decision),
            counts,
            opt(s.first_impulse_cycle),
            opt(s.first_output_spike_cycle),
            opt(s.latency_cycles),
            opt(s.latency_cycles.map(cycles_to_ns)),
        );
    }
    out
}

/// All schedule blocks, blank-line separated, in sample order.
pub fn schedule_text(outcome: &RunOutcome) -> String {
    outcome
        .samples
        .iter()
        .map(|s| s.schedule.to_text())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Derive the per-sample trace path: the base path itself for a single
/// sample, otherwise `<stem>.sample<i>.<ext>`.
pub fn trace_path(base: &Path, index: usize, total: usize) -> PathBuf {
    if total <= 1 {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".to_string());
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}.sample{index}{ext}"))
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

/// Write every configured output file; returns the paths written.
pub fn write_outputs(exp: &Experiment, outcome: &RunOutcome) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if let Some(path) = &exp.report.report_csv {
        ensure_parent(path)?;
        fs::write(path, report_csv(outcome))?;
        written.push(path.clone());
    }
    if let Some(base) = &exp.report.trace_csv {
        let total = outcome.samples.len();
        for s in &outcome.samples {
            let path = trace_path(base, s.index, total);
            ensure_parent(&path)?;
            fs::write(&path, s.trace.to_csv_string())?;
            written.push(path);
        }
    }
    if let Some(path) = &exp.report.schedule_txt {
        ensure_parent(path)?;
        fs::write(path, schedule_text(outcome))?;
        written.push(path.clone());
    }
    Ok(written)
}

/// One human-readable line per sample for the console.
pub fn summary_lines(outcome: &RunOutcome) -> Vec<String> {
    outcome
        .samples
        .iter()
        .map(|s| {
            let latency = s
                .latency_cycles
                .map(|c| format!("{c} cycles ({} ns at 100 MHz)", cycles_to_ns(c)))
                .unwrap_or_else(|| "none".to_string());
            format!(
                "sample {}: predicted {} (counts {:?}), first output spike latency {latency}",
                s.index, s.decision.label, s.decision.counts
            )
        })
        .collect()
}
