//! `snnsim`: build, program, and run the simulated neuromorphic
//! processor from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use snnsim_cli::config::{to_explicit_config, ConfigFile, Transport};
use snnsim_cli::report::{summary_lines, write_outputs};
use snnsim_cli::runner::run_experiment;
use snnsim_cli::CliError;
use snnsim_core::encoders::{image_schedule, load_image_dataset, load_tabular_csv, TabularEncoder};
use snnsim_core::uart::{format_duration, programming_time, transaction_count};

#[derive(Parser)]
#[command(
    name = "snnsim",
    about = "Cycle-accurate simulator of a small FPGA neuromorphic processor",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the serial-programming transaction breakdown for n neurons.
    Plan {
        /// Neuron count.
        n: usize,
        /// Override the per-transaction duration in microseconds
        /// (default 104.17).
        #[arg(long)]
        per_tx_us: Option<f64>,
    },
    /// Encode a dataset into spike schedules (`cycle:bitstring` blocks).
    Encode {
        /// Dataset CSV path.
        #[arg(long)]
        dataset: PathBuf,
        /// Dataset flavour.
        #[arg(long, value_enum)]
        kind: EncodeKind,
        /// Per-feature minima (tabular), comma separated.
        #[arg(long, value_delimiter = ',')]
        mins: Option<Vec<f64>>,
        /// Per-feature maxima (tabular), comma separated.
        #[arg(long, value_delimiter = ',')]
        maxs: Option<Vec<f64>>,
        /// Maximum spikes per feature (tabular).
        #[arg(long, default_value_t = 4)]
        levels: u32,
        /// Cycles between burst spikes (tabular).
        #[arg(long, default_value_t = 3)]
        gap: u32,
        /// Binarization threshold (image).
        #[arg(long, default_value_t = 128)]
        pixel_threshold: u8,
        /// Write schedules here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run an experiment from a JSON config file.
    Run {
        /// Experiment config path.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's transport.
        #[arg(long, value_enum)]
        transport: Option<Transport>,
        /// Override the config's flush cycles after the schedule.
        #[arg(long)]
        extra_cycles: Option<usize>,
        /// Override the report CSV path.
        #[arg(long)]
        report_csv: Option<PathBuf>,
        /// Override the trace CSV path.
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        /// Override the schedule text path.
        #[arg(long)]
        schedule_txt: Option<PathBuf>,
        /// Print the fully expanded config as JSON and exit.
        #[arg(long)]
        print_effective_config: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeKind {
    Tabular,
    Image8x8,
}

fn four(values: Option<Vec<f64>>, default: f64, flag: &str) -> Result<[f64; 4], CliError> {
    match values {
        None => Ok([default; 4]),
        Some(v) => v.try_into().map_err(|v: Vec<f64>| CliError::Config {
            field: flag.to_string(),
            message: format!("expected 4 comma-separated values, got {}", v.len()),
        }),
    }
}

fn cmd_plan(n: usize, per_tx_us: Option<f64>) -> Result<(), CliError> {
    let mut plan = transaction_count(n)?;
    if let Some(us) = per_tx_us {
        plan = plan.with_seconds_per_transaction(us * 1e-6);
    }
    println!("transaction plan for n={n}");
    println!("  connection list  {:>8}", plan.connection_list);
    println!("  threshold        {:>8}", plan.threshold);
    println!("  weight           {:>8}", plan.weight);
    println!("  impulse          {:>8}", plan.impulse);
    println!("  total            {:>8}", plan.total);
    println!(
        "per-transaction: {}",
        format_duration(plan.seconds_per_transaction)
    );
    println!(
        "programming time: {}",
        format_duration(programming_time(&plan))
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    dataset: &Path,
    kind: EncodeKind,
    mins: Option<Vec<f64>>,
    maxs: Option<Vec<f64>>,
    levels: u32,
    gap: u32,
    pixel_threshold: u8,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let blocks: Vec<String> = match kind {
        EncodeKind::Tabular => {
            let encoder = TabularEncoder::new(
                four(mins, 0.0, "--mins")?,
                four(maxs, 1.0, "--maxs")?,
                levels,
                gap,
            )?;
            load_tabular_csv(dataset)?
                .iter()
                .map(|s| encoder.encode(s).map(|sched| sched.to_text()))
                .collect::<Result<_, _>>()?
        }
        EncodeKind::Image8x8 => load_image_dataset(dataset)?
            .iter()
            .map(|(img, _)| image_schedule(img, pixel_threshold).to_text())
            .collect(),
    };
    let text = blocks.join("\n");
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    config_path: &Path,
    transport: Option<Transport>,
    extra_cycles: Option<usize>,
    report_csv: Option<PathBuf>,
    trace_csv: Option<PathBuf>,
    schedule_txt: Option<PathBuf>,
    print_effective_config: bool,
) -> Result<(), CliError> {
    let mut file = ConfigFile::load(config_path)?;
    if let Some(t) = transport {
        file.run.transport = t;
    }
    if let Some(extra) = extra_cycles {
        file.run.extra_cycles = extra;
    }
    if report_csv.is_some() {
        file.report.report_csv = report_csv;
    }
    if trace_csv.is_some() {
        file.report.trace_csv = trace_csv;
    }
    if schedule_txt.is_some() {
        file.report.schedule_txt = schedule_txt;
    }

    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let experiment = file.expand(base_dir)?;

    if print_effective_config {
        let explicit = to_explicit_config(&experiment);
        println!(
            "{}",
            serde_json::to_string_pretty(&explicit).expect("config serializes")
        );
        return Ok(());
    }

    let outcome = run_experiment(&experiment)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    for line in summary_lines(&outcome) {
        println!("{line}");
    }
    let written = write_outputs(&experiment, &outcome)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!(
        "{} samples, transport {:?}",
        outcome.samples.len(),
        experiment.run.transport
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("SNNSIM_LOG", "warn"))
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan { n, per_tx_us } => cmd_plan(n, per_tx_us),
        Command::Encode {
            dataset,
            kind,
            mins,
            maxs,
            levels,
            gap,
            pixel_threshold,
            output,
        } => cmd_encode(
            &dataset,
            kind,
            mins,
            maxs,
            levels,
            gap,
            pixel_threshold,
            output.as_deref(),
        ),
        Command::Run {
            config,
            transport,
            extra_cycles,
            report_csv,
            trace_csv,
            schedule_txt,
            print_effective_config,
        } => cmd_run(
            &config,
            transport,
            extra_cycles,
            report_csv,
            trace_csv,
            schedule_txt,
            print_effective_config,
        ),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
