//! Thin CLI over the library: flag parsing and output plumbing only, all
//! real work lives in `memsweep::harness`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use memsweep::harness::{
    self, compare_csv, graph_dump_json, parse_config_file, results_csv, to_jsonl, ConfigValues,
    DecoderChoice, HarnessError, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "memsweep",
    version,
    about = "Surface-code memory experiments: emulate, decode, and benchmark \
             logical-failure estimation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate failure rates with the single-long-run method
    Run(RunArgs),
    /// Estimate failure rates with the per-duration fit method
    RunLegacy(RunArgs),
    /// Run both methods and report interval agreement per grid cell
    Compare(RunArgs),
    /// Dump a decoding graph as JSON (n = rounds-mult * distance)
    GraphDump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Code distances, comma separated (odd, >= 3)
    #[arg(long, value_delimiter = ',')]
    distance: Option<Vec<u32>>,
    /// Data-noise levels p, comma separated
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    /// Measurement-noise level q (defaults to p)
    #[arg(long)]
    meas_noise: Option<f64>,
    /// Duration multiplier m; the long run lasts n = m*d rounds
    #[arg(long)]
    rounds_mult: Option<u64>,
    /// Shots per grid cell for the per-duration method
    #[arg(long)]
    shots: Option<u64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Decoder: "uf" (batch) or "uf-forward" (sliding window)
    #[arg(long, value_parser = DecoderChoice::parse)]
    decoder: Option<DecoderChoice>,
    /// Forward-decode window height in layers (default 2d)
    #[arg(long)]
    window: Option<u32>,
    /// Forward-decode commit depth in layers (default min(d, window-1))
    #[arg(long)]
    commit: Option<u32>,
    /// Normal quantile for confidence intervals
    #[arg(long)]
    z: Option<f64>,
    /// Output format: "jsonl" or "csv"
    #[arg(long, value_parser = OutputFormat::parse)]
    format: Option<OutputFormat>,
    /// Output path (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all available cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Config file with key=value lines mirroring these flags
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    /// CLI flags > config file > defaults.
    fn resolve(self) -> Result<ConfigValues, HarnessError> {
        let from_cli = ConfigValues {
            distance: self.distance,
            noise: self.noise,
            meas_noise: self.meas_noise,
            rounds_mult: self.rounds_mult,
            shots: self.shots,
            seed: self.seed,
            decoder: self.decoder,
            window: self.window,
            commit: self.commit,
            z: self.z,
            format: self.format,
            out: self.out,
            workers: self.workers,
        };
        let from_file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    HarnessError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => ConfigValues::default(),
        };
        Ok(from_cli.or(from_file))
    }
}

fn emit(payload: String, out: Option<PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, payload)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(payload.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.cmd {
        Cmd::Run(args) => {
            let (cfg, fmt, out) = args.resolve()?.finalize()?;
            let records = harness::run_new(&cfg)?;
            let payload = match fmt {
                OutputFormat::Jsonl => to_jsonl(&records),
                OutputFormat::Csv => results_csv(&records),
            };
            emit(payload, out)
        }
        Cmd::RunLegacy(args) => {
            let (cfg, fmt, out) = args.resolve()?.finalize()?;
            let records = harness::run_legacy(&cfg)?;
            let payload = match fmt {
                OutputFormat::Jsonl => to_jsonl(&records),
                OutputFormat::Csv => results_csv(&records),
            };
            emit(payload, out)
        }
        Cmd::Compare(args) => {
            let (cfg, fmt, out) = args.resolve()?.finalize()?;
            let records = harness::run_compare(&cfg)?;
            let payload = match fmt {
                OutputFormat::Jsonl => to_jsonl(&records),
                OutputFormat::Csv => compare_csv(&records),
            };
            emit(payload, out)
        }
        Cmd::GraphDump(args) => {
            let (cfg, _fmt, out) = args.resolve()?.finalize()?;
            if cfg.distances.len() != 1 {
                return Err(HarnessError::Usage(
                    "graph-dump needs exactly one --distance".into(),
                ));
            }
            let d = cfg.distances[0];
            let n = (cfg.rounds_mult * d as u64) as u32;
            let mut payload = graph_dump_json(d, n)?;
            payload.push('\n');
            emit(payload, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful outcomes; everything else is a
            // usage error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
