//! `loadseq`: solve, enumerate, train and report from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use loadseq::io::{
    self, load_config, load_manifest, read_trials_csv, reference_enumeration, Summary,
    MANIFEST_FILE, POSTERIOR_FILE, SUMMARY_FILE, TRIALS_FILE,
};
use loadseq::schedule::{solve_time_invariant, solve_time_varying, ScheduleResult, Sequence};
use loadseq::sim::{enumerate_sequences, generate_traces, ExperimentConfig, Mode, RngStreams};
use loadseq::{Error, Result};

#[derive(Parser)]
#[command(name = "loadseq", version, about = "Learn load-distribution orders for divisible-load scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal load fractions and finishing time for one sequence.
    Solve {
        #[command(flatten)]
        common: Common,
        /// One-based order such as 2-1-3; defaults to 1-2-..-N.
        #[arg(long)]
        sequence: Option<String>,
    },
    /// Finishing time of every sequence, fastest first.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Run a training experiment and write its artifacts.
    Train {
        #[command(flatten)]
        common: Common,
        /// Replay the configuration recorded in a run manifest.
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
        /// Override the configured number of trials.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Recompute the summary from a trial log.
    Report {
        #[command(flatten)]
        common: Common,
        /// Trial log; defaults to <out-dir>/trials.csv.
        #[arg(long)]
        trials_csv: Option<PathBuf>,
        /// Averaging window; defaults to the configured one, else 100.
        #[arg(long)]
        window: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the configured root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("--config is required".into()))?;
        let mut cfg = load_config(path)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve { common, sequence } => solve(&common, sequence.as_deref()),
        Command::Enumerate { common } => enumerate(&common),
        Command::Train {
            common,
            manifest,
            trials,
        } => train(&common, manifest.as_deref(), trials),
        Command::Report {
            common,
            trials_csv,
            window,
        } => report(&common, trials_csv, window),
    }
}

fn write_file(dir: &Path, name: &str, data: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, data).map_err(|e| io_error(&path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn solve(common: &Common, sequence: Option<&str>) -> Result<()> {
    let cfg = common.load()?;
    let n = cfg.system.n_workers();
    let seq = match sequence {
        Some(s) => s.parse::<Sequence>()?,
        None => Sequence::identity(n),
    };
    let result: ScheduleResult = match cfg.mode {
        Mode::TimeInvariant => solve_time_invariant(&cfg.system, &seq)?,
        Mode::TimeVarying => {
            // the first trial's background load under this seed
            let mut rngs = RngStreams::new(cfg.seed);
            let traces = generate_traces(&cfg.background, &cfg.system, &mut rngs.traces)?;
            solve_time_varying(&cfg.system, &traces, &seq, 0.0)?
        }
    };
    let kappa: Vec<String> = result.kappa.iter().map(|k| format!("{k:.6}")).collect();
    println!("sequence {seq}");
    println!("kappa=({})", kappa.join(", "));
    if cfg.system.control_computes {
        println!("kappa0={:.6}", result.kappa_control);
    }
    println!("T_f={:.6}", result.makespan);
    if let Some(dir) = &common.out_dir {
        write_file(dir, "solve.json", &pretty(&result)?)?;
    }
    Ok(())
}

fn enumerate(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let e = enumerate_sequences(&cfg.system, cfg.arm_cap)?;
    println!("{:>5}  {:<24} {:>12}", "rank", "sequence", "T_f");
    for (i, entry) in e.entries.iter().enumerate() {
        println!("{:>5}  {:<24} {:>12.6}", i + 1, entry.sequence.to_string(), entry.makespan);
    }
    println!("best {} T_f={:.6}; worst {} T_f={:.6}; gap {:.6}",
        e.best().sequence, e.best().makespan, e.worst().sequence, e.worst().makespan, e.gap());
    if let Some(dir) = &common.out_dir {
        write_file(dir, "enumeration.json", &pretty(&e)?)?;
    }
    Ok(())
}

fn train(common: &Common, manifest: Option<&Path>, trials: Option<usize>) -> Result<()> {
    let mut cfg = match manifest {
        Some(path) => load_manifest(path)?.resolved_config()?,
        None => common.load()?,
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = trials {
        cfg.trials = t;
        cfg.window = Some(cfg.window.unwrap_or(100).min(t));
        cfg.validate()?;
    }
    let out_dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let outcome = io::train(&cfg, &out_dir)?;
    print_summary(&outcome.summary);
    for name in [TRIALS_FILE, SUMMARY_FILE, POSTERIOR_FILE, MANIFEST_FILE] {
        println!("wrote {}", out_dir.join(name).display());
    }
    Ok(())
}

fn report(common: &Common, trials_csv: Option<PathBuf>, window: Option<usize>) -> Result<()> {
    let out_dir = common.out_dir.clone();
    let csv_path = trials_csv
        .or_else(|| out_dir.as_ref().map(|d| d.join(TRIALS_FILE)))
        .ok_or_else(|| Error::InvalidConfig("give --trials-csv or --out-dir".into()))?;
    let records = read_trials_csv(&csv_path)?;
    let cfg = common.config.as_ref().map(|_| common.load()).transpose()?;
    let enumeration = match &cfg {
        Some(c) => reference_enumeration(c)?,
        None => None,
    };
    let window = window
        .or(cfg.as_ref().map(|c| c.window()))
        .unwrap_or(100);
    let summary = io::report(&records, enumeration.as_ref(), window)?;
    print_summary(&summary);
    if let Some(dir) = &out_dir {
        write_file(dir, "report.json", &pretty(&summary)?)?;
    }
    Ok(())
}

fn print_summary(s: &Summary) {
    println!("trials {} window {}", s.trials, s.window);
    if let (Some(first), Some(last)) = (s.windows.first(), s.windows.last()) {
        println!(
            "mean T_f first window {:.6}, last window {:.6}",
            first.mean_makespan, last.mean_makespan
        );
        if let (Some(a), Some(b)) = (first.mean_regret, last.mean_regret) {
            println!("mean regret first window {a:.6}, last window {b:.6}");
        }
    }
    if let (Some(star), Some(seq)) = (s.t_f_star, &s.optimal_sequence) {
        println!("optimum {seq} T_f*={star:.6}");
    }
    if let Some(c) = s.cumulative_regret {
        println!("cumulative regret {c:.6}");
    }
    if let Some(r) = &s.recommended {
        let note = if r.untrained { " (untrained)" } else { "" };
        println!("recommended {}{note}", r.sequence);
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}
