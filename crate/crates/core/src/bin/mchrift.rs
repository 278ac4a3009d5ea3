use clap::{Parser, ValueEnum};
use mchrift::asymptotics::ViiSign;
use mchrift::cli::{emit_report, error_json, parse_config, run_experiment, Mode};
use mchrift::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Scatter,
    Soliton,
    Painleve,
    Asymptotic,
    Direct,
    Compare,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Scatter => Mode::Scatter,
            ModeArg::Soliton => Mode::Soliton,
            ModeArg::Painleve => Mode::Painleve,
            ModeArg::Asymptotic => Mode::Asymptotic,
            ModeArg::Direct => Mode::Direct,
            ModeArg::Compare => Mode::Compare,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Theorem,
    Eq475,
}

/// Scattering, soliton, Painleve II and transition-asymptotics experiments for mCH.
#[derive(Debug, Parser)]
#[command(name = "mchrift", version)]
struct Args {
    mode: ModeArg,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Complete each spectrum record to its symmetry orbit.
    #[arg(long)]
    close_orbits: bool,
    #[arg(long, value_enum)]
    vii_sign: Option<SignArg>,
}

fn run(args: &Args) -> Result<bool, Error> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let mut cfg = parse_config(&args.config)?;
    if args.close_orbits {
        cfg.close_orbits = true;
    }
    if let Some(s) = args.vii_sign {
        cfg.vii_sign = match s {
            SignArg::Theorem => ViiSign::Theorem,
            SignArg::Eq475 => ViiSign::Eq475,
        };
    }
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let mode = Mode::from(args.mode);
    let report = run_experiment(&cfg, mode)?;
    for path in emit_report(&report, mode, &out)? {
        println!("{}", path.display());
    }
    // only compare mode turns verdicts into the exit status
    Ok(mode != Mode::Compare || report.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(2)
        }
    }
}
