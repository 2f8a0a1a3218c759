use clap::{Args, Parser, Subcommand};
use seqdec::error::Error;
use seqdec::harness::{
    atilde_to_csv, curve_to_csv, dstar_to_csv, parse_snr_range, run_atilde_table, run_curve,
    run_validation_suite, CodeRef, ExperimentConfig, ModeSel, ResolvedCode, ValidationOptions,
    VariantSel,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "seqdec", version, about = "Sequential ML decoding complexity: bounds and simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code name (golay24, qr48, conv-3-1-2, conv-2-1-6, conv-2-1-16).
    #[arg(long)]
    code: Option<String>,
    /// Information length L for convolutional codes.
    #[arg(long)]
    info_length: Option<usize>,
    /// SNR grid in dB, start:stop:step.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// be, chernoff or both.
    #[arg(long)]
    variant: Option<String>,
    /// Transmit the all-zero codeword instead of random information.
    #[arg(long)]
    all_zero: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Per-trial extension cap for the block decoder.
    #[arg(long)]
    cap: Option<u64>,
    /// Output CSV path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Complexity bound for the block-code decoder.
    BoundGda(Common),
    /// Complexity bound for the trellis decoder.
    BoundMlsda(Common),
    /// Simulated complexity of the block-code decoder.
    SimulateGda(Common),
    /// Simulated complexity of the trellis decoder.
    SimulateMlsda(Common),
    /// Bound and simulation together, per the config's mode.
    Run(Common),
    /// Subexponential factor table.
    Atilde {
        #[command(flatten)]
        common: Common,
        /// Comma-separated d/n ratios.
        #[arg(long, value_delimiter = ',')]
        d_over_n: Vec<f64>,
        /// Comma-separated gamma values in dB.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gamma_db: Vec<f64>,
        /// n grid, start:stop:step.
        #[arg(long)]
        n_grid: Option<String>,
    },
    /// Minimum path weights of the trellis, as CSV.
    Dstar(Common),
    /// Cross-module validation checks.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Corrupt one d* entry first; the d* check must then fail.
        #[arg(long)]
        inject_dstar_fault: bool,
    },
}

enum Failure {
    Config(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn build_config(c: &Common, mode: ModeSel, default_code: &str) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(code) = &c.code {
        cfg.code = Some(CodeRef::Name(code.clone()));
    }
    if cfg.code.is_none() {
        cfg.code = Some(CodeRef::Name(default_code.into()));
    }
    if c.info_length.is_some() {
        cfg.info_length = c.info_length;
    }
    if let Some(s) = &c.snr {
        cfg.snr_grid = parse_snr_range(s)?;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(v) = &c.variant {
        cfg.variant = VariantSel::parse(v)?;
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    if c.cap.is_some() {
        cfg.extension_cap = c.cap;
    }
    cfg.all_zero |= c.all_zero;
    if mode != ModeSel::Both {
        cfg.mode = mode;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn expect_kind(cfg: &ExperimentConfig, block: bool) -> Result<(), Failure> {
    let code = cfg.resolve_code()?;
    match (code, block) {
        (ResolvedCode::Block(_), true) | (ResolvedCode::Conv(_), false) => Ok(()),
        (c, _) => Err(Failure::Config(format!(
            "code '{}' is not a {} code",
            c.name(),
            if block { "block" } else { "convolutional" }
        ))),
    }
}

fn curve(c: &Common, mode: ModeSel, block: bool) -> Result<(), Failure> {
    let default = if block { "golay24" } else { "conv-2-1-6" };
    let cfg = build_config(c, mode, default)?;
    expect_kind(&cfg, block)?;
    if cfg.snr_grid.is_empty() {
        return Err(Failure::Config("empty SNR grid (use --snr or snr_grid)".into()));
    }
    emit(&c.out, &curve_to_csv(&run_curve(&cfg)?))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::BoundGda(c) => curve(&c, ModeSel::Bound, true),
        Cmd::BoundMlsda(c) => curve(&c, ModeSel::Bound, false),
        Cmd::SimulateGda(c) => curve(&c, ModeSel::Simulate, true),
        Cmd::SimulateMlsda(c) => curve(&c, ModeSel::Simulate, false),
        Cmd::Run(c) => {
            let cfg = build_config(&c, ModeSel::Both, "golay24")?;
            if cfg.snr_grid.is_empty() {
                return Err(Failure::Config("empty SNR grid".into()));
            }
            emit(&c.out, &curve_to_csv(&run_curve(&cfg)?))
        }
        Cmd::Atilde {
            common,
            d_over_n,
            gamma_db,
            n_grid,
        } => {
            let from_file = match &common.config {
                Some(p) => ExperimentConfig::load(p)?.atilde,
                None => None,
            };
            let ratios = if !d_over_n.is_empty() {
                d_over_n
            } else {
                from_file.as_ref().map(|a| a.d_over_n.clone()).unwrap_or_else(|| vec![0.2])
            };
            let gammas = if !gamma_db.is_empty() {
                gamma_db
            } else {
                from_file.as_ref().map(|a| a.gamma_db.clone()).unwrap_or_else(|| vec![1.0])
            };
            let ns: Vec<u64> = match n_grid {
                Some(s) => parse_snr_range(&s)?.into_iter().map(|x| x.round() as u64).collect(),
                None => from_file
                    .map(|a| a.n_grid)
                    .unwrap_or_else(|| (1..=40).map(|i| i * 10).collect()),
            };
            let mut rows = Vec::new();
            for &r in &ratios {
                for &g in &gammas {
                    rows.extend(run_atilde_table(r, g, &ns)?);
                }
            }
            emit(&common.out, &atilde_to_csv(&rows))
        }
        Cmd::Dstar(c) => {
            let cfg = build_config(&c, ModeSel::Bound, "conv-3-1-2")?;
            match cfg.resolve_code()? {
                ResolvedCode::Conv(t) => emit(&c.out, &dstar_to_csv(&t)),
                ResolvedCode::Block(b) => Err(Failure::Config(format!(
                    "code '{}' has no trellis",
                    b.name()
                ))),
            }
        }
        Cmd::Validate {
            seed,
            workers,
            inject_dstar_fault,
        } => {
            let opts = ValidationOptions {
                seed,
                workers,
                corrupt_dstar: inject_dstar_fault,
                ..Default::default()
            };
            let rep = run_validation_suite(&opts)?;
            print!("{}", rep.render());
            if rep.all_passed() {
                Ok(())
            } else {
                Err(Failure::Validation("validation failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
