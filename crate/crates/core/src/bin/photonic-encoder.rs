use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use photonic_encoder::encoder::{build_ideal_encoder, verify_decomposition};
use photonic_encoder::experiments::{self as ex, ExperimentConfig, Sampling};
use photonic_encoder::sources::Qubit;
use photonic_encoder::Result;

#[derive(Parser)]
#[command(
    name = "photonic-encoder",
    version,
    about = "Simulate the three-photon polarization encoder bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config: `ideal` or `paper-calibrated`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Emit probabilities only, without Poisson samples.
    #[arg(long)]
    exact: bool,
    /// Integration time per setting in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Number of θ3 points in the fringe scan.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Threefold tables for |0⟩, |1⟩ and 45° inputs.
    Basis(Common),
    /// θ3 fringe scan with a sinusoidal fit.
    Fringe(Common),
    /// Three-photon basis and ±45° correlations.
    Ghz(Common),
    /// Valid and error threefold rates across the μ schedule.
    Noise(Common),
    /// Fit the config's calibration targets.
    Calibrate(Common),
    /// Check the ideal encoder's pre-detection decomposition.
    #[command(name = "verify-eq2")]
    VerifyEq2 {
        #[command(flatten)]
        common: Common,
        /// Number of random qubits to check in addition to the config's.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Print the circuit's channels, elements and detectors.
    DumpCircuit(Common),
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => ExperimentConfig::preset("ideal")?,
    };
    if let Some(seed) = c.seed {
        cfg.run.seed = seed;
    }
    if let Some(d) = c.duration {
        cfg.run.duration_s = d;
    }
    if let Some(n) = c.points {
        cfg.run.fringe_points = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sampling(c: &Common) -> Sampling {
    if c.exact {
        Sampling::Exact
    } else {
        Sampling::Poisson
    }
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote,{}", f.display());
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Basis(c) => {
            let cfg = load(&c)?;
            print_files(&ex::write_basis(
                &c.out,
                &ex::run_basis_states(&cfg, sampling(&c))?,
            )?);
        }
        Command::Fringe(c) => {
            let cfg = load(&c)?;
            let r = ex::run_fringe(&cfg, sampling(&c))?;
            print!("{}", ex::fringe_summary(&r));
            print_files(&ex::write_fringe(&c.out, &r)?);
        }
        Command::Ghz(c) => {
            let cfg = load(&c)?;
            let r = ex::run_ghz(&cfg, sampling(&c))?;
            print!("{}", ex::ghz_summary(&r));
            print_files(&ex::write_ghz(&c.out, &r)?);
        }
        Command::Noise(c) => {
            let cfg = load(&c)?;
            let r = ex::run_noise_tradeoff(&cfg)?;
            print!("{}", ex::noise_summary(&r));
            print!("{}", ex::noise_csv(&r));
            print_files(&ex::write_noise(&c.out, &r)?);
        }
        Command::Calibrate(c) => {
            let cfg = load(&c)?;
            let (fitted, report) = ex::calibrate(&cfg)?;
            print!("{}", ex::calibration_csv(&report));
            print_files(&ex::write_calibration(&c.out, &fitted, &report)?);
        }
        Command::VerifyEq2 { common, random } => {
            let cfg = load(&common)?;
            let mut qubits = vec![cfg.apparatus.source.qubit];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
            for _ in 0..random {
                let z: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                qubits.push(Qubit::normalized(
                    Complex64::new(z[0], z[1]),
                    Complex64::new(z[2], z[3]),
                )?);
            }
            let rows = qubits
                .iter()
                .map(|q| {
                    Ok((
                        q.alpha(),
                        q.beta(),
                        verify_decomposition(&build_ideal_encoder(*q)?)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            print!("{}", ex::decomposition_csv(&rows));
            print_files(&ex::write_decomposition(&common.out, &rows)?);
        }
        Command::DumpCircuit(c) => {
            let cfg = load(&c)?;
            print!(
                "{}",
                photonic_encoder::encoder::build_full_apparatus(&cfg.apparatus)?.dump()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error,{},{}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
