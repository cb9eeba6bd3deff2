use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::render::{self, Format};
use crate::scan::{parse_distribution, ScanConfig};
use crate::witness::WitnessRequest;
use crate::{fig1, scan, witness, CliError, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "bosent", version, about = "Particle-entanglement witnesses for two-mode bosonic states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest particle number held as a dense density matrix.
    #[arg(long, global = true, default_value_t = bosent::DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to csv for fig1 and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Timestamp written to the manifest instead of the current time.
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Twin-Fock Cauchy-Schwarz ratio C_2m, exact and exp(eps^2 N/2).
    Fig1 {
        /// Even particle numbers.
        #[arg(long = "n", value_delimiter = ',', default_values_t = [100, 250, 500, 1000])]
        n: Vec<usize>,
        /// Even orders 2m with 2m <= N/2.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 6, 8])]
        orders: Vec<usize>,
        /// Leave out the approximation and its deviation.
        #[arg(long)]
        no_approx: bool,
    },
    /// Witness report for the state in a StateSpec file.
    Witness {
        state: PathBuf,
        /// csi[:M], qfi:x|y|z|NX,NY,NZ, xi, eta or all; repeatable. Defaults to all.
        #[arg(short = 'w', long = "witness")]
        witnesses: Vec<String>,
    },
    /// Checks random separable states against every separable bound.
    ScanSeparable {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Particle number of fixed-N samples.
        #[arg(long = "n", default_value_t = 40)]
        n_total: usize,
        /// Sample fluctuating-N ensembles: poisson:MEAN, binomial:N:P or deterministic:N.
        #[arg(long)]
        fluctuating: Option<String>,
        /// Random generator directions per sample.
        #[arg(long, default_value_t = 10)]
        directions: usize,
        #[arg(long, default_value_t = 4)]
        max_components: usize,
    },
}

/// Runs one invocation. The report goes to `--out` or `stdout`;
/// diagnostics go to standard error. Returns the exit code.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let recorded: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(&cli, recorded, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &Cli, arguments: Vec<String>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (name, default_format) = match cli.command {
        Command::Fig1 { .. } => ("fig1", Format::Csv),
        Command::Witness { .. } => ("witness", Format::Json),
        Command::ScanSeparable { .. } => ("scan-separable", Format::Json),
    };
    let manifest = RunManifest::new(name, arguments, cli.seed, cli.timestamp.clone());
    let format = cli.format.unwrap_or(default_format);

    let (text, code) = match &cli.command {
        Command::Fig1 { n, orders, no_approx } => {
            let table = fig1::run_fig1(n, orders, !no_approx)?;
            let text = match format {
                Format::Csv => render::csv(&manifest, fig1::CSV_HEADER, &table.csv_rows()),
                Format::Json => render::json(&manifest, &table),
            };
            (text, 0)
        }
        Command::Witness { state, witnesses } => {
            let source = std::fs::read_to_string(state)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", state.display())))?;
            let mut requests = Vec::new();
            for w in witnesses {
                requests.extend(WitnessRequest::parse_many(w).map_err(CliError::Input)?);
            }
            let output = witness::run_witness(&source, &requests, cli.n_max).map_err(|e| match e {
                CliError::Spec(s) => CliError::Input(format!("{}: {s}", state.display())),
                other => other,
            })?;
            for f in &output.errors {
                eprintln!("witness {}: {}", f.witness, f.error);
            }
            let text = match format {
                Format::Csv => render::csv(&manifest, witness::CSV_HEADER, &output.csv_rows()),
                Format::Json => render::json(&manifest, &output),
            };
            (text, output.exit_code())
        }
        Command::ScanSeparable { samples, n_total, fluctuating, directions, max_components } => {
            let fluctuating = fluctuating.as_deref().map(parse_distribution).transpose().map_err(CliError::Input)?;
            let config = ScanConfig {
                samples: *samples,
                n_total: *n_total,
                seed: cli.seed,
                fluctuating,
                directions: *directions,
                max_components: *max_components,
                n_max: cli.n_max,
            };
            let report = scan::run_scan(&config)?;
            for b in report.bounds.iter().filter(|b| b.violations > 0) {
                eprintln!("bound {} violated by {} separable samples", b.name, b.violations);
            }
            let text = match format {
                Format::Csv => render::csv(&manifest, scan::CSV_HEADER, &report.csv_rows()),
                Format::Json => render::json(&manifest, &report),
            };
            (text, report.exit_code())
        }
    };

    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(code)
}
