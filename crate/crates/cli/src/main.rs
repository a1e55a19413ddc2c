use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nsaspec_cli::artifacts::emit;
use nsaspec_cli::{commands, load_spec, CliError, Format, Region};

/// Spectra and exponent polygons of ODE systems with piecewise-constant
/// coefficients.
#[derive(Parser)]
#[command(name = "nsaspec", version)]
struct Cli {
    /// Report errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// System specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exponent polygon, edges, asymptotic lines and densities (JSON).
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Zeros of the characteristic function.
    Eigs {
        #[command(flatten)]
        common: Common,
        /// x0,x1,y0,y1
        #[arg(long, value_parser = four, allow_hyphen_values = true, conflicts_with = "radius", required_unless_present = "radius")]
        rect: Option<[f64; 4]>,
        /// Search the disk |z| <= E.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        resolution: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Counting function against its asymptotic prediction.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emax: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// log10 |F| on a grid (CSV).
    Grid {
        #[command(flatten)]
        common: Common,
        /// x0,x1,y0,y1
        #[arg(long, value_parser = four, allow_hyphen_values = true)]
        rect: [f64; 4],
        /// nx,ny
        #[arg(long, value_parser = two)]
        res: [usize; 2],
    },
    /// Spectral projection norms at indexed eigenvalues.
    Projnorms {
        #[command(flatten)]
        common: Common,
        /// Comma-separated indices into the eigenvalues ordered by modulus.
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
    },
    /// Recover the exponent polygon from computed zeros.
    Reconstruct {
        /// Zero set in the CSV (or JSON) format written by `eigs`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rmin: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Rayleigh quotient of the numerical-range probe sequence.
    Probe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        psi: f64,
        #[arg(long)]
        n: u64,
    },
    /// Run the acceptance table.
    Selftest,
}

fn four(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected four comma-separated numbers".to_string())
}

fn two(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected two comma-separated counts".to_string())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { common } => {
            let spec = load_spec(&common.spec)?;
            emit(common.output.as_deref(), &commands::analyze(&spec)?)
        }
        Command::Eigs {
            common,
            rect,
            radius,
            resolution,
            format,
        } => {
            let spec = load_spec(&common.spec)?;
            let region = match (rect, radius) {
                (Some(r), _) => Region::Rect(r),
                (None, Some(e)) => Region::Radius(e),
                (None, None) => unreachable!("clap requires --rect or --radius"),
            };
            emit(
                common.output.as_deref(),
                &commands::eigs(&spec, region, resolution, format.into())?,
            )
        }
        Command::Count {
            common,
            emax,
            steps,
            format,
        } => {
            let spec = load_spec(&common.spec)?;
            emit(
                common.output.as_deref(),
                &commands::count(&spec, emax, steps, format.into())?,
            )
        }
        Command::Grid { common, rect, res } => {
            let spec = load_spec(&common.spec)?;
            emit(
                common.output.as_deref(),
                &commands::grid(&spec, rect, res[0], res[1])?,
            )
        }
        Command::Projnorms { common, indices } => {
            let spec = load_spec(&common.spec)?;
            emit(
                common.output.as_deref(),
                &commands::projnorms(&spec, &indices)?,
            )
        }
        Command::Reconstruct {
            input,
            rmin,
            output,
        } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
            emit(output.as_deref(), &commands::reconstruct(&text, rmin)?)
        }
        Command::Probe { common, psi, n } => {
            let spec = load_spec(&common.spec)?;
            emit(common.output.as_deref(), &commands::probe(&spec, psi, n)?)
        }
        Command::Selftest => {
            let (outcomes, status) = commands::selftest();
            for o in &outcomes {
                println!("{o}");
            }
            status
        }
    }
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("NSASPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!(
            "NSASPEC_THREADS: positive integer expected, found `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("NSASPEC_THREADS: {e}")))
}

fn report(err: &CliError, json: bool) -> ExitCode {
    if json {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("error: {err}");
    }
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if json_errors {
                return report(
                    &CliError::Validation(
                        e.kind().to_string() + ": " + e.render().to_string().trim(),
                    ),
                    true,
                );
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Err(e) = threads_from_env().and_then(|_| run(cli.command)) {
        return report(&e, cli.json_errors);
    }
    ExitCode::SUCCESS
}
