//! `balayage`: batch front-end for the corner-balayage crate.
//!
//! JSON results go to stdout. Tables go to `--out` (or stdout) as CSV whose
//! first line is `# {config}`; `balayage replay --in table.csv` regenerates
//! the table from that line alone.

mod experiment;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corner_balayage::McConfig;
use experiment::{Artifact, ExperimentConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files: exit code 2.
    Config(String),
    /// The computation itself failed: exit code 1.
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Numerical(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<corner_balayage::Error> for CliError {
    fn from(e: corner_balayage::Error) -> Self {
        use corner_balayage::Error as E;
        match e {
            E::InvalidParameter { .. } | E::DegenerateDomain(_) | E::OutOfRange(_) | E::Json(_) => {
                CliError::Config(e.to_string())
            }
            E::Quadrature(_) | E::Sampling(_) | E::Series(_) | E::InsufficientData(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "balayage", version, about = "Balayage of radial-power measures onto boundaries with corners")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct McArgs {
    /// Number of walks (or measure samples).
    #[arg(long = "samples", visible_alias = "walks", default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absorption shell width.
    #[arg(long, default_value_t = 1e-7)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig { n_walks: self.samples, eps_shell: self.eps, max_steps: self.max_steps, seed: self.seed }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact sector balayage ν([0, R]) (or its density) from the series.
    SectorExact {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        b: f64,
        #[arg(long = "a-alpha", default_value_t = 1.0)]
        a_alpha: f64,
        #[arg(long = "R")]
        r: f64,
        /// Evaluate the density dν/dr instead of the cumulative mass.
        #[arg(long)]
        density: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Harmonic measure of a boundary window by walk-on-spheres.
    Harmonic {
        #[arg(long)]
        domain: PathBuf,
        /// Starting point `x,y`.
        #[arg(long, value_parser = parse_pair)]
        z: [f64; 2],
        /// Window `cx,cy,r`: boundary points within r of (cx, cy).
        #[arg(long, value_parser = parse_triple)]
        window: [f64; 3],
        /// Restrict the window to one boundary component.
        #[arg(long)]
        component: Option<usize>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Window masses ν(∂Ω ∩ B_r(z₀)) of the swept measure, as CSV.
    Balayage {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Exponent b of the measure (overrides the domain file).
        #[arg(long)]
        b: Option<f64>,
        /// Importance-sampling exponent for the radial proposal.
        #[arg(long = "proposal-b")]
        proposal_b: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-law (or power-log) fit to a window-mass curve.
    RateFit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also try the r^p·log(1/r) model.
        #[arg(long)]
        log: bool,
    },
    /// Compare a window-mass curve against the closed-form envelope.
    BoundsCheck {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Only rows with r ≤ r-max are required to hold.
        #[arg(long = "r-max", default_value_t = f64::INFINITY)]
        r_max: f64,
    },
    /// Decoupling check for a multi-corner domain.
    Decouple {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Hard-wall equilibrium measure on a sector wall, as an arclength profile.
    CoulombProfile {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        alpha: f64,
        /// Wall radius; defaults to 0.8 times the droplet radius.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metropolis sampler for the two-dimensional Coulomb gas.
    Gas {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Confine the particles to a corner domain.
        #[arg(long)]
        wall: Option<PathBuf>,
        /// Sweeps after burn-in.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long = "burn-in", default_value_t = 500)]
        burn_in: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a CSV from the configuration in its header line.
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats(s)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_floats(s)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn read_domain(path: &Path, b: Option<f64>) -> Result<corner_balayage::geometry::DomainFile, CliError> {
    experiment::load_domain(&read_text(path)?, b).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Write through a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::config(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::config(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Stdout write that treats a closed pipe (`| head`) as success.
fn write_stdout(bytes: &[u8]) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::internal(e)),
        _ => Ok(()),
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    text.push('\n');
    write_stdout(text.as_bytes())
}

fn emit(artifact: Artifact, out: Option<&Path>) -> Result<(), CliError> {
    match artifact {
        Artifact::Json(v) => print_json(&v),
        Artifact::Csv { table, summary } => match out {
            Some(path) => {
                write_atomic(path, &table)?;
                summary.map_or(Ok(()), |s| print_json(&s))
            }
            None => {
                write_stdout(table.as_bytes())?;
                if let Some(s) = summary {
                    eprintln!("{}", serde_json::to_string(&s).map_err(CliError::internal)?);
                }
                Ok(())
            }
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let (config, out) = match cli.command {
        Command::SectorExact { alpha, b, a_alpha, r, density, tol } => {
            (ExperimentConfig::SectorExact { alpha, b, a_alpha, r, density, tol }, None)
        }
        Command::Harmonic { domain, z, window, component, mc } => {
            let domain = read_domain(&domain, None)?;
            (ExperimentConfig::Harmonic { domain, z, window, component, mc: mc.config() }, None)
        }
        Command::Balayage { domain, radii, b, proposal_b, mc, out } => {
            let domain = read_domain(&domain, b)?;
            (ExperimentConfig::Balayage { domain, radii, proposal_b, mc: mc.config() }, out)
        }
        Command::RateFit { input, log } => {
            let curve = experiment::read_curve(&read_text(&input)?)?;
            return print_json(&experiment::rate_fit(&curve, log)?);
        }
        Command::BoundsCheck { alpha, b, eps, input, r_max } => {
            let curve = experiment::read_curve(&read_text(&input)?)?;
            return print_json(&experiment::bounds_check(&curve, alpha, b, eps, r_max)?);
        }
        Command::Decouple { domain, radii, b, mc } => {
            let domain = read_domain(&domain, b)?;
            (ExperimentConfig::Decouple { domain, radii, mc: mc.config() }, None)
        }
        Command::CoulombProfile { b, alpha, a, bins, mc, out } => {
            let a = a.unwrap_or_else(|| 0.8 * corner_balayage::coulomb::support_radius(b));
            (ExperimentConfig::CoulombProfile { b, alpha, a, bins, mc: mc.config() }, out)
        }
        Command::Gas { n, beta, b, wall, steps, burn_in, seed, out } => {
            let wall = wall.map(|p| read_domain(&p, None)).transpose()?;
            (ExperimentConfig::Gas { n, beta, b, wall, steps, burn_in, seed }, out)
        }
        Command::Replay { input, out } => {
            let text = read_text(&input)?;
            let config = ExperimentConfig::from_csv_header(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", input.display())))?;
            (config, out)
        }
    };
    log::info!("running {}", serde_json::to_string(&config).unwrap_or_default());
    emit(config.run()?, out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("balayage: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
