mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cheegernet_core::graphtools::GraphError;
use cheegernet_core::hypmath::{HypError, MargulisParam};
use cheegernet_core::netgraph::{NetBuildParams, NetError};
use cheegernet_core::surface::{FamilyError, SurfaceError, ValidationErrors};

#[derive(Parser, Debug)]
#[command(name = "cheegernet", version, about = "Isoperimetric constants of pants-glued hyperbolic surfaces and their net graphs")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Margulis parameter, in (0, arcsinh 1); defaults to arcsinh(1)/2.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Net spacing, in (0, delta1(eps)); defaults to 0.9 delta1(eps).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Domain size cap for isoperimetric searches (or subset cap for cheeger).
    #[arg(long, global = true)]
    pub max_pieces: Option<usize>,
    /// Command-specific mode (see each command's help).
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a surface spec and summarize it.
    Validate { input: String },
    /// Collar table of the thin part.
    Thickthin { input: String },
    /// h_g and the regularity constant (--mode exhaustive|parametric).
    Isoperimetry { input: String },
    /// Export the net graph (edge list by default, --format dot|json).
    Net { input: String },
    /// Cheeger constant of a net graph or edge list (--mode ambient|finite_half).
    Cheeger {
        input: String,
        /// Interior for ambient mode on edge lists, e.g. `0..9,12`.
        #[arg(long)]
        interior: Option<String>,
    },
    /// Four-point hyperbolicity (--mode exact|sampled).
    Hyperbolicity {
        input: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Boundary proxy and uniform perfectness.
    Boundary {
        input: String,
        /// Base vertex; the hub of piece 0 for specs, vertex 0 for edge lists.
        #[arg(long)]
        base: Option<usize>,
        /// Sphere radius; defaults to the eccentricity of the base.
        #[arg(long)]
        radius: Option<usize>,
        /// Visual parameter.
        #[arg(long, default_value_t = 2.0)]
        a: f64,
    },
    /// Quasi-isometry constants between the net graph and its quotient mesh.
    Qi {
        input: String,
        #[arg(long, default_value_t = 1)]
        refinement: usize,
    },
    /// One CSV row per family instance: param,h_g,best_domain_size,worst_c,verdict.
    Sweep {
        input: String,
        /// Parameter range `lo..hi`, inclusive; defaults to the family range.
        #[arg(long)]
        n: Option<String>,
    },
    /// List bundled examples, or print one.
    Bundled { name: Option<String> },
}

impl RunConfig {
    pub fn eps(&self) -> Result<MargulisParam, CliError> {
        match self.eps {
            None => Ok(MargulisParam::default_value()),
            Some(e) => MargulisParam::new(e).map_err(|e| CliError::Parameter(e.to_string())),
        }
    }

    pub fn net_params(&self) -> Result<NetBuildParams, CliError> {
        let eps = self.eps()?;
        match self.delta {
            None => Ok(NetBuildParams::default_for(eps)),
            Some(d) => NetBuildParams::new(eps, d).map_err(|e| CliError::Parameter(e.to_string())),
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Parameter(String),
    Other(anyhow::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Parameter(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        let msg = format!("{e:#}");
        for cause in e.chain() {
            if cause.is::<ValidationErrors>() {
                return CliError::Validation(msg);
            }
            if let Some(s) = cause.downcast_ref::<SurfaceError>() {
                return match s {
                    SurfaceError::Invalid(_) => CliError::Validation(msg),
                    SurfaceError::Parameter(_) | SurfaceError::Hyp(_) => CliError::Parameter(msg),
                    _ => CliError::Other(e),
                };
            }
            if let Some(n) = cause.downcast_ref::<NetError>() {
                return match n {
                    NetError::Surface(SurfaceError::Invalid(_)) => CliError::Validation(msg),
                    NetError::Parameter(_) | NetError::Hyp(_) | NetError::MismatchedSpec => {
                        CliError::Parameter(msg)
                    }
                    NetError::Graph(GraphError::Parameter(_) | GraphError::TooLarge { .. }) => {
                        CliError::Parameter(msg)
                    }
                    _ => CliError::Other(e),
                };
            }
            if let Some(g) = cause.downcast_ref::<GraphError>() {
                return match g {
                    GraphError::Parameter(_) | GraphError::TooLarge { .. } => CliError::Parameter(msg),
                    _ => CliError::Other(e),
                };
            }
            if cause.is::<HypError>() || cause.is::<FamilyError>() {
                return CliError::Parameter(msg);
            }
        }
        CliError::Other(e)
    }
}

macro_rules! impl_from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                anyhow::Error::from(e).into()
            }
        }
    )*};
}
impl_from_core!(SurfaceError, NetError, GraphError, HypError, FamilyError, ValidationErrors);

fn configure_threads() {
    if let Some(n) = std::env::var("CHEEGERNET_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a second initialization attempt only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let mut out = std::io::stdout().lock();
    match commands::run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            match e {
                CliError::Validation(m) => eprintln!("validation failed: {m}"),
                CliError::Parameter(m) => eprintln!("error: {m}"),
                CliError::Other(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(code)
        }
    }
}
