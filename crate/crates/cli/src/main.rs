//! `quiverforge`: JSON in, JSON out.
//!
//! Exit codes: 0 success, 1 malformed input, 2 precondition failure,
//! 3 numerical non-convergence (the report is still printed).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "quiverforge", version, about = "Quiver representations, tensor products and moment-map flows")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Tolerance override; each command has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Initial flow step size.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Sign convention of the vortex equation, +1 or -1.
    #[arg(long, global = true, default_value_t = -1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Euler form <d, e> (e defaults to d).
    Euler {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        d: String,
        #[arg(long)]
        e: Option<String>,
    },
    /// Paths between two vertices up to a length bound.
    Paths {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        max_len: usize,
    },
    /// Tensor product of two quivers.
    TensorQuiver {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Tensor product of two representations, with its commutation relations.
    TensorRep {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Dual representation on the opposite quiver.
    Dual {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Quiver operations, optionally carrying a representation and stability data.
    Ops(OpsArgs),
    /// Residuals of a representation against a list of relations.
    CheckRelations {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        relations: PathBuf,
    },
    /// Exact theta-stability; only thin representations are supported.
    CheckStability {
        #[arg(long)]
        thin: bool,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Kempf-Ness flow towards the vortex equation.
    Flow {
        #[arg(long)]
        rep: PathBuf,
        /// Balanced parameter theta' (theta'.d = 0) unless --balance is given.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        balance: bool,
        /// Also write the flow limit as a representation.
        #[arg(long)]
        limit: Option<PathBuf>,
    },
    /// Polystability certificate for one representation or a batch file.
    Certify {
        #[arg(long, required_unless_present = "batch")]
        rep: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "batch")]
        theta: Option<String>,
        /// JSON array of {"rep": ..., "theta": [...]}, processed in parallel.
        #[arg(long, conflicts_with_all = ["rep", "theta"])]
        batch: Option<PathBuf>,
    },
    /// Checks that the tensor of two vortex solutions solves the tensor equation.
    VerifyTensorPolystability {
        #[arg(long)]
        left: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta_left: String,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta_right: String,
    },
    /// Tangent dimension of the moduli space at a vortex solution.
    TangentDim {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
    },
    /// Segre membership of a thin Kronecker-diamond representation.
    SegreCheck {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Symmetric polynomials and joint spectra.
    #[command(subcommand)]
    Charvar(CharvarCommand),
}

#[derive(Args)]
pub struct OpsArgs {
    #[command(subcommand)]
    pub op: Op,
    /// Quiver to operate on; taken from --rep when absent.
    #[arg(long, global = true)]
    pub quiver: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rep: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, global = true)]
    pub sigma: Option<String>,
    /// Isotropy constant for edge collapse, clone and delete.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<f64>,
}

#[derive(Subcommand)]
pub enum Op {
    /// Groups separated by ';', vertices by spaces or commas, e.g. "0 1; 2 3".
    CollapseVertices {
        #[arg(long)]
        groups: String,
    },
    CollapseEdges {
        #[arg(long)]
        edges: String,
    },
    Clone {
        #[arg(long, conflicts_with = "edge", required_unless_present = "edge")]
        vertex: Option<usize>,
        #[arg(long)]
        edge: Option<usize>,
    },
    Delete {
        #[arg(long, conflicts_with = "edge", required_unless_present = "edge")]
        vertex: Option<usize>,
        #[arg(long)]
        edge: Option<usize>,
    },
}

#[derive(Subcommand)]
pub enum CharvarCommand {
    /// The permutation tau in S_nm induced by (sigma, sigma').
    Tau {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        sigma_prime: String,
    },
    /// Substitution phi of a polynomial in (lambda, mu).
    Phi {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, required_unless_present = "dims")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "dims")]
        m: Option<usize>,
        /// Factor sizes for the r-fold version, e.g. "2 2 2".
        #[arg(long, conflicts_with_all = ["n", "m"])]
        dims: Option<String>,
    },
    /// Whether a multiset of tuples is a product grid.
    Grid {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Characteristic-polynomial invariants, and optionally the joint spectrum.
    Invariants {
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long)]
        joint: bool,
    },
}

/// A failure together with its exit code.
pub enum Failure {
    Malformed(String),
    Precondition(String),
}

impl From<quiverforge::Error> for Failure {
    fn from(e: quiverforge::Error) -> Self {
        match e {
            quiverforge::Error::Parse(m) => Failure::Malformed(m),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Malformed(e.to_string())
    }
}

/// JSON result and whether the numerics converged.
pub struct Output {
    pub value: serde_json::Value,
    pub converged: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::validate(&cli.run).and_then(|()| commands::dispatch(&cli.command, &cli.run));
    let (value, code) = match result {
        Ok(out) => {
            let code = if out.converged { 0 } else { 3 };
            (out.value, code)
        }
        Err(Failure::Malformed(m)) => (json!({"error": "malformed_json", "message": m}), 1),
        Err(Failure::Precondition(m)) => (json!({"error": "precondition", "message": m}), 2),
    };
    let text = match quiverforge::json::to_string(&value) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("quiverforge: could not serialize output: {e}");
            return ExitCode::from(2);
        }
    };
    match (&cli.run.out, code) {
        (Some(path), 0 | 3) => {
            if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                eprintln!("quiverforge: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        _ => println!("{text}"),
    }
    ExitCode::from(code)
}
