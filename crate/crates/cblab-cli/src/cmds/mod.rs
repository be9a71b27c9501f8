//! Subcommand implementations and the shared failure → exit-code contract.

mod diagnose;
mod linear;
mod simulate;
mod toy;
mod weights;

use std::fs;
use std::path::PathBuf;
use std::sync::OnceLock;

use cblab::config::{self, ConfigError, ConfigMap};
use cblab::diag::DiagError;
use cblab::linear::LinearError;
use cblab::params::WeightParams;
use cblab::snapshot::SnapshotError;
use cblab::solver::SolverError;
use cblab::toy::ToyError;

use crate::manifest::Manifest;
use crate::RunArgs;

/// Terminal outcome of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: bad invocation, unreadable/invalid config, unusable inputs.
    Usage(String),
    /// Exit 1: a verification suite ran and did not pass.
    Check(String),
    /// Exit 3: the computation itself broke down (blow-up, overflow, CFL).
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::CflViolation { .. } | SolverError::NonFinite { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SnapshotError> for Failure {
    fn from(e: SnapshotError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<DiagError> for Failure {
    fn from(e: DiagError) -> Self {
        match e {
            DiagError::Overflow { .. } | DiagError::AliasedShift { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<LinearError> for Failure {
    fn from(e: LinearError) -> Self {
        match e {
            LinearError::Stalled(_) | LinearError::Fit(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ToyError> for Failure {
    fn from(e: ToyError) -> Self {
        match e {
            ToyError::BlowUp(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Applies the TOOL_THREADS cap to the global worker pool once, before any
/// parallel work. An unset or unparsable value leaves the default.
pub fn install_thread_cap() {
    static ONCE: OnceLock<()> = OnceLock::new();
    ONCE.get_or_init(|| {
        if let Some(n) = std::env::var("TOOL_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

/// Everything a subcommand needs: the parsed config, the validated weight
/// record, the output directory, and the manifest to extend.
pub struct Ctx {
    pub cfg: ConfigMap,
    pub weights: WeightParams,
    pub out: PathBuf,
    pub seed_flag: Option<u64>,
    pub manifest: Manifest,
}

impl Ctx {
    /// Echoes every field of the resolved weight record into the manifest.
    fn echo_weights(&mut self) {
        let p = &self.weights;
        for (key, value) in [
            ("weights.s", p.s),
            ("weights.lambda0", p.lambda0),
            ("weights.lambda_prime", p.lambda_prime),
            ("weights.sigma", p.sigma),
            ("weights.beta", p.beta),
            ("weights.kappa", p.kappa),
            ("weights.c_theta", p.c_theta),
            ("weights.mu", p.mu),
            ("weights.delta_l", p.delta_l),
            ("weights.delta_b", p.delta_b),
            ("weights.q_tilde", p.q_tilde),
            ("weights.delta_lambda", p.delta_lambda),
        ] {
            self.manifest.config_value(key, value);
        }
    }
}

/// Loads the config, validates the weight record, opens the manifest, runs
/// the subcommand, and finalizes the manifest with the outcome.
pub fn run(name: &str, args: &RunArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        Failure::Usage(format!("cannot read config {}: {e}", args.config.display()))
    })?;
    let cfg = ConfigMap::parse(&text)?;
    // Every subcommand validates the full weight record before any work.
    let weights = config::weight_params(&cfg)?;
    fs::create_dir_all(&args.out).map_err(|e| {
        Failure::Usage(format!(
            "cannot create output directory {}: {e}",
            args.out.display()
        ))
    })?;
    let manifest = Manifest::start(&args.out, name, args.seed)?;
    let mut ctx = Ctx {
        cfg,
        weights,
        out: args.out.clone(),
        seed_flag: args.seed,
        manifest,
    };
    ctx.echo_weights();
    let outcome = match name {
        "weights" => weights::run(&mut ctx),
        "linear" => linear::run(&mut ctx),
        "toy" => toy::run(&mut ctx),
        "simulate" => simulate::run(&mut ctx),
        "diagnose" => diagnose::run(&mut ctx),
        other => Err(Failure::Usage(format!("unknown subcommand {other}"))),
    };
    let error_text = outcome.as_ref().err().map(|f| f.message().to_string());
    ctx.manifest.finalize(error_text.as_deref())?;
    outcome
}
