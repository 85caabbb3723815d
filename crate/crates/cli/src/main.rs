use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac_l2_cli::config::parse_list;
use dirac_l2_cli::{output_dir, run, Command, DomainConfig, IdentityKind, QuadratureConfig, RunConfig, UsageError};

#[derive(Parser)]
#[command(name = "dirac-l2", version, about = "Weighted L2 estimates for the Dirac operator: checks and solves")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check an identity or estimate on seeded random bump fields.
    Verify(Common),
    /// Ratios, cross-checks and orthogonality for the counterexample family.
    Obstruction(Common),
    /// Discrete minimal-norm solves under grid refinement.
    Solve(Common),
    /// Cutoff sequence approaching the Gaussian constant.
    Sharpness(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration as JSON; other flags are ignored when given.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (default: $DIRAC_L2_OUT_DIR or ./dirac-l2-out).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// gauss, log, radial_power, x1sq, aniso or zero.
    #[arg(long, default_value = "gauss")]
    weight: String,
    /// Exponent for radial_power.
    #[arg(long)]
    weight_m: Option<f64>,
    /// Coefficients for aniso, comma separated.
    #[arg(long)]
    a: Option<String>,
    /// Radial exponent, counterexample index or cutoff index; comma separated.
    #[arg(long)]
    m: Option<String>,
    /// annulus:R0,R1, cube:LO,HI or ball:R.
    #[arg(long, value_parser = DomainConfig::parse)]
    domain: Option<DomainConfig>,
    #[arg(long)]
    radial_nodes: Option<usize>,
    #[arg(long)]
    sphere_level: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    identity: Option<IdentityKind>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Polynomial degree of the random bump amplitudes.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long)]
    kappa: Option<f64>,
    /// Auxiliary constant k of the application inequality.
    #[arg(long)]
    k_aux: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Cells along the longest side at the coarsest level.
    #[arg(long, default_value_t = 16)]
    cells: usize,
    /// Compose two solves for the Laplace equation.
    #[arg(long)]
    poisson: bool,
    /// Relative tolerance for identity residuals.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn to_config(&self, command: Command) -> Result<RunConfig, UsageError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            let cfg = RunConfig::from_json(&text)?;
            if cfg.command != command {
                return Err(UsageError(format!("config is for `{:?}`", cfg.command).to_lowercase()));
            }
            return Ok(cfg);
        }
        let mut cfg = RunConfig::new(command, self.n);
        cfg.weight.kind = self.weight.clone();
        cfg.weight.m = self.weight_m;
        let list = |flag: &str, v: &Option<String>| -> Result<Option<Vec<f64>>, UsageError> {
            v.as_deref()
                .map(|s| parse_list(s).map_err(|e| UsageError(format!("--{flag}: {e}"))))
                .transpose()
        };
        cfg.weight.a = list("a", &self.a)?;
        if self.a.is_some() && self.weight == "gauss" {
            cfg.weight.kind = "aniso".into();
        }
        cfg.domain = self.domain.clone();
        let q = QuadratureConfig::default_for(self.n);
        cfg.quadrature = QuadratureConfig {
            radial_nodes: self.radial_nodes.unwrap_or(q.radial_nodes),
            sphere_level: self.sphere_level.unwrap_or(q.sphere_level),
        };
        cfg.seed = self.seed;
        cfg.tolerances.identity = self.tol;
        cfg.identity = self.identity;
        cfg.trials = self.trials;
        cfg.degree = self.degree;
        cfg.kappa = self.kappa;
        cfg.k_aux = self.k_aux;
        cfg.epsilon = self.epsilon;
        cfg.m_list = list("m", &self.m)?.unwrap_or_default();
        cfg.levels = self.levels;
        cfg.cells = self.cells;
        cfg.poisson = self.poisson;
        if command == Command::Verify && cfg.trials == 0 {
            return Err(UsageError("trial count must be positive".into()));
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Obstruction(c) => (Command::Obstruction, c),
        Sub::Solve(c) => (Command::Solve, c),
        Sub::Sharpness(c) => (Command::Sharpness, c),
    };
    let report = match common.to_config(command).and_then(|cfg| run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let dir = output_dir(common.out.clone());
    if let Err(e) = report.write(&dir) {
        eprintln!("error: cannot write report to {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for e in report.entries.iter().filter(|e| !e.pass) {
        let trial = e.trial.map(|t| format!(" trial {t}")).unwrap_or_default();
        let note = e.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default();
        println!("FAIL {}{trial}{note}", e.label);
    }
    let s = &report.summary;
    println!("{} entries, {} passed, {} failed; report in {}", s.total, s.passed, s.failed, dir.display());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
