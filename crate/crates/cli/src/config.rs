//! Run configuration: a flat JSON file, overridden flag by flag.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mixlap_core::grid::{CartesianSpec, GridSpec, RadialSpec};
use mixlap_core::quad::PANEL_ORDER;
use mixlap_core::solver::{HProfile, Init, SolveConfig};
use mixlap_core::Params;

#[derive(Debug, Parser)]
#[command(
    name = "mixlap",
    version,
    about = "Kernels, solver and checks for -Δ + (-Δ)^s"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub flags: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandArg {
    /// Tabulate a kernel profile.
    Kernel {
        #[arg(value_enum)]
        which: KernelWhich,
    },
    /// Solve the critical equation.
    Solve,
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        which: VerifyWhich,
    },
    /// Qualitative analysis of a stored solution (`--input`).
    Analyze {
        #[arg(value_enum)]
        which: AnalyzeWhich,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelWhich {
    Heat,
    Fundamental,
    Split,
    Barrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyWhich {
    KernelBounds,
    OperatorIdentities,
    HeatProperties,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyzeWhich {
    Decay,
    Symmetry,
    Holder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Radial,
    Cartesian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Barrier,
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HKind {
    /// Unit-mass Gaussian of width 1.
    Gaussian,
    /// `(1 + |x|²)^{-(n+1)/2}`.
    Algebraic,
    /// Weight built so a known profile solves the equation.
    Manufactured,
}

/// Every setting, as read from `--config` or from flags. Unset values fall
/// back to the defaults listed in `--help`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Dimension [default: 4]
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Fractional order in (0,1) [default: 0.5]
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Subcritical power [default: 1]
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Coupling λ > 0 [default: 0.05]
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Grid kind [default: radial]
    #[arg(long, global = true, value_enum)]
    pub grid_kind: Option<GridKind>,
    /// Radial node count or cartesian points per axis [default: 768 radial, 64 cartesian; 256 radial for kernel and verify]
    #[arg(long, global = true)]
    pub grid_size: Option<usize>,
    /// Radial extent [default: 20; 40 for kernel and verify]
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Cartesian half-length [default: 8]
    #[arg(long = "box", global = true)]
    #[serde(rename = "box")]
    pub half_length: Option<f64>,
    /// Spectral extent of radial grids [default: 40]
    #[arg(long, global = true)]
    pub rho_max: Option<f64>,
    /// Solver tolerance, or bound tolerance for verify [default: 1e-8; 0.3]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration cap [default: 500]
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Damping in (0,1] [default: 1]
    #[arg(long, global = true)]
    pub damping: Option<f64>,
    /// Initial guess [default: barrier]
    #[arg(long, global = true, value_enum)]
    pub init: Option<InitKind>,
    /// Weight h [default: gaussian]
    #[arg(long, global = true, value_enum)]
    pub h: Option<HKind>,
    /// Heat-kernel times [default: 0.1,1,10]
    #[arg(long, global = true, value_delimiter = ',')]
    pub time: Option<Vec<f64>>,
    /// Raw field dump for analyze
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random subsampling [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with any of these settings; flags take precedence
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// `self` with every unset field taken from `base`.
    pub fn over(self, base: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: self.$f.or(base.$f),)* } };
        }
        pick!(
            n,
            s,
            p,
            lambda,
            grid_kind,
            grid_size,
            rmax,
            half_length,
            rho_max,
            tol,
            max_iter,
            damping,
            init,
            h,
            time,
            input,
            out,
            seed,
            config
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandArg,
    pub params: Params,
    pub grid: GridSpec,
    pub solver: SolveConfig,
    pub h: HKind,
    pub times: Vec<f64>,
    pub bound_tol: f64,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Configuration problems; all map to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Missing(PathBuf),
    Constraint(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse {
                path,
                line,
                column,
                message,
            } => {
                write!(f, "{}:{line}:{column}: {message}", path.display())
            }
            ConfigError::Missing(path) => write!(f, "{}: no such file", path.display()),
            ConfigError::Constraint(m) => write!(f, "{m}"),
        }
    }
}

pub fn read_settings(path: &Path) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|_| ConfigError::Missing(path.into()))?;
    if text.trim().is_empty() {
        return Ok(Settings::default());
    }
    serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Spectral node count resolving `J_ν(ρ r)` for `ρ <= rho_max`, `r <= r_max`.
fn spectral_nodes(rho_max: f64, r_max: f64, n_r: usize) -> usize {
    let panels = (rho_max * r_max / (3.0 * std::f64::consts::PI)).ceil() as usize;
    (panels * PANEL_ORDER).max(n_r).div_ceil(PANEL_ORDER) * PANEL_ORDER
}

fn constraint(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Constraint(e.to_string())
}

/// Merge flags over the `--config` file and fill in defaults.
pub fn parse_config(command: CommandArg, flags: Settings) -> Result<RunConfig, ConfigError> {
    let file = match &flags.config {
        Some(path) => read_settings(path)?,
        None => Settings::default(),
    };
    let set = flags.over(file);
    let defaults = Params::default();
    let params = Params {
        n: set.n.unwrap_or(defaults.n),
        s: set.s.unwrap_or(defaults.s),
        p: set.p.unwrap_or(defaults.p),
        lambda: set.lambda.unwrap_or(defaults.lambda),
    };
    params.validate().map_err(constraint)?;

    let kernel_run = matches!(
        command,
        CommandArg::Kernel { .. } | CommandArg::Verify { .. }
    );
    let grid = match set.grid_kind.unwrap_or(GridKind::Radial) {
        GridKind::Radial => {
            let r_max = set.rmax.unwrap_or(if kernel_run { 40.0 } else { 20.0 });
            let n_r = set.grid_size.unwrap_or(if kernel_run { 256 } else { 768 });
            let rho_max = set.rho_max.unwrap_or(40.0);
            GridSpec::Radial(
                RadialSpec::new(params.n, r_max, n_r)
                    .with_spectrum(rho_max, spectral_nodes(rho_max, r_max, n_r)),
            )
        }
        GridKind::Cartesian => GridSpec::Cartesian(CartesianSpec {
            n: params.n,
            points: set.grid_size.unwrap_or(64),
            half_length: set.half_length.unwrap_or(8.0),
        }),
    };
    if matches!(grid, GridSpec::Cartesian(_)) && params.n > 3 {
        return Err(ConfigError::Constraint(format!(
            "cartesian grids support n <= 3, got n = {}",
            params.n
        )));
    }

    let defaults = SolveConfig::default();
    let solver = SolveConfig {
        damping: set.damping.unwrap_or(defaults.damping),
        tol: if kernel_run {
            defaults.tol
        } else {
            set.tol.unwrap_or(defaults.tol)
        },
        max_iter: set.max_iter.unwrap_or(defaults.max_iter),
        init: match set.init.unwrap_or(InitKind::Barrier) {
            InitKind::Barrier => Init::Barrier,
            InitKind::Gaussian => Init::Gaussian { width: 1.0 },
            InitKind::Zero => Init::Zero,
        },
        positivity_projection: matches!(grid, GridSpec::Radial(_)),
        seed: set.seed.unwrap_or(0),
        ..defaults
    };
    solver.validate().map_err(constraint)?;
    let bound_tol = if kernel_run {
        set.tol.unwrap_or(0.3)
    } else {
        0.3
    };
    if !(bound_tol > 0.0) {
        return Err(ConfigError::Constraint(format!(
            "tol = {bound_tol} must be positive"
        )));
    }
    let times = set.time.unwrap_or_else(|| vec![0.1, 1.0, 10.0]);
    if let Some(t) = times.iter().find(|t| !(**t > 0.0)) {
        return Err(ConfigError::Constraint(format!(
            "time t = {t} must be positive"
        )));
    }
    if let CommandArg::Analyze { .. } = command {
        match &set.input {
            None => return Err(ConfigError::Constraint("analyze needs --input".into())),
            Some(p) if !p.exists() => return Err(ConfigError::Missing(p.clone())),
            _ => {}
        }
    }
    if let CommandArg::Solve = command {
        if params.n < 3 {
            return Err(ConfigError::Constraint(
                "solve needs n >= 3 for the critical power".into(),
            ));
        }
    }
    Ok(RunConfig {
        command,
        params,
        grid,
        solver,
        h: set.h.unwrap_or(HKind::Gaussian),
        times,
        bound_tol,
        input: set.input,
        out: set.out.unwrap_or_else(|| PathBuf::from("out")),
        seed: set.seed.unwrap_or(0),
    })
}

/// The weight profile behind a non-manufactured [`HKind`].
pub fn h_profile(kind: HKind, n: usize) -> Option<HProfile> {
    match kind {
        HKind::Gaussian => Some(HProfile::Gaussian { width: 1.0 }),
        HKind::Algebraic => Some(HProfile::Algebraic {
            amplitude: 1.0,
            q: 0.5 * (n as f64 + 1.0),
        }),
        HKind::Manufactured => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("c.json");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn empty_config_gives_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Settings {
            config: Some(write(dir.path(), "")),
            ..Default::default()
        };
        let c = parse_config(CommandArg::Solve, flags).unwrap();
        assert_eq!(c.params, Params::default());
        assert_eq!(
            (c.params.n, c.params.s, c.params.p, c.params.lambda),
            (4, 0.5, 1.0, 0.05)
        );
        assert_eq!(c.h, HKind::Gaussian);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let flags = Settings {
            lambda: Some(0.2),
            config: Some(write(dir.path(), r#"{"lambda": 0.1, "s": 0.25}"#)),
            ..Default::default()
        };
        let c = parse_config(CommandArg::Solve, flags).unwrap();
        assert_eq!(c.params.lambda, 0.2);
        assert_eq!(c.params.s, 0.25);
    }

    #[test]
    fn power_must_stay_subcritical() {
        let flags = Settings {
            n: Some(4),
            p: Some(5.0),
            ..Default::default()
        };
        let err = parse_config(CommandArg::Solve, flags).unwrap_err();
        assert!(matches!(err, ConfigError::Constraint(m) if m.contains("2*-1 = 3")));
    }

    #[test]
    fn spectral_nodes_resolve_oscillation() {
        let k = spectral_nodes(40.0, 20.0, 768);
        assert_eq!(k % PANEL_ORDER, 0);
        assert!(
            k >= 768 && k as f64 >= 40.0 * 20.0 / (3.0 * std::f64::consts::PI) * PANEL_ORDER as f64
        );
    }
}
