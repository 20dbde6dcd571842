//! One function per subcommand; each writes its files under `out` and
//! returns the JSON result for the run record.

use std::path::Path;

use serde_json::{json, Value};

use mixlap_core::grid::{make_grid, Field, Grid};
use mixlap_core::io::{read_raw, write_field_profile, write_kernel_profile, write_raw};
use mixlap_core::kernels::{
    barrier_profile, fundamental_cross_check, fundamental_solution, heat_kernel,
    heat_kernel_cartesian, heat_mass, split_kernels, BarrierKind, FundamentalMethod, HeatKernel,
};
use mixlap_core::qualitative::{decay_slope, holder_seminorm, symmetry_deviation, Region};
use mixlap_core::solver::{manufactured_problem, solve_nonlinear};
use mixlap_core::Params;

use crate::checks::{heat_properties, kernel_bounds, operator_identities};
use crate::config::{h_profile, AnalyzeWhich, CommandArg, KernelWhich, RunConfig, VerifyWhich};
use crate::record::{Failure, Outcome, EXIT_NUMERICAL};

type Run = Result<Outcome, Failure>;

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialise")
}

struct Files<'a> {
    dir: &'a Path,
    names: Vec<String>,
}

impl<'a> Files<'a> {
    fn new(dir: &'a Path) -> Self {
        Files {
            dir,
            names: Vec::new(),
        }
    }

    fn path(&mut self, name: &str) -> std::path::PathBuf {
        self.names.push(name.into());
        self.dir.join(name)
    }

    fn outcome(self, result: Value, pass: bool) -> Run {
        Ok(Outcome {
            result,
            files: self.names,
            pass,
        })
    }
}

pub fn dispatch(config: &RunConfig) -> Run {
    std::fs::create_dir_all(&config.out)
        .map_err(|e| Failure::new(2, "OutputDirectory", e.to_string()))?;
    let grid = make_grid(&config.grid)?;
    match config.command {
        CommandArg::Kernel { which } => kernel(config, &grid, which),
        CommandArg::Solve => solve(config, &grid),
        CommandArg::Verify { which } => verify(config, &grid, which),
        CommandArg::Analyze { which } => analyze(config, which),
    }
}

fn kernel(config: &RunConfig, grid: &Grid, which: KernelWhich) -> Run {
    let params = Params::kernel(config.params.n, config.params.s)?;
    let mut files = Files::new(&config.out);
    let result = match which {
        KernelWhich::Heat => {
            let mut rows = Vec::new();
            for &t in &config.times {
                let name = format!("heat_t{t}.csv");
                if let Grid::Cartesian(_) = grid {
                    let h = heat_kernel_cartesian(grid, t, params.s)?;
                    write_field_profile(&files.path(&name), &h, "heat")?;
                    rows.push(json!({ "t": t, "mass": h.integral() }));
                } else {
                    let prof = heat_kernel(grid, t, &params)?;
                    let mass = heat_mass(&prof, &HeatKernel::new(params.n, params.s))?;
                    write_kernel_profile(&files.path(&name), &prof)?;
                    rows.push(json!({ "t": t, "mass": mass, "report": prof.report }));
                }
            }
            json!({ "profiles": rows })
        }
        KernelWhich::Fundamental => {
            let (z, worst) = fundamental_cross_check(grid, &params)?;
            write_kernel_profile(&files.path("fundamental.csv"), &z)?;
            json!({ "cross_check_worst": worst, "min": z.min(), "report": z.report })
        }
        KernelWhich::Split => {
            let (z1, z2) = split_kernels(grid, &params)?;
            let z = fundamental_solution(grid, &params, FundamentalMethod::TimeQuadrature)?;
            write_kernel_profile(&files.path("z1.csv"), &z1)?;
            write_kernel_profile(&files.path("z2.csv"), &z2)?;
            write_kernel_profile(&files.path("fundamental.csv"), &z)?;
            let hi = 0.5 * grid.as_radial()?.spec.r_max;
            let gap = z
                .r()
                .iter()
                .enumerate()
                .filter(|(_, r)| **r >= 0.1 && **r <= hi)
                .map(|(i, _)| ((z1.values[i] + z2.values[i] - z.values[i]) / z.values[i]).abs())
                .fold(0.0, f64::max);
            json!({ "sum_gap": gap, "window": [0.1, hi] })
        }
        KernelWhich::Barrier => {
            let mut rows = Vec::new();
            for (kind, name) in [(BarrierKind::Omega, "omega.csv"), (BarrierKind::V, "v.csv")] {
                let prof = barrier_profile(grid, &params, kind)?;
                write_kernel_profile(&files.path(name), &prof)?;
                rows.push(json!({ "kind": kind, "max": prof.values[0], "report": prof.report }));
            }
            json!({ "profiles": rows })
        }
    };
    files.outcome(result, true)
}

fn solve(config: &RunConfig, grid: &Grid) -> Run {
    let params = config.params;
    let mut files = Files::new(&config.out);
    let (h, target) = match h_profile(config.h, params.n) {
        Some(profile) => (profile.sample(grid)?, None),
        None => {
            let m = manufactured_problem(grid, &params)?;
            (m.h_star, Some(m.u_star))
        }
    };
    let (u, report) = solve_nonlinear(&h, &params, &config.solver)?;
    write_field_profile(&files.path("u.csv"), &u, "solution")?;
    write_raw(&files.path("u.bin"), &u, "solution")?;
    write_field_profile(&files.path("h.csv"), &h, "weight")?;
    let error =
        target.map(|t| u.zip_with(&t, |a, b| a - b).expect("same grid").sup_norm() / t.sup_norm());
    let result = json!({ "report": report, "manufactured_error": error, "sup": u.sup_norm() });
    if !report.converged {
        return Err(Failure::new(
            EXIT_NUMERICAL,
            "NotConverged",
            format!(
                "{}: best residual {:e} after {} iterations (tol {:e})",
                report.stop_reason, report.final_residual, report.iterations, config.solver.tol
            ),
        )
        .with_result(result, files.names));
    }
    files.outcome(result, true)
}

fn verify(config: &RunConfig, grid: &Grid, which: VerifyWhich) -> Run {
    let params = Params::kernel(config.params.n, config.params.s)?;
    let files = Files::new(&config.out);
    match which {
        VerifyWhich::KernelBounds => {
            let rep = kernel_bounds(grid, &params, config.bound_tol)?;
            files.outcome(to_json(&rep), rep.pass)
        }
        VerifyWhich::OperatorIdentities => {
            let rep = operator_identities(params.s)?;
            files.outcome(to_json(&rep), rep.pass)
        }
        VerifyWhich::HeatProperties => {
            let rep = heat_properties(grid, &params, &config.times)?;
            files.outcome(to_json(&rep), rep.pass)
        }
    }
}

fn load(path: &Path) -> Result<Field, Failure> {
    let (header, values) = read_raw(path)?;
    let grid = make_grid(&header.grid)?;
    Ok(Field::new(&grid, values)?)
}

fn analyze(config: &RunConfig, which: AnalyzeWhich) -> Run {
    let u = load(config.input.as_deref().expect("checked in parse_config"))?;
    let files = Files::new(&config.out);
    let n = u.grid().n();
    let trusted = match u.grid() {
        Grid::Radial(g) => 0.5 * g.spec.r_max,
        Grid::Cartesian(g) => 0.5 * g.spec.half_length,
    };
    match which {
        AnalyzeWhich::Decay => {
            let fit = decay_slope(&u, &vec![0.0; n], [2.0, trusted], config.params.s, 0.5)?;
            files.outcome(to_json(&fit), fit.pass)
        }
        AnalyzeWhich::Symmetry => {
            let rep = symmetry_deviation(&u)?;
            files.outcome(to_json(&rep), rep.deviation < 1e-3)
        }
        AnalyzeWhich::Holder => {
            let est = [0.5, 1.0]
                .iter()
                .map(|&a| holder_seminorm(&u, a, Region::Ball { radius: 1.0 }, config.seed))
                .collect::<mixlap_core::Result<Vec<_>>>()?;
            files.outcome(to_json(&est), true)
        }
    }
}
