//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mixlap_core::grid::{make_grid, CartesianSpec, Field, Grid, GridSpec, RadialSpec};
use mixlap_core::kernels::{
    distributional_identity, fit_loglog, fundamental_solution, heat_kernel, heat_kernel_cartesian,
    schwartz_battery, split_kernels, FundamentalMethod,
};
use mixlap_core::qualitative::{
    decay_slope, embed_radial, positivity_check, reflection_difference, symmetry_deviation,
};
use mixlap_core::solver::{
    gagliardo_double_sum, gagliardo_seminorm, manufactured_problem, principal_eigenvalue, residual,
    solve_nonlinear, HProfile, Init, SolveConfig,
};
use mixlap_core::symbols::{multiplier_m, split_multipliers};
use mixlap_core::Params;
use mixlap_tool::checks::{heat_properties, kernel_bounds, operator_identities, semigroup_error};

type Verdict = (bool, String);

const ORDERS: [f64; 3] = [0.25, 0.5, 0.75];

fn cartesian(n: usize, points: usize, half_length: f64) -> Grid {
    make_grid(&GridSpec::Cartesian(CartesianSpec {
        n,
        points,
        half_length,
    }))
    .unwrap()
}

fn radial(n: usize, r_max: f64, n_r: usize) -> Grid {
    make_grid(&GridSpec::Radial(RadialSpec::new(n, r_max, n_r))).unwrap()
}

/// The radial grid used for nonlinear solves.
fn solve_grid() -> Grid {
    make_grid(&GridSpec::Radial(
        RadialSpec::new(4, 20.0, 768).with_spectrum(40.0, 1280),
    ))
    .unwrap()
}

fn heat_mass() -> Verdict {
    let mut worst_cart: f64 = 0.0;
    let mut worst_rad: f64 = 0.0;
    let times = [0.1, 1.0, 10.0];
    for n in [2, 3] {
        for s in ORDERS {
            let g = cartesian(n, if n == 2 { 64 } else { 32 }, 16.0);
            for t in times {
                worst_cart = worst_cart
                    .max((heat_kernel_cartesian(&g, t, s).unwrap().integral() - 1.0).abs());
            }
        }
    }
    for s in ORDERS {
        let rep = heat_properties(
            &radial(4, 40.0, 256),
            &Params::kernel(4, s).unwrap(),
            &times,
        )
        .unwrap();
        worst_rad = rep
            .radial_mass_errors
            .iter()
            .map(|e| e.1)
            .fold(worst_rad, f64::max);
    }
    (
        worst_cart < 1e-6 && worst_rad < 1e-4,
        format!(
            "max |mass-1| cartesian {worst_cart:.1e} (< 1e-6), radial n=4 {worst_rad:.1e} (< 1e-4)"
        ),
    )
}

fn semigroup() -> Verdict {
    let g = cartesian(2, 32, 8.0);
    let worst = [0.25, 0.75]
        .iter()
        .map(|&s| semigroup_error(&g, s, 0.5, 1.0).unwrap())
        .fold(0.0, f64::max);
    (
        worst < 1e-6,
        format!("sup |H(0.5)*H(1) - H(1.5)| = {worst:.1e} (< 1e-6)"),
    )
}

fn heat_shape() -> Verdict {
    let mut increase: f64 = 0.0;
    let mut clamped: f64 = 0.0;
    let mut negative = false;
    for n in [2, 3, 4] {
        for s in ORDERS {
            let g = radial(n, 40.0, 256);
            for t in [0.1, 1.0, 10.0] {
                let prof = heat_kernel(&g, t, &Params::kernel(n, s).unwrap()).unwrap();
                let peak = prof.values[0];
                for w in prof.values.windows(2) {
                    increase = increase.max((w[1] - w[0]) / peak);
                }
                clamped = clamped.max(prof.report.max_clamped / peak);
                negative |= prof.min() < 0.0;
            }
        }
    }
    (
        increase <= 1e-10 && clamped < 1e-10 && !negative,
        format!("max relative increase {increase:.1e} (<= 1e-10), largest clamped negativity {clamped:.1e} of max"),
    )
}

fn fundamental_bounds() -> Verdict {
    let g = radial(4, 40.0, 256);
    let mut pass = true;
    let mut parts = Vec::new();
    for s in ORDERS {
        match kernel_bounds(&g, &Params::kernel(4, s).unwrap(), 0.3) {
            Ok(rep) => {
                let ok = rep.far.pass
                    && rep.near.pass
                    && rep.min_value > 0.0
                    && rep.cross_check_worst < 1e-4;
                pass &= ok;
                parts.push(format!(
                    "s={s}: far {:.2}, near {:.2}, min {:.1e}, methods {:.1e}",
                    rep.far.fitted_slope,
                    rep.near.fitted_slope,
                    rep.min_value,
                    rep.cross_check_worst
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("s={s}: {e}"));
            }
        }
    }
    (pass, parts.join("; "))
}

fn distributional() -> Verdict {
    let g = radial(4, 40.0, 256);
    let mut worst: f64 = 0.0;
    for s in ORDERS {
        let p = Params::kernel(4, s).unwrap();
        let z = fundamental_solution(&g, &p, FundamentalMethod::TimeQuadrature).unwrap();
        for t in schwartz_battery() {
            worst = worst.max(distributional_identity(&z, s, &t).unwrap().rel_error);
        }
    }
    (
        worst < 1e-4,
        format!("max relative gap over 5 profiles, 3 orders: {worst:.1e} (< 1e-4)"),
    )
}

fn decomposition() -> Verdict {
    let s = 0.5;
    let mut worst_sym: f64 = 0.0;
    for k in 0..10_000 {
        let xi = 10f64.powf(-3.0 + 6.0 * k as f64 / 9_999.0);
        let (m1, m2) = split_multipliers(xi, s).unwrap();
        let m = multiplier_m(xi, s).unwrap();
        worst_sym = worst_sym.max((m1 + m2 - m).abs() / (m * f64::EPSILON));
    }
    let g = radial(4, 40.0, 256);
    let p = Params::kernel(4, s).unwrap();
    let (z1, z2) = split_kernels(&g, &p).unwrap();
    let z = fundamental_solution(&g, &p, FundamentalMethod::TimeQuadrature).unwrap();
    let sum_gap = z
        .r()
        .iter()
        .enumerate()
        .filter(|(_, r)| (0.1..=20.0).contains(*r))
        .map(|(i, _)| ((z1.values[i] + z2.values[i] - z.values[i]) / z.values[i]).abs())
        .fold(0.0, f64::max);
    let (r, v) = z2.window(5.0, 20.0);
    let tail = match fit_loglog(&r, &v) {
        Ok(fit) => (
            fit.slope < -8.0,
            format!("Z2 slope {:.2} on [5,20] (needs < -8)", fit.slope),
        ),
        Err(e) => {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (
                false,
                format!("Z2 on [5,20] has no power-law tail ({e}); range [{lo:.1e}, {hi:.1e}]"),
            )
        }
    };
    (
        worst_sym <= 1.0 && sum_gap < 1e-6 && tail.0,
        format!(
            "|M1+M2-M| <= {worst_sym:.2} ulp at 1e4 frequencies; |Z1+Z2-Z|/Z {sum_gap:.1e} (< 1e-6); {}",
            tail.1
        ),
    )
}

fn operator() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in ORDERS {
        let rep = operator_identities(s).unwrap();
        pass &= rep.pass;
        let pw = rep.pointwise.iter().map(|p| p.1).fold(0.0, f64::max);
        parts.push(format!(
            "s={s}: wave {:.0e}, trip {:.0e}/{:.0e}, pointwise {pw:.0e}, c {:.0e}",
            rep.plane_wave_error,
            rep.roundtrip_cartesian,
            rep.roundtrip_radial,
            ((rep.calibrated - rep.closed_form) / rep.closed_form).abs()
        ));
    }
    (pass, parts.join("; "))
}

fn gagliardo() -> Verdict {
    let g = cartesian(2, 64, 12.0);
    let mut worst: f64 = 0.0;
    for sigma in [1.0, 1.25] {
        let u = Field::from_points(&g, |x| {
            (-0.5 * (x[0] * x[0] + x[1] * x[1]) / (sigma * sigma)).exp()
        })
        .unwrap();
        for s in ORDERS {
            let spectral = gagliardo_seminorm(&u, s).unwrap().powi(2);
            let brute = gagliardo_double_sum(&u, s).unwrap();
            worst = worst.max(((brute - spectral) / spectral).abs());
        }
    }
    (
        worst < 0.02,
        format!("max relative gap {:.2}% on 64² (< 2%)", 100.0 * worst),
    )
}

struct Solved {
    u: Field,
    params: Params,
}

fn manufactured(store: &mut Option<Solved>) -> Verdict {
    let g = solve_grid();
    let params = Params::new(4, 0.5, 1.0, 0.05).unwrap();
    let m = manufactured_problem(&g, &params).unwrap();
    let start: Vec<f64> = m
        .u_star
        .values()
        .iter()
        .zip(g.radii())
        .map(|(u, r)| 1.05 * u * (1.0 + 0.1 * (-r * r).exp()))
        .collect();
    let cfg = SolveConfig {
        init: Init::Provided { values: start },
        tol: 1e-9,
        ..Default::default()
    };
    let (u, rep) = solve_nonlinear(&m.h_star, &params, &cfg).unwrap();
    let err = u.zip_with(&m.u_star, |a, b| a - b).unwrap().sup_norm() / m.u_star.sup_norm();
    let res = residual(&u, &m.h_star, &params).unwrap();
    let pass = rep.converged && err < 1e-4 && res < 1e-6;
    *store = Some(Solved { u, params });
    (
        pass,
        format!(
            "{} iterations, sup error {err:.1e} (< 1e-4), residual {res:.1e} (< 1e-6)",
            rep.iterations
        ),
    )
}

fn radial_checks(label: &str, u: &Field, params: &Params) -> (bool, String) {
    let s = params.s;
    let n = params.n as f64;
    let margin = positivity_check(u);
    let fit = decay_slope(u, &[0.0; 4], [2.0, 10.0], s, 0.5).unwrap();
    let window_ok = fit.slope >= -(n + 2.0 * s) - 0.5 && fit.slope <= -(n - 2.0 * s) + 0.5;
    let slice = cartesian(3, 32, 4.0);
    let embedded = embed_radial(u, &slice).unwrap();
    let (_, reflect_min) = reflection_difference(&embedded, 0.0, 0).unwrap();
    let sym = symmetry_deviation(u).unwrap().deviation;
    (
        margin > 0.0 && window_ok && reflect_min >= -1e-10 && sym == 0.0,
        format!(
            "{label}: margin {margin:.1e}, slope {:.2}, reflection min {reflect_min:.0e}",
            fit.slope
        ),
    )
}

fn qualitative(store: &Option<Solved>) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    match store {
        Some(sol) => {
            let (ok, msg) = radial_checks("manufactured", &sol.u, &sol.params);
            pass &= ok;
            parts.push(msg);
        }
        None => {
            pass = false;
            parts.push("manufactured solution unavailable".into());
        }
    }

    let g = solve_grid();
    let h = HProfile::default().sample(&g).unwrap();
    let (lambda1, _) = principal_eigenvalue(&h, 0.5, 1e-12, 10_000).unwrap();
    let params = Params::new(4, 0.5, 1.0, 0.7 * lambda1).unwrap();
    let cfg = SolveConfig {
        tol: 1e-9,
        ..Default::default()
    };
    let (u, rep) = solve_nonlinear(&h, &params, &cfg).unwrap();
    let (ok, msg) = radial_checks(
        &format!("gaussian h, λ = 0.7 λ₁ = {:.1}", params.lambda),
        &u,
        &params,
    );
    pass &= ok && rep.converged;
    parts.push(msg);

    let g = cartesian(3, 64, 8.0);
    let h = HProfile::default().sample(&g).unwrap();
    let (lambda1, _) = principal_eigenvalue(&h, 0.5, 1e-10, 10_000).unwrap();
    let params = Params::new(3, 0.5, 1.0, 0.7 * lambda1).unwrap();
    let cfg = SolveConfig {
        tol: 1e-9,
        positivity_projection: false,
        ..Default::default()
    };
    let (u, rep) = solve_nonlinear(&h, &params, &cfg).unwrap();
    let sym = symmetry_deviation(&u).unwrap();
    pass &= rep.converged && sym.deviation < 1e-3;
    parts.push(format!(
        "n=3 periodic: deviation {:.1e} (< 1e-3)",
        sym.deviation
    ));
    (pass, parts.join("; "))
}

fn run_cli(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_mixlap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("mixlap-determinism-{}", std::process::id()));
    let input = dir.join("u.bin");
    let input = input.to_str().unwrap();
    let runs: [&[&str]; 3] = [
        &["solve", "--h", "manufactured", "--seed", "7"],
        &["analyze", "holder", "--input", input, "--seed", "7"],
        &["verify", "heat-properties", "--n", "2", "--s", "0.25"],
    ];
    let mut identical = true;
    let mut names = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let out = dir.join(format!("run{k}"));
        let out = if k == 0 { dir.clone() } else { out };
        let read = |code: i32| {
            (
                code,
                std::fs::read(out.join("run.json")).unwrap_or_default(),
            )
        };
        let first = read(run_cli(args, &out));
        let bin_first = if k == 0 {
            std::fs::read(&input).ok()
        } else {
            None
        };
        let second = read(run_cli(args, &out));
        let bin_second = if k == 0 {
            std::fs::read(&input).ok()
        } else {
            None
        };
        let same = first == second && bin_first == bin_second && first.0 == 0;
        identical &= same;
        names.push(format!(
            "{} {}",
            args[0],
            if same { "identical" } else { "differs" }
        ));
    }
    std::fs::remove_dir_all(&dir).ok();
    (identical, names.join(", "))
}

fn main() {
    let mut failures = 0;
    let mut store = None;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(v) => v,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{}] {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    };
    report(1, "heat-kernel mass", &mut heat_mass);
    report(2, "semigroup", &mut semigroup);
    report(3, "heat-kernel shape", &mut heat_shape);
    report(4, "fundamental-solution bounds", &mut fundamental_bounds);
    report(5, "distributional identity", &mut distributional);
    report(6, "decomposition", &mut decomposition);
    report(7, "operator identities", &mut operator);
    report(8, "gagliardo oracle", &mut gagliardo);
    report(9, "manufactured solution", &mut || manufactured(&mut store));
    report(10, "qualitative checks", &mut || qualitative(&store));
    report(11, "determinism", &mut determinism);
    println!("acceptance: {} of 11 criteria pass", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
