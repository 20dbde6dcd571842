use mixlap_core::grid::{make_grid, CartesianSpec, Field, GridSpec, RadialSpec};
use mixlap_core::io::{read_raw, write_raw};
use mixlap_core::kernels::{fundamental_solution, heat_kernel_cartesian, FundamentalMethod};
use mixlap_core::operators::{apply_operator, solve_linear, OperatorKind};
use mixlap_core::Params;

fn periodic(n: usize, points: usize, half_length: f64) -> mixlap_core::grid::Grid {
    make_grid(&GridSpec::Cartesian(CartesianSpec {
        n,
        points,
        half_length,
    }))
    .unwrap()
}

#[test]
fn periodic_heat_kernel_has_unit_mass() {
    let g = periodic(3, 32, 6.0);
    for t in [0.1, 1.0] {
        let h = heat_kernel_cartesian(&g, t, 0.75).unwrap();
        assert!((h.integral() - 1.0).abs() < 1e-10, "t = {t}");
    }
}

#[test]
fn operator_inverts_linear_solve() {
    let g = periodic(2, 64, 6.0);
    let f = Field::radial(&g, |r| (1.0 - r * r) * (-r * r).exp());
    let mean = f.integral() / 144.0;
    let f = f.map(|v| v - mean);
    let params = Params::kernel(2, 0.3).unwrap();
    let u = solve_linear(&f, &params).unwrap();
    let back = apply_operator(&u, OperatorKind::Mixed { s: 0.3 }).unwrap();
    let err = back.zip_with(&f, |a, b| a - b).unwrap().sup_norm();
    assert!(err < 1e-10 * f.sup_norm(), "{err}");
}

#[test]
fn fundamental_solution_is_positive() {
    let g = make_grid(&GridSpec::Radial(RadialSpec::new(3, 20.0, 256))).unwrap();
    let params = Params::kernel(3, 0.5).unwrap();
    let z = fundamental_solution(&g, &params, FundamentalMethod::DirectMultiplier).unwrap();
    assert!(z.values.iter().all(|&v| v > 0.0));
}

#[test]
fn raw_dump_roundtrip() {
    let g = periodic(2, 16, 3.0);
    let f = Field::radial(&g, |r| (-r).exp());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.bin");
    write_raw(&path, &f, "test").unwrap();
    let (header, values) = read_raw(&path).unwrap();
    assert_eq!(header.shape, vec![16, 16]);
    assert_eq!(values, f.values());
}
