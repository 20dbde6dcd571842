//! Shared fixtures for the benchmarks.

use mixlap_core::grid::{make_grid, CartesianSpec, Grid, GridSpec, RadialSpec};

pub fn radial(n: usize, r_max: f64, n_r: usize) -> Grid {
    make_grid(&GridSpec::Radial(RadialSpec::new(n, r_max, n_r))).expect("valid radial grid")
}

pub fn solve_grid() -> Grid {
    make_grid(&GridSpec::Radial(
        RadialSpec::new(4, 20.0, 768).with_spectrum(40.0, 1280),
    ))
    .expect("valid radial grid")
}

pub fn cartesian(n: usize, points: usize, half_length: f64) -> Grid {
    make_grid(&GridSpec::Cartesian(CartesianSpec {
        n,
        points,
        half_length,
    }))
    .expect("valid cartesian grid")
}
