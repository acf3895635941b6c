//! Fixed workloads shared by the benchmarks.

use std::f64::consts::PI;

use angenent_core::orbit::{
    default_bracket, find_symmetric_closed_geodesic, DoughnutResult, DEFAULT_GRID,
};
use angenent_core::{integrate, Dimension, GeodesicPath, GeodesicState, IntegratorConfig};

pub fn dim(n: u64) -> Dimension {
    Dimension::new(n).expect("n >= 2")
}

/// One full loop of the sphere profile.
pub fn sphere_loop(n: Dimension, cfg: &IntegratorConfig) -> GeodesicPath {
    let cfg = IntegratorConfig {
        max_arclength: 2.0 * PI * n.sphere_radius(),
        ..cfg.clone()
    };
    integrate(n, GeodesicState::new(0.0, n.sphere_radius(), 0.0), &cfg).expect("sphere integrates")
}

pub fn doughnut(n: Dimension, jobs: usize) -> DoughnutResult {
    let (lo, hi) = default_bracket(n);
    find_symmetric_closed_geodesic(n, lo, hi, DEFAULT_GRID, &IntegratorConfig::default(), jobs)
        .expect("doughnut")
}
