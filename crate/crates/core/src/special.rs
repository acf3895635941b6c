//! `ln Γ` at integer and half-integer arguments.
//!
//! Only arguments of the form `k/2` occur (sphere areas), so small
//! arguments use the exact recursion from `Γ(1) = 1`, `Γ(1/2) = sqrt(π)`.
//! Large ones use the Stirling series, whose truncation error at
//! `z >= 40` is below 1e-19.

use std::f64::consts::PI;

const RECURSION_LIMIT: u64 = 80;

/// `ln Γ(k/2)` for `k >= 1`.
pub fn ln_gamma_half(k: u64) -> f64 {
    assert!(k >= 1, "ln_gamma_half: argument must be positive");
    if k <= RECURSION_LIMIT {
        gamma_half_exact(k).ln()
    } else {
        stirling(k as f64 / 2.0)
    }
}

/// `Γ(k/2)` by the exact recursion. Only used where it fits in an f64.
fn gamma_half_exact(k: u64) -> f64 {
    let mut z;
    let mut acc;
    if k.is_multiple_of(2) {
        z = 1.0;
        acc = 1.0;
    } else {
        z = 0.5;
        acc = PI.sqrt();
    }
    let target = k as f64 / 2.0;
    while z < target {
        acc *= z;
        z += 1.0;
    }
    acc
}

fn stirling(z: f64) -> f64 {
    let z2 = z * z;
    let series = 1.0 / 12.0
        - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * z2)) / z2) / z2) / z2;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series / z
}
