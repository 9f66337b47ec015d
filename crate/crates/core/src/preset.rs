//! Basis parameters that converge the hydrogen-like 2s → 1s problem.

use crate::basis::BasisSpec;
use crate::twophoton::MultipoleChannel;

/// Degree of the default B-polynomial set (56 functions).
pub const BPOLY_DEGREE: usize = 55;

/// Cavity radius for nuclear charge `z`: the 2s density must have decayed at
/// the wall without the cavity being much larger than needed.
pub fn cavity_radius(z: f64) -> f64 {
    match z {
        z if z <= 1.0 => 50.0,
        z if (z - 40.0).abs() < 0.5 => 1.0,
        z if (z - 92.0).abs() < 0.5 => 0.25,
        z => (50.0 / z).max(0.25),
    }
}

pub fn bpoly(z: f64) -> BasisSpec {
    BasisSpec::bpoly(BPOLY_DEGREE, cavity_radius(z)).expect("preset is valid")
}

/// Order 9, 60 splines, R = 60 on the exponential grid.
pub fn bspline() -> BasisSpec {
    BasisSpec::bspline(9, 60, 60.0).expect("preset is valid")
}

pub fn channels() -> Vec<MultipoleChannel> {
    ["2E1", "E1M2", "2M1", "2E2", "2M2", "E2M1"]
        .iter()
        .map(|s| s.parse().expect("channel literal"))
        .collect()
}
