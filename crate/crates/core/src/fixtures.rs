//! The two reference world sheets shipped with the repository.

use crate::worldsheet::{ArcLengthMode, WorldSheet};

pub const HOPF_TORUS: [&str; 4] = ["sqrt(2)*cos(t)", "sqrt(2)*sin(t)", "cos(s)", "sin(s)"];

pub const PERTURBED_TORUS: [&str; 4] = [
    "sqrt(1 + cos(s)^2 + 1.44*sin(s)^2)*cos(t)",
    "sqrt(1 + cos(s)^2 + 1.44*sin(s)^2)*sin(t)",
    "cos(s)",
    "1.2*sin(s)",
];

/// `(sqrt2 cos t, sqrt2 sin t, cos s, sin s)`, `s` in `[0, 2pi]`, `t` in `[-1, 1]`.
pub fn hopf_torus() -> WorldSheet {
    WorldSheet::new(
        HOPF_TORUS,
        (0.0, std::f64::consts::TAU),
        (-1.0, 1.0),
        ArcLengthMode::Assume,
    )
    .expect("fixture parses")
}

/// `(c(s) cos t, c(s) sin t, cos s, 1.2 sin s)` with
/// `c = sqrt(1 + cos^2 s + 1.44 sin^2 s)`; not arc length in `s`.
pub fn perturbed_torus() -> WorldSheet {
    WorldSheet::new(
        PERTURBED_TORUS,
        (0.0, std::f64::consts::TAU),
        (-1.0, 1.0),
        ArcLengthMode::Reparametrize,
    )
    .expect("fixture parses")
}
