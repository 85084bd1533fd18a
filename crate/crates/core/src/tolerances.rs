//! Numeric thresholds and sampling densities shared by the pipeline.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SettingError {
    #[error("unknown setting '{0}'")]
    Unknown(String),
    #[error("invalid value {value} for '{name}': {reason}")]
    Invalid { name: String, value: f64, reason: String },
}

macro_rules! tolerances {
    ($( $(#[$doc:meta])* $name:ident : $default:expr ),* $(,)?) => {
        /// Named thresholds. Every field can be overridden by name from a
        /// run configuration.
        #[derive(Clone, Debug, PartialEq, Serialize)]
        pub struct Tolerances {
            $( $(#[$doc])* pub $name: f64, )*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $( $name: $default, )* }
            }
        }

        impl Tolerances {
            pub const NAMES: &'static [&'static str] = &[$( stringify!($name), )*];

            pub fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $( stringify!($name) => Some(self.$name), )*
                    _ => None,
                }
            }

            pub fn set(&mut self, name: &str, value: f64) -> Result<(), SettingError> {
                if !value.is_finite() || value <= 0.0 {
                    return Err(SettingError::Invalid {
                        name: name.to_string(),
                        value,
                        reason: "must be finite and positive".into(),
                    });
                }
                match name {
                    $( stringify!($name) => self.$name = value, )*
                    _ => return Err(SettingError::Unknown(name.to_string())),
                }
                Ok(())
            }

            /// `(name, value)` pairs in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                vec![$( (stringify!($name), self.$name), )*]
            }
        }
    };
}

tolerances! {
    /// Null classification of unit-scale vectors.
    null_tol: 1e-10,
    /// On-AdS residual `|<x,x> + 1|`.
    ads_tol: 1e-8,
    /// Minimum `<Gamma_s, Gamma_s>` for spacelike momentary curves.
    spacelike_tol: 1e-10,
    /// Gram determinant of the tangent plane must be below `-timelike_tol`.
    timelike_tol: 1e-10,
    /// `|<Gamma_s, Gamma_s> - 1|` when the parameter is assumed to be arc length.
    arc_tol: 1e-8,
    /// Node count of the arc-length table per momentary curve.
    arc_nodes: 512.0,
    /// Lower bound on `||Gamma ^ t ^ Gamma_t||`.
    frame_degenerate: 1e-10,
    /// `|kappa_g +- kappa_n|` at or below this is treated as parabolic.
    kappa_floor: 1e-8,
    /// `|sigma|` at or below this (after refinement) counts as a zero.
    swallowtail_tol: 1e-8,
    /// `|dsigma/ds|` needed for a simple zero of sigma.
    dsigma_floor: 1e-3,
    /// `max |sigma|` along a curve at or below this means a constant focal point.
    constant_focal_tol: 1e-9,
    /// Root refinement target for sigma and critical-point searches.
    root_tol: 1e-10,
    /// Height-function residual bound at focal points.
    focal_residual_tol: 1e-8,
    /// Parameter separation below which two preimages count as the same.
    preimage_sep: 1e-6,
}

impl Tolerances {
    pub fn arc_node_count(&self) -> usize {
        (self.arc_nodes.round() as usize).max(8)
    }
}

/// Sampling densities for fronts, focal curves and intersection search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleGrid {
    pub n_s: usize,
    pub n_t: usize,
    pub n_mu: usize,
    pub mu_range: (f64, f64),
    /// Edge length of the spatial hash cells (flat metric on ambient coordinates).
    pub hash_cell: f64,
    pub refine_tol: f64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            n_s: 64,
            n_t: 16,
            n_mu: 64,
            mu_range: (-3.0, 3.0),
            hash_cell: 0.05,
            refine_tol: 1e-9,
        }
    }
}

impl SampleGrid {
    pub fn validate(&self) -> Result<(), SettingError> {
        let bad = |name: &str, value: f64, reason: &str| SettingError::Invalid {
            name: name.into(),
            value,
            reason: reason.into(),
        };
        if self.n_s < 2 {
            return Err(bad("n_s", self.n_s as f64, "need at least 2 nodes"));
        }
        if self.n_t < 1 {
            return Err(bad("n_t", self.n_t as f64, "need at least 1 node"));
        }
        if self.n_mu < 2 {
            return Err(bad("n_mu", self.n_mu as f64, "need at least 2 nodes"));
        }
        let (lo, hi) = self.mu_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(bad("mu_max", hi, "mu range must be a nonempty finite interval"));
        }
        if !(self.hash_cell > 0.0 && self.hash_cell.is_finite()) {
            return Err(bad("hash_cell", self.hash_cell, "must be positive"));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(bad("refine_tol", self.refine_tol, "must be positive"));
        }
        Ok(())
    }

    pub fn mu_values(&self) -> Vec<f64> {
        linspace(self.mu_range.0, self.mu_range.1, self.n_mu)
    }

    pub fn t_values(&self, t_range: (f64, f64)) -> Vec<f64> {
        linspace(t_range.0, t_range.1, self.n_t)
    }
}

/// `n` evenly spaced nodes including both ends; a single node sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}
