//! Numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// Minimum-eigenvalue slack used for positivity (membership) decisions.
pub const EIGEN_TOL: f64 = 1e-9;
/// Relative agreement between the two weight computations.
pub const ORACLE_REL_TOL: f64 = 1e-12;
/// Agreement between the kernel and resolvent Berezin transforms.
pub const FORM_TOL: f64 = 1e-6;
/// Slack for identities that hold exactly on truncations.
pub const EXACT_TOL: f64 = 1e-10;

/// Tolerance overrides carried through configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eigen: f64,
    pub oracle_rel: f64,
    pub form: f64,
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen: EIGEN_TOL,
            oracle_rel: ORACLE_REL_TOL,
            form: FORM_TOL,
            exact: EXACT_TOL,
        }
    }
}
