//! Shared tolerances and horizons. Every numeric rule in the crate reads its
//! thresholds from here so that reports can state exactly what was checked.

use serde::{Deserialize, Serialize};

/// Tolerances used by membership tests, residual checks and classifier rules.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct Tolerances {
    /// Slack for geometric membership tests on grids.
    pub membership: f64,
    /// Residual required of a refined fixed point.
    pub fixed_point_residual: f64,
    /// Residual required of a periodic point.
    pub periodic_residual: f64,
    /// Threshold for Cauchy-tail convergence tests.
    pub cauchy: f64,
    /// Maximum pairwise disagreement of Denjoy-Wolff limits across seeds.
    pub dw_agreement: f64,
    /// |w(z)| below this counts as a zero of the weight.
    pub weight_zero: f64,
    /// Relative tolerance for the Laurent projection identity.
    pub laurent_identity: f64,
    /// Slack used when eigenvalue moduli are compared against a norm estimate.
    pub spectral_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-9,
            fixed_point_residual: 1e-10,
            periodic_residual: 1e-8,
            cauchy: 1e-9,
            dw_agreement: 1e-6,
            weight_zero: 1e-12,
            laurent_identity: 1e-9,
            spectral_margin: 1e-9,
        }
    }
}

/// Iteration horizons. Finite-scale stand-ins for the limits in the criteria.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct Horizons {
    /// Steps for orbit classification.
    pub orbit_n: usize,
    /// Length of quotient sequences.
    pub quotient_n: usize,
    /// Largest shift power tried by witness searches.
    pub witness_n: usize,
    /// Steps for runaway / recurrence certificates.
    pub runaway_n: usize,
    /// Steps of lift iteration per seed for rotation numbers.
    pub rotation_n: usize,
    /// Largest period probed by the periodic-point scan.
    pub max_period: usize,
    /// Iterations discarded before periodicity is assessed.
    pub burn_in: usize,
    /// Trailing window length for Cauchy-tail tests.
    pub cauchy_window: usize,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons {
            orbit_n: 256,
            quotient_n: 512,
            witness_n: 1024,
            runaway_n: 128,
            rotation_n: 1 << 17,
            max_period: 16,
            burn_in: 64,
            cauchy_window: 10,
        }
    }
}

/// Bundle passed around by the analysis pipeline.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct Params {
    pub tolerances: Tolerances,
    pub horizons: Horizons,
}
