//! Versioned run report emitted next to the CSV series.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::monitors::{MonitorRecord, Verdict};

pub const REPORT_SCHEMA: &str = "ksflow-report v1";

/// Scheme identification pinned into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub version: String,
    pub time_integrator: String,
    pub advection: String,
    pub projection: String,
    /// Whether the build carries the data-parallel kernels.
    pub parallel: bool,
}

impl Default for SchemeMeta {
    fn default() -> Self {
        SchemeMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            time_integrator: "explicit-euler-adaptive".to_string(),
            advection: "donor-cell-upwind".to_string(),
            projection: "chorin-nonincremental".to_string(),
            parallel: cfg!(feature = "parallel"),
        }
    }
}

/// Full description of one completed run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub step_count: u64,
    pub wall_time_s: f64,
    /// Smallest accepted step.
    pub min_dt: f64,
    /// `max_t ‖div_h u‖_∞ / max(1, ‖u‖_∞)`, checked after every step.
    pub max_rel_div_u: f64,
    /// Total cells clipped from round-off-negative to zero.
    pub total_clipped: u64,
    pub meta: SchemeMeta,
    pub series: Vec<MonitorRecord>,
}
