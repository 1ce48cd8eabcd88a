//! Discrete functionals recorded along a run and the verdict logic that
//! classifies the outcome.
//!
//! The recorded quantities mirror the bounds a global solution must satisfy:
//! constant total density mass, bounded signal mass, the energy
//! `Σ(n+eps)^{m-1} + Σc² + Σ|u|²`, sup norms of all fields, and discrete
//! W^{1,∞} proxies built from face differences.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::field::ScalarField;
use crate::ops;
use crate::par;
use crate::params::{pow_m, Params};
use crate::state::State;

/// One Lp norm entry of the density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub p: f64,
    pub value: f64,
}

/// Snapshot of all monitored functionals at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub t: f64,
    /// Step size that produced this state (0 for the initial record).
    pub dt: f64,
    pub mass_n: f64,
    pub mass_c: f64,
    pub sup_n: f64,
    pub sup_c: f64,
    pub sup_grad_c: f64,
    pub sup_u: f64,
    pub sup_grad_u: f64,
    /// `Σ(n+eps)^{m-1} h^N + Σ c² h^N + Σ |u|² h^N`.
    pub energy: f64,
    pub lp_n: Vec<LpNorm>,
    /// Cumulative count of round-off-negative cells clipped so far.
    pub clipped_cells: u64,
}

/// Compute all norms of `state` with the discrete measure `h^N`.
/// `dt` and `clipped_cells` are filled by the caller, which owns them.
pub fn record(state: &State, params: &Params, p_list: &[f64]) -> MonitorRecord {
    let vol = state.n.grid().cell_volume();
    let nd = state.n.data();
    let m = params.m;
    let eps = params.eps;
    let energy_n = par::sum_with(nd.len(), |i| pow_m(nd[i] + eps, m - 1.0)) * vol;
    let cd = state.c.data();
    let energy_c = par::sum_with(cd.len(), |i| cd[i] * cd[i]) * vol;
    let energy_u = state.u.l2_squared();
    let lp_n = p_list
        .iter()
        .map(|&p| LpNorm { p, value: lp_norm(&state.n, p) })
        .collect();
    MonitorRecord {
        t: state.t,
        dt: 0.0,
        mass_n: state.n.integral(),
        mass_c: state.c.integral(),
        sup_n: state.n.max_abs(),
        sup_c: state.c.max_abs(),
        sup_grad_c: ops::face_gradient_inf_norm(&state.c),
        sup_u: state.u.max_abs(),
        sup_grad_u: ops::velocity_gradient_inf_norm(&state.u),
        energy: energy_n + energy_c + energy_u,
        lp_n,
        clipped_cells: 0,
    }
}

/// `(Σ |q|^p h^N)^{1/p}`.
pub fn lp_norm(q: &ScalarField, p: f64) -> f64 {
    assert!(p >= 1.0, "Lp norms need p >= 1, got {p}");
    let vol = q.grid().cell_volume();
    let data = q.data();
    (par::sum_with(data.len(), |i| data[i].abs().powf(p)) * vol).powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Bounded,
    Growing,
    BlowupSuspected,
    Inconclusive,
}

/// Outcome classification plus the statistic that triggered it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub evidence: String,
}

fn default_growth_tol() -> f64 {
    0.05
}
fn default_hard_cap_factor() -> f64 {
    1e3
}
fn default_window_cap_factor() -> f64 {
    10.0
}

/// Thresholds of the verdict rule. The defaults are engineering choices:
/// no finite-time diagnostic can certify blow-up, so verdicts stay labeled
/// "suspected".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictConfig {
    /// A least-squares slope of `log sup_n` over the trailing half of the
    /// run above this (per unit time) reads as growth.
    #[serde(default = "default_growth_tol")]
    pub growth_tol: f64,
    /// `sup_n` above `hard_cap_factor * sup_n(0)` reads as suspected blow-up.
    #[serde(default = "default_hard_cap_factor")]
    pub hard_cap_factor: f64,
    /// Bounded additionally requires `sup_n` to stay within this factor of
    /// the running max over the first half of the run.
    #[serde(default = "default_window_cap_factor")]
    pub window_cap_factor: f64,
    /// Copied from the run parameters so the rule is self-contained.
    #[serde(default)]
    pub dt_floor: f64,
    #[serde(default)]
    pub t_end: f64,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            growth_tol: default_growth_tol(),
            hard_cap_factor: default_hard_cap_factor(),
            window_cap_factor: default_window_cap_factor(),
            dt_floor: 0.0,
            t_end: 0.0,
        }
    }
}

/// Classify a time-ordered, nonempty series.
pub fn verdict(series: &[MonitorRecord], cfg: &VerdictConfig) -> Verdict {
    assert!(!series.is_empty(), "verdict needs a nonempty series");
    let sup0 = series[0].sup_n;
    let hard_cap = cfg.hard_cap_factor * sup0;
    let reached_end = series.last().unwrap().t >= cfg.t_end * (1.0 - 1e-9);

    // dt-floor collapse: a mid-run step at/below the floor. The final step
    // is legitimately capped by the remaining time, so it is exempt.
    for r in series {
        let capped_tail = r.t >= cfg.t_end * (1.0 - 1e-9);
        if r.dt > 0.0 && cfg.dt_floor > 0.0 && r.dt <= cfg.dt_floor && !capped_tail {
            return Verdict {
                kind: VerdictKind::BlowupSuspected,
                evidence: format!("dt {:e} hit dt_floor {:e} at t = {}", r.dt, cfg.dt_floor, r.t),
            };
        }
        if r.sup_n > hard_cap {
            return Verdict {
                kind: VerdictKind::BlowupSuspected,
                evidence: format!(
                    "sup_n {:e} exceeded hard cap {:e} ({}x initial) at t = {}",
                    r.sup_n, hard_cap, cfg.hard_cap_factor, r.t
                ),
            };
        }
    }

    let t0 = series[0].t;
    let t1 = series.last().unwrap().t;
    let t_mid = 0.5 * (t0 + t1);
    let slope = log_slope(series.iter().filter(|r| r.t >= t_mid));
    if slope > cfg.growth_tol {
        return Verdict {
            kind: VerdictKind::Growing,
            evidence: format!(
                "log sup_n slope {slope:.4} per unit time over the trailing half exceeds {}",
                cfg.growth_tol
            ),
        };
    }

    let first_half_max = series
        .iter()
        .filter(|r| r.t <= t_mid)
        .map(|r| r.sup_n)
        .fold(0.0f64, f64::max);
    let overall_max = series.iter().map(|r| r.sup_n).fold(0.0f64, f64::max);
    let window_cap = cfg.window_cap_factor * first_half_max;
    if reached_end && overall_max <= window_cap * (1.0 + 1e-12) {
        return Verdict {
            kind: VerdictKind::Bounded,
            evidence: format!(
                "reached t_end {}; slope {slope:.4} <= {}; sup_n max {overall_max:e} within \
                 {}x first-half max {first_half_max:e}",
                cfg.t_end, cfg.growth_tol, cfg.window_cap_factor
            ),
        };
    }
    Verdict {
        kind: VerdictKind::Inconclusive,
        evidence: if reached_end {
            format!("sup_n max {overall_max:e} exceeded window cap {window_cap:e}")
        } else {
            format!("run stopped at t = {t1} before t_end {}", cfg.t_end)
        },
    }
}

/// Least-squares slope of `ln sup_n` against `t`; zero when degenerate.
fn log_slope<'a>(records: impl Iterator<Item = &'a MonitorRecord>) -> f64 {
    let pts: Vec<(f64, f64)> = records.map(|r| (r.t, r.sup_n.max(1e-300).ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, y) in pts {
        num += (t - mean_t) * (y - mean_y);
        den += (t - mean_t) * (t - mean_t);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Allowed relative drift of the density mass over a run.
pub const MASS_N_DRIFT_TOL: f64 = 1e-8;
/// Allowed relative excess of the signal mass over `max(mass_c(0), mass_n(0))`.
pub const MASS_C_EXCESS_TOL: f64 = 1e-6;

/// Result of the conserved-mass check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassCheck {
    pub pass: bool,
    /// `max_t |mass_n(t) − mass_n(0)| / mass_n(0)`.
    pub max_rel_drift: f64,
    /// `max_t mass_c(t) / max(mass_c(0), mass_n(0)) − 1`.
    pub max_rel_excess_c: f64,
}

/// Verify the discrete analogues of the conserved density mass and the
/// signal-mass bound `d/dt ∫c = −∫c + ∫n`.
pub fn check_mass_invariant(series: &[MonitorRecord]) -> MassCheck {
    assert!(!series.is_empty());
    let m0 = series[0].mass_n;
    let c_bound = series[0].mass_c.max(series[0].mass_n);
    let mut drift = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for r in series {
        if m0 != 0.0 {
            drift = drift.max((r.mass_n - m0).abs() / m0);
        } else {
            drift = drift.max(r.mass_n.abs());
        }
        if c_bound > 0.0 {
            excess = excess.max(r.mass_c / c_bound - 1.0);
        } else {
            excess = excess.max(r.mass_c);
        }
    }
    MassCheck {
        pass: drift <= MASS_N_DRIFT_TOL && excess <= MASS_C_EXCESS_TOL,
        max_rel_drift: drift,
        max_rel_excess_c: excess,
    }
}

const CSV_FIXED_HEAD: [&str; 10] = [
    "t",
    "dt",
    "mass_n",
    "mass_c",
    "sup_n",
    "sup_c",
    "sup_grad_c",
    "sup_u",
    "sup_grad_u",
    "energy",
];

/// Write the series as CSV. Column order is fixed:
/// `t,dt,mass_n,mass_c,sup_n,sup_c,sup_grad_c,sup_u,sup_grad_u,energy,
/// lp_n:<p>...,clipped_cells`. Floats print in shortest round-trip form, so
/// identical runs produce byte-identical files.
pub fn write_csv(series: &[MonitorRecord], w: &mut impl Write) -> std::io::Result<()> {
    let p_list: Vec<f64> = series
        .first()
        .map(|r| r.lp_n.iter().map(|l| l.p).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = CSV_FIXED_HEAD.iter().map(|s| s.to_string()).collect();
    for p in &p_list {
        header.push(format!("lp_n:{p}"));
    }
    header.push("clipped_cells".into());
    writeln!(w, "{}", header.join(","))?;
    for r in series {
        debug_assert_eq!(r.lp_n.len(), p_list.len());
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.dt,
            r.mass_n,
            r.mass_c,
            r.sup_n,
            r.sup_c,
            r.sup_grad_c,
            r.sup_u,
            r.sup_grad_u,
            r.energy
        );
        for l in &r.lp_n {
            row.push(',');
            row.push_str(&l.value.to_string());
        }
        writeln!(w, "{row},{}", r.clipped_cells)?;
    }
    Ok(())
}

/// Parse a series produced by [`write_csv`].
pub fn read_csv(r: impl BufRead) -> Result<Vec<MonitorRecord>, ConfigError> {
    let bad = |msg: String| ConfigError::Monitor(format!("csv: {msg}"));
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < CSV_FIXED_HEAD.len() + 1 {
        return Err(bad(format!("too few columns in header {header:?}")));
    }
    for (i, name) in CSV_FIXED_HEAD.iter().enumerate() {
        if cols[i] != *name {
            return Err(bad(format!("column {i} is {:?}, expected {name:?}", cols[i])));
        }
    }
    if *cols.last().unwrap() != "clipped_cells" {
        return Err(bad("last column must be clipped_cells".into()));
    }
    let p_list: Vec<f64> = cols[CSV_FIXED_HEAD.len()..cols.len() - 1]
        .iter()
        .map(|c| {
            c.strip_prefix("lp_n:")
                .ok_or_else(|| bad(format!("unexpected column {c:?}")))?
                .parse::<f64>()
                .map_err(|_| bad(format!("bad exponent in column {c:?}")))
        })
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(bad(format!("row {} has {} fields, expected {}", ln + 2, fields.len(), cols.len())));
        }
        let f = |i: usize| -> Result<f64, ConfigError> {
            fields[i].parse().map_err(|_| bad(format!("bad float {:?} in row {}", fields[i], ln + 2)))
        };
        let lp_n = p_list
            .iter()
            .enumerate()
            .map(|(j, &p)| Ok(LpNorm { p, value: f(CSV_FIXED_HEAD.len() + j)? }))
            .collect::<Result<_, ConfigError>>()?;
        out.push(MonitorRecord {
            t: f(0)?,
            dt: f(1)?,
            mass_n: f(2)?,
            mass_c: f(3)?,
            sup_n: f(4)?,
            sup_c: f(5)?,
            sup_grad_c: f(6)?,
            sup_u: f(7)?,
            sup_grad_u: f(8)?,
            energy: f(9)?,
            lp_n,
            clipped_cells: fields[cols.len() - 1]
                .parse()
                .map_err(|_| bad(format!("bad count {:?} in row {}", fields[cols.len() - 1], ln + 2)))?,
        });
    }
    Ok(out)
}
