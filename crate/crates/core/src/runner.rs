//! Scenario orchestration: single runs, m-sweeps, and result emission.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{MonitorConfig, RunConfig};
use crate::error::{ConfigError, RunError, SchemeError, StepError};
use crate::monitors::{self, MonitorRecord, Verdict, VerdictConfig};
use crate::ops;
use crate::params::Params;
use crate::report::{RunReport, SchemeMeta, REPORT_SCHEMA};
use crate::state::{init_state, State};
use crate::stokes::{step_velocity, PoissonSolver};
use crate::timestep::cfl_dt;
use crate::transport::{step_density, step_signal};

/// Hard safety net against runaway loops; desk-scale runs stay far below.
const MAX_STEPS: u64 = 50_000_000;

/// Why the time loop ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    ReachedTEnd,
    /// The stability step fell below dt_floor (suspected blow-up or loss of
    /// resolution).
    DtFloorCollapse { needed: f64 },
    /// `sup_n` crossed the configured hard cap.
    HardCap { sup_n: f64 },
    MaxSteps,
}

/// Everything [`simulate`] hands back.
#[derive(Debug)]
pub struct SimOutcome {
    pub series: Vec<MonitorRecord>,
    pub final_state: State,
    pub step_count: u64,
    pub min_dt: f64,
    pub max_rel_div_u: f64,
    pub total_clipped: u64,
    pub stopped: StopReason,
}

/// Integrate `state` to `params.t_end` (or an early stop), recording
/// monitors every `monitor.record_every` steps and at both ends.
pub fn simulate(
    mut state: State,
    params: &Params,
    solver: &PoissonSolver,
    monitor: &MonitorConfig,
    verdict_cfg: &VerdictConfig,
) -> Result<SimOutcome, RunError> {
    let t_slack = 1e-12 * params.t_end;
    let hard_cap = verdict_cfg.hard_cap_factor * state.n.max_abs();

    let mut series = Vec::new();
    let mut first = monitors::record(&state, params, &monitor.p_list);
    first.dt = 0.0;
    series.push(first);

    let mut steps: u64 = 0;
    let mut min_dt = f64::INFINITY;
    let mut last_dt = 0.0f64;
    let mut max_rel_div = 0.0f64;
    let mut clipped_total: u64 = 0;
    let mut last_recorded_step = 0u64;

    let stopped = loop {
        if state.t >= params.t_end - t_slack {
            break StopReason::ReachedTEnd;
        }
        if steps >= MAX_STEPS {
            break StopReason::MaxSteps;
        }
        let dt = match cfl_dt(&state, params) {
            Ok(dt) => dt,
            Err(SchemeError::TimeStepCollapse { needed, .. }) => {
                // leave a record carrying the collapsed dt so the verdict
                // rule can see the floor was hit
                let mut rec = monitors::record(&state, params, &monitor.p_list);
                rec.dt = needed;
                rec.clipped_cells = clipped_total;
                series.push(rec);
                last_recorded_step = steps;
                break StopReason::DtFloorCollapse { needed };
            }
            Err(e) => return Err(RunError::Scheme { step: steps, source: e }),
        };

        let density = step_density(&state, dt, params)
            .map_err(|e| RunError::Scheme { step: steps, source: e })?;
        let c_new = if params.evolve_signal {
            let mut c = step_signal(&state, dt)
                .map_err(|e| RunError::Scheme { step: steps, source: e })?;
            // runs start from nonnegative data, so the signal stays
            // nonnegative up to round-off; apply the same clipping policy
            // as for the density (clips are not counted for c)
            let allow = crate::transport::NEG_CLIP_REL * state.c.max_abs();
            let scan = crate::par::clip_negative(c.data_mut(), allow);
            if scan.min_negative < -allow {
                return Err(RunError::Scheme {
                    step: steps,
                    source: SchemeError::NegativeValue {
                        field: "c",
                        min: scan.min_negative,
                        allow,
                        t: state.t + dt,
                    },
                });
            }
            c
        } else {
            state.c.clone()
        };
        let (u_new, p_new) = if params.evolve_flow {
            match step_velocity(&state, dt, params, solver) {
                Ok(up) => up,
                Err(StepError::Scheme(e)) => return Err(RunError::Scheme { step: steps, source: e }),
                Err(StepError::Solver(e)) => return Err(RunError::Solver { step: steps, source: e }),
            }
        } else {
            (state.u.clone(), state.p.clone())
        };

        clipped_total += density.clipped as u64;
        state = State { n: density.n, c: c_new, u: u_new, p: p_new, t: state.t + dt };
        steps += 1;
        min_dt = min_dt.min(dt);
        last_dt = dt;

        if params.evolve_flow {
            let div = ops::divergence_inf_norm(&state.u);
            let scale = state.u.max_abs().max(1.0);
            max_rel_div = max_rel_div.max(div / scale);
        }

        let sup_n = state.n.max_abs();
        if sup_n > hard_cap {
            let mut rec = monitors::record(&state, params, &monitor.p_list);
            rec.dt = dt;
            rec.clipped_cells = clipped_total;
            series.push(rec);
            last_recorded_step = steps;
            break StopReason::HardCap { sup_n };
        }

        if steps % monitor.record_every as u64 == 0 {
            let mut rec = monitors::record(&state, params, &monitor.p_list);
            rec.dt = dt;
            rec.clipped_cells = clipped_total;
            series.push(rec);
            last_recorded_step = steps;
        }
    };

    if last_recorded_step != steps || series.len() == 1 {
        let mut rec = monitors::record(&state, params, &monitor.p_list);
        rec.dt = last_dt;
        rec.clipped_cells = clipped_total;
        series.push(rec);
    }

    Ok(SimOutcome {
        series,
        final_state: state,
        step_count: steps,
        min_dt: if min_dt.is_finite() { min_dt } else { 0.0 },
        max_rel_div_u: max_rel_div,
        total_clipped: clipped_total,
        stopped,
    })
}

/// Run one configured scenario end to end and write `series.csv` and
/// `report.json` into its output directory. Identical config and seed give
/// byte-identical CSV output.
pub fn run_single(config: &RunConfig) -> Result<RunReport, RunError> {
    let started = Instant::now();
    config.validate()?;
    let state = init_state(&config.grid, &config.ic, config.seed)?;
    let solver = config.solver.build(&config.grid);
    let verdict_cfg = config.effective_verdict();
    let outcome = simulate(state, &config.params, &solver, &config.monitor, &verdict_cfg)?;

    let verdict = verdict_for_outcome(&outcome, &verdict_cfg);
    let report = RunReport {
        schema: REPORT_SCHEMA.to_string(),
        config: config.clone(),
        verdict,
        step_count: outcome.step_count,
        wall_time_s: started.elapsed().as_secs_f64(),
        min_dt: outcome.min_dt,
        max_rel_div_u: outcome.max_rel_div_u,
        total_clipped: outcome.total_clipped,
        meta: SchemeMeta::default(),
        series: outcome.series,
    };
    write_outputs(&config.output_dir, &report)?;
    Ok(report)
}

/// The verdict rule over the recorded series, with the stop reason taking
/// precedence where it is more direct than the series statistics.
pub fn verdict_for_outcome(outcome: &SimOutcome, cfg: &VerdictConfig) -> Verdict {
    match &outcome.stopped {
        StopReason::DtFloorCollapse { needed } => Verdict {
            kind: monitors::VerdictKind::BlowupSuspected,
            evidence: format!("stability dt {needed:e} collapsed below floor {:e}", cfg.dt_floor),
        },
        StopReason::HardCap { sup_n } => Verdict {
            kind: monitors::VerdictKind::BlowupSuspected,
            evidence: format!(
                "sup_n {sup_n:e} crossed the hard cap ({}x initial)",
                cfg.hard_cap_factor
            ),
        },
        StopReason::MaxSteps => Verdict {
            kind: monitors::VerdictKind::Inconclusive,
            evidence: format!("step budget {MAX_STEPS} exhausted before t_end"),
        },
        StopReason::ReachedTEnd => monitors::verdict(&outcome.series, cfg),
    }
}

fn write_outputs(dir: &Path, report: &RunReport) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)?;
    let mut csv = std::io::BufWriter::new(std::fs::File::create(dir.join("series.csv"))?);
    monitors::write_csv(&report.series, &mut csv)?;
    csv.flush()?;
    let json = std::fs::File::create(dir.join("report.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(json), report)
        .map_err(|e| RunError::Io(std::io::Error::other(e)))?;
    Ok(())
}

/// One row of an m-sweep summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: f64,
    pub verdict: Option<Verdict>,
    pub final_sup_n: f64,
    pub min_dt: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    /// Fixed-format table, one line per m.
    pub fn table(&self) -> String {
        let mut out = String::from("m,verdict,final_sup_n,min_dt,error\n");
        for r in &self.rows {
            let verdict = r
                .verdict
                .as_ref()
                .map(|v| format!("{:?}", v.kind))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.m,
                verdict,
                r.final_sup_n,
                r.min_dt,
                r.error.clone().unwrap_or_default()
            ));
        }
        out
    }
}

/// Run `run_single` once per m value (independently, in parallel when the
/// build allows), collecting per-row outcomes. Individual failures land in
/// their row; the sweep itself keeps going.
pub fn sweep_m(config: &RunConfig, m_values: &[f64]) -> Result<SweepSummary, ConfigError> {
    for &m in m_values {
        if !(m > 1.0) || !m.is_finite() {
            return Err(ConfigError::Params(format!(
                "sweep m values must all be > 1, got {m}"
            )));
        }
    }
    let run_one = |&m: &f64| -> SweepRow {
        let mut cfg = config.clone();
        cfg.params.m = m;
        cfg.output_dir = config.output_dir.join(format!("m_{m}"));
        match run_single(&cfg) {
            Ok(report) => SweepRow {
                m,
                verdict: Some(report.verdict.clone()),
                final_sup_n: report.series.last().map(|r| r.sup_n).unwrap_or(f64::NAN),
                min_dt: report.min_dt,
                error: None,
            },
            Err(e) => SweepRow {
                m,
                verdict: None,
                final_sup_n: f64::NAN,
                min_dt: f64::NAN,
                error: Some(e.to_string()),
            },
        }
    };
    #[cfg(feature = "parallel")]
    let mut rows: Vec<SweepRow> = {
        use rayon::prelude::*;
        m_values.par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut rows: Vec<SweepRow> = m_values.iter().map(run_one).collect();

    rows.sort_by(|a, b| a.m.total_cmp(&b.m));
    Ok(SweepSummary { rows })
}
