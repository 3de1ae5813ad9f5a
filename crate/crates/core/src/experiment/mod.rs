//! Sweeps over `(Λ, W)` grids with tabular output.
//!
//! Points are independent and evaluated through [`crate::exec::map`]; rows
//! always come back in grid order (W outer, Λ inner). A point whose
//! numerics fail becomes a row with an `error:` note and the sweep goes on.

mod config;
mod plot;
mod row;

pub use config::{ExperimentConfig, ExperimentKind, DEFAULT_TRACE_POINTS, FIG1_HEIGHT_RATIOS};
pub use plot::gnuplot_script;
pub use row::{
    fmt_f, read_rows, rows_to_string, write_rows, write_trace, ResultRow, TracePoint, DIVERGES, HEADER, TRACE_HEADER,
};

use crate::error::{Error, Result};
use crate::exec;
use crate::peakfind::{full_report, PeakSearchConfig};
use crate::phasetime::{moments_closed_form, phase_time_new, phase_time_spm, SpmForm};
use crate::spectrum::transmitted_mean_k;
use crate::transmission::rescale_log;
use crate::units::DimensionlessParams;
use crate::wavepacket::WavePacket;

/// Rows of a sweep plus how many points failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub failures: usize,
}

impl SweepOutput {
    fn new(rows: Vec<ResultRow>) -> Self {
        let failures = rows.iter().filter(|r| r.is_failure()).count();
        Self { rows, failures }
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.failures == self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleOutput {
    pub row: ResultRow,
    pub trace: Option<Vec<TracePoint>>,
}

fn search_config(cfg: &ExperimentConfig, params: &DimensionlessParams) -> Result<PeakSearchConfig> {
    let mut search = PeakSearchConfig::for_params(params)?;
    search.coarse_points = cfg.coarse_points;
    search.refine_tol = cfg.refine_tol;
    search.execution = cfg.execution;
    search.validate()?;
    Ok(search)
}

/// Evaluates one point. Numerical failures are folded into the row; bad
/// input is returned as an error.
pub fn evaluate_point(cfg: &ExperimentConfig, lambda: f64, w: f64) -> Result<ResultRow> {
    let spec = cfg.spectrum()?;
    let params = DimensionlessParams::new(w, lambda)?;
    let search = search_config(cfg, &params)?;
    match full_report(&spec, &params, &search, &cfg.quadrature) {
        Ok(r) => Ok(ResultRow::from_report(lambda, w, &r)),
        Err(e) if e.is_numerical() => {
            // keep whatever the closed forms still give
            let mut row = ResultRow::failed(lambda, w, &e);
            row.tau_new = moments_closed_form(&params)
                .and_then(|m| phase_time_new(&m, &params))
                .ok();
            row.tau_spm = phase_time_spm(&params, 1.0, SpmForm::Opaque).ok();
            row.tau_spm_full = transmitted_mean_k(&spec, &params)
                .and_then(|k| phase_time_spm(&params, k, SpmForm::Full))
                .ok();
            if row.tau_spm.is_none() {
                row.note = format!("{DIVERGES}; {}", row.note);
            }
            Ok(row)
        }
        Err(e) => Err(e),
    }
}

fn sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let points = cfg.points();
    let rows = exec::map(cfg.execution, &points, |&(l, w)| evaluate_point(cfg, l, w));
    Ok(SweepOutput::new(rows.into_iter().collect::<Result<_>>()?))
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::invalid(format!("config is for '{}', not '{kind}'", cfg.kind)));
    }
    Ok(())
}

/// Peak times and transit velocities on the Λ grid (default `W = 1`).
pub fn run_table1(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    expect_kind(cfg, ExperimentKind::Table1)?;
    sweep(cfg)
}

/// Transit velocity against Λ, one series per barrier height.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    expect_kind(cfg, ExperimentKind::Fig1)?;
    sweep(cfg)
}

/// Standard, moment-based and numerical times against W at fixed Λ.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    expect_kind(cfg, ExperimentKind::Fig2)?;
    sweep(cfg)
}

/// One point, plus the exit density over the search window if requested.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleOutput> {
    expect_kind(cfg, ExperimentKind::Single)?;
    cfg.validate()?;
    let (lambda, w) = (cfg.lambda[0], cfg.w[0]);
    let row = evaluate_point(cfg, lambda, w)?;
    let trace = if cfg.trace {
        Some(density_trace(cfg, lambda, w, row.tau_num)?)
    } else {
        None
    };
    Ok(SingleOutput { row, trace })
}

/// Exit density on a uniform grid over the default search window, with
/// `tau_peak` (if any) spliced in so the trace contains the maximum.
pub fn density_trace(cfg: &ExperimentConfig, lambda: f64, w: f64, tau_peak: Option<f64>) -> Result<Vec<TracePoint>> {
    let params = DimensionlessParams::new(w, lambda)?;
    let search = search_config(cfg, &params)?;
    let n = cfg.trace_points.max(2);
    let h = (search.tau_max - search.tau_min) / (n - 1) as f64;
    let mut taus: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                search.tau_max
            } else {
                search.tau_min + h * i as f64
            }
        })
        .collect();
    if let Some(t) = tau_peak {
        let at = taus.partition_point(|&x| x < t);
        if taus.get(at) != Some(&t) {
            taus.insert(at, t);
        }
    }
    let packet = WavePacket::new(cfg.spectrum()?, params, cfg.quadrature)?;
    let scale = (-2.0 * rescale_log(&params)).exp();
    exec::map(cfg.execution, &taus, |&tau| {
        let s = packet.density_at_exit_rescaled(tau)?;
        Ok(TracePoint {
            tau,
            density: s.density * scale,
            density_scaled: s.density,
        })
    })
    .into_iter()
    .collect()
}

/// Runs whichever experiment `cfg` names and returns its rows.
pub fn run(cfg: &ExperimentConfig) -> Result<(SweepOutput, Option<Vec<TracePoint>>)> {
    match cfg.kind {
        ExperimentKind::Table1 => Ok((run_table1(cfg)?, None)),
        ExperimentKind::Fig1 => Ok((run_fig1(cfg)?, None)),
        ExperimentKind::Fig2 => Ok((run_fig2(cfg)?, None)),
        ExperimentKind::Single => {
            let s = run_single(cfg)?;
            Ok((SweepOutput::new(vec![s.row]), s.trace))
        }
    }
}
