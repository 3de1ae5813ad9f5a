//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # Table 1 with a finer coarse scan
//! experiment = table1
//! lambda = 50, 100, 150
//! coarse_points = 512
//! ```
//!
//! Every key is optional. Lists are comma separated; `#` starts a comment.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::peakfind::{DEFAULT_COARSE_POINTS, DEFAULT_REFINE_TOL};
use crate::spectrum::Spectrum;
use crate::wavepacket::QuadratureSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Table1,
    Fig1,
    Fig2,
    Single,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Single => "single",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(ExperimentKind::Table1),
            "fig1" => Ok(ExperimentKind::Fig1),
            "fig2" => Ok(ExperimentKind::Fig2),
            "single" => Ok(ExperimentKind::Single),
            _ => Err(Error::invalid(format!(
                "unknown experiment '{s}' (expected table1, fig1, fig2 or single)"
            ))),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// `Λ = k_M L` grid.
    pub lambda: Vec<f64>,
    /// `W = sqrt(V0/E_M)` grid.
    pub w: Vec<f64>,
    pub kappa0: f64,
    pub delta: f64,
    pub quadrature: QuadratureSettings,
    pub coarse_points: usize,
    pub refine_tol: f64,
    pub execution: Execution,
    pub out: Option<PathBuf>,
    pub trace: bool,
    pub trace_points: usize,
    pub trace_out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub const DEFAULT_TRACE_POINTS: usize = 400;

/// Height ratios `V0/E_M` drawn by default for the velocity curves.
pub const FIG1_HEIGHT_RATIOS: [f64; 4] = [1.0, 1.1, 1.3, 1.5];

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (lambda, w) = match kind {
            ExperimentKind::Table1 => ((1..=10).map(|i| 50.0 * i as f64).collect(), vec![1.0]),
            ExperimentKind::Fig1 => (
                (2..=20).map(|i| 10.0 * i as f64).collect(),
                FIG1_HEIGHT_RATIOS.iter().map(|r| r.sqrt()).collect(),
            ),
            ExperimentKind::Fig2 => (vec![100.0], (0..=20).map(|i| 1.0 + i as f64 / 20.0).collect()),
            ExperimentKind::Single => (vec![100.0], vec![1.0]),
        };
        let spec = Spectrum::reference();
        Self {
            kind,
            lambda,
            w,
            kappa0: spec.kappa0(),
            delta: spec.delta(),
            quadrature: QuadratureSettings::default(),
            coarse_points: DEFAULT_COARSE_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
            execution: Execution::default(),
            out: None,
            trace: false,
            trace_points: DEFAULT_TRACE_POINTS,
            trace_out: None,
            plot: None,
        }
    }

    /// Parses config text on top of the defaults for `kind`. An `experiment`
    /// key, if present, must agree with `kind`.
    pub fn parse(kind: ExperimentKind, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(kind);
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
            seen.push(key.to_string());
            if key == "w_ratio" && seen.iter().any(|k| k == "height_ratio")
                || key == "height_ratio" && seen.iter().any(|k| k == "w_ratio")
            {
                return Err(Error::Config {
                    line,
                    message: "w_ratio and height_ratio are mutually exclusive".into(),
                });
            }
            cfg.set(key, value).map_err(|e| Error::Config {
                line,
                message: match e {
                    Error::InvalidParameter(m) => m,
                    other => other.to_string(),
                },
            })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => {
                let k: ExperimentKind = value.parse()?;
                if k != self.kind {
                    return Err(Error::invalid(format!(
                        "file is for '{k}' but the run is '{}'",
                        self.kind
                    )));
                }
            }
            "lambda" => self.lambda = parse_list(key, value)?,
            "w_ratio" => self.w = parse_list(key, value)?,
            "height_ratio" => {
                let r = parse_list(key, value)?;
                if let Some(bad) = r.iter().find(|&&x| x.is_nan() || x < 1.0) {
                    return Err(Error::invalid(format!("height_ratio must be >= 1, got {bad}")));
                }
                self.w = r.iter().map(|x| x.sqrt()).collect();
            }
            "kappa0" => self.kappa0 = parse_one(key, value)?,
            "delta" => self.delta = parse_one(key, value)?,
            "nodes_per_panel" => self.quadrature.nodes_per_panel = parse_one(key, value)?,
            "max_panels" => self.quadrature.max_panels = parse_one(key, value)?,
            "rel_tol" => self.quadrature.rel_tol = parse_one(key, value)?,
            "coarse_points" => self.coarse_points = parse_one(key, value)?,
            "refine_tol" => self.refine_tol = parse_one(key, value)?,
            "execution" => {
                self.execution = match value {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    _ => {
                        return Err(Error::invalid(format!(
                            "execution must be parallel or sequential, got '{value}'"
                        )))
                    }
                }
            }
            "out" => self.out = Some(parse_path(key, value)?),
            "trace" => self.trace = parse_bool(key, value)?,
            "trace_points" => self.trace_points = parse_one(key, value)?,
            "trace_out" => self.trace_out = Some(parse_path(key, value)?),
            "plot" => self.plot = Some(parse_path(key, value)?),
            _ => return Err(Error::invalid(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::new(self.kappa0, self.delta)
    }

    /// Checks everything that does not need a numerical evaluation.
    pub fn validate(&self) -> Result<()> {
        self.spectrum()?;
        self.quadrature.validate()?;
        if self.lambda.is_empty() || self.w.is_empty() {
            return Err(Error::invalid("lambda and w_ratio lists must be non-empty"));
        }
        if let Some(l) = self.lambda.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::invalid(format!("lambda values must be positive, got {l}")));
        }
        if let Some(w) = self.w.iter().find(|&&w| !(w.is_finite() && w >= 1.0)) {
            return Err(Error::invalid(format!("w_ratio values must be >= 1, got {w}")));
        }
        if self.coarse_points < 16 {
            return Err(Error::invalid(format!(
                "coarse_points must be >= 16, got {}",
                self.coarse_points
            )));
        }
        if !(self.refine_tol.is_finite() && self.refine_tol > 0.0) {
            return Err(Error::invalid(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        if self.trace && self.trace_points < 2 {
            return Err(Error::invalid("trace_points must be >= 2"));
        }
        if self.kind == ExperimentKind::Single && (self.lambda.len() != 1 || self.w.len() != 1) {
            return Err(Error::invalid("single takes exactly one lambda and one w_ratio"));
        }
        Ok(())
    }

    /// Sweep points in output order: W outer, Λ inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.w
            .iter()
            .flat_map(|&w| self.lambda.iter().map(move |&l| (l, w)))
            .collect()
    }

    /// Trace destination: `trace_out`, else `<out stem>.trace.csv`, else `trace.csv`.
    pub fn trace_path(&self) -> PathBuf {
        if let Some(p) = &self.trace_out {
            return p.clone();
        }
        match &self.out {
            Some(out) => out.with_extension("trace.csv"),
            None => PathBuf::from("trace.csv"),
        }
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("cannot parse {key} value '{value}'")))
}

pub(crate) fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_one(key, v.trim())).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::invalid(format!("{key} must be true or false, got '{value}'"))),
    }
}

fn parse_path(key: &str, value: &str) -> Result<PathBuf> {
    if value.is_empty() {
        return Err(Error::invalid(format!("{key} needs a path")));
    }
    Ok(PathBuf::from(value))
}
