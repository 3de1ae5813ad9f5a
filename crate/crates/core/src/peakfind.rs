//! Numerical phase time: when the exit density peaks.
//!
//! A uniform coarse scan of `|Φ_T(L, τ)|²` locates the dominant hump, then a
//! golden-section search refines the maximum inside the bracket formed by
//! the best grid point and its two neighbours.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::phasetime::{
    moments_closed_form, phase_time_new, phase_time_spm, transit_velocity, PhaseTimeReport, SpmForm,
};
use crate::spectrum::{transmitted_mean_k, Spectrum};
use crate::transmission::rescale_log;
use crate::units::DimensionlessParams;
use crate::wavepacket::{QuadratureSettings, WavePacket};

pub const DEFAULT_COARSE_POINTS: usize = 256;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearchConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub coarse_points: usize,
    pub refine_tol: f64,
    pub execution: Execution,
}

impl PeakSearchConfig {
    pub fn new(tau_min: f64, tau_max: f64) -> Result<Self> {
        let cfg = Self {
            tau_min,
            tau_max,
            coarse_points: DEFAULT_COARSE_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
            execution: Execution::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Window `[0.1 τ, 5 τ + 10]` around an expected peak time.
    pub fn around(tau_estimate: f64) -> Result<Self> {
        Self::new(0.1 * tau_estimate, 5.0 * tau_estimate + 10.0)
    }

    /// Default window built from the new phase time with closed-form moments.
    pub fn for_params(params: &DimensionlessParams) -> Result<Self> {
        let tau_new = phase_time_new(&moments_closed_form(params)?, params)?;
        Self::around(tau_new)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_min.is_finite() && self.tau_max.is_finite() && self.tau_min < self.tau_max) {
            return Err(Error::invalid(format!(
                "search window must satisfy tau_min < tau_max, got [{}, {}]",
                self.tau_min, self.tau_max
            )));
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
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.coarse_points;
        let h = (self.tau_max - self.tau_min) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.tau_max
                } else {
                    self.tau_min + h * i as f64
                }
            })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.coarse_points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult {
    pub tau_peak: f64,
    /// Peak of `|Φ_T(L, τ)|² e^{2aΛ}`; see `density_log_scale`.
    pub density_peak: f64,
    /// `2aΛ`: the true density is `density_peak · e^{−density_log_scale}`.
    pub density_log_scale: f64,
    pub window_hit: bool,
    pub refine_steps: usize,
    /// Largest panel count used by any density evaluation.
    pub max_panels: usize,
}

impl PeakResult {
    pub fn true_density(&self) -> f64 {
        self.density_peak * (-self.density_log_scale).exp()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

struct Refined {
    x: f64,
    fx: f64,
    steps: usize,
    max_panels: usize,
}

fn golden_max<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<Refined>
where
    F: Fn(f64) -> Result<(f64, usize)>,
{
    let mut max_panels = 0;
    let mut eval = |x: f64| -> Result<f64> {
        let (v, p) = f(x)?;
        max_panels = max_panels.max(p);
        Ok(v)
    };
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut steps = 0;
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = eval(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = eval(d)?;
        }
        steps += 1;
        if steps > 500 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = eval(x)?;
    Ok(Refined {
        x,
        fx,
        steps,
        max_panels,
    })
}

/// Locates the maximum of the exit density within the configured window.
///
/// The search runs on the unit-norm spectrum, so the located time does not
/// depend on `N` at all; the reported density is scaled by `N²` afterwards.
pub fn peak_arrival(
    spec: &Spectrum,
    params: &DimensionlessParams,
    config: &PeakSearchConfig,
    settings: &QuadratureSettings,
) -> Result<PeakResult> {
    config.validate()?;
    if spec.norm() == 0.0 {
        return Err(Error::invalid("empty spectrum has no density peak"));
    }
    let shape = spec.with_norm(1.0)?;
    let packet = WavePacket::new(shape, *params, *settings)?;
    let density = |tau: f64| -> Result<(f64, usize)> {
        let s = packet.density_at_exit_rescaled(tau)?;
        Ok((s.density, s.panels))
    };

    let grid = config.grid();
    let coarse = exec::map(config.execution, &grid, |&t| density(t));
    let mut values = Vec::with_capacity(coarse.len());
    let mut max_panels = 0;
    for r in coarse {
        let (v, p) = r?;
        max_panels = max_panels.max(p);
        values.push(v);
    }
    let (best, _) = values.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
    );

    // best ≥ both neighbours by construction, so the bracket holds a local max
    let n = grid.len();
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n - 1)];
    let refined = golden_max(lo, hi, config.refine_tol, density)?;
    let (tau_peak, dens) = if refined.fx >= values[best] {
        (refined.x, refined.fx)
    } else {
        (grid[best], values[best])
    };
    let h = config.step();
    let window_hit = tau_peak - config.tau_min < h || config.tau_max - tau_peak < h;
    let norm = spec.norm();
    Ok(PeakResult {
        tau_peak,
        density_peak: dens * norm * norm,
        density_log_scale: 2.0 * rescale_log(params),
        window_hit,
        refine_steps: refined.steps,
        max_panels: max_panels.max(refined.max_panels),
    })
}

/// All phase times for one configuration.
///
/// `τ_SPM` uses the opaque form `1/a` and is `None` at `a = 0`. A peak on the
/// window boundary is reported as [`Error::WindowHit`].
pub fn full_report(
    spec: &Spectrum,
    params: &DimensionlessParams,
    config: &PeakSearchConfig,
    settings: &QuadratureSettings,
) -> Result<PhaseTimeReport> {
    let moments = moments_closed_form(params)?;
    let tau_new = phase_time_new(&moments, params)?;
    let tau_spm = match phase_time_spm(params, 1.0, SpmForm::Opaque) {
        Ok(t) => Some(t),
        Err(Error::Divergent(_)) => None,
        Err(e) => return Err(e),
    };
    let tau_spm_full = transmitted_mean_k(spec, params)
        .and_then(|k| phase_time_spm(params, k, SpmForm::Full))
        .ok();
    let peak = peak_arrival(spec, params, config, settings)?;
    if peak.window_hit {
        return Err(Error::WindowHit {
            tau_peak: peak.tau_peak,
            tau_min: config.tau_min,
            tau_max: config.tau_max,
        });
    }
    let v_transit = transit_velocity(peak.tau_peak, params)?;
    let v_analytic = transit_velocity(tau_new, params)?;
    Ok(PhaseTimeReport {
        tau_spm,
        tau_spm_full,
        tau_new,
        tau_numeric: peak.tau_peak,
        v_transit,
        ratio_ana_num: v_analytic / v_transit,
        panels: peak.max_panels,
        refine_steps: peak.refine_steps,
    })
}
