//! Transmitted wave packet by spectral quadrature.
//!
//! Past the barrier the packet is
//!
//! ```text
//! Φ_T(x, τ) = ∫₀¹ dκ g(κ) |T(κ)| e^{iφ(κ)} e^{i(κ x − κ² τ)}
//! ```
//!
//! with `x` measured from the exit face in units of `1/k_M` and
//! `τ = E_M t / ħ`. The integral runs over κ with the exact amplitude.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, GaussLegendre};
use crate::spectrum::Spectrum;
use crate::transmission::{amplitude_rescaled, rescale_log};
use crate::units::DimensionlessParams;

/// Settings for the oscillatory κ-quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub nodes_per_panel: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            nodes_per_panel: 32,
            max_panels: 4096,
            rel_tol: 1e-8,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel < 8 {
            return Err(Error::invalid(format!(
                "nodes_per_panel must be >= 8, got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::invalid(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::invalid("max_panels must be positive"));
        }
        Ok(())
    }
}

/// One evaluation of the transmitted packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub position: f64,
    pub time: f64,
    pub amplitude: Complex64,
    pub density: f64,
    /// Quadrature panels used.
    pub panels: usize,
}

/// Initial panel count: four per oscillation of the chirp `e^{i(κx − κ²τ)}`.
pub fn initial_panels(position: f64, time: f64) -> usize {
    let cycles = (time.abs() + position.abs()) / (2.0 * PI);
    (4.0 * (1.0 + cycles)).ceil() as usize
}

/// A reusable evaluator for one spectrum and barrier.
#[derive(Debug, Clone)]
pub struct WavePacket {
    spec: Spectrum,
    params: DimensionlessParams,
    settings: QuadratureSettings,
    rule: GaussLegendre,
}

impl WavePacket {
    pub fn new(spec: Spectrum, params: DimensionlessParams, settings: QuadratureSettings) -> Result<Self> {
        settings.validate()?;
        Ok(Self {
            spec,
            params,
            settings,
            rule: GaussLegendre::new(settings.nodes_per_panel),
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spec
    }

    pub fn params(&self) -> &DimensionlessParams {
        &self.params
    }

    /// `Φ_T · e^{aΛ}`. The rescaling keeps densities of strong barriers
    /// (`aΛ` in the hundreds) away from underflow; it does not move the peak.
    pub fn sample_rescaled(&self, position: f64, time: f64) -> Result<WaveSample> {
        if !(position.is_finite() && position >= 0.0) {
            return Err(Error::invalid(format!(
                "position must be >= 0 (past the barrier), got {position}"
            )));
        }
        if !time.is_finite() {
            return Err(Error::invalid(format!("time must be finite, got {time}")));
        }
        let opts = AdaptiveOptions {
            initial_panels: initial_panels(position, time),
            max_panels: self.settings.max_panels,
            rel_tol: self.settings.rel_tol,
        };
        let integrand = |k: f64| {
            let g = self.spec.evaluate(k);
            if g == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (m, phi) = amplitude_rescaled(k, &self.params);
            Complex64::from_polar(g * m, phi + k * position - k * k * time)
        };
        let r = integrate_adaptive(&self.rule, 0.0, 1.0, &opts, "wave packet synthesis", &integrand)?;
        Ok(WaveSample {
            position,
            time,
            amplitude: r.value,
            density: r.value.norm_sqr(),
            panels: r.panels,
        })
    }

    pub fn sample(&self, position: f64, time: f64) -> Result<WaveSample> {
        let mut s = self.sample_rescaled(position, time)?;
        let scale = (-rescale_log(&self.params)).exp();
        s.amplitude *= scale;
        s.density = s.amplitude.norm_sqr();
        Ok(s)
    }

    /// `|Φ_T(L, τ)|²`.
    pub fn density_at_exit(&self, time: f64) -> Result<f64> {
        Ok(self.sample(0.0, time)?.density)
    }

    /// `|Φ_T(L, τ)|² e^{2aΛ}`.
    pub fn density_at_exit_rescaled(&self, time: f64) -> Result<WaveSample> {
        self.sample_rescaled(0.0, time)
    }
}

pub fn synthesize(
    spec: &Spectrum,
    params: &DimensionlessParams,
    position: f64,
    time: f64,
    settings: &QuadratureSettings,
) -> Result<WaveSample> {
    WavePacket::new(*spec, *params, *settings)?.sample(position, time)
}

pub fn density_at_exit(
    spec: &Spectrum,
    params: &DimensionlessParams,
    time: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    WavePacket::new(*spec, *params, *settings)?.density_at_exit(time)
}
