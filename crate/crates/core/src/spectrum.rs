//! Incoming momentum distribution and the transmitted mean momentum.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, GaussLegendre};
use crate::transmission::amplitude_rescaled;
use crate::units::DimensionlessParams;

/// Truncated Gaussian `g(κ) = N exp[−(κ − κ₀)² δ² / 4]` on `0 ≤ κ ≤ 1`.
///
/// `δ = k_M d` is the reduced localization. The cutoff sits at `κ = 1`
/// (`k = k_M`). `N` defaults to one; every derived time is independent of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    kappa0: f64,
    delta: f64,
    norm: f64,
}

impl Spectrum {
    pub fn new(kappa0: f64, delta: f64) -> Result<Self> {
        if !(kappa0.is_finite() && kappa0 > 0.0 && kappa0 < 1.0) {
            return Err(Error::invalid(format!("kappa0 must lie in (0, 1), got {kappa0}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(Self {
            kappa0,
            delta,
            norm: 1.0,
        })
    }

    /// `κ₀ = 1/2`, `δ = 10`.
    pub fn reference() -> Self {
        Self::new(0.5, 10.0).expect("reference spectrum is valid")
    }

    /// Same shape with `N` replaced. Zero is allowed (an empty packet).
    pub fn with_norm(mut self, norm: f64) -> Result<Self> {
        if !(norm.is_finite() && norm >= 0.0) {
            return Err(Error::invalid(format!("norm must be finite and >= 0, got {norm}")));
        }
        self.norm = norm;
        Ok(self)
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn evaluate(&self, kappa: f64) -> f64 {
        if !(0.0..=1.0).contains(&kappa) {
            return 0.0;
        }
        let d = (kappa - self.kappa0) * self.delta;
        self.norm * (-0.25 * d * d).exp()
    }
}

const MEAN_K_NODES: usize = 32;
const MEAN_K_TOL: f64 = 1e-8;
const MEAN_K_MAX_PANELS: usize = 4096;

/// Mean transmitted wavenumber `∫κ g²|T|² / ∫g²|T|²` over `κ ∈ [0, 1]`,
/// with the exact amplitude.
pub fn transmitted_mean_k(spec: &Spectrum, params: &DimensionlessParams) -> Result<f64> {
    let rule = GaussLegendre::new(MEAN_K_NODES);
    let opts = AdaptiveOptions {
        initial_panels: 8,
        max_panels: MEAN_K_MAX_PANELS,
        rel_tol: MEAN_K_TOL,
    };
    // |T| rescaled by e^{aΛ}; the factor cancels in the ratio
    let density = |k: f64| {
        let (m, _) = amplitude_rescaled(k, params);
        let g = spec.evaluate(k);
        g * g * m * m
    };
    let den = integrate_adaptive(&rule, 0.0, 1.0, &opts, "transmitted_mean_k", &density)?;
    if den.value <= 0.0 || !den.value.is_finite() {
        return Err(Error::VanishingDenominator("transmitted_mean_k"));
    }
    let num = integrate_adaptive(&rule, 0.0, 1.0, &opts, "transmitted_mean_k", &|k: f64| k * density(k))?;
    Ok(num.value / den.value)
}

/// Opaque-limit estimate `κ̄ ≈ 1 − a / (2Λ)`.
pub fn mean_k_opaque(params: &DimensionlessParams) -> f64 {
    if params.width() == 0.0 {
        return if params.evanescent_max() == 0.0 {
            1.0
        } else {
            f64::NEG_INFINITY
        };
    }
    1.0 - params.evanescent_max() / (2.0 * params.width())
}
