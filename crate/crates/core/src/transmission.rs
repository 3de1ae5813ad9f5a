//! Transmitted amplitude of a rectangular barrier below its top.
//!
//! With `κ = k/k_M`, `s = q/k_M = sqrt(W² − κ²)` and `x = qL = sΛ`,
//!
//! ```text
//! T(k) e^{ikL} = 1 / [cosh x − i c sinh x],   c = (2κ² − W²) / (2κ s)
//! ```
//!
//! so `|T|² = 1 / (cosh² x + c² sinh² x)` and the phase is `atan(c tanh x)`.
//! The `−kL` plane-wave factor is not part of the returned phase.

use crate::error::{Error, Result};
use crate::units::DimensionlessParams;

/// Below this `qL` the hyperbolic ratios are evaluated by Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
/// Above this `qL` hyperbolic functions are evaluated with `e^{qL}` factored out.
pub const SCALED_THRESHOLD: f64 = 30.0;

/// `|T|` and phase at one reduced wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionValue {
    pub modulus: f64,
    pub phase: f64,
    pub kappa: f64,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("kappa must lie in (0, 1], got {kappa}")))
    }
}

/// `sinh(x)/x` and `tanh(x)/x` for small x.
fn small_ratios(x: f64) -> (f64, f64) {
    let x2 = x * x;
    let sinhc = 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    let tanhc = 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
    (sinhc, tanhc)
}

/// Returns `(|T| e^{shift}, phase)`. `shift` must not exceed `qL`.
fn evaluate(kappa: f64, params: &DimensionlessParams, shift: f64) -> (f64, f64) {
    let w = params.strength();
    let width = params.width();
    let s = params.evanescent(kappa);
    let x = s * width;
    let num = 2.0 * kappa * kappa - w * w;

    if x < SERIES_THRESHOLD {
        // c sinh x = num Λ/(2κ) · sinh(x)/x, likewise for tanh
        let u = num * width / (2.0 * kappa);
        let (sinhc, tanhc) = small_ratios(x);
        let modulus = 1.0 / x.cosh().hypot(u * sinhc);
        return (modulus * shift.exp(), (u * tanhc).atan());
    }

    let c = num / (2.0 * kappa * s);
    let phase = (c * x.tanh()).atan();
    if x <= SCALED_THRESHOLD {
        let modulus = 1.0 / x.cosh().hypot(c * x.sinh());
        (modulus * shift.exp(), phase)
    } else {
        // cosh x = e^x (1 + e^{-2x})/2, sinh x = e^x (1 − e^{-2x})/2
        let e2 = (-2.0 * x).exp();
        let denom = (1.0 + e2).hypot(c * (1.0 - e2));
        (2.0 * (shift - x).exp() / denom, phase)
    }
}

/// Exact transmitted amplitude at `κ`.
pub fn amplitude(kappa: f64, params: &DimensionlessParams) -> Result<TransmissionValue> {
    check_kappa(kappa)?;
    let (modulus, phase) = evaluate(kappa, params, 0.0);
    Ok(TransmissionValue { modulus, phase, kappa })
}

/// `|T| e^{aΛ}` and phase, unchecked. The rescaling keeps opaque barriers
/// representable: `|T| ~ e^{-qL}` underflows once `qL` passes ~700, while
/// `q ≥ q_M` keeps the rescaled value below two.
#[inline]
pub(crate) fn amplitude_rescaled(kappa: f64, params: &DimensionlessParams) -> (f64, f64) {
    evaluate(kappa, params, params.evanescent_max() * params.width())
}

/// Log of the factor removed by [`amplitude_rescaled`]: `|T| = rescaled · e^{-aΛ}`.
pub fn rescale_log(params: &DimensionlessParams) -> f64 {
    params.evanescent_max() * params.width()
}

/// Opaque-barrier approximation `|T| ≈ 4kq e^{-qL} / w²`.
pub fn amplitude_opaque(kappa: f64, params: &DimensionlessParams) -> Result<f64> {
    check_kappa(kappa)?;
    let w = params.strength();
    let s = params.evanescent(kappa);
    Ok(4.0 * kappa * s * (-params.width() * s).exp() / (w * w))
}

/// Stationary-phase time `E_M t / ħ` at `κ`, the full (non-opaque) form:
///
/// ```text
/// E t/ħ = k [w⁴ sinh 2qL + 2k²(w² − 2k²) qL] / (q [w⁴ cosh 2qL + 8k²q² − w⁴])
/// ```
///
/// divided by `κ²` to convert `E` to `E_M`. Equals `(dφ/dκ) / (2κ)`.
pub fn stationary_time_full(kappa: f64, params: &DimensionlessParams) -> Result<f64> {
    check_kappa(kappa)?;
    let w = params.strength();
    let s = params.evanescent(kappa);
    if kappa >= w || s <= 0.0 {
        return Err(Error::invalid(format!(
            "stationary time needs kappa < W (q > 0), got kappa = {kappa}, W = {w}"
        )));
    }
    let x = s * params.width();
    let w4 = w.powi(4);
    let k2 = kappa * kappa;
    let linear = 2.0 * k2 * (w * w - 2.0 * k2) * x;
    let offset = 8.0 * k2 * s * s - w4;
    let (num, den) = if 2.0 * x <= SCALED_THRESHOLD {
        (
            kappa * (w4 * (2.0 * x).sinh() + linear),
            s * (w4 * (2.0 * x).cosh() + offset),
        )
    } else {
        // divide both brackets by e^{2x}
        let e2 = (-2.0 * x).exp();
        let e4 = e2 * e2;
        (
            kappa * (0.5 * w4 * (1.0 - e4) + linear * e2),
            s * (0.5 * w4 * (1.0 + e4) + offset * e2),
        )
    };
    if den == 0.0 {
        return Err(Error::VanishingDenominator("stationary_time_full"));
    }
    Ok(num / den / k2)
}
