//! Analytic phase-time formulas for opaque barriers.
//!
//! Near the cutoff the transmitted spectrum is parameterized by
//! `ρ = (q − q_M)/k_M`. Expanding the phase and energy to second order in ρ
//! gives a density at the exit face
//!
//! ```text
//! S(τ) = |∫ dρ (ρ + a)² e^{−ρΛ} e^{i(α ρ + β ρ²)}|²,   α = 2(aτ − 1),  β = τ − a
//! ```
//!
//! whose second-order moment expansion is a quadratic in τ. Its maximum is
//! the new phase time; the old stationary-phase time is `τ = 1/a`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions, GaussLegendre};
use crate::units::DimensionlessParams;

/// Which reading of the moment integral produced a [`MomentTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// Closed form, upper limit taken to infinity.
    ClosedForm,
    /// Quadrature up to the finite limit `ρ(w) = W − a`.
    Exact,
}

/// `s(n) = ∫ (ρ + a)² ρⁿ e^{−ρΛ} dρ` for n = 0..4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTable {
    pub s: [f64; 5],
    pub mode: MomentMode,
    pub a: f64,
    pub width: f64,
    pub strength: f64,
    /// Upper limit `W − a` of the finite-range integral.
    pub upper_limit: f64,
}

impl MomentTable {
    /// `s(1)² − s(0)s(2)`
    pub fn c11(&self) -> f64 {
        let s = &self.s;
        s[1] * s[1] - s[0] * s[2]
    }

    /// `s(1)s(2) − s(0)s(3)`
    pub fn c12(&self) -> f64 {
        let s = &self.s;
        s[1] * s[2] - s[0] * s[3]
    }

    /// `s(2)² − s(0)s(4)`
    pub fn c22(&self) -> f64 {
        let s = &self.s;
        s[2] * s[2] - s[0] * s[4]
    }
}

fn upper_limit(params: &DimensionlessParams) -> f64 {
    // W − a = 1/(W + a) without cancellation
    1.0 / (params.strength() + params.evanescent_max())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn require_width(params: &DimensionlessParams) -> Result<()> {
    if params.width() > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("moments diverge at zero barrier width"))
    }
}

/// Closed-form moments,
/// `s(n) = (n+2)!/Λ^{n+3} [1 + 2aΛ/(n+2) + (aΛ)²/((n+2)(n+1))]`.
pub fn moments_closed_form(params: &DimensionlessParams) -> Result<MomentTable> {
    require_width(params)?;
    let a = params.evanescent_max();
    let l = params.width();
    let al = a * l;
    let mut s = [0.0; 5];
    for (n, out) in s.iter_mut().enumerate() {
        let n2 = (n + 2) as f64;
        let n1 = (n + 1) as f64;
        let bracket = 1.0 + 2.0 * al / n2 + al * al / (n2 * n1);
        *out = factorial(n + 2) / l.powi(n as i32 + 3) * bracket;
    }
    Ok(MomentTable {
        s,
        mode: MomentMode::ClosedForm,
        a,
        width: l,
        strength: params.strength(),
        upper_limit: upper_limit(params),
    })
}

/// Settings for [`moments_exact`].
pub const MOMENT_REL_TOL: f64 = 1e-10;

/// Moments by quadrature over the finite range `[0, W − a]`.
pub fn moments_exact(params: &DimensionlessParams) -> Result<MomentTable> {
    require_width(params)?;
    let a = params.evanescent_max();
    let l = params.width();
    let upper = upper_limit(params);
    let rule = GaussLegendre::new(32);
    // one panel per few decay lengths keeps the first pass honest
    let initial_panels = ((upper * l / 4.0).ceil() as usize).clamp(8, 1024);
    let opts = AdaptiveOptions {
        initial_panels,
        max_panels: 8192,
        rel_tol: MOMENT_REL_TOL,
    };
    let mut s = [0.0; 5];
    for (n, out) in s.iter_mut().enumerate() {
        let f = |rho: f64| (rho + a).powi(2) * rho.powi(n as i32) * (-rho * l).exp();
        *out = integrate_adaptive(&rule, 0.0, upper, &opts, "moments_exact", &f)?.value;
    }
    Ok(MomentTable {
        s,
        mode: MomentMode::Exact,
        a,
        width: l,
        strength: params.strength(),
        upper_limit: upper,
    })
}

/// Bound on `|s_closed(n) − s_exact(n)| / s_closed(n)`.
///
/// The closed form integrates to infinity instead of `R = W − a`; every
/// power `ρ^m e^{−ρΛ}` with `m ≤ n + 2` loses the fraction `Q(m + 1, RΛ)`
/// (regularized upper incomplete gamma), which is largest at `m = n + 2`.
pub fn moment_truncation_bound(params: &DimensionlessParams, n: usize) -> f64 {
    let x = upper_limit(params) * params.width();
    if x == 0.0 {
        return 1.0;
    }
    // Q(m, x) = e^{-x} Σ_{k<m} x^k / k!, summed in log space
    let ln_x = x.ln();
    let mut ln_fact = 0.0;
    let mut q = 0.0;
    for k in 0..n + 3 {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        q += (k as f64 * ln_x - ln_fact - x).exp();
    }
    q.min(1.0)
}

/// The phase-dependent coefficients of `S(τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl SCoefficients {
    pub fn at(params: &DimensionlessParams, tau: f64) -> Self {
        let a = params.evanescent_max();
        Self {
            alpha: 2.0 * (a * tau - 1.0),
            beta: tau - a,
        }
    }
}

/// Model exit density
/// `S = s0² + α²(s1² − s0s2) + 2αβ(s1s2 − s0s3) + β²(s2² − s0s4)`.
pub fn s_of_t(moments: &MomentTable, params: &DimensionlessParams, tau: f64) -> f64 {
    let SCoefficients { alpha, beta } = SCoefficients::at(params, tau);
    moments.s[0] * moments.s[0]
        + alpha * alpha * moments.c11()
        + 2.0 * alpha * beta * moments.c12()
        + beta * beta * moments.c22()
}

/// Quadratic coefficients `(c0, c1, c2)` of `S(τ) = c0 + c1 τ + c2 τ²`.
pub fn s_polynomial(moments: &MomentTable, params: &DimensionlessParams) -> [f64; 3] {
    let a = params.evanescent_max();
    let (p, q, r) = (moments.c11(), moments.c12(), moments.c22());
    // α = 2aτ − 2, β = τ − a
    let c2 = 4.0 * a * a * p + 4.0 * a * q + r;
    let c1 = -8.0 * a * p - 4.0 * (1.0 + a * a) * q - 2.0 * a * r;
    let c0 = moments.s[0] * moments.s[0] + 4.0 * p + 4.0 * a * q + a * a * r;
    [c0, c1, c2]
}

/// New phase time: the stationary point of `S(τ)`,
///
/// ```text
/// τ = [4a(s1² − s0s2) + 2W²(s1s2 − s0s3) + a(s2² − s0s4)]
///   / [(s2² − s0s4) + 4a(s1s2 − s0s3) + 4a²(s1² − s0s2)]
/// ```
///
/// At `a = 0` this is `2(s1s2 − s0s3)/(s2² − s0s4) = 2Λ/9` for the
/// closed-form moments.
pub fn phase_time_new(moments: &MomentTable, params: &DimensionlessParams) -> Result<f64> {
    let a = params.evanescent_max();
    let w2 = params.strength() * params.strength();
    let (p, q, r) = (moments.c11(), moments.c12(), moments.c22());
    let den = r + 4.0 * a * q + 4.0 * a * a * p;
    let num = 4.0 * a * p + 2.0 * w2 * q + a * r;
    finish_ratio(num, den)
}

/// The same ratio without the `a(s2² − s0s4)` term in the numerator. This
/// form approximates the stationary point with `β ≈ τ` in the `β²` term;
/// the two agree exactly when `a = 0`.
pub fn phase_time_new_printed(moments: &MomentTable, params: &DimensionlessParams) -> Result<f64> {
    let a = params.evanescent_max();
    let w2 = params.strength() * params.strength();
    let (p, q, r) = (moments.c11(), moments.c12(), moments.c22());
    let den = r + 4.0 * a * q + 4.0 * a * a * p;
    let num = 2.0 * w2 * q + 4.0 * a * p;
    finish_ratio(num, den)
}

fn finish_ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        return Err(Error::VanishingDenominator("phase_time_new"));
    }
    let tau = num / den;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(format!("new phase time is not positive: {tau}")));
    }
    Ok(tau)
}

/// Phase times and transit velocity for one configuration, all in reduced
/// units (`E_M t/ħ` for times, `sqrt(V0/2m)` for velocities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTimeReport {
    /// Opaque stationary-phase time `1/a`; `None` where it diverges (`a = 0`).
    pub tau_spm: Option<f64>,
    /// Full stationary-phase time at the transmitted mean wavenumber.
    pub tau_spm_full: Option<f64>,
    pub tau_new: f64,
    pub tau_numeric: f64,
    /// `Λ / (τ_numeric W)`.
    pub v_transit: f64,
    /// Analytic over numeric transit velocity, `τ_numeric / τ_new`.
    pub ratio_ana_num: f64,
    pub panels: usize,
    pub refine_steps: usize,
}

/// Which stationary-phase formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpmForm {
    /// `E_M t/ħ = k_M/q_M`.
    Opaque,
    /// Full stationary-phase time at the transmitted mean wavenumber.
    Full,
}

/// Standard stationary-phase time. `kappa_bar` is only read by [`SpmForm::Full`].
pub fn phase_time_spm(params: &DimensionlessParams, kappa_bar: f64, form: SpmForm) -> Result<f64> {
    match form {
        SpmForm::Opaque => {
            let a = params.evanescent_max();
            if a == 0.0 {
                Err(Error::Divergent("SPM formula undefined at E_M = V0"))
            } else {
                Ok(1.0 / a)
            }
        }
        SpmForm::Full => crate::transmission::stationary_time_full(kappa_bar, params),
    }
}

/// Transit velocity `Λ / (τ W)` in units of `sqrt(V0 / 2m)`.
pub fn transit_velocity(tau: f64, params: &DimensionlessParams) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(format!("transit time must be positive, got {tau}")));
    }
    Ok(params.width() / (tau * params.strength()))
}

/// Second-order expansions about the cutoff in `ρ = (q − q_M)/k_M`:
/// `φ ≈ φ_M + phase_linear ρ + phase_quadratic ρ²` and
/// `E/E_M ≈ 1 + energy_linear ρ + energy_quadratic ρ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseExpansion {
    pub phase_linear: f64,
    pub phase_quadratic: f64,
    pub energy_linear: f64,
    pub energy_quadratic: f64,
}

impl PhaseExpansion {
    pub fn phase(&self, phase_max: f64, rho: f64) -> f64 {
        phase_max + self.phase_linear * rho + self.phase_quadratic * rho * rho
    }

    pub fn energy(&self, rho: f64) -> f64 {
        1.0 + self.energy_linear * rho + self.energy_quadratic * rho * rho
    }
}

pub fn expansion_coefficients(params: &DimensionlessParams) -> PhaseExpansion {
    let a = params.evanescent_max();
    PhaseExpansion {
        phase_linear: -2.0,
        phase_quadratic: -a,
        energy_linear: -2.0 * a,
        energy_quadratic: -1.0,
    }
}
