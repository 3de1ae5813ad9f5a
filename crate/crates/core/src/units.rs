//! Dimensionless parameterization of the barrier problem.
//!
//! Everything downstream works with two pure numbers: the barrier strength
//! `W = sqrt(V0 / E_M)` and the reduced width `Λ = k_M L`. Wavenumbers are
//! measured in units of the spectrum cutoff `k_M`, times in `ħ / E_M`.

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Electron rest mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Elementary charge, C (also J per eV).
pub const ELECTRON_VOLT_SI: f64 = 1.602_176_634e-19;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Barrier and packet in physical units. Any consistent unit system works.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub mass: f64,
    pub hbar: f64,
    pub barrier_height: f64,
    pub energy_max: f64,
    pub barrier_width: f64,
}

impl PhysicalParams {
    /// An electron in SI units with energies given in eV and width in metres.
    pub fn electron_si(barrier_height_ev: f64, energy_max_ev: f64, barrier_width_m: f64) -> Self {
        Self {
            mass: ELECTRON_MASS_SI,
            hbar: HBAR_SI,
            barrier_height: barrier_height_ev * ELECTRON_VOLT_SI,
            energy_max: energy_max_ev * ELECTRON_VOLT_SI,
            barrier_width: barrier_width_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("barrier_height", self.barrier_height),
            ("energy_max", self.energy_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.barrier_width.is_finite() && self.barrier_width >= 0.0) {
            return Err(Error::invalid(format!(
                "barrier_width must be non-negative, got {}",
                self.barrier_width
            )));
        }
        if self.energy_max > self.barrier_height {
            return Err(Error::invalid(format!(
                "energy_max {} exceeds barrier_height {}: above-barrier transmission is not supported",
                self.energy_max, self.barrier_height
            )));
        }
        Ok(())
    }

    /// `k_M = sqrt(2 m E_M) / ħ`.
    pub fn k_max(&self) -> f64 {
        (2.0 * self.mass * self.energy_max).sqrt() / self.hbar
    }
}

/// The barrier/packet configuration as pure numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    strength: f64,
    width: f64,
}

impl DimensionlessParams {
    /// `strength` is `W = w / k_M ≥ 1`, `width` is `Λ = k_M L ≥ 0`.
    pub fn new(strength: f64, width: f64) -> Result<Self> {
        if !(strength.is_finite() && strength >= 1.0) {
            return Err(Error::invalid(format!(
                "barrier strength W must be >= 1 (pure tunneling), got {strength}"
            )));
        }
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::invalid(format!("reduced width must be >= 0, got {width}")));
        }
        Ok(Self { strength, width })
    }

    /// Builds the parameters from `a = q_M / k_M` instead of `W`.
    pub fn from_evanescent(a: f64, width: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::invalid(format!("q_M/k_M must be >= 0, got {a}")));
        }
        Self::new((1.0 + a * a).sqrt(), width)
    }

    /// `W = sqrt(V0 / E_M)`.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// `Λ = k_M L`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `a = q_M / k_M = sqrt(W² − 1)`.
    pub fn evanescent_max(&self) -> f64 {
        // (W-1)(W+1) keeps precision when W is close to one
        ((self.strength - 1.0) * (self.strength + 1.0)).sqrt()
    }

    /// Reduced evanescent wavenumber `q / k_M` at `κ = k / k_M`.
    pub fn evanescent(&self, kappa: f64) -> f64 {
        let d = (self.strength - kappa) * (self.strength + kappa);
        d.max(0.0).sqrt()
    }

    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.strength, width)
    }
}

/// Scale factors of the natural barrier units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScales {
    /// `ħ / sqrt(2 m V0)`
    pub length_unit: f64,
    /// `ħ / V0`
    pub time_unit: f64,
    /// `sqrt(V0 / 2m)`
    pub velocity_unit: f64,
}

pub fn normalize(phys: &PhysicalParams) -> Result<DimensionlessParams> {
    phys.validate()?;
    let strength = (phys.barrier_height / phys.energy_max).sqrt();
    let width = phys.k_max() * phys.barrier_width;
    DimensionlessParams::new(strength, width)
}

/// Inverse of [`normalize`] for a given particle and barrier height.
pub fn denormalize(params: &DimensionlessParams, mass: f64, hbar: f64, barrier_height: f64) -> Result<PhysicalParams> {
    let energy_max = barrier_height / (params.strength() * params.strength());
    let k_max = (2.0 * mass * energy_max).sqrt() / hbar;
    let phys = PhysicalParams {
        mass,
        hbar,
        barrier_height,
        energy_max,
        barrier_width: params.width() / k_max,
    };
    phys.validate()?;
    Ok(phys)
}

pub fn unit_scales(phys: &PhysicalParams) -> Result<UnitScales> {
    phys.validate()?;
    let v0 = phys.barrier_height;
    Ok(UnitScales {
        length_unit: phys.hbar / (2.0 * phys.mass * v0).sqrt(),
        time_unit: phys.hbar / v0,
        velocity_unit: (v0 / (2.0 * phys.mass)).sqrt(),
    })
}

/// Converts a reduced time `E_M t / ħ` into `V0 t / ħ`.
pub fn tau_to_barrier_time(tau: f64, params: &DimensionlessParams) -> f64 {
    tau * params.strength() * params.strength()
}
