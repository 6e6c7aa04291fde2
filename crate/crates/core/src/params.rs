//! Physical constants, input validation, and reduction of SI inputs to the
//! dimensionless groups every other module works in.

use crate::{Error, Result};

/// Fundamental constants, CODATA 2018 values, compiled in for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Elementary charge [C].
    pub e_charge: f64,
    /// Electron mass [kg].
    pub m_electron: f64,
    /// Vacuum permittivity [F/m].
    pub eps0: f64,
    /// Boltzmann constant [J/K].
    pub k_boltzmann: f64,
    /// Speed of light [m/s].
    pub c_light: f64,
}

impl PhysicalConstants {
    pub const fn codata() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            e_charge: 1.602_176_634e-19,
            m_electron: 9.109_383_701_5e-31,
            eps0: 8.854_187_812_8e-12,
            k_boltzmann: 1.380_649e-23,
            c_light: 2.997_924_58e8,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Driven cavity mode: frequency, quantization volume, squeezing rate, bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    /// Mode angular frequency ω [rad/s].
    pub omega: f64,
    /// Mode volume V [m³].
    pub volume: f64,
    /// Parametric squeezing rate λ [1/s]; the drive runs at 2ω.
    pub lambda_sq: f64,
    /// Bath temperature [K].
    pub temperature: f64,
}

impl CavityConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("omega", self.omega)?;
        require_positive("volume", self.volume)?;
        require_finite_nonneg("lambda_sq", self.lambda_sq)?;
        require_finite_nonneg("temperature", self.temperature)?;
        Ok(())
    }
}

/// Probe electron: mean speed, wavepacket width, and traversal length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronConfig {
    /// Initial mean speed v₀ [m/s].
    pub v0: f64,
    /// Initial position spread σ_x [m].
    pub sigma_x: f64,
    /// Cavity traversal length L [m].
    pub flight_length: f64,
}

impl ElectronConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("v0", self.v0)?;
        require_positive("sigma_x", self.sigma_x)?;
        require_positive("flight_length", self.flight_length)?;
        Ok(())
    }
}

/// Dimensionless parameter set in which all physics formulas are evaluated.
///
/// SI scales survive only through `eps_kick`, `k0`, and `quantum_energy`,
/// which convert results back to Joules at the output boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessGroups {
    /// Squeezing-to-mode-frequency ratio r = λ/ω.
    pub r: f64,
    /// Transit phase θ = ωτ [rad].
    pub theta: f64,
    /// Thermal occupancy of the mode.
    pub n_th: f64,
    /// Kick energy scale g²/(2mω²) [J].
    pub eps_kick: f64,
    /// Initial mean kinetic energy mv₀²/2 [J].
    pub k0: f64,
    /// Coupling diagnostic gσ_x/(ħω); gauges electron back-action on the field.
    pub g_over: f64,
    /// Photon energy ħω [J]; the energy unit of the dimensionless system.
    pub quantum_energy: f64,
    /// Wavepacket width in oscillator units, σ_x·√(mω/ħ).
    pub sigma_x_tilde: f64,
}

impl DimensionlessGroups {
    /// Coupling in oscillator units, g/√(ħmω³); sets the p-row drive strength.
    pub fn g_tilde(&self) -> f64 {
        // g_over = gσ_x/(ħω) and σ_x̃ = σ_x√(mω/ħ) leave exactly g/√(ħmω³).
        self.g_over / self.sigma_x_tilde
    }

    /// Mean electron momentum in oscillator units, mv₀/√(ħmω).
    pub fn p0_tilde(&self) -> f64 {
        (2.0 * self.k0 / self.quantum_energy).sqrt()
    }

    /// Minimum-uncertainty momentum spread paired with `sigma_x_tilde`.
    pub fn sigma_p_tilde_min(&self) -> f64 {
        0.5 / self.sigma_x_tilde
    }

    /// Build groups directly from dimensionless numbers (ħω = 1 J by
    /// convention, so energies come out in photon-energy units). Intended for
    /// oracle cross-checks where no SI configuration is meaningful.
    pub fn bare(r: f64, theta: f64, n_th: f64, g_tilde: f64, p0_tilde: f64, sigma_x_tilde: f64) -> Self {
        Self {
            r,
            theta,
            n_th,
            eps_kick: 0.5 * g_tilde * g_tilde,
            k0: 0.5 * p0_tilde * p0_tilde,
            g_over: g_tilde * sigma_x_tilde,
            quantum_energy: 1.0,
            sigma_x_tilde,
        }
    }
}

/// Electron-photon coupling g = e·√(ħω/(2Vε₀)) [J/m].
pub fn coupling_g(cavity: &CavityConfig, consts: &PhysicalConstants) -> Result<f64> {
    cavity.validate()?;
    Ok(consts.e_charge * (consts.hbar * cavity.omega / (2.0 * cavity.volume * consts.eps0)).sqrt())
}

/// Bose-Einstein occupancy n_th = 1/(exp(ħω/k_BT) − 1); 0 at T = 0.
pub fn thermal_occupancy(omega: f64, temperature: f64, consts: &PhysicalConstants) -> Result<f64> {
    require_positive("omega", omega)?;
    require_finite_nonneg("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = consts.hbar * omega / (consts.k_boltzmann * temperature);
    // exp_m1 keeps the high-temperature limit (x → 0) accurate; for large x
    // the reciprocal underflows cleanly to zero.
    Ok(1.0 / x.exp_m1())
}

/// Transit time τ = L/v₀ [s].
pub fn flight_time(electron: &ElectronConfig) -> Result<f64> {
    electron.validate()?;
    Ok(electron.flight_length / electron.v0)
}

/// Flight times τ_n = πn/ω that put the transit phase on resonance (θ = πn),
/// where the drive at 2ω completes whole cycles.
pub fn resonance_flight_times(omega: f64, n_max: u32) -> Result<Vec<f64>> {
    require_positive("omega", omega)?;
    if n_max < 1 {
        return Err(Error::Validation {
            field: "n_max",
            message: "must be at least 1".into(),
        });
    }
    Ok((1..=n_max).map(|n| std::f64::consts::PI * f64::from(n) / omega).collect())
}

/// Reduce SI configuration to dimensionless groups. Pure and bit-for-bit
/// reproducible for equal inputs.
pub fn reduce(
    cavity: &CavityConfig,
    electron: &ElectronConfig,
    consts: &PhysicalConstants,
) -> Result<DimensionlessGroups> {
    reduce_with_occupancy(cavity, electron, consts, None)
}

/// Like [`reduce`], but lets the caller supply the occupancy directly instead
/// of deriving it from the cavity temperature.
pub fn reduce_with_occupancy(
    cavity: &CavityConfig,
    electron: &ElectronConfig,
    consts: &PhysicalConstants,
    n_th_override: Option<f64>,
) -> Result<DimensionlessGroups> {
    cavity.validate()?;
    electron.validate()?;
    let n_th = match n_th_override {
        Some(n) => {
            require_finite_nonneg("n_th", n)?;
            n
        }
        None => thermal_occupancy(cavity.omega, cavity.temperature, consts)?,
    };
    let g = coupling_g(cavity, consts)?;
    let tau = flight_time(electron)?;
    let omega = cavity.omega;
    let hbar_omega = consts.hbar * omega;
    Ok(DimensionlessGroups {
        r: cavity.lambda_sq / omega,
        theta: omega * tau,
        n_th,
        eps_kick: g * g / (2.0 * consts.m_electron * omega * omega),
        k0: 0.5 * consts.m_electron * electron.v0 * electron.v0,
        g_over: g * electron.sigma_x / hbar_omega,
        quantum_energy: hbar_omega,
        sigma_x_tilde: electron.sigma_x * (consts.m_electron * omega / consts.hbar).sqrt(),
    })
}

pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Validation {
            field,
            message: format!("must be finite and positive, got {value:e}"),
        });
    }
    Ok(())
}

pub(crate) fn require_finite_nonneg(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::Validation {
            field,
            message: format!("must be finite and non-negative, got {value:e}"),
        });
    }
    Ok(())
}
