// SPDX-License-Identifier: Apache-2.0

//! Channel plan and the physical/protocol parameters of the link.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// h·c in J·m.
pub const HC: f64 = PLANCK * SPEED_OF_LIGHT;

/// Ordered DWDM channel plan: centre wavelengths on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavelengthGrid {
    channels_nm: Vec<f64>,
    spacing_ghz: f64,
}

/// Build the grid anchored at the frequency of `start_nm` and stepping down
/// in frequency by `spacing_ghz` while the wavelength stays within `end_nm`.
pub fn build_grid(start_nm: f64, end_nm: f64, spacing_ghz: f64) -> Result<WavelengthGrid> {
    if !(start_nm > 0.0 && start_nm < end_nm) {
        return Err(Error::Config(format!(
            "grid needs 0 < start_nm < end_nm, got {start_nm}..{end_nm}"
        )));
    }
    if !(spacing_ghz > 0.0) || !spacing_ghz.is_finite() {
        return Err(Error::Config(format!(
            "spacing_ghz must be positive, got {spacing_ghz}"
        )));
    }
    let f0 = SPEED_OF_LIGHT / (start_nm * 1e-9);
    let step = spacing_ghz * 1e9;
    let limit = end_nm * (1.0 + 1e-12);
    let mut channels_nm = Vec::new();
    for k in 0.. {
        let f = f0 - k as f64 * step;
        if f <= 0.0 {
            break;
        }
        let nm = SPEED_OF_LIGHT / f * 1e9;
        if nm > limit {
            break;
        }
        channels_nm.push(nm);
    }
    if channels_nm.len() < 2 {
        return Err(Error::Config(format!(
            "only {} channel(s) of {spacing_ghz} GHz fit between {start_nm} and {end_nm} nm",
            channels_nm.len()
        )));
    }
    Ok(WavelengthGrid {
        channels_nm,
        spacing_ghz,
    })
}

impl WavelengthGrid {
    /// Number of channels, D.
    pub fn len(&self) -> usize {
        self.channels_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels_nm.is_empty()
    }

    pub fn spacing_ghz(&self) -> f64 {
        self.spacing_ghz
    }

    pub fn channels_nm(&self) -> &[f64] {
        &self.channels_nm
    }

    pub fn wavelength_nm(&self, index: usize) -> f64 {
        self.channels_nm[index]
    }

    pub fn wavelength_m(&self, index: usize) -> f64 {
        self.channels_nm[index] * 1e-9
    }

    pub fn frequency_thz(&self, index: usize) -> f64 {
        SPEED_OF_LIGHT / (self.channels_nm[index] * 1e-9) * 1e-12
    }

    /// Midpoint of the occupied band.
    pub fn center_nm(&self) -> f64 {
        0.5 * (self.channels_nm[0] + self.channels_nm[self.len() - 1])
    }

    /// Wavelength distance between the first and last channel.
    pub fn span_nm(&self) -> f64 {
        self.channels_nm[self.len() - 1] - self.channels_nm[0]
    }
}

/// Decoy-state BB84 system parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QkdParams {
    /// Mean photon number of the signal state.
    pub mu: f64,
    /// Detector quantum efficiency.
    pub eta_d: f64,
    /// Dark count rate per ns.
    pub gamma_dc: f64,
    /// Error-correction inefficiency.
    pub f_ec: f64,
    /// Misalignment probability.
    pub e_d: f64,
    /// Pulse repetition period (s).
    pub t_s: f64,
    /// Detector gate interval (s).
    pub t_d: f64,
}

impl QkdParams {
    pub fn nominal() -> Self {
        QkdParams {
            mu: 0.48,
            eta_d: 0.3,
            gamma_dc: 1e-7,
            f_ec: 1.16,
            e_d: 0.015,
            t_s: 250e-12,
            t_d: 100e-12,
        }
    }

    /// Dark-count probability per gate.
    pub fn p_dark(&self) -> f64 {
        self.gamma_dc * self.t_d * 1e9
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mu", self.mu),
            ("eta_d", self.eta_d),
            ("gamma_dc", self.gamma_dc),
            ("f_ec", self.f_ec),
            ("e_d", self.e_d),
            ("t_s", self.t_s),
            ("t_d", self.t_d),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "qkd.{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.eta_d > 1.0 {
            return Err(Error::Config(format!(
                "qkd.eta_d must be <= 1, got {}",
                self.eta_d
            )));
        }
        if self.e_d >= 0.5 {
            return Err(Error::Config(format!(
                "qkd.e_d must be < 0.5, got {}",
                self.e_d
            )));
        }
        if self.f_ec < 1.0 {
            return Err(Error::Config(format!(
                "qkd.f_ec must be >= 1, got {}",
                self.f_ec
            )));
        }
        Ok(())
    }
}

impl Default for QkdParams {
    fn default() -> Self {
        Self::nominal()
    }
}

/// DWDM hardware and fiber parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwdmParams {
    /// Adjacent channel isolation (dB).
    pub gamma_a: f64,
    /// Multiplexer directivity (dB).
    pub chi_a: f64,
    /// NBF mean transmission at the adjacent passband (linear).
    pub g_a: f64,
    pub nbf_bandwidth_ghz: f64,
    /// Fiber attenuation (dB/km).
    pub alpha_db: f64,
    pub length_km: f64,
    /// Received classical power (dBm).
    pub rx_power_dbm: f64,
}

impl DwdmParams {
    /// 15 GHz NBF: adjacent crosstalk is negligible, pair with `NoiseMode::RamanOnly`.
    pub fn narrow_nbf(length_km: f64) -> Self {
        DwdmParams {
            gamma_a: 30.0,
            chi_a: 50.0,
            g_a: 10f64.powf(-1.6),
            nbf_bandwidth_ghz: 15.0,
            alpha_db: 0.2,
            length_km,
            rx_power_dbm: -25.0,
        }
    }

    /// 125 GHz Gaussian NBF with about 16 dB attenuation at the adjacent passband.
    pub fn wide_nbf(length_km: f64) -> Self {
        DwdmParams {
            nbf_bandwidth_ghz: 125.0,
            ..Self::narrow_nbf(length_km)
        }
    }

    pub fn with_length(self, length_km: f64) -> Self {
        DwdmParams { length_km, ..self }
    }

    /// Attenuation in natural units (1/km).
    pub fn alpha_per_km(&self) -> f64 {
        self.alpha_db * std::f64::consts::LN_10 / 10.0
    }

    /// NBF bandwidth in wavelength units at `lambda_nm`.
    pub fn nbf_bandwidth_nm(&self, lambda_nm: f64) -> f64 {
        let lambda_m = lambda_nm * 1e-9;
        lambda_m * lambda_m * self.nbf_bandwidth_ghz * 1e9 / SPEED_OF_LIGHT * 1e9
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_a > 0.0) || !(self.chi_a > 0.0) {
            return Err(Error::Config(
                "dwdm.gamma_a and dwdm.chi_a must be positive".into(),
            ));
        }
        if !(self.g_a > 0.0 && self.g_a <= 1.0) {
            return Err(Error::Config(format!(
                "dwdm.g_a must lie in (0, 1], got {}",
                self.g_a
            )));
        }
        if !(self.length_km > 0.0 && self.length_km.is_finite()) {
            return Err(Error::Config(format!(
                "dwdm.length_km must be positive, got {}",
                self.length_km
            )));
        }
        if !(self.alpha_db >= 0.0)
            || !(self.nbf_bandwidth_ghz > 0.0)
            || !self.rx_power_dbm.is_finite()
        {
            return Err(Error::Config(
                "dwdm.alpha_db, nbf_bandwidth_ghz or rx_power_dbm out of range".into(),
            ));
        }
        Ok(())
    }
}

/// Launch power (W) that leaves `rx_power_dbm` at the receiver after the fiber.
pub fn launch_power_w(dwdm: &DwdmParams) -> f64 {
    let dbm = dwdm.rx_power_dbm + dwdm.alpha_db * dwdm.length_km;
    10f64.powf(dbm / 10.0) * 1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    /// One fiber, bidirectional classical channels, quantum Alice to Bob.
    FullDuplex,
    /// Separate forward and backward fibers, quantum co-propagating.
    DualFiber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    RamanOnly,
    RamanPlusAdjacent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub structure: Structure,
    pub noise_mode: NoiseMode,
    /// Number of quantum channels, M.
    pub m_quantum: usize,
    /// Number of classical channels per direction, N.
    pub n_classical: usize,
    /// Minimum per-channel key rate (bit/s); negative disables the constraint.
    #[serde(default = "unconstrained")]
    pub r_th: f64,
}

fn unconstrained() -> f64 {
    -1.0
}

impl ScenarioConfig {
    pub fn new(
        structure: Structure,
        noise_mode: NoiseMode,
        m_quantum: usize,
        n_classical: usize,
    ) -> Self {
        ScenarioConfig {
            structure,
            noise_mode,
            m_quantum,
            n_classical,
            r_th: -1.0,
        }
    }

    pub fn with_r_th(self, r_th: f64) -> Self {
        ScenarioConfig { r_th, ..self }
    }

    pub fn with_counts(self, m_quantum: usize, n_classical: usize) -> Self {
        ScenarioConfig {
            m_quantum,
            n_classical,
            ..self
        }
    }

    pub fn validate(&self, grid: &WavelengthGrid) -> Result<()> {
        if self.m_quantum == 0 {
            return Err(Error::Config("m_quantum must be at least 1".into()));
        }
        if self.r_th.is_nan() {
            return Err(Error::Config("r_th is NaN".into()));
        }
        let d = grid.len();
        let fits = match self.structure {
            Structure::FullDuplex => self.m_quantum + self.n_classical <= d,
            Structure::DualFiber => {
                let (k, rest) = crate::assign::dual_fiber_split(self.m_quantum);
                k.max(rest) + self.n_classical <= d
            }
        };
        if !fits {
            return Err(Error::Config(format!(
                "M={} quantum and N={} classical channels do not fit on a {d}-channel grid",
                self.m_quantum, self.n_classical
            )));
        }
        Ok(())
    }
}
