// SPDX-License-Identifier: Apache-2.0

//! Crosstalk from classical channels into the quantum receivers: forward and
//! backward spontaneous Raman scattering plus adjacent-channel leakage.
//!
//! Powers are in W, lengths in km, wavelengths in nm unless a name says
//! otherwise, and β in (km·nm)^-1. Photon counts are per detector gate.

use serde::Serialize;

use crate::assign::{Assignment, QuantumSlot, Route};
use crate::error::{Error, Result};
use crate::grid::{
    launch_power_w, DwdmParams, NoiseMode, QkdParams, Structure, WavelengthGrid, HC,
};
use crate::raman::RamanCrossSectionTable;

/// `I·e^{−αL}·L·β·Δλ`
pub fn forward_raman_power(
    launch_w: f64,
    dwdm: &DwdmParams,
    beta: f64,
    delta_lambda_nm: f64,
) -> f64 {
    launch_w * forward_effective_length_km(dwdm) * beta * delta_lambda_nm
}

/// `I·(1−e^{−2αL})/(2α)·β·Δλ`
pub fn backward_raman_power(
    launch_w: f64,
    dwdm: &DwdmParams,
    beta: f64,
    delta_lambda_nm: f64,
) -> f64 {
    launch_w * backward_effective_length_km(dwdm) * beta * delta_lambda_nm
}

fn forward_effective_length_km(dwdm: &DwdmParams) -> f64 {
    let l = dwdm.length_km;
    (-dwdm.alpha_per_km() * l).exp() * l
}

fn backward_effective_length_km(dwdm: &DwdmParams) -> f64 {
    let a = dwdm.alpha_per_km();
    let l = dwdm.length_km;
    if a * l < 1e-12 {
        return l;
    }
    -(-2.0 * a * l).exp_m1() / (2.0 * a)
}

/// Mean photon count per gate at the quantum detector for a noise power
/// `power_w` arriving in the channel at `lambda_q_nm`.
pub fn photon_count(power_w: f64, lambda_q_nm: f64, qkd: &QkdParams) -> f64 {
    power_w * lambda_q_nm * 1e-9 * qkd.t_d * qkd.eta_d / (2.0 * HC)
}

pub fn raman_photon_count(raman_power_w: f64, lambda_q_nm: f64, qkd: &QkdParams) -> f64 {
    photon_count(raman_power_w, lambda_q_nm, qkd)
}

/// Wavelength-independent prefactors: `p_FR = c_f·λ_q·β`, `p_BR = c_b·λ_q·β`
/// with λ_q in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamanConstants {
    pub c_f: f64,
    pub c_b: f64,
}

pub fn raman_constants(
    launch_w: f64,
    dwdm: &DwdmParams,
    delta_lambda_nm: f64,
    qkd: &QkdParams,
) -> RamanConstants {
    let scale = launch_w * delta_lambda_nm * qkd.t_d * qkd.eta_d / (2.0 * HC);
    RamanConstants {
        c_f: scale * forward_effective_length_km(dwdm),
        c_b: scale * backward_effective_length_km(dwdm),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Classical signal travels with the quantum signal.
    CoPropagating,
    /// Classical signal travels against the quantum signal (back-reflection).
    CounterPropagating,
}

/// Leakage power from a classical channel `separation` grid steps away.
/// Only immediate neighbours leak.
pub fn adjacent_crosstalk_power(
    direction: Direction,
    launch_w: f64,
    dwdm: &DwdmParams,
    separation: usize,
) -> Result<f64> {
    match separation {
        0 => Err(Error::InvalidAssignment(
            "classical and quantum channel share a wavelength".into(),
        )),
        1 => Ok(match direction {
            Direction::CoPropagating => {
                dwdm.g_a
                    * launch_w
                    * (-dwdm.alpha_per_km() * dwdm.length_km).exp()
                    * db_to_linear(-dwdm.gamma_a)
            }
            Direction::CounterPropagating => dwdm.g_a * launch_w * db_to_linear(-dwdm.chi_a),
        }),
        _ => Ok(0.0),
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Crosstalk photon counts at one quantum receiver, summed over all
/// classical channels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NoiseBreakdown {
    pub p_fr: f64,
    pub p_br: f64,
    pub p_fc: f64,
    pub p_bc: f64,
    pub total: f64,
}

impl NoiseBreakdown {
    fn finish(mut self) -> Self {
        self.total = self.p_fr + self.p_br + self.p_fc + self.p_bc;
        self
    }
}

/// Physical model of one link: grid, Raman surface and parameters, with the
/// pairwise quantities that every assignment evaluation needs precomputed.
#[derive(Debug, Clone)]
pub struct LinkModel {
    grid: WavelengthGrid,
    raman: RamanCrossSectionTable,
    qkd: QkdParams,
    dwdm: DwdmParams,
    launch_w: f64,
    delta_lambda_nm: f64,
    constants: RamanConstants,
    /// β(λ_i, λ_j), row = pump (classical), column = signal (quantum).
    beta: Vec<f64>,
}

impl LinkModel {
    pub fn new(
        grid: WavelengthGrid,
        raman: RamanCrossSectionTable,
        qkd: QkdParams,
        dwdm: DwdmParams,
    ) -> Result<Self> {
        qkd.validate()?;
        dwdm.validate()?;
        raman.ensure_covers(&grid)?;
        let d = grid.len();
        let mut beta = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                beta[i * d + j] = raman.beta(grid.wavelength_nm(i), grid.wavelength_nm(j))?;
            }
        }
        let launch_w = launch_power_w(&dwdm);
        // a single Δλ keeps C_f and C_b wavelength-independent
        let delta_lambda_nm = dwdm.nbf_bandwidth_nm(grid.center_nm());
        let constants = raman_constants(launch_w, &dwdm, delta_lambda_nm, &qkd);
        Ok(LinkModel {
            grid,
            raman,
            qkd,
            dwdm,
            launch_w,
            delta_lambda_nm,
            constants,
            beta,
        })
    }

    /// Same hardware and grid, different fiber length.
    pub fn with_length(&self, length_km: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.raman.clone(),
            self.qkd,
            self.dwdm.with_length(length_km),
        )
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn raman(&self) -> &RamanCrossSectionTable {
        &self.raman
    }

    pub fn qkd(&self) -> &QkdParams {
        &self.qkd
    }

    pub fn dwdm(&self) -> &DwdmParams {
        &self.dwdm
    }

    pub fn launch_w(&self) -> f64 {
        self.launch_w
    }

    pub fn delta_lambda_nm(&self) -> f64 {
        self.delta_lambda_nm
    }

    pub fn constants(&self) -> RamanConstants {
        self.constants
    }

    pub fn channels(&self) -> usize {
        self.grid.len()
    }

    /// β with channel `pump` as the classical source and `signal` as the
    /// quantum channel.
    pub fn beta(&self, pump: usize, signal: usize) -> f64 {
        self.beta[pump * self.grid.len() + signal]
    }

    /// Forward Raman photon count from classical channel `c` into quantum `q`,
    /// computed from the noise power.
    pub fn forward_raman_count(&self, c: usize, q: usize) -> f64 {
        let power = forward_raman_power(
            self.launch_w,
            &self.dwdm,
            self.beta(c, q),
            self.delta_lambda_nm,
        );
        raman_photon_count(power, self.grid.wavelength_nm(q), &self.qkd)
    }

    pub fn backward_raman_count(&self, c: usize, q: usize) -> f64 {
        let power = backward_raman_power(
            self.launch_w,
            &self.dwdm,
            self.beta(c, q),
            self.delta_lambda_nm,
        );
        raman_photon_count(power, self.grid.wavelength_nm(q), &self.qkd)
    }

    pub fn adjacent_count(&self, direction: Direction, c: usize, q: usize) -> Result<f64> {
        let power = adjacent_crosstalk_power(direction, self.launch_w, &self.dwdm, c.abs_diff(q))?;
        Ok(photon_count(power, self.grid.wavelength_nm(q), &self.qkd))
    }

    /// Noise at quantum channel `slot` under `assignment`.
    pub fn channel_noise(
        &self,
        structure: Structure,
        mode: NoiseMode,
        assignment: &Assignment,
        slot: QuantumSlot,
    ) -> Result<NoiseBreakdown> {
        let d = self.grid.len();
        let q = slot.index;
        if q >= d {
            return Err(Error::InvalidAssignment(format!(
                "quantum index {q} outside a {d}-channel grid"
            )));
        }
        let member = match slot.route {
            Route::Forward => assignment.quantum_u1.contains(&q),
            Route::Backward => assignment.quantum_u2.contains(&q),
        };
        if !member {
            return Err(Error::InvalidAssignment(format!(
                "{slot:?} is not part of the assignment"
            )));
        }
        let (forward, backward): (&[usize], &[usize]) = match (structure, slot.route) {
            (Structure::FullDuplex, Route::Forward) => {
                (&assignment.classical_a, &assignment.classical_b)
            }
            (Structure::FullDuplex, Route::Backward) => {
                return Err(Error::InvalidAssignment(
                    "full-duplex plans carry no backward quantum channels".into(),
                ))
            }
            (Structure::DualFiber, Route::Forward) => (&assignment.classical_a, &[]),
            (Structure::DualFiber, Route::Backward) => (&assignment.classical_b, &[]),
        };
        let adjacent = mode == NoiseMode::RamanPlusAdjacent;
        let mut out = NoiseBreakdown::default();
        for &c in forward {
            check_pair(c, q, d)?;
            out.p_fr += self.forward_raman_count(c, q);
            if adjacent {
                out.p_fc += self.adjacent_count(Direction::CoPropagating, c, q)?;
            }
        }
        for &c in backward {
            check_pair(c, q, d)?;
            out.p_br += self.backward_raman_count(c, q);
            if adjacent {
                out.p_bc += self.adjacent_count(Direction::CounterPropagating, c, q)?;
            }
        }
        Ok(out.finish())
    }
}

fn check_pair(c: usize, q: usize, d: usize) -> Result<()> {
    if c >= d {
        return Err(Error::InvalidAssignment(format!(
            "classical index {c} outside a {d}-channel grid"
        )));
    }
    if c == q {
        return Err(Error::InvalidAssignment(format!(
            "channel {c} is both classical and quantum"
        )));
    }
    Ok(())
}
