// SPDX-License-Identifier: Apache-2.0

//! TOML scenario files.
//!
//! ```toml
//! [grid]
//! start_nm = 1530.0
//! end_nm = 1565.0
//! spacing_ghz = 200.0
//!
//! [dwdm]
//! gamma_a = 30.0
//! chi_a = 50.0
//! g_a = 0.025118864315095794
//! nbf_bandwidth_ghz = 15.0
//! alpha_db = 0.2
//! length_km = 45.0
//! rx_power_dbm = -25.0
//!
//! [scenario]
//! structure = "full_duplex"
//! noise_mode = "raman_only"
//! m_quantum = 1
//! n_classical = 5
//! r_th = -1.0
//! ```
//!
//! `[qkd]` defaults to the nominal parameter set. `[sweep]` and `[curve]`
//! configure the multi-run commands.

use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_grid, DwdmParams, QkdParams, ScenarioConfig, WavelengthGrid};
use crate::noise::LinkModel;
use crate::raman::RamanCrossSectionTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start_nm: f64,
    pub end_nm: f64,
    pub spacing_ghz: f64,
}

/// Inclusive M and N ranges; missing bounds fall back to the scenario's own
/// counts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub m_min: Option<usize>,
    pub m_max: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
}

impl SweepSpec {
    pub fn m_range(&self, m: usize) -> RangeInclusive<usize> {
        self.m_min.unwrap_or(m)..=self.m_max.unwrap_or(m)
    }

    pub fn n_range(&self, n: usize) -> RangeInclusive<usize> {
        self.n_min.unwrap_or(n)..=self.n_max.unwrap_or(n)
    }

    fn validate(&self) -> Result<()> {
        if self.m_min == Some(0) {
            return Err(Error::Scenario("sweep.m_min must be at least 1".into()));
        }
        let inverted =
            |lo: Option<usize>, hi: Option<usize>| matches!((lo, hi), (Some(a), Some(b)) if a > b);
        if inverted(self.m_min, self.m_max) || inverted(self.n_min, self.n_max) {
            return Err(Error::Scenario("sweep ranges must have min <= max".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSpec {
    pub points: usize,
    /// Upper end of the sampled range as a multiple of the zero-rate count.
    pub span_of_p_zero: f64,
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec {
            points: 101,
            span_of_p_zero: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub grid: GridSpec,
    #[serde(default)]
    pub qkd: QkdParams,
    pub dwdm: DwdmParams,
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        file.qkd.validate()?;
        file.dwdm.validate()?;
        if let Some(s) = &file.sweep {
            s.validate()?;
        }
        if let Some(c) = &file.curve {
            if c.points < 2 || !(c.span_of_p_zero > 0.0 && c.span_of_p_zero.is_finite()) {
                return Err(Error::Scenario(
                    "curve needs points >= 2 and span_of_p_zero > 0".into(),
                ));
            }
        }
        file.scenario.validate(&file.grid()?)?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialise")
    }

    pub fn grid(&self) -> Result<WavelengthGrid> {
        build_grid(self.grid.start_nm, self.grid.end_nm, self.grid.spacing_ghz)
    }

    pub fn link(&self, raman: RamanCrossSectionTable) -> Result<LinkModel> {
        LinkModel::new(self.grid()?, raman, self.qkd, self.dwdm)
    }
}
