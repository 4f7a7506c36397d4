// SPDX-License-Identifier: Apache-2.0

//! Raman cross-section surface β(λ_pump, λ_signal).
//!
//! The surface is a function of the wavelength shift `λ_signal − λ_pump`
//! only, sampled on a strictly increasing shift axis and linearly
//! interpolated. Positive shifts are the Stokes side.

use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{WavelengthGrid, PLANCK, SPEED_OF_LIGHT};

pub const CSV_HEADER: [&str; 2] = ["shift_nm", "beta_per_km_nm"];

/// Shift values closer than this to the table edge are treated as inside.
const DOMAIN_SLACK_NM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamanCrossSectionTable {
    samples: Vec<(f64, f64)>,
    pump_reference_nm: f64,
}

impl RamanCrossSectionTable {
    pub fn new(samples: Vec<(f64, f64)>, pump_reference_nm: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Ingest {
                line: 0,
                msg: "need at least two samples".into(),
            });
        }
        for (i, &(s, b)) in samples.iter().enumerate() {
            if !s.is_finite() || !b.is_finite() {
                return Err(Error::Ingest {
                    line: i + 2,
                    msg: "non-finite value".into(),
                });
            }
            if b < 0.0 {
                return Err(Error::Ingest {
                    line: i + 2,
                    msg: format!("negative beta {b}"),
                });
            }
            if i > 0 && s <= samples[i - 1].0 {
                let msg = if s == samples[i - 1].0 {
                    format!("duplicate shift {s}")
                } else {
                    format!("shift {s} is not increasing")
                };
                return Err(Error::Ingest { line: i + 2, msg });
            }
        }
        Ok(RamanCrossSectionTable {
            samples,
            pump_reference_nm,
        })
    }

    /// Synthetic default with the qualitative shape of a measured silica
    /// spectrum around a 1550 nm pump: a narrow dip at zero shift, and a
    /// Stokes side above the anti-Stokes side by the Boltzmann factor.
    /// Not measured data; replace it with a CSV for quantitative work.
    pub fn synthetic_default() -> Self {
        let samples = (-160..=160)
            .map(|i| {
                let shift = i as f64 * 0.25;
                (shift, synthetic_beta(shift))
            })
            .collect();
        RamanCrossSectionTable {
            samples,
            pump_reference_nm: SYNTHETIC_PUMP_NM,
        }
    }

    /// Parse a two-column CSV with header `shift_nm,beta_per_km_nm`.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Ingest {
                line: 1,
                msg: e.to_string(),
            })?
            .clone();
        if headers.len() != 2
            || headers.get(0) != Some(CSV_HEADER[0])
            || headers.get(1) != Some(CSV_HEADER[1])
        {
            return Err(Error::Ingest {
                line: 1,
                msg: format!("expected header `{}`", CSV_HEADER.join(",")),
            });
        }
        let mut samples = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Ingest {
                line,
                msg: e.to_string(),
            })?;
            if rec.len() != 2 {
                return Err(Error::Ingest {
                    line,
                    msg: format!("expected 2 fields, got {}", rec.len()),
                });
            }
            let parse = |field: &str| {
                field.parse::<f64>().map_err(|e| Error::Ingest {
                    line,
                    msg: format!("`{field}`: {e}"),
                })
            };
            samples.push((parse(&rec[0])?, parse(&rec[1])?));
        }
        Self::new(samples, SYNTHETIC_PUMP_NM)
    }

    /// Parse and check that the table covers every pump/signal pair of `grid`.
    pub fn from_csv_for_grid<R: Read>(source: R, grid: &WavelengthGrid) -> Result<Self> {
        let table = Self::from_csv(source)?;
        table.ensure_covers(grid)?;
        Ok(table)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", CSV_HEADER.join(","));
        for &(s, b) in &self.samples {
            out.push_str(&format!("{s},{b:e}\n"));
        }
        out
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn pump_reference_nm(&self) -> f64 {
        self.pump_reference_nm
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn ensure_covers(&self, grid: &WavelengthGrid) -> Result<()> {
        let (lo, hi) = self.domain();
        let span = grid.span_nm();
        if lo > -span + DOMAIN_SLACK_NM || hi < span - DOMAIN_SLACK_NM {
            return Err(Error::Coverage {
                min_nm: lo,
                max_nm: hi,
                need_min_nm: -span,
                need_max_nm: span,
            });
        }
        Ok(())
    }

    /// Cross-section at a wavelength shift (nm), linearly interpolated.
    pub fn at_shift(&self, shift_nm: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(shift_nm >= lo - DOMAIN_SLACK_NM && shift_nm <= hi + DOMAIN_SLACK_NM) {
            return Err(Error::OutOfDomain {
                shift_nm,
                min_nm: lo,
                max_nm: hi,
            });
        }
        let s = shift_nm.clamp(lo, hi);
        // first sample with shift >= s
        let idx = self.samples.partition_point(|&(x, _)| x < s);
        if idx == 0 {
            return Ok(self.samples[0].1);
        }
        let (x1, y1) = self.samples[idx];
        if x1 == s {
            return Ok(y1);
        }
        let (x0, y0) = self.samples[idx - 1];
        let t = (s - x0) / (x1 - x0);
        Ok(y0 + t * (y1 - y0))
    }

    /// β(λ_pump, λ_signal) in (km·nm)^-1.
    pub fn beta(&self, lambda_pump_nm: f64, lambda_signal_nm: f64) -> Result<f64> {
        self.at_shift(lambda_signal_nm - lambda_pump_nm)
    }
}

impl Default for RamanCrossSectionTable {
    fn default() -> Self {
        Self::synthetic_default()
    }
}

const SYNTHETIC_PUMP_NM: f64 = 1550.0;
const SYNTHETIC_PEAK: f64 = 2.0e-9;
const SYNTHETIC_DIP_DEPTH: f64 = 0.85;
const SYNTHETIC_DIP_WIDTH_NM: f64 = 2.0;
const BOLTZMANN: f64 = 1.380_649e-23;
const FIBER_TEMPERATURE_K: f64 = 300.0;

fn synthetic_beta(shift_nm: f64) -> f64 {
    let pump_hz = SPEED_OF_LIGHT / (SYNTHETIC_PUMP_NM * 1e-9);
    let signal_hz = SPEED_OF_LIGHT / ((SYNTHETIC_PUMP_NM + shift_nm) * 1e-9);
    let y = PLANCK * (pump_hz - signal_hz).abs() / (BOLTZMANN * FIBER_TEMPERATURE_K);
    // spontaneous scattering ∝ Δν·(n+1) on the Stokes side and Δν·n on the
    // anti-Stokes side, n the phonon occupation
    let thermal = if y < 1e-12 {
        1.0
    } else if shift_nm > 0.0 {
        y / (1.0 - (-y).exp())
    } else {
        y / y.exp_m1()
    };
    let dip = 1.0 - SYNTHETIC_DIP_DEPTH * (-(shift_nm / SYNTHETIC_DIP_WIDTH_NM).powi(4)).exp();
    SYNTHETIC_PEAK * dip * thermal
}
