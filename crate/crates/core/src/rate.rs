// SPDX-License-Identifier: Apache-2.0

//! Asymptotic secret key rate of efficient decoy-state BB84 as a function of
//! the crosstalk photon count, its linear model, and the inverse map from a
//! rate floor to a noise threshold.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DwdmParams, QkdParams};

/// Absolute tolerance on photon counts for the threshold bisections.
pub const P_TOLERANCE: f64 = 1e-15;
const MAX_BISECTIONS: usize = 400;

/// Shannon binary entropy with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Total transmissivity: decoder loss (1/2), detector efficiency and fiber loss.
pub fn transmissivity(qkd: &QkdParams, dwdm: &DwdmParams) -> f64 {
    0.5 * qkd.eta_d * 10f64.powf(-dwdm.alpha_db * dwdm.length_km / 10.0)
}

/// Background click probability for crosstalk count `p_m`.
pub fn y0_from_noise(p_m: f64, qkd: &QkdParams) -> f64 {
    let s = (qkd.p_dark() + p_m.max(0.0)).min(1.0);
    1.0 - (1.0 - s) * (1.0 - s)
}

/// Intermediate quantities of one rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateTerms {
    pub y0: f64,
    pub y1: f64,
    pub gain_mu: f64,
    pub qber_mu: f64,
    pub gain_1: f64,
    pub error_1: f64,
    /// Key per pulse before clamping at zero.
    pub per_pulse: f64,
}

/// Rate curve of one link, with the transmissivity fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCurve {
    qkd: QkdParams,
    eta: f64,
}

impl RateCurve {
    pub fn new(qkd: &QkdParams, dwdm: &DwdmParams) -> Self {
        RateCurve {
            qkd: *qkd,
            eta: transmissivity(qkd, dwdm),
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn qkd(&self) -> &QkdParams {
        &self.qkd
    }

    pub fn terms_at_y0(&self, y0: f64) -> Result<RateTerms> {
        let q = &self.qkd;
        let eta = self.eta;
        let decay = (-eta * q.mu).exp();
        let y1 = 1.0 - (1.0 - y0) * (1.0 - eta);
        let gain_mu = 1.0 - (1.0 - y0) * decay;
        let qber_mu = (y0 / 2.0 + q.e_d * (1.0 - decay)) / gain_mu;
        let gain_1 = y1 * q.mu * (-q.mu).exp();
        let error_1 = (y0 / 2.0 + q.e_d * eta) / y1;
        for (name, v) in [("E_mu", qber_mu), ("e_1", error_1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Consistency(format!(
                    "{name} = {v} outside [0, 1] at Y0 = {y0}"
                )));
            }
        }
        let per_pulse =
            gain_1 * (1.0 - binary_entropy(error_1)) - q.f_ec * gain_mu * binary_entropy(qber_mu);
        Ok(RateTerms {
            y0,
            y1,
            gain_mu,
            qber_mu,
            gain_1,
            error_1,
            per_pulse,
        })
    }

    pub fn terms(&self, p_m: f64) -> Result<RateTerms> {
        self.terms_at_y0(y0_from_noise(p_m, &self.qkd))
    }

    /// Secret key rate in bit/s.
    pub fn rate(&self, p_m: f64) -> Result<f64> {
        Ok(self.terms(p_m)?.per_pulse.max(0.0) / self.qkd.t_s)
    }

    /// Smallest crosstalk count with zero key rate.
    pub fn p_zero(&self) -> Result<f64> {
        let hi = 1.0 - self.qkd.p_dark();
        if self.terms(0.0)?.per_pulse <= 0.0 {
            return Ok(0.0);
        }
        if self.terms(hi)?.per_pulse > 0.0 {
            return Err(Error::Consistency(
                "key rate stays positive at saturated noise".into(),
            ));
        }
        bisect(|p| Ok(self.terms(p)?.per_pulse > 0.0), 0.0, hi, P_TOLERANCE)
    }

    /// Crosstalk count at which the rate falls to `r_th`; `+∞` when `r_th < 0`.
    pub fn noise_threshold(&self, r_th: f64) -> Result<f64> {
        if r_th < 0.0 {
            return Ok(f64::INFINITY);
        }
        let r0 = self.rate(0.0)?;
        if r_th >= r0 {
            return Err(Error::Infeasible(format!(
                "rate floor {r_th:e} bit/s is not below the zero-noise rate {r0:e} bit/s"
            )));
        }
        let p_zero = self.p_zero()?;
        if r_th == 0.0 {
            return Ok(p_zero);
        }
        bisect(|p| Ok(self.rate(p)? > r_th), 0.0, p_zero, P_TOLERANCE)
    }
}

pub fn secret_key_rate(p_m: f64, qkd: &QkdParams, dwdm: &DwdmParams) -> Result<f64> {
    RateCurve::new(qkd, dwdm).rate(p_m)
}

pub fn noise_threshold(r_th: f64, qkd: &QkdParams, dwdm: &DwdmParams) -> Result<f64> {
    RateCurve::new(qkd, dwdm).noise_threshold(r_th)
}

/// Boundary of a predicate that holds on `[lo, x*)` and fails on `[x*, hi]`.
/// Returns the upper end of the final bracket (a point where the predicate
/// fails).
pub fn bisect<F>(pred: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// How the lines through `x1 = 1 − h(e1)` and `x2 = h(E_mu)` are fitted over
/// their operating ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineFit {
    /// Continuous least squares over the range.
    LeastSquares,
    /// Line through the two range endpoints.
    Secant,
}

/// `P(Y0) ≈ U·Y0 + V`, built from straight-line models of `x1 = 1 − h(e1)`
/// (`a·e1 + b`) and `x2 = h(E_mu)` (`k·E_mu + j`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearRateModel {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub j: f64,
    pub u: f64,
    pub v: f64,
    pub p_zero: f64,
    pub y0_zero: f64,
    pub e1_zero: f64,
    pub e_mu_zero: f64,
    pub fit: LineFit,
    #[serde(skip)]
    curve: RateCurve,
}

impl LinearRateModel {
    /// `U·Y0 + V`
    pub fn per_pulse_at_y0(&self, y0: f64) -> f64 {
        self.u * y0 + self.v
    }

    /// Key per pulse with the two line models substituted directly.
    pub fn line_substituted(&self, y0: f64) -> Result<f64> {
        let t = self.curve.terms_at_y0(y0)?;
        let f = self.curve.qkd.f_ec;
        Ok(
            t.gain_1 * (self.a * t.error_1 + self.b)
                - f * t.gain_mu * (self.k * t.qber_mu + self.j),
        )
    }

    /// Linear-model rate with `Y0 ≈ 2 p_dc + 2 p_m`, clamped at zero.
    pub fn rate(&self, p_m: f64) -> f64 {
        let q = &self.curve.qkd;
        let per_pulse = 2.0 * self.u * p_m + 2.0 * self.u * q.p_dark() + self.v;
        per_pulse.max(0.0) / q.t_s
    }
}

pub fn fit_linear_model(qkd: &QkdParams, dwdm: &DwdmParams) -> Result<LinearRateModel> {
    fit_linear_model_with(qkd, dwdm, LineFit::LeastSquares)
}

pub fn fit_linear_model_with(
    qkd: &QkdParams,
    dwdm: &DwdmParams,
    fit: LineFit,
) -> Result<LinearRateModel> {
    let curve = RateCurve::new(qkd, dwdm);
    if curve.rate(0.0)? <= 0.0 {
        return Err(Error::Infeasible(
            "zero key rate even without crosstalk".into(),
        ));
    }
    let y0_zero = bisect(
        |y| Ok(curve.terms_at_y0(y)?.per_pulse > 0.0),
        0.0,
        1.0,
        1e-16,
    )?;
    let at_zero = curve.terms_at_y0(y0_zero)?;
    let (e1_zero, e_mu_zero) = (at_zero.error_1, at_zero.qber_mu);
    if e1_zero >= 0.5 || e_mu_zero >= 0.5 {
        return Err(Error::Assumption(format!(
            "zero-rate error rates e1 = {e1_zero}, E_mu = {e_mu_zero} must both stay below 0.5"
        )));
    }
    let e_d = qkd.e_d;
    let x1 = |e: f64| 1.0 - binary_entropy(e);
    let (a, b) = fit_line(x1, e_d, e1_zero, fit);
    let (k, j) = fit_line(binary_entropy, e_d, e_mu_zero, fit);

    let eta = curve.eta();
    let mu = qkd.mu;
    let f = qkd.f_ec;
    let single = mu * (-mu).exp();
    let decay = (-eta * mu).exp();
    let u = a / 2.0 * single + b * (1.0 - eta) * single - k / 2.0 * f - f * j * decay;
    let v = a * eta * e_d * single + b * eta * single
        - k * f * e_d * (1.0 - decay)
        - f * j * (1.0 - decay);

    Ok(LinearRateModel {
        a,
        b,
        k,
        j,
        u,
        v,
        p_zero: curve.p_zero()?,
        y0_zero,
        e1_zero,
        e_mu_zero,
        fit,
        curve,
    })
}

/// Straight line `(slope, intercept)` approximating `g` on `[lo, hi]`.
fn fit_line<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, fit: LineFit) -> (f64, f64) {
    match fit {
        LineFit::Secant => {
            let slope = (g(hi) - g(lo)) / (hi - lo);
            (slope, g(lo) - slope * lo)
        }
        LineFit::LeastSquares => {
            // composite Simpson for the first two moments
            const INTERVALS: usize = 1024;
            let h = (hi - lo) / INTERVALS as f64;
            let mid = 0.5 * (lo + hi);
            let (mut s0, mut s1) = (0.0, 0.0);
            for i in 0..=INTERVALS {
                let e = lo + i as f64 * h;
                let w = if i == 0 || i == INTERVALS {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let y = g(e);
                s0 += w * y;
                s1 += w * (e - mid) * y;
            }
            let width = hi - lo;
            let mean = s0 * h / 3.0 / width;
            let slope = (s1 * h / 3.0) / (width.powi(3) / 12.0);
            (slope, mean - slope * mid)
        }
    }
}
