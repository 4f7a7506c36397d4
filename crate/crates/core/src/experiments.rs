// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers behind the `plan` command: wavelength patterns, rate
//! enhancement sweeps, maximum classical load, method comparison and the
//! rate curve.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use serde::Serialize;

use crate::assign::{
    brute_force_rate, conventional, dual_fiber_split, optimize, PlanResult, SearchOptions,
};
use crate::error::{Error, Result};
use crate::grid::{DwdmParams, QkdParams, ScenarioConfig, Structure};
use crate::noise::LinkModel;
use crate::par::map_ordered;
use crate::rate::{fit_linear_model, y0_from_noise, LinearRateModel, RateCurve};
use crate::report::{self, Report};
use crate::scenario::ScenarioFile;

pub const CLASSICAL_MARK: char = '*';
pub const QUANTUM_MARK: char = 'o';
pub const UNUSED_MARK: char = '.';

/// One character per channel in ascending wavelength.
pub fn render_pattern(classical: &[usize], quantum: &[usize], channels: usize) -> String {
    (0..channels)
        .map(|i| {
            if quantum.contains(&i) {
                QUANTUM_MARK
            } else if classical.contains(&i) {
                CLASSICAL_MARK
            } else {
                UNUSED_MARK
            }
        })
        .collect()
}

/// Inverse of [`render_pattern`]: `(classical, quantum)` index sets.
pub fn parse_pattern(text: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut classical = Vec::new();
    let mut quantum = Vec::new();
    for (i, ch) in text.chars().enumerate() {
        match ch {
            CLASSICAL_MARK => classical.push(i),
            QUANTUM_MARK => quantum.push(i),
            UNUSED_MARK => {}
            other => {
                return Err(Error::Config(format!(
                    "pattern character {other:?} at position {i}"
                )))
            }
        }
    }
    Ok((classical, quantum))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternRow {
    /// `link` for full-duplex, `forward`/`backward` for the two fibers.
    pub fiber: &'static str,
    pub text: String,
}

pub fn plan_patterns(plan: &PlanResult, channels: usize) -> Vec<PatternRow> {
    let a = &plan.assignment;
    match plan.structure {
        Structure::FullDuplex => {
            vec![PatternRow {
                fiber: "link",
                text: render_pattern(&a.classical_a, &a.quantum_u1, channels),
            }]
        }
        Structure::DualFiber => vec![
            PatternRow {
                fiber: "forward",
                text: render_pattern(&a.classical_a, &a.quantum_u1, channels),
            },
            PatternRow {
                fiber: "backward",
                text: render_pattern(&a.classical_b, &a.quantum_u2, channels),
            },
        ],
    }
}

/// Percentage gain of the proposed total rate over the conventional one;
/// `None` when the conventional rate is zero.
pub fn rate_enhancement(proposed_bps: f64, conventional_bps: f64) -> Option<f64> {
    (conventional_bps > 0.0).then(|| (proposed_bps - conventional_bps) / conventional_bps * 100.0)
}

/// Total rate of one method in one cell of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Rate(f64),
    /// Rate floor not met.
    Infeasible,
    /// Exhaustive search would exceed the budget.
    Refused,
}

impl Outcome {
    pub fn rate(self) -> Option<f64> {
        match self {
            Outcome::Rate(r) => Some(r),
            _ => None,
        }
    }

    fn of_plan(plan: Result<PlanResult>) -> Result<Self> {
        match plan {
            Ok(p) if p.feasible => Ok(Outcome::Rate(p.total_rate_bps)),
            Ok(_) | Err(Error::Infeasible(_)) => Ok(Outcome::Infeasible),
            Err(Error::Budget { .. }) => Ok(Outcome::Refused),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReCell {
    pub m: usize,
    pub n: usize,
    pub proposed: Outcome,
    pub conventional: Outcome,
    /// `None` when undefined (conventional rate zero or missing).
    pub re_percent: Option<f64>,
}

fn capacity(structure: Structure, m: usize, channels: usize) -> usize {
    let widest = match structure {
        Structure::FullDuplex => m,
        Structure::DualFiber => {
            let (k, rest) = dual_fiber_split(m);
            k.max(rest)
        }
    };
    channels.saturating_sub(widest)
}

/// Rate enhancement over every (M, N) cell, in row-major (M, then N) order.
pub fn sweep_re(
    base: &ScenarioConfig,
    link: &LinkModel,
    m_range: RangeInclusive<usize>,
    n_range: RangeInclusive<usize>,
    opts: &SearchOptions,
) -> Result<Vec<ReCell>> {
    let d = link.channels();
    let mut cells = Vec::new();
    for m in m_range {
        for n in n_range.clone() {
            if m == 0 || n > capacity(base.structure, m, d) {
                return Err(Error::Config(format!(
                    "cell M={m}, N={n} does not fit {d} channels"
                )));
            }
            cells.push((m, n));
        }
    }
    map_ordered(opts.exec, &cells, |&(m, n)| {
        let s = base.with_counts(m, n);
        let proposed = Outcome::of_plan(optimize(&s, link, opts))?;
        let conv = Outcome::of_plan(conventional(&s, link))?;
        let re_percent = match (proposed, conv) {
            (Outcome::Rate(p), Outcome::Rate(c)) => rate_enhancement(p, c),
            _ => None,
        };
        Ok(ReCell {
            m,
            n,
            proposed,
            conventional: conv,
            re_percent,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NMax {
    pub m: usize,
    pub proposed: usize,
    pub conventional: usize,
    pub warnings: Vec<String>,
}

/// Largest N at which every quantum channel keeps a positive rate, scanning
/// down from the grid capacity for each method.
pub fn n_max(
    base: &ScenarioConfig,
    link: &LinkModel,
    m: usize,
    opts: &SearchOptions,
) -> Result<NMax> {
    if m == 0 {
        return Err(Error::Config("m must be at least 1".into()));
    }
    let positive = base.with_counts(m, 0).with_r_th(0.0);
    let top = capacity(base.structure, m, link.channels());
    let proposed_ok = |n: usize| {
        Ok(
            Outcome::of_plan(optimize(&positive.with_counts(m, n), link, opts))?
                .rate()
                .is_some(),
        )
    };
    let conventional_ok = |n: usize| {
        Ok(
            Outcome::of_plan(conventional(&positive.with_counts(m, n), link))?
                .rate()
                .is_some(),
        )
    };
    let scan = |ok: &dyn Fn(usize) -> Result<bool>| -> Result<Option<usize>> {
        for n in (0..=top).rev() {
            if ok(n)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    };
    let proposed = scan(&proposed_ok)?;
    let conv = scan(&conventional_ok)?;
    let mut warnings = Vec::new();
    if proposed.is_none() || conv.is_none() {
        warnings.push(format!(
            "M={m}: no positive key rate even without classical channels"
        ));
    }
    Ok(NMax {
        m,
        proposed: proposed.unwrap_or(0),
        conventional: conv.unwrap_or(0),
        warnings,
    })
}

/// Rate floor variants in the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Floor {
    /// `r_th < 0`.
    Unconstrained,
    /// `r_th = 0`: every channel must carry key.
    Positive,
}

impl Floor {
    pub fn r_th(self) -> f64 {
        match self {
            Floor::Unconstrained => -1.0,
            Floor::Positive => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Floor::Unconstrained => "unconstrained",
            Floor::Positive => "positive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub m: usize,
    pub floor: Floor,
    pub optimal: Outcome,
    pub near_optimal: Outcome,
    pub conventional: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    /// First M after which the unconstrained optimal total stops growing.
    pub knee: Option<usize>,
}

/// Relative growth below which the optimal total counts as saturated.
pub const SATURATION_TOLERANCE: f64 = 1e-9;

pub fn compare_methods(
    base: &ScenarioConfig,
    link: &LinkModel,
    m_range: RangeInclusive<usize>,
    opts: &SearchOptions,
) -> Result<Comparison> {
    let mut cases = Vec::new();
    for m in m_range {
        for floor in [Floor::Unconstrained, Floor::Positive] {
            cases.push((m, floor));
        }
    }
    let rows: Vec<CompareRow> = map_ordered(opts.exec, &cases, |&(m, floor)| {
        let s = base
            .with_counts(m, base.n_classical)
            .with_r_th(floor.r_th());
        s.validate(link.grid())?;
        Ok(CompareRow {
            m,
            floor,
            optimal: match brute_force_rate(&s, link, opts) {
                Ok(None) => Outcome::Infeasible,
                Ok(Some(p)) => Outcome::of_plan(Ok(p))?,
                Err(e) => Outcome::of_plan(Err(e))?,
            },
            near_optimal: Outcome::of_plan(optimize(&s, link, opts))?,
            conventional: Outcome::of_plan(conventional(&s, link))?,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let curve: Vec<(usize, Option<f64>)> = rows
        .iter()
        .filter(|r| r.floor == Floor::Unconstrained)
        .map(|r| (r.m, r.optimal.rate()))
        .collect();
    Ok(Comparison {
        knee: knee(&curve),
        rows,
    })
}

/// First M whose optimal total is not exceeded by any later M.
pub fn knee(curve: &[(usize, Option<f64>)]) -> Option<usize> {
    for (i, &(m, v)) in curve.iter().enumerate().take(curve.len().saturating_sub(1)) {
        let v = v?;
        let later = &curve[i + 1..];
        if later
            .iter()
            .all(|&(_, w)| w.is_some_and(|w| w <= v * (1.0 + SATURATION_TOLERANCE)))
        {
            return Some(m);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub y0: f64,
    pub exact_bps: f64,
    /// `None` when the linear model cannot be fitted for this link.
    pub linear_bps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCurveTable {
    pub points: Vec<CurvePoint>,
    pub zero_noise_bps: f64,
    pub p_zero: f64,
    pub r_th: f64,
    /// `None` when the floor is above the zero-noise rate.
    pub p_th: Option<f64>,
}

/// Exact and linear rate on `points` evenly spaced counts in `[0, p_max]`.
pub fn rate_curve(
    qkd: &QkdParams,
    dwdm: &DwdmParams,
    r_th: f64,
    p_max: f64,
    points: usize,
) -> Result<RateCurveTable> {
    if points < 2 || !(p_max > 0.0 && p_max.is_finite()) {
        return Err(Error::Config(format!(
            "rate curve needs >= 2 points and p_max > 0, got {points}, {p_max}"
        )));
    }
    let curve = RateCurve::new(qkd, dwdm);
    let linear: Option<LinearRateModel> = match fit_linear_model(qkd, dwdm) {
        Ok(model) => Some(model),
        Err(Error::Assumption(_) | Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let p_th = match curve.noise_threshold(r_th) {
        Ok(p) => Some(p),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let points = (0..points)
        .map(|i| {
            let p = p_max * i as f64 / (points - 1) as f64;
            Ok(CurvePoint {
                p,
                y0: y0_from_noise(p, qkd),
                exact_bps: curve.rate(p)?,
                linear_bps: linear.as_ref().map(|l| l.rate(p)),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RateCurveTable {
        points,
        zero_noise_bps: curve.rate(0.0)?,
        p_zero: curve.p_zero()?,
        r_th,
        p_th,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Optimize,
    Pattern,
    SweepRe,
    NMax,
    Compare,
    RateCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

/// Everything one `plan` invocation needs, already parsed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: Command,
    pub scenario: ScenarioFile,
    pub link: LinkModel,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub options: SearchOptions,
}

/// Whether the run met its rate floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
    /// Some exhaustive searches were skipped for exceeding the budget.
    Refused,
}

/// Run the command and build its report.
pub fn run(spec: &ExperimentSpec) -> Result<(Report, Status)> {
    let file = &spec.scenario;
    let base = file.scenario;
    let link = &spec.link;
    let opts = &spec.options;
    let grid = link.grid();
    base.validate(grid)?;
    let sweep = file.sweep.unwrap_or_default();
    let m_range = sweep.m_range(base.m_quantum);
    let n_range = sweep.n_range(base.n_classical);
    match spec.command {
        Command::Optimize => {
            let plan = optimize(&base, link, opts)?;
            let status = if plan.feasible {
                Status::Feasible
            } else {
                Status::Infeasible
            };
            Ok((report::plan_report(&plan, grid), status))
        }
        Command::Pattern => {
            let mut plans = Vec::new();
            for n in n_range {
                plans.push(optimize(&base.with_counts(base.m_quantum, n), link, opts)?);
            }
            let status = if plans.iter().all(|p| p.feasible) {
                Status::Feasible
            } else {
                Status::Infeasible
            };
            Ok((report::pattern_report(&plans, grid), status))
        }
        Command::SweepRe => {
            let cells = sweep_re(&base, link, m_range, n_range, opts)?;
            Ok((report::sweep_report(&cells), Status::Feasible))
        }
        Command::NMax => {
            let rows = m_range
                .map(|m| n_max(&base, link, m, opts))
                .collect::<Result<Vec<_>>>()?;
            Ok((report::n_max_report(&rows), Status::Feasible))
        }
        Command::Compare => {
            let cmp = compare_methods(&base, link, m_range, opts)?;
            let refused = cmp.rows.iter().any(|r| r.optimal == Outcome::Refused);
            let status = if refused {
                Status::Refused
            } else {
                Status::Feasible
            };
            Ok((report::compare_report(&cmp), status))
        }
        Command::RateCurve => {
            let c = file.curve.unwrap_or_default();
            let probe = RateCurve::new(link.qkd(), link.dwdm()).p_zero()?;
            let p_max = if probe > 0.0 {
                probe * c.span_of_p_zero
            } else {
                link.qkd().p_dark()
            };
            let table = rate_curve(link.qkd(), link.dwdm(), base.r_th, p_max, c.points)?;
            let status = if table.p_th.is_some() {
                Status::Feasible
            } else {
                Status::Infeasible
            };
            Ok((report::curve_report(&table), status))
        }
    }
}
