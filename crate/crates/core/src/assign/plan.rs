// SPDX-License-Identifier: Apache-2.0

use super::{
    cost_matrix, dual_fiber_split, matrix_search_with, Assignment, ChannelReport, Method,
    PlanResult, SearchOptions,
};
use crate::error::{Error, Result};
use crate::grid::{ScenarioConfig, Structure};
use crate::noise::LinkModel;
use crate::rate::RateCurve;

/// Exact per-channel noise and key rate of `assignment`.
pub fn evaluate(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    assignment: Assignment,
    method: Method,
) -> Result<PlanResult> {
    assignment.validate(scenario.structure, link.channels())?;
    if assignment.classical_a.len() != scenario.n_classical
        || assignment.m_quantum() != scenario.m_quantum
    {
        return Err(Error::InvalidAssignment(format!(
            "assignment has N={}, M={} but the scenario asks for N={}, M={}",
            assignment.classical_a.len(),
            assignment.m_quantum(),
            scenario.n_classical,
            scenario.m_quantum
        )));
    }
    let curve = RateCurve::new(link.qkd(), link.dwdm());
    let mut per_channel = Vec::with_capacity(assignment.m_quantum());
    for slot in assignment.slots() {
        let noise =
            link.channel_noise(scenario.structure, scenario.noise_mode, &assignment, slot)?;
        per_channel.push(ChannelReport {
            slot,
            wavelength_nm: link.grid().wavelength_nm(slot.index),
            noise,
            rate_bps: curve.rate(noise.total)?,
        });
    }
    let total_rate_bps = per_channel.iter().map(|c| c.rate_bps).sum();
    let feasible = per_channel.iter().all(|c| c.rate_bps > scenario.r_th);
    Ok(PlanResult {
        structure: scenario.structure,
        noise_mode: scenario.noise_mode,
        assignment,
        per_channel,
        total_rate_bps,
        feasible,
        r_th: scenario.r_th,
        method,
        warnings: Vec::new(),
    })
}

/// Two-band baseline: quantum channels on the lowest indices, classical on
/// the highest, A = B.
pub fn conventional(scenario: &ScenarioConfig, link: &LinkModel) -> Result<PlanResult> {
    scenario.validate(link.grid())?;
    let d = link.channels();
    let classical: Vec<usize> = (d - scenario.n_classical..d).collect();
    let assignment = match scenario.structure {
        Structure::FullDuplex => {
            Assignment::full_duplex(classical, (0..scenario.m_quantum).collect())
        }
        Structure::DualFiber => {
            let (k, rest) = dual_fiber_split(scenario.m_quantum);
            Assignment {
                classical_a: classical.clone(),
                classical_b: classical,
                quantum_u1: (0..k).collect(),
                quantum_u2: (0..rest).collect(),
            }
        }
    };
    evaluate(scenario, link, assignment, Method::Conventional)
}

/// Near-optimal plan from the matrix search. Full-duplex plans use A = B;
/// dual-fiber plans put ⌊M/2⌋ quantum channels on the forward fiber and solve
/// each fiber separately.
///
/// Errors with `Infeasible` when the rate floor is unreachable even without
/// crosstalk or when no candidate meets the matrix threshold. A plan that
/// passes the matrix threshold but misses the floor on exact noise is
/// returned with `feasible = false` and a warning.
pub fn optimize(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    opts: &SearchOptions,
) -> Result<PlanResult> {
    scenario.validate(link.grid())?;
    let curve = RateCurve::new(link.qkd(), link.dwdm());
    let p_th = curve.noise_threshold(scenario.r_th)?;
    let n = scenario.n_classical;

    let fiber = |m: usize| -> Result<(Vec<usize>, Vec<usize>)> {
        if n == 0 {
            return Ok((Vec::new(), (0..m).collect()));
        }
        let p = cost_matrix(scenario.structure, scenario.noise_mode, link, p_th)?;
        match matrix_search_with(&p, n, m, opts.exec)? {
            Some(s) => Ok((s.classical, s.quantum)),
            None => Err(Error::Infeasible(format!(
                "no placement of M={m} quantum and N={n} classical channels keeps crosstalk below {p_th:e} photons"
            ))),
        }
    };

    let assignment = match scenario.structure {
        Structure::FullDuplex => {
            let (classical, quantum) = fiber(scenario.m_quantum)?;
            Assignment::full_duplex(classical, quantum)
        }
        Structure::DualFiber => {
            let (k, rest) = dual_fiber_split(scenario.m_quantum);
            let (classical_b, quantum_u2) = fiber(rest)?;
            // an empty forward fiber reuses the backward classical set
            let (classical_a, quantum_u1) = if k == 0 {
                (classical_b.clone(), Vec::new())
            } else {
                fiber(k)?
            };
            Assignment {
                classical_a,
                classical_b,
                quantum_u1,
                quantum_u2,
            }
        }
    };

    let mut plan = evaluate(scenario, link, assignment, Method::MatrixSearch)?;
    if scenario.r_th >= 0.0 {
        for c in &plan.per_channel {
            if c.rate_bps <= scenario.r_th {
                plan.warnings.push(format!(
                    "channel {} passes the matrix threshold but its exact noise {:e} gives {:e} bit/s, not above {:e}",
                    c.slot.index, c.noise.total, c.rate_bps, scenario.r_th
                ));
            }
        }
    }
    Ok(plan)
}
