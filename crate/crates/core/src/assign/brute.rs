// SPDX-License-Identifier: Apache-2.0

//! Exhaustive oracles: minimum intersection sum over every (classical,
//! quantum) pair of index sets, and maximum total exact key rate.

use std::ops::Range;

use super::combos::{binomial, combinations_of, next_combination, unrank};
use super::plan::evaluate;
use super::{
    dual_fiber_split, pair_noise_matrix, Assignment, CostMatrix, Method, PlanResult, SearchOptions,
    Solution,
};
use crate::error::{Error, Result};
use crate::grid::{ScenarioConfig, Structure};
use crate::noise::LinkModel;
use crate::par::{fold_chunks, Exec, CHUNK};
use crate::rate::RateCurve;

struct Best {
    /// Position in (classical rank, quantum order) enumeration.
    rank: u128,
    score: f64,
    classical: Vec<usize>,
    quantum: Vec<usize>,
}

/// Enumerate every classical n-set, and for each every quantum m-set in its
/// complement. `score` gets the classical set's column sums and a quantum set
/// and returns `None` for a rejected candidate. Lower scores win; ties go to
/// the earliest candidate.
fn exhaustive<S>(p: &CostMatrix, n: usize, m: usize, exec: Exec, score: S) -> Result<Option<Best>>
where
    S: Fn(&[f64], &[usize]) -> Result<Option<f64>> + Sync,
{
    let d = p.dim();
    let outer = binomial(d, n) as u64;
    let inner = binomial(d - n, m);
    let chunk = (CHUNK / (inner as u64).max(1)).max(1);
    let fold = |ranks: Range<u64>| -> Option<Result<Best>> {
        let mut classical = unrank(d, n, ranks.start as u128);
        let mut sums = vec![0.0; d];
        let mut best: Option<Best> = None;
        for rank in ranks {
            for (j, s) in sums.iter_mut().enumerate() {
                *s = p.column_sum(&classical, j);
            }
            let free: Vec<usize> = (0..d).filter(|j| !classical.contains(j)).collect();
            for (u, quantum) in combinations_of(&free, m).enumerate() {
                let score = match score(&sums, &quantum) {
                    Ok(Some(s)) => s,
                    Ok(None) => continue,
                    Err(e) => return Some(Err(e)),
                };
                if best.as_ref().is_none_or(|b| score < b.score) {
                    let rank = rank as u128 * inner + u as u128;
                    best = Some(Best {
                        rank,
                        score,
                        classical: classical.clone(),
                        quantum,
                    });
                }
            }
            if !next_combination(&mut classical, d) {
                break;
            }
        }
        best.map(Ok)
    };
    let combine = |a: Result<Best>, b: Result<Best>| match (a, b) {
        (Err(e), _) | (_, Err(e)) => Err(e),
        (Ok(a), Ok(b)) => Ok(
            if b.score < a.score || (b.score == a.score && b.rank < a.rank) {
                b
            } else {
                a
            },
        ),
    };
    fold_chunks(exec, outer, chunk, fold, combine).transpose()
}

fn check_sizes(d: usize, n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Config("search needs m >= 1".into()));
    }
    if n + m > d {
        return Err(Error::Config(format!(
            "n={n} plus m={m} exceeds {d} channels"
        )));
    }
    Ok(())
}

/// Exact minimiser of the intersection sum subject to every quantum column
/// sum staying below the matrix threshold. Refuses when
/// C(D,n)·C(D−n,m) exceeds the budget.
pub fn brute_force_noise(
    p: &CostMatrix,
    n: usize,
    m: usize,
    opts: &SearchOptions,
) -> Result<Option<Solution>> {
    let d = p.dim();
    check_sizes(d, n, m)?;
    opts.check(binomial(d, n).saturating_mul(binomial(d - n, m)))?;
    let threshold = p.threshold();
    let best = exhaustive(p, n, m, opts.exec, |sums, quantum| {
        let ok = quantum.iter().all(|&j| sums[j] < threshold);
        Ok(ok.then(|| quantum.iter().map(|&j| sums[j]).sum()))
    })?;
    Ok(best.map(|b| Solution {
        quantum: b.quantum,
        classical: b.classical,
        cost: b.score,
    }))
}

/// Classical set, quantum set and total rate.
type RatedChoice = (Vec<usize>, Vec<usize>, f64);

/// Best total rate with `m` quantum and `n` classical channels sharing one
/// propagation context described by `pair`.
fn best_rate(
    pair: &CostMatrix,
    curve: &RateCurve,
    n: usize,
    m: usize,
    r_th: f64,
    exec: Exec,
) -> Result<Option<RatedChoice>> {
    let best = exhaustive(pair, n, m, exec, |noise, quantum| {
        let mut total = 0.0;
        for &j in quantum {
            let r = curve.rate(noise[j])?;
            if r_th >= 0.0 && r <= r_th {
                return Ok(None);
            }
            total += r;
        }
        Ok(Some(-total))
    })?;
    Ok(best.map(|b| (b.classical, b.quantum, -b.score)))
}

/// Maximum total exact key rate over all assignments, honouring `r_th` when it
/// is non-negative. Full-duplex plans keep A = B. Dual-fiber plans take the
/// best split of the M quantum channels between the fibers, preferring
/// ⌊M/2⌋ on ties. `Ok(None)` when nothing is feasible.
pub fn brute_force_rate(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    opts: &SearchOptions,
) -> Result<Option<PlanResult>> {
    scenario.validate(link.grid())?;
    match scenario.structure {
        Structure::FullDuplex => full_duplex_rate(scenario, link, opts),
        Structure::DualFiber => {
            let m = scenario.m_quantum;
            let (k0, _) = dual_fiber_split(m);
            let splits: Vec<usize> = std::iter::once(k0)
                .chain((0..=m).filter(|&k| k != k0))
                .collect();
            dual_fiber_rate(scenario, link, &splits, opts)
        }
    }
}

/// Dual-fiber oracle with `k` quantum channels on the forward fiber.
pub fn brute_force_rate_split(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    k: usize,
    opts: &SearchOptions,
) -> Result<Option<PlanResult>> {
    if scenario.structure != Structure::DualFiber {
        return Err(Error::Config(
            "split search applies to dual-fiber scenarios".into(),
        ));
    }
    if k > scenario.m_quantum {
        return Err(Error::Config(format!(
            "split k={k} exceeds M={}",
            scenario.m_quantum
        )));
    }
    dual_fiber_rate(scenario, link, &[k], opts)
}

fn full_duplex_rate(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    opts: &SearchOptions,
) -> Result<Option<PlanResult>> {
    let d = link.channels();
    let (n, m) = (scenario.n_classical, scenario.m_quantum);
    check_sizes(d, n, m)?;
    opts.check(binomial(d, n).saturating_mul(binomial(d - n, m)))?;
    let pair = pair_noise_matrix(Structure::FullDuplex, scenario.noise_mode, link)?;
    let curve = RateCurve::new(link.qkd(), link.dwdm());
    let Some((classical, quantum, _)) = best_rate(&pair, &curve, n, m, scenario.r_th, opts.exec)?
    else {
        return Ok(None);
    };
    evaluate(
        scenario,
        link,
        Assignment::full_duplex(classical, quantum),
        Method::BruteForceRate,
    )
    .map(Some)
}

fn dual_fiber_rate(
    scenario: &ScenarioConfig,
    link: &LinkModel,
    splits: &[usize],
    opts: &SearchOptions,
) -> Result<Option<PlanResult>> {
    let d = link.channels();
    let (n, m) = (scenario.n_classical, scenario.m_quantum);
    let mut counts: Vec<usize> = splits
        .iter()
        .flat_map(|&k| [k, m - k])
        .filter(|&c| c > 0 && c + n <= d)
        .collect();
    counts.sort_unstable();
    counts.dedup();
    let required = counts.iter().fold(0u128, |acc, &c| {
        acc.saturating_add(binomial(d, n).saturating_mul(binomial(d - n, c)))
    });
    opts.check(required)?;

    let pair = pair_noise_matrix(Structure::DualFiber, scenario.noise_mode, link)?;
    let curve = RateCurve::new(link.qkd(), link.dwdm());
    let mut per_count = Vec::with_capacity(counts.len());
    for &c in &counts {
        per_count.push((c, best_rate(&pair, &curve, n, c, scenario.r_th, opts.exec)?));
    }
    let lookup = |c: usize| {
        per_count
            .iter()
            .find(|(k, _)| *k == c)
            .and_then(|(_, b)| b.as_ref())
    };

    let mut best: Option<(f64, Assignment)> = None;
    for &k in splits {
        let rest = m - k;
        if k.max(rest) + n > d {
            continue;
        }
        // a fiber without quantum channels still carries the N classical ones
        let fiber = |c: usize| match c {
            0 => Some((None, Vec::new(), 0.0)),
            _ => lookup(c).map(|(a, u, r)| (Some(a.clone()), u.clone(), *r)),
        };
        let (Some((a, u1, ra)), Some((b, u2, rb))) = (fiber(k), fiber(rest)) else {
            continue;
        };
        let total = ra + rb;
        if best.as_ref().is_none_or(|(t, _)| total > *t) {
            let (classical_a, classical_b) = match (a, b) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) => (a.clone(), a),
                (None, Some(b)) => (b.clone(), b),
                (None, None) => unreachable!("M >= 1 puts quantum channels on one fiber"),
            };
            let assignment = Assignment {
                classical_a,
                classical_b,
                quantum_u1: u1,
                quantum_u2: u2,
            };
            best = Some((total, assignment));
        }
    }
    best.map(|(_, a)| evaluate(scenario, link, a, Method::BruteForceRate))
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DwdmParams, NoiseMode, QkdParams};
    use crate::raman::RamanCrossSectionTable;

    fn small_link(length_km: f64) -> LinkModel {
        let grid = build_grid(1545.0, 1556.0, 200.0).unwrap();
        LinkModel::new(
            grid,
            RamanCrossSectionTable::synthetic_default(),
            QkdParams::nominal(),
            DwdmParams::narrow_nbf(length_km),
        )
        .unwrap()
    }

    #[test]
    fn single_pair_is_global_minimum() {
        let p = CostMatrix::new(
            3,
            vec![0.0, 4.0, 2.0, 3.0, 0.0, 1.0, 6.0, 5.0, 0.0],
            f64::INFINITY,
        )
        .unwrap();
        let s = brute_force_noise(&p, 1, 1, &SearchOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!((s.classical, s.quantum, s.cost), (vec![1], vec![2], 1.0));
    }

    #[test]
    fn budget_refusal_reports_count() {
        let p = CostMatrix::from_fn(12, f64::INFINITY, |i, j| (i * 12 + j) as f64).unwrap();
        let err =
            brute_force_noise(&p, 4, 3, &SearchOptions::default().with_budget(1000)).unwrap_err();
        match err {
            Error::Budget { required, budget } => assert_eq!((required, budget), (495 * 56, 1000)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_filters_candidates() {
        let p = CostMatrix::from_fn(6, 2.5, |i, j| ((i + 2 * j) % 5) as f64).unwrap();
        if let Some(s) = brute_force_noise(&p, 2, 2, &SearchOptions::default()).unwrap() {
            for &q in &s.quantum {
                assert!(p.column_sum(&s.classical, q) < 2.5);
            }
        }
        assert_eq!(
            brute_force_noise(&p.with_threshold(0.0), 2, 2, &SearchOptions::default()).unwrap(),
            None
        );
    }

    #[test]
    fn no_classical_channels_gives_dark_count_rate() {
        let link = small_link(40.0);
        let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanOnly, 2, 0);
        let plan = brute_force_rate(&s, &link, &SearchOptions::default())
            .unwrap()
            .unwrap();
        let r0 = RateCurve::new(link.qkd(), link.dwdm()).rate(0.0).unwrap();
        assert!((plan.total_rate_bps - 2.0 * r0).abs() <= 1e-12 * r0);
    }

    #[test]
    fn rate_oracle_beats_every_candidate() {
        let link = small_link(70.0);
        let s = ScenarioConfig::new(Structure::FullDuplex, NoiseMode::RamanOnly, 2, 2);
        let best = brute_force_rate(&s, &link, &SearchOptions::default())
            .unwrap()
            .unwrap();
        let d = link.channels();
        for a in combinations_of(&(0..d).collect::<Vec<_>>(), 2) {
            let free: Vec<usize> = (0..d).filter(|j| !a.contains(j)).collect();
            for u in combinations_of(&free, 2) {
                let plan = evaluate(
                    &s,
                    &link,
                    Assignment::full_duplex(a.clone(), u),
                    Method::Conventional,
                )
                .unwrap();
                assert!(plan.total_rate_bps <= best.total_rate_bps * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn dual_fiber_split_oracle_is_consistent() {
        let link = small_link(60.0);
        let s = ScenarioConfig::new(Structure::DualFiber, NoiseMode::RamanOnly, 3, 2);
        let opts = SearchOptions::default();
        let best = brute_force_rate(&s, &link, &opts).unwrap().unwrap();
        best.assignment
            .validate(Structure::DualFiber, link.channels())
            .unwrap();
        for k in 0..=3 {
            let split = brute_force_rate_split(&s, &link, k, &opts)
                .unwrap()
                .unwrap();
            assert_eq!(split.assignment.quantum_u1.len(), k);
            assert!(split.total_rate_bps <= best.total_rate_bps * (1.0 + 1e-12));
        }
    }
}
