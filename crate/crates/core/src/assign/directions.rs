// SPDX-License-Identifier: Apache-2.0

//! Exhaustive check that letting the two classical directions use different
//! channel sets never lowers the total crosstalk cost.

use serde::Serialize;

use super::combos::{binomial, combinations_of};
use super::CostMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    /// Minimum over independent (A, B, U).
    pub best_overall: f64,
    /// Minimum over A = B.
    pub best_equal: f64,
    pub holds: bool,
    /// Number of (U, A, B) triples visited.
    pub candidates: u128,
}

/// Same matrix for both directions.
pub fn check_equal_directions(
    p: &CostMatrix,
    n: usize,
    m: usize,
    budget: u64,
) -> Result<DirectionReport> {
    check_equal_directions_weighted(p, p, n, m, budget)
}

/// Cost of (A, B, U) is `forward(A, U) + backward(B, U)`, each an
/// intersection sum. The claim holds when the best A = B cost equals the
/// unrestricted optimum to 1e-12 relative.
pub fn check_equal_directions_weighted(
    forward: &CostMatrix,
    backward: &CostMatrix,
    n: usize,
    m: usize,
    budget: u64,
) -> Result<DirectionReport> {
    let d = forward.dim();
    if backward.dim() != d {
        return Err(Error::Config(
            "forward and backward matrices differ in size".into(),
        ));
    }
    if m == 0 || n + m > d {
        return Err(Error::Config(format!(
            "n={n}, m={m} do not fit {d} channels"
        )));
    }
    let per_u = binomial(d - m, n).saturating_mul(binomial(d - m, n));
    let required = binomial(d, m).saturating_mul(per_u);
    if required > budget as u128 {
        return Err(Error::Budget { required, budget });
    }
    if n == 0 {
        return Ok(DirectionReport {
            best_overall: 0.0,
            best_equal: 0.0,
            holds: true,
            candidates: binomial(d, m),
        });
    }

    let all: Vec<usize> = (0..d).collect();
    let mut best_overall = f64::INFINITY;
    let mut best_equal = f64::INFINITY;
    for u in combinations_of(&all, m) {
        let free: Vec<usize> = all.iter().copied().filter(|i| !u.contains(i)).collect();
        let sets: Vec<Vec<usize>> = combinations_of(&free, n).collect();
        let fwd: Vec<f64> = sets
            .iter()
            .map(|a| forward.intersection_sum(a, &u))
            .collect();
        let bwd: Vec<f64> = sets
            .iter()
            .map(|b| backward.intersection_sum(b, &u))
            .collect();
        for (ia, fa) in fwd.iter().enumerate() {
            for (ib, fb) in bwd.iter().enumerate() {
                let cost = fa + fb;
                best_overall = best_overall.min(cost);
                if ia == ib {
                    best_equal = best_equal.min(cost);
                }
            }
        }
    }
    let holds = best_equal <= best_overall * (1.0 + 1e-12);
    Ok(DirectionReport {
        best_overall,
        best_equal,
        holds,
        candidates: required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_classical_channels_is_vacuous() {
        let p = CostMatrix::from_fn(5, f64::INFINITY, |i, j| (i + j) as f64).unwrap();
        let r = check_equal_directions(&p, 0, 2, 1_000).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn symmetric_toy_matrix() {
        let p = CostMatrix::from_fn(6, f64::INFINITY, |i, j| {
            1.0 / (1.0 + (i as f64 - j as f64).abs())
        })
        .unwrap();
        let r = check_equal_directions(&p, 2, 2, 1_000_000).unwrap();
        assert!(r.holds);
        assert_eq!(r.best_equal, r.best_overall);
        assert_eq!(r.candidates, 15 * 6 * 6);
    }

    #[test]
    fn budget_is_enforced() {
        let p = CostMatrix::from_fn(8, f64::INFINITY, |_, _| 1.0).unwrap();
        assert!(matches!(
            check_equal_directions(&p, 2, 2, 10),
            Err(Error::Budget { .. })
        ));
    }
}
