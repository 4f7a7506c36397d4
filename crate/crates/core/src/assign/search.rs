// SPDX-License-Identifier: Apache-2.0

//! Matrix-based near-optimal search: enumerate every combination on the
//! cheaper side, complete it greedily with the smallest column totals.

use super::combos::{binomial, next_combination, unrank};
use super::{CostMatrix, Solution};
use crate::error::{Error, Result};
use crate::par::{fold_chunks, Exec, CHUNK};

/// Run the search with the default executor. `Ok(None)` means no candidate
/// met the per-channel threshold.
pub fn matrix_search(p: &CostMatrix, n: usize, m: usize) -> Result<Option<Solution>> {
    matrix_search_with(p, n, m, Exec::default())
}

pub fn matrix_search_with(
    p: &CostMatrix,
    n: usize,
    m: usize,
    exec: Exec,
) -> Result<Option<Solution>> {
    let d = p.dim();
    if n == 0 || m == 0 {
        return Err(Error::Config(format!(
            "search needs n >= 1 and m >= 1, got n={n}, m={m}"
        )));
    }
    if n + m > d {
        return Err(Error::Config(format!(
            "n={n} plus m={m} exceeds {d} channels"
        )));
    }
    let rows_side = binomial(d, n) <= binomial(d, m);
    // Rows of `work` are the enumerated side, columns the completed side.
    let (work, picked, completed) = if rows_side {
        (p.clone(), n, m)
    } else {
        (p.transpose(), m, n)
    };
    let total = binomial(d, picked);
    let total = u64::try_from(total).map_err(|_| Error::Budget {
        required: total,
        budget: u64::MAX,
    })?;
    let threshold = p.threshold();

    let best = fold_chunks(
        exec,
        total,
        CHUNK,
        |ranks| scan(&work, picked, completed, threshold, rows_side, ranks),
        |a, b| {
            if b.cost < a.cost || (b.cost == a.cost && b.rank < a.rank) {
                b
            } else {
                a
            }
        },
    );
    Ok(best.map(|c| {
        let mut other = c.completion;
        other.sort_unstable();
        let (quantum, classical) = if rows_side {
            (other, c.selection)
        } else {
            (c.selection, other)
        };
        Solution {
            quantum,
            classical,
            cost: c.cost,
        }
    }))
}

struct Candidate {
    rank: u64,
    cost: f64,
    selection: Vec<usize>,
    completion: Vec<usize>,
}

fn scan(
    work: &CostMatrix,
    picked: usize,
    completed: usize,
    threshold: f64,
    rows_side: bool,
    ranks: std::ops::Range<u64>,
) -> Option<Candidate> {
    let d = work.dim();
    let mut comb = unrank(d, picked, ranks.start as u128);
    let mut totals = vec![0.0; d];
    let mut order: Vec<usize> = Vec::with_capacity(d);
    let mut best: Option<Candidate> = None;
    for rank in ranks {
        totals
            .iter_mut()
            .enumerate()
            .for_each(|(j, t)| *t = comb.iter().map(|&i| work.get(i, j)).sum());
        order.clear();
        order.extend(0..d);
        order.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]).then(a.cmp(&b)));
        let chosen = &order[..completed];
        let cost: f64 = chosen.iter().map(|&j| totals[j]).sum();

        let ok = if rows_side {
            // columns are the quantum channels; the last taken has the largest sum
            totals[chosen[completed - 1]] < threshold
        } else {
            // rows are quantum: noise on each from the chosen classical columns
            comb.iter()
                .map(|&q| chosen.iter().map(|&c| work.get(q, c)).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
                < threshold
        };
        if ok && best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(Candidate {
                rank,
                cost,
                selection: comb.clone(),
                completion: chosen.to_vec(),
            });
        }
        if !next_combination(&mut comb, d) {
            break;
        }
    }
    best
}
