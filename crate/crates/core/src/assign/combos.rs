// SPDX-License-Identifier: Apache-2.0

//! Lexicographic k-combinations with ranking, so enumeration can be split
//! into independent chunks.

/// C(n, k), saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc is C(n, i) before the update
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th k-combination of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    while out.len() < k {
        let remaining = k - out.len() - 1;
        let count = binomial(n - x - 1, remaining);
        if rank < count {
            out.push(x);
        } else {
            rank -= count;
        }
        x += 1;
    }
    out
}

/// Advance to the next combination of `0..n`; false when `comb` was the last.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over all k-combinations of `items` (already sorted) in
/// lexicographic order.
pub fn combinations_of(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = items.len();
    let mut idx: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let current = idx.as_mut()?;
        let out = current.iter().map(|&i| items[i]).collect();
        if !next_combination(current, n) {
            idx = None;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(22, 11), 705_432);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn enumeration_order() {
        let all: Vec<_> = combinations_of(&[0, 1, 2, 3], 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            combinations_of(&[4, 7], 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(combinations_of(&[4, 7], 3).count(), 0);
    }

    proptest! {
        #[test]
        fn unrank_walks_in_order(n in 1usize..12, k in 0usize..6) {
            prop_assume!(k <= n);
            let total = binomial(n, k);
            let mut comb: Vec<usize> = (0..k).collect();
            for rank in 0..total {
                prop_assert_eq!(&unrank(n, k, rank), &comb);
                let more = next_combination(&mut comb, n);
                prop_assert_eq!(more, rank + 1 < total);
            }
        }
    }
}
