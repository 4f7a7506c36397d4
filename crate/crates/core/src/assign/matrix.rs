// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{NoiseMode, Structure};
use crate::noise::{Direction, LinkModel};

/// D×D cost matrix: row `i` is a classical channel, column `j` a quantum
/// channel. The diagonal holds `+∞` so a wavelength is never both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostMatrix {
    dim: usize,
    values: Vec<f64>,
    threshold: f64,
}

impl CostMatrix {
    /// Row-major `values`; the diagonal is overwritten with `+∞`.
    pub fn new(dim: usize, mut values: Vec<f64>, threshold: f64) -> Result<Self> {
        if dim < 2 || values.len() != dim * dim {
            return Err(Error::Config(format!(
                "cost matrix needs {dim}x{dim} >= 2x2 values"
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                let v = &mut values[i * dim + j];
                if i == j {
                    *v = f64::INFINITY;
                } else if !(*v >= 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!(
                        "cost matrix entry ({i}, {j}) = {v} must be finite and >= 0"
                    )));
                }
            }
        }
        if threshold.is_nan() {
            return Err(Error::Config("cost matrix threshold is NaN".into()));
        }
        Ok(CostMatrix {
            dim,
            values,
            threshold,
        })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(
        dim: usize,
        threshold: f64,
        mut f: F,
    ) -> Result<Self> {
        let values = (0..dim * dim)
            .map(|k| {
                if k / dim == k % dim {
                    0.0
                } else {
                    f(k / dim, k % dim)
                }
            })
            .collect();
        Self::new(dim, values, threshold)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-quantum-channel limit X_th on the column sum.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dim + col]
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Multiply every entry and the threshold by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        CostMatrix {
            dim: self.dim,
            values: self.values.iter().map(|v| v * factor).collect(),
            threshold: self.threshold * factor,
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        CostMatrix {
            dim: d,
            values: (0..d * d).map(|k| self.get(k % d, k / d)).collect(),
            threshold: self.threshold,
        }
    }

    /// Σ over `rows × cols` of the entries.
    pub fn intersection_sum(&self, rows: &[usize], cols: &[usize]) -> f64 {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).sum::<f64>())
            .sum()
    }

    /// Noise on quantum column `col` from `rows`.
    pub fn column_sum(&self, rows: &[usize], col: usize) -> f64 {
        rows.iter().map(|&i| self.get(i, col)).sum()
    }
}

/// Matrix and threshold for the scenario. `p_th` is the crosstalk count
/// matching the rate floor (`+∞` when unconstrained).
///
/// Raman-only matrices drop the length-dependent prefactor
/// (`P_ij = λ_j·β(λ_i, λ_j)`) and move it into the threshold; with adjacent
/// crosstalk the entries are absolute photon counts.
pub fn cost_matrix(
    structure: Structure,
    mode: NoiseMode,
    link: &LinkModel,
    p_th: f64,
) -> Result<CostMatrix> {
    let c = link.constants();
    let g = link.grid();
    match mode {
        NoiseMode::RamanOnly => {
            let scale = match structure {
                Structure::FullDuplex => c.c_f + c.c_b,
                Structure::DualFiber => c.c_f,
            };
            let threshold = if p_th.is_infinite() {
                f64::INFINITY
            } else {
                p_th / scale
            };
            CostMatrix::from_fn(g.len(), threshold, |i, j| {
                g.wavelength_m(j) * link.beta(i, j)
            })
        }
        NoiseMode::RamanPlusAdjacent => {
            pair_noise_matrix(structure, mode, link).map(|m| m.with_threshold(p_th))
        }
    }
}

/// Exact photon count each classical channel `i` adds to quantum channel `j`
/// when classical channels are bidirectional (full-duplex) or co-propagating
/// (dual-fiber). Threshold is `+∞`.
pub fn pair_noise_matrix(
    structure: Structure,
    mode: NoiseMode,
    link: &LinkModel,
) -> Result<CostMatrix> {
    let c = link.constants();
    let g = link.grid();
    let d = g.len();
    let mut values = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let lb = g.wavelength_m(j) * link.beta(i, j);
            let mut v = match structure {
                Structure::FullDuplex => (c.c_f + c.c_b) * lb,
                Structure::DualFiber => c.c_f * lb,
            };
            if mode == NoiseMode::RamanPlusAdjacent {
                v += link.adjacent_count(Direction::CoPropagating, i, j)?;
                if structure == Structure::FullDuplex {
                    v += link.adjacent_count(Direction::CounterPropagating, i, j)?;
                }
            }
            values[i * d + j] = v;
        }
    }
    CostMatrix::new(d, values, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::{Assignment, QuantumSlot};
    use crate::grid::{build_grid, DwdmParams, QkdParams};
    use crate::raman::RamanCrossSectionTable;

    fn link(dwdm: DwdmParams) -> LinkModel {
        let grid = build_grid(1530.0, 1565.0, 200.0).unwrap();
        LinkModel::new(
            grid,
            RamanCrossSectionTable::synthetic_default(),
            QkdParams::nominal(),
            dwdm,
        )
        .unwrap()
    }

    #[test]
    fn diagonal_is_infinite_everywhere() {
        let l = link(DwdmParams::wide_nbf(50.0));
        for s in [Structure::FullDuplex, Structure::DualFiber] {
            for mode in [NoiseMode::RamanOnly, NoiseMode::RamanPlusAdjacent] {
                let p = cost_matrix(s, mode, &l, 1e-4).unwrap();
                for i in 0..p.dim() {
                    assert_eq!(p.get(i, i), f64::INFINITY);
                }
            }
        }
    }

    #[test]
    fn raman_only_entries_and_thresholds() {
        let l = link(DwdmParams::narrow_nbf(45.0));
        let g = l.grid();
        let p = cost_matrix(Structure::FullDuplex, NoiseMode::RamanOnly, &l, 2e-4).unwrap();
        let table = RamanCrossSectionTable::synthetic_default();
        for (i, j) in [(0, 1), (5, 2), (21, 0), (10, 11)] {
            let b = table.beta(g.wavelength_nm(i), g.wavelength_nm(j)).unwrap();
            assert_eq!(p.get(i, j), g.wavelength_nm(j) * 1e-9 * b);
        }
        let c = l.constants();
        assert!((p.threshold() - 2e-4 / (c.c_f + c.c_b)).abs() < 1e-18 * p.threshold());
        let dual = cost_matrix(Structure::DualFiber, NoiseMode::RamanOnly, &l, 2e-4).unwrap();
        assert_eq!(dual.threshold(), 2e-4 / c.c_f);
        let open = cost_matrix(
            Structure::DualFiber,
            NoiseMode::RamanOnly,
            &l,
            f64::INFINITY,
        )
        .unwrap();
        assert_eq!(open.threshold(), f64::INFINITY);
    }

    #[test]
    fn adjacent_terms_vanish_two_steps_apart() {
        let l = link(DwdmParams::wide_nbf(50.0));
        let c = l.constants();
        let p = cost_matrix(
            Structure::FullDuplex,
            NoiseMode::RamanPlusAdjacent,
            &l,
            1e-4,
        )
        .unwrap();
        assert_eq!(p.threshold(), 1e-4);
        let raman = |i: usize, j: usize| (c.c_f + c.c_b) * l.grid().wavelength_m(j) * l.beta(i, j);
        for i in [3, 9] {
            assert!((p.get(i, 7) - raman(i, 7)).abs() <= 1e-14 * raman(i, 7));
        }
        assert!(p.get(6, 7) > 10.0 * raman(6, 7));
        let dual =
            cost_matrix(Structure::DualFiber, NoiseMode::RamanPlusAdjacent, &l, 1e-4).unwrap();
        assert!(dual.get(6, 7) < p.get(6, 7));
    }

    #[test]
    fn column_sums_equal_exact_channel_noise() {
        for mode in [NoiseMode::RamanOnly, NoiseMode::RamanPlusAdjacent] {
            let l = link(DwdmParams::wide_nbf(50.0));
            let pair = pair_noise_matrix(Structure::FullDuplex, mode, &l).unwrap();
            let a = Assignment::full_duplex(vec![0, 4, 6, 12, 20], vec![5, 13]);
            for q in [5, 13] {
                let exact = l
                    .channel_noise(Structure::FullDuplex, mode, &a, QuantumSlot::forward(q))
                    .unwrap()
                    .total;
                let sum = pair.column_sum(&a.classical_a, q);
                assert!((exact - sum).abs() <= 1e-12 * exact, "{exact} {sum}");
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_entries() {
        assert!(CostMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0], 1.0).is_err());
        assert!(CostMatrix::new(2, vec![0.0, f64::NAN, 1.0, 0.0], 1.0).is_err());
        assert!(CostMatrix::new(2, vec![0.0, 1.0, 1.0], 1.0).is_err());
        let m = CostMatrix::new(2, vec![5.0, 1.0, 2.0, 5.0], 1.0).unwrap();
        assert_eq!(m.get(0, 0), f64::INFINITY);
        assert_eq!(m.transpose().get(0, 1), 2.0);
    }
}
