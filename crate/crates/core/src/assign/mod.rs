// SPDX-License-Identifier: Apache-2.0

//! Wavelength assignment: cost matrices, the matrix-based search, exhaustive
//! oracles and the conventional two-band baseline.

mod brute;
pub mod combos;
mod directions;
mod matrix;
mod plan;
mod search;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{NoiseMode, Structure};
use crate::noise::NoiseBreakdown;
use crate::par::Exec;

pub use brute::{brute_force_noise, brute_force_rate, brute_force_rate_split};
pub use directions::{check_equal_directions, check_equal_directions_weighted, DirectionReport};
pub use matrix::{cost_matrix, pair_noise_matrix, CostMatrix};
pub use plan::{conventional, evaluate, optimize};
pub use search::{matrix_search, matrix_search_with};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Direction of a quantum channel: `Forward` is Alice to Bob (set U1),
/// `Backward` is Bob to Alice (set U2, dual-fiber only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuantumSlot {
    pub route: Route,
    pub index: usize,
}

impl QuantumSlot {
    pub fn forward(index: usize) -> Self {
        QuantumSlot {
            route: Route::Forward,
            index,
        }
    }

    pub fn backward(index: usize) -> Self {
        QuantumSlot {
            route: Route::Backward,
            index,
        }
    }
}

/// Channel index sets. `classical_a` carries Alice-to-Bob data,
/// `classical_b` Bob-to-Alice data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Assignment {
    pub classical_a: Vec<usize>,
    pub classical_b: Vec<usize>,
    pub quantum_u1: Vec<usize>,
    pub quantum_u2: Vec<usize>,
}

impl Assignment {
    /// Bidirectional classical channels (A = B) and forward quantum channels.
    pub fn full_duplex(classical: Vec<usize>, quantum: Vec<usize>) -> Self {
        Assignment {
            classical_a: classical.clone(),
            classical_b: classical,
            quantum_u1: quantum,
            quantum_u2: Vec::new(),
        }
    }

    pub fn slots(&self) -> impl Iterator<Item = QuantumSlot> + '_ {
        let fwd = self.quantum_u1.iter().map(|&i| QuantumSlot::forward(i));
        let bwd = self.quantum_u2.iter().map(|&i| QuantumSlot::backward(i));
        fwd.chain(bwd)
    }

    pub fn m_quantum(&self) -> usize {
        self.quantum_u1.len() + self.quantum_u2.len()
    }

    pub fn validate(&self, structure: Structure, channels: usize) -> Result<()> {
        let sets = [
            ("A", &self.classical_a),
            ("B", &self.classical_b),
            ("U1", &self.quantum_u1),
            ("U2", &self.quantum_u2),
        ];
        for (name, set) in sets {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidAssignment(format!(
                    "set {name} must be sorted without repeats"
                )));
            }
            if let Some(&bad) = set.iter().find(|&&i| i >= channels) {
                return Err(Error::InvalidAssignment(format!(
                    "set {name} has index {bad} >= {channels}"
                )));
            }
        }
        if self.classical_a.len() != self.classical_b.len() {
            return Err(Error::InvalidAssignment("|A| != |B|".into()));
        }
        if self.m_quantum() == 0 {
            return Err(Error::InvalidAssignment("no quantum channels".into()));
        }
        let clash = |q: &[usize], c: &[usize]| q.iter().find(|i| c.contains(i)).copied();
        match structure {
            Structure::FullDuplex => {
                if !self.quantum_u2.is_empty() {
                    return Err(Error::InvalidAssignment(
                        "full-duplex plans have U2 empty".into(),
                    ));
                }
                if let Some(i) = clash(&self.quantum_u1, &self.classical_a)
                    .or(clash(&self.quantum_u1, &self.classical_b))
                {
                    return Err(Error::InvalidAssignment(format!(
                        "channel {i} is both quantum and classical"
                    )));
                }
            }
            Structure::DualFiber => {
                if let Some(i) = clash(&self.quantum_u1, &self.classical_a) {
                    return Err(Error::InvalidAssignment(format!(
                        "forward fiber channel {i} is both quantum and classical"
                    )));
                }
                if let Some(i) = clash(&self.quantum_u2, &self.classical_b) {
                    return Err(Error::InvalidAssignment(format!(
                        "backward fiber channel {i} is both quantum and classical"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Index sets and objective value returned by the matrix searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub quantum: Vec<usize>,
    pub classical: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MatrixSearch,
    BruteForceNoise,
    BruteForceRate,
    Conventional,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MatrixSearch => "matrix_search",
            Method::BruteForceNoise => "brute_force_noise",
            Method::BruteForceRate => "brute_force_rate",
            Method::Conventional => "conventional",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub slot: QuantumSlot,
    pub wavelength_nm: f64,
    pub noise: NoiseBreakdown,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub structure: Structure,
    pub noise_mode: NoiseMode,
    pub assignment: Assignment,
    pub per_channel: Vec<ChannelReport>,
    pub total_rate_bps: f64,
    /// Every quantum channel beats the rate floor.
    pub feasible: bool,
    pub r_th: f64,
    pub method: Method,
    /// Disagreements between the matrix-level constraint and the exact noise.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub exec: Exec,
    /// Maximum number of candidates an exhaustive search may visit.
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            exec: Exec::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SearchOptions {
    pub fn with_exec(self, exec: Exec) -> Self {
        SearchOptions { exec, ..self }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        SearchOptions { budget, ..self }
    }

    pub(crate) fn check(&self, required: u128) -> Result<()> {
        if required > self.budget as u128 {
            return Err(Error::Budget {
                required,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// Quantum channels per fiber in the dual-fiber structure: `(k, M − k)` with
/// `k = ⌊M/2⌋` on the forward fiber.
pub fn dual_fiber_split(m: usize) -> (usize, usize) {
    let k = m / 2;
    (k, m - k)
}
