// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("raman table line {line}: {msg}")]
    Ingest { line: usize, msg: String },

    #[error("raman table covers shifts [{min_nm}, {max_nm}] nm but the grid needs [{need_min_nm}, {need_max_nm}] nm")]
    Coverage {
        min_nm: f64,
        max_nm: f64,
        need_min_nm: f64,
        need_max_nm: f64,
    },

    #[error(
        "wavelength shift {shift_nm} nm is outside the raman table domain [{min_nm}, {max_nm}]"
    )]
    OutOfDomain {
        shift_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("linear rate model assumption violated: {0}")]
    Assumption(String),

    #[error("search space of {required} candidates exceeds the budget of {budget}")]
    Budget { required: u128, budget: u64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("scenario file: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
