//! Desk-scale experiments with pass/fail verdicts.

mod experiments;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{LatticeDist, ModelParams};
use crate::error::Result;

pub use experiments::{
    ordering_violation, run_dirac_limit, run_extended_limit, run_l_of_m_exponent, run_lattice_limit,
    run_lipschitz_convergence, run_sandwich_demo, LipschitzInitial, LIMIT_TOLERANCE, RATE_CONSTANT_FACTOR,
};
pub use report::{fit_loglog_slope, sup_grid, RunReport, SeriesPoint, Verdict, GRID_POINTS};

/// A harness job, so that independent experiments can be queued together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Lipschitz { params: ModelParams, init: LipschitzInitial, n_list: Vec<u64>, horizon: f64 },
    Dirac { params: ModelParams, init: LatticeDist, n_list: Vec<u64> },
    Lattice { params: ModelParams, g: usize, pi: Vec<f64>, n: u64 },
    Extended { params: ModelParams, a: f64, b: f64, n: u64 },
    Sandwich { params: ModelParams, eps: f64, n: u64, init: LatticeDist },
    LOfM { params: ModelParams, l: u32, n_list: Vec<u64> },
}

impl Experiment {
    pub fn run(&self) -> Result<RunReport> {
        match self {
            Experiment::Lipschitz { params, init, n_list, horizon } => {
                run_lipschitz_convergence(init, params, n_list, *horizon)
            }
            Experiment::Dirac { params, init, n_list } => run_dirac_limit(params, init, n_list),
            Experiment::Lattice { params, g, pi, n } => run_lattice_limit(params, *g, pi, *n),
            Experiment::Extended { params, a, b, n } => run_extended_limit(params, *a, *b, *n),
            Experiment::Sandwich { params, eps, n, init } => run_sandwich_demo(params, *eps, *n, init),
            Experiment::LOfM { params, l, n_list } => run_l_of_m_exponent(params, *l, n_list),
        }
    }
}

/// Run independent experiments in parallel, preserving order.
pub fn run_batch(jobs: &[Experiment]) -> Vec<Result<RunReport>> {
    jobs.par_iter().map(Experiment::run).collect()
}
