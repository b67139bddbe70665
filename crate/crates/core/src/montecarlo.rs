//! Trajectory sampling for cooperative motion.
//!
//! A path moves at step `k` only if `m` independent draws from the exact law
//! of `X_k` all land on its current site. The marginals come from
//! [`evolve_path`](crate::evolution::evolve_path), so each sampled path has
//! exactly the law of the process. Every trajectory owns a ChaCha stream
//! indexed by its position in the ensemble, which makes results independent
//! of the thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{LatticeDist, ModelParams, Site};
use crate::error::{Error, Result};
use crate::evolution::{evolve_path, StepLaw};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub params: ModelParams,
    pub step: StepLaw,
    pub init: LatticeDist,
    pub horizon: u64,
    pub n_trajectories: u64,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<u32> {
        let m = self.params.require_integer_m()?;
        if self.n_trajectories == 0 {
            return Err(Error::InvalidArgument("need at least one trajectory".into()));
        }
        Ok(m)
    }

    /// Exact laws of `X_0, …, X_horizon`.
    pub fn marginals(&self) -> Result<Vec<LatticeDist>> {
        evolve_path(&self.init, &self.step, &self.params, self.horizon)
    }
}

/// Inverse-CDF sampler over the atoms of a [`LatticeDist`].
#[derive(Debug, Clone)]
pub struct SiteSampler {
    sites: Vec<Site>,
    cumulative: Vec<f64>,
}

impl SiteSampler {
    pub fn new(d: &LatticeDist) -> Self {
        let atoms = d.atoms();
        let mut acc = 0.0;
        let mut sites = Vec::with_capacity(atoms.len());
        let mut cumulative = Vec::with_capacity(atoms.len());
        for (s, p) in atoms {
            acc += p;
            sites.push(s);
            cumulative.push(acc);
        }
        Self { sites, cumulative }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Site {
        let total = *self.cumulative.last().expect("a normalized law has an atom");
        let u = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.sites.len() - 1);
        self.sites[i]
    }
}

struct StepSampler {
    steps: Vec<i64>,
    cumulative: Vec<f64>,
}

impl StepSampler {
    fn new(step: &StepLaw) -> Self {
        let mut acc = 0.0;
        let (steps, cumulative) = step
            .atoms()
            .map(|(d, p)| {
                acc += p;
                (d, acc)
            })
            .unzip();
        Self { steps, cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> i64 {
        let u = rng.gen::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.steps.len() - 1);
        self.steps[i]
    }
}

fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_path(
    m: u32,
    samplers: &[SiteSampler],
    steps: &StepSampler,
    horizon: u64,
    rng: &mut ChaCha8Rng,
    mut visit: impl FnMut(Site),
) {
    let mut x = samplers[0].sample(rng);
    visit(x);
    for friends in &samplers[..horizon as usize] {
        if x.is_finite() && (0..m).all(|_| friends.sample(rng) == x) {
            x = x.shifted(steps.sample(rng));
        }
        visit(x);
    }
}

/// One path `x_0, …, x_horizon`, using the stream `index` of `cfg.seed`.
/// `marginals[k]` must be the law of `X_k`.
pub fn sample_trajectory(cfg: &TrajectoryConfig, marginals: &[LatticeDist], index: u64) -> Result<Vec<Site>> {
    let m = cfg.validate()?;
    check_marginals(cfg, marginals)?;
    let samplers: Vec<SiteSampler> = marginals.iter().map(SiteSampler::new).collect();
    let steps = StepSampler::new(&cfg.step);
    let mut path = Vec::with_capacity(cfg.horizon as usize + 1);
    run_path(m, &samplers, &steps, cfg.horizon, &mut trajectory_rng(cfg.seed, index), |x| path.push(x));
    Ok(path)
}

fn check_marginals(cfg: &TrajectoryConfig, marginals: &[LatticeDist]) -> Result<()> {
    if marginals.len() as u64 != cfg.horizon + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} marginals for horizon {}, got {}",
            cfg.horizon + 1,
            cfg.horizon,
            marginals.len()
        )));
    }
    Ok(())
}

/// Endpoints of `cfg.n_trajectories` independent paths, tabulated.
pub fn sample_ensemble(cfg: &TrajectoryConfig) -> Result<LatticeDist> {
    let m = cfg.validate()?;
    let marginals = cfg.marginals()?;
    let samplers: Vec<SiteSampler> = marginals.iter().map(SiteSampler::new).collect();
    let steps = StepSampler::new(&cfg.step);
    let counts = (0..cfg.n_trajectories)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Site, u64>, i| {
            let mut end = Site::NegInf;
            run_path(m, &samplers, &steps, cfg.horizon, &mut trajectory_rng(cfg.seed, i), |x| end = x);
            *acc.entry(end).or_default() += 1;
            acc
        })
        .reduce(BTreeMap::new, merge_counts);
    empirical(&counts, cfg.n_trajectories)
}

/// Mean-field approximation: `n_particles` walkers, each comparing its site
/// with `m` other walkers drawn uniformly with replacement from the current
/// configuration. This is not the cooperative-motion law; it approaches it
/// only as the particle count grows.
pub fn sample_particle_system(cfg: &TrajectoryConfig, n_particles: usize) -> Result<LatticeDist> {
    let m = cfg.params.require_integer_m()?;
    if n_particles < m as usize + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least m + 1 = {} particles, got {n_particles}",
            m + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = SiteSampler::new(&cfg.init);
    let steps = StepSampler::new(&cfg.step);
    let mut x: Vec<Site> = (0..n_particles).map(|_| init.sample(&mut rng)).collect();
    let mut next = x.clone();
    for _ in 0..cfg.horizon {
        for i in 0..n_particles {
            next[i] = x[i];
            if !x[i].is_finite() {
                continue;
            }
            let all_match = (0..m).all(|_| {
                // Uniform over the other particles.
                let mut j = rng.gen_range(0..n_particles - 1);
                if j >= i {
                    j += 1;
                }
                x[j] == x[i]
            });
            if all_match {
                next[i] = x[i].shifted(steps.sample(&mut rng));
            }
        }
        std::mem::swap(&mut x, &mut next);
    }
    let mut counts = BTreeMap::new();
    for s in x {
        *counts.entry(s).or_default() += 1;
    }
    empirical(&counts, n_particles as u64)
}

fn merge_counts(mut a: BTreeMap<Site, u64>, b: BTreeMap<Site, u64>) -> BTreeMap<Site, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

fn empirical(counts: &BTreeMap<Site, u64>, n: u64) -> Result<LatticeDist> {
    let pairs: Vec<(Site, f64)> = counts.iter().map(|(&s, &c)| (s, c as f64 / n as f64)).collect();
    LatticeDist::from_sites(&pairs)
}

/// Dvoretzky–Kiefer–Wolfowitz radius `sqrt(ln(2/α) / (2n))`.
pub fn dkw_bound(n: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// `sup_k |F(k) − G(k)|` over every site where either CDF changes.
pub fn cdf_sup_distance(a: &LatticeDist, b: &LatticeDist) -> f64 {
    let fa = a.cdf_seq();
    let fb = b.cdf_seq();
    let lo = fa.start().min(fb.start()) - 1;
    let hi = fa.end().max(fb.end()) + 1;
    (lo..=hi).map(|k| (fa.at(k) - fb.at(k)).abs()).fold(0.0, f64::max)
}
