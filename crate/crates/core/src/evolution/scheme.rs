//! One-step operators of the cooperative-motion evolution.
//!
//! The CDF kernels act on [`CdfSeq`] values and implement the upwind
//! Hamilton–Jacobi scheme `F'(k) = F(k) − q |F(k) − F(k−1)|^(m+1)` and its
//! general-step analogue. The PMF kernels act on [`LatticeDist`] and are the
//! conservative (differenced) form of the same updates; extended atoms at
//! ±∞ are left untouched.

use serde::{Deserialize, Serialize};

use crate::dist::{CdfSeq, LatticeDist, ModelParams, MASS_TOLERANCE};
use crate::error::{Error, Result};

use super::step_law::StepLaw;

/// Decreases smaller than this in a stepped CDF are treated as round-off.
pub const MONOTONE_SLACK: f64 = 1e-14;

/// Where a stepped CDF stopped being non-decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfDecrease {
    /// Site `k` with `F'(k) < F'(k−1)`.
    pub site: i64,
    /// `F'(k−1) − F'(k)`, the largest such drop.
    pub drop: f64,
}

/// Output of a CDF step, with its monotonicity diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeStep {
    pub cdf: CdfSeq,
    pub violation: Option<CdfDecrease>,
}

impl SchemeStep {
    fn new(cdf: CdfSeq) -> Self {
        let violation = cdf
            .values()
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, w[0] - w[1]))
            .filter(|&(_, drop)| drop > MONOTONE_SLACK)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, drop)| CdfDecrease { site: cdf.start() + i as i64 + 1, drop });
        Self { cdf, violation }
    }
}

/// Space and time mesh of the rescaled scheme, tied by `dt = dx^(m+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeMesh {
    dx: f64,
    dt: f64,
}

impl SchemeMesh {
    pub fn new(dx: f64, dt: f64, params: &ModelParams) -> Result<Self> {
        if !(dx > 0.0 && dt > 0.0 && dx.is_finite() && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("mesh sizes must be positive, got dx={dx}, dt={dt}")));
        }
        let expected = dx.powf(params.m() + 1.0);
        if ((dt - expected) / expected).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} does not match dx^(m+1) = {expected}"
            )));
        }
        Ok(Self { dx, dt })
    }

    /// The mesh for horizon `n`: `dx = n^(−1/(m+1))`, `dt = 1/n`.
    pub fn for_horizon(n: u64, params: &ModelParams) -> Self {
        let n = n as f64;
        Self { dx: 1.0 / params.scale(n), dt: 1.0 / n }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The scheme written with explicit mesh sizes,
    /// `F'(k) = F(k) − q dt |(F(k) − F(k−1)) / dx|^(m+1)`.
    pub fn step(&self, cdf: &CdfSeq, params: &ModelParams) -> Result<SchemeStep> {
        cdf.check_monotone()?;
        let start = cdf.start();
        let values = (start..=cdf.end() + 1)
            .map(|k| {
                let slope = (cdf.at(k) - cdf.at(k - 1)) / self.dx;
                cdf.at(k) - params.q() * self.dt * params.power(slope)
            })
            .collect();
        Ok(SchemeStep::new(CdfSeq::from_raw(start, values)))
    }
}

/// One Bernoulli step on CDF values: `F'(k) = F(k) − q (F(k) − F(k−1))^(m+1)`.
pub fn step_cdf(cdf: &CdfSeq, params: &ModelParams) -> Result<SchemeStep> {
    cdf.check_monotone()?;
    let q = params.q();
    let start = cdf.start();
    let values = (start..=cdf.end() + 1)
        .map(|k| {
            let f = cdf.at(k);
            f - q * params.power(f - cdf.at(k - 1))
        })
        .collect();
    Ok(SchemeStep::new(CdfSeq::from_raw(start, values)))
}

/// One step with a general bounded step law, on CDF values:
///
/// `F'(k) = F(k) − Σ_{j=k−s}^{k−1} ΔF(j)^(m+1) P(D ≥ k−j) + Σ_{j=k}^{k+ℓ−1} ΔF(j)^(m+1) P(D < k−j)`
///
/// with `ΔF(j) = F(j+1) − F(j)`. The move probabilities come from `step`;
/// only `m` is read from `params`.
pub fn step_general(cdf: &CdfSeq, step: &StepLaw, params: &ModelParams) -> Result<SchemeStep> {
    cdf.check_monotone()?;
    let s = step.right_reach() as i64;
    let l = step.left_reach() as i64;
    let ge: Vec<f64> = (1..=s).map(|d| step.prob_ge(d)).collect();
    let lt: Vec<f64> = (0..l).map(|d| step.prob_lt(-d)).collect();
    let inc = |j: i64| cdf.at(j + 1) - cdf.at(j);

    let start = cdf.start() - l;
    let values = (start..=cdf.end() + s)
        .map(|k| {
            let mut outflow = 0.0;
            for j in (k - s)..k {
                let p = ge[(k - j - 1) as usize];
                if p > 0.0 {
                    outflow += params.power(inc(j)) * p;
                }
            }
            let mut inflow = 0.0;
            for j in k..(k + l) {
                let p = lt[(j - k) as usize];
                if p > 0.0 {
                    inflow += params.power(inc(j)) * p;
                }
            }
            cdf.at(k) - outflow + inflow
        })
        .collect();
    Ok(SchemeStep::new(CdfSeq::from_raw(start, values)))
}

/// One Bernoulli step on the mass function:
/// `p'(k) = p(k) − q (p(k)^(m+1) − p(k−1)^(m+1))`.
pub fn step_pmf(d: &LatticeDist, params: &ModelParams) -> LatticeDist {
    let p = d.masses();
    let q = params.q();
    let mut out = Vec::with_capacity(p.len() + 1);
    let mut prev_pow = 0.0;
    for &pk in p {
        let pow = params.power(pk);
        out.push(pk - q * (pow - prev_pow));
        prev_pow = pow;
    }
    if !p.is_empty() {
        out.push(q * prev_pow);
    }
    LatticeDist::from_parts(d.offset(), out, d.mass_neg_inf(), d.mass_pos_inf())
}

/// One step with a general step law on the mass function.
pub fn step_law_pmf(d: &LatticeDist, step: &StepLaw, params: &ModelParams) -> LatticeDist {
    let p = d.masses();
    if p.is_empty() {
        return d.clone();
    }
    let l = step.left_reach();
    let s = step.right_reach();
    let mut out = vec![0.0; p.len() + l + s];
    let stay = step.prob(0);
    for (i, &pk) in p.iter().enumerate() {
        let pow = params.power(pk);
        // Index of site `offset + i` in the widened window.
        let base = i + l;
        out[base] += pk - pow * (1.0 - stay);
        for (dstep, prob) in step.atoms().filter(|&(x, _)| x != 0) {
            out[(base as i64 + dstep) as usize] += prob * pow;
        }
    }
    LatticeDist::from_parts(d.offset() - l as i64, out, d.mass_neg_inf(), d.mass_pos_inf())
}

/// `P(Binomial(m, p) >= l)` by direct summation.
pub fn binomial_tail(m: u32, l: u32, p: f64) -> f64 {
    let mut coeff = 1.0;
    let mut total = 0.0;
    for j in 0..=m {
        if j > 0 {
            coeff = coeff * (m - j + 1) as f64 / j as f64;
        }
        if j >= l {
            total += coeff * p.powi(j as i32) * (1.0 - p).powi((m - j) as i32);
        }
    }
    total
}

/// One Bernoulli step of the variant that moves when at least `l` of the `m`
/// friends agree: `p'(k) = p(k) − q p(k) T(p(k)) + q p(k−1) T(p(k−1))` with
/// `T(p) = P(Binomial(m, p) >= l)`.
pub fn step_l_of_m(d: &LatticeDist, params: &ModelParams, l: u32) -> Result<LatticeDist> {
    let m = params.require_integer_m()?;
    if l == 0 || l > m {
        return Err(Error::InvalidArgument(format!("need 1 <= l <= m, got l={l}, m={m}")));
    }
    if l == m {
        return Ok(step_pmf(d, params));
    }
    let q = params.q();
    let p = d.masses();
    let mut out = Vec::with_capacity(p.len() + 1);
    let mut prev_flux = 0.0;
    for &pk in p {
        let flux = q * pk * binomial_tail(m, l, pk);
        out.push(pk - flux + prev_flux);
        prev_flux = flux;
    }
    if !p.is_empty() {
        out.push(prev_flux);
    }
    Ok(LatticeDist::from_parts(d.offset(), out, d.mass_neg_inf(), d.mass_pos_inf()))
}

/// `n` steps of the evolution driven by `step`.
///
/// A unit Bernoulli law dispatches to [`step_pmf`] with the law's own `q`;
/// any other law uses [`step_law_pmf`]. Conservation of mass is verified at the end.
pub fn evolve(d: &LatticeDist, step: &StepLaw, params: &ModelParams, n: u64) -> Result<LatticeDist> {
    let stepper = Stepper::new(step, params)?;
    let mut cur = d.clone();
    for _ in 0..n {
        cur = stepper.apply(&cur);
    }
    check_drift(d, &cur, n)?;
    Ok(cur)
}

/// [`evolve`] that also returns every intermediate law, `out[k]` being the law at time `k`.
pub fn evolve_path(d: &LatticeDist, step: &StepLaw, params: &ModelParams, n: u64) -> Result<Vec<LatticeDist>> {
    let stepper = Stepper::new(step, params)?;
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(d.clone());
    for k in 0..n as usize {
        let next = stepper.apply(&out[k]);
        out.push(next);
    }
    check_drift(d, &out[n as usize], n)?;
    Ok(out)
}

enum Stepper<'a> {
    Bernoulli(ModelParams),
    General(&'a StepLaw, &'a ModelParams),
}

impl<'a> Stepper<'a> {
    fn new(step: &'a StepLaw, params: &'a ModelParams) -> Result<Self> {
        Ok(match step.unit_bernoulli_q() {
            Some(q) if q > 0.0 && q < 1.0 => Stepper::Bernoulli(ModelParams::new(params.m(), q)?),
            _ => Stepper::General(step, params),
        })
    }

    fn apply(&self, d: &LatticeDist) -> LatticeDist {
        match self {
            Stepper::Bernoulli(p) => step_pmf(d, p),
            Stepper::General(step, p) => step_law_pmf(d, step, p),
        }
    }
}

/// `n` steps of the `l`-of-`m` variant.
pub fn evolve_l_of_m(d: &LatticeDist, params: &ModelParams, l: u32, n: u64) -> Result<LatticeDist> {
    let mut cur = d.clone();
    for _ in 0..n {
        cur = step_l_of_m(&cur, params, l)?;
    }
    check_drift(d, &cur, n)?;
    Ok(cur)
}

/// Rounding budget per step for the end-of-run conservation check; each step
/// conserves mass only up to the round-off of its telescoping sum.
const STEP_ROUNDING: f64 = 1e-15;

fn check_drift(before: &LatticeDist, after: &LatticeDist, steps: u64) -> Result<()> {
    let total = after.total_mass();
    let tolerance = MASS_TOLERANCE + STEP_ROUNDING * steps as f64;
    if (total - before.total_mass()).abs() > tolerance {
        return Err(Error::NotNormalized { total, tolerance });
    }
    Ok(())
}
