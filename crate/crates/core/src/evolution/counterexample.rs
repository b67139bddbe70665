//! Search for stochastically ordered pairs whose one-step images are not ordered.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{CdfSeq, LatticeDist, ModelParams};
use crate::error::{Error, Result};

use super::constants::monotone_region_bound;
use super::scheme::step_general;
use super::step_law::StepLaw;

/// Image gaps below this are treated as round-off.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Window length of the random pairs.
const RANDOM_WINDOW: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationOrigin {
    /// Flat CDF stretch followed by a rise, used when `P(D >= 2) > 0`.
    Construction,
    /// The reflected construction, used when `P(D <= -2) > 0`.
    MirrorConstruction,
    RandomSearch { trial: u64 },
}

/// `dominant` is stochastically larger than `dominated` (its CDF is
/// pointwise smaller), yet after one step its CDF exceeds the other's at `site`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub dominant: LatticeDist,
    pub dominated: LatticeDist,
    pub site: i64,
    pub dominant_image: f64,
    pub dominated_image: f64,
    pub origin: ViolationOrigin,
}

/// Look for an ordered pair whose images under one step of `step` are not
/// ordered. The analytic constructions are tried first, then `trials` random
/// pairs. Random pairs respect the monotone region when one exists, so for
/// unit steps a `None` confirms order preservation on that region.
pub fn find_monotonicity_violation(
    step: &StepLaw,
    params: &ModelParams,
    trials: u64,
    seed: u64,
) -> Result<Option<OrderingViolation>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if step.prob_ge(2) > 0.0 {
        if let Some(v) = try_constructions(step, params, false)? {
            return Ok(Some(v));
        }
    }
    if step.prob_lt(-1) > 0.0 {
        if let Some(v) = try_constructions(step, params, true)? {
            return Ok(Some(v));
        }
    }

    let cap = monotone_region_bound(step, params).unwrap_or(f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let a = random_pmf(&mut rng, cap);
        let b = random_pmf(&mut rng, cap);
        let (hi, lo) = envelope_pair(&a, &b);
        let dominant = LatticeDist::from_cdf_seq(&CdfSeq::new(0, lo)?)?;
        let dominated = LatticeDist::from_cdf_seq(&CdfSeq::new(0, hi)?)?;
        if let Some(v) = compare(step, params, dominant, dominated, None, ViolationOrigin::RandomSearch { trial })? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn try_constructions(step: &StepLaw, params: &ModelParams, mirror: bool) -> Result<Option<OrderingViolation>> {
    for a in [0.1, 0.2, 0.05] {
        for b in [0.5, 0.3, 0.7] {
            let rest = 1.0 - a - b;
            let mut delta = b / 5.0;
            while delta > 1e-8 {
                let found = if mirror {
                    // Reflection of the forward pair through site 3/2; the roles swap.
                    let dominant = LatticeDist::from_pairs(&[(0, rest), (1, 0.0), (2, b), (3, a)])?;
                    let dominated = LatticeDist::from_pairs(&[(0, rest), (1, delta), (2, b - delta), (3, a)])?;
                    compare(step, params, dominant, dominated, Some(1), ViolationOrigin::MirrorConstruction)?
                } else {
                    let dominant = LatticeDist::from_pairs(&[(0, a), (1, b - delta), (2, delta), (3, rest)])?;
                    let dominated = LatticeDist::from_pairs(&[(0, a), (1, b), (2, 0.0), (3, rest)])?;
                    compare(step, params, dominant, dominated, Some(3), ViolationOrigin::Construction)?
                };
                if found.is_some() {
                    return Ok(found);
                }
                delta /= 4.0;
            }
        }
    }
    Ok(None)
}

/// Step both laws and report the site of the largest ordering violation,
/// restricted to `only_site` when given.
fn compare(
    step: &StepLaw,
    params: &ModelParams,
    dominant: LatticeDist,
    dominated: LatticeDist,
    only_site: Option<i64>,
    origin: ViolationOrigin,
) -> Result<Option<OrderingViolation>> {
    let up = step_general(&dominant.cdf_seq(), step, params)?.cdf;
    let down = step_general(&dominated.cdf_seq(), step, params)?.cdf;
    let sites: Vec<i64> = match only_site {
        Some(k) => vec![k],
        None => (up.start().min(down.start())..=up.end().max(down.end())).collect(),
    };
    let worst = sites
        .into_iter()
        .map(|k| (k, up.at(k), down.at(k)))
        .filter(|&(_, u, d)| u - d > VIOLATION_SLACK)
        .max_by(|x, y| (x.1 - x.2).total_cmp(&(y.1 - y.2)));
    Ok(worst.map(|(site, dominant_image, dominated_image)| OrderingViolation {
        dominant,
        dominated,
        site,
        dominant_image,
        dominated_image,
        origin,
    }))
}

/// Random pmf on `0..RANDOM_WINDOW` with every atom at most `cap`.
fn random_pmf(rng: &mut impl Rng, cap: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..RANDOM_WINDOW).map(|_| rng.gen::<f64>().powi(2)).collect();
    // An occasional zero gives flat CDF stretches.
    for x in w.iter_mut() {
        if rng.gen_bool(0.2) {
            *x = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / RANDOM_WINDOW as f64; RANDOM_WINDOW];
    }
    w.iter_mut().for_each(|x| *x /= total);
    let uniform = 1.0 / RANDOM_WINDOW as f64;
    let target = cap * (1.0 - 1e-9);
    let max = w.iter().copied().fold(0.0, f64::max);
    if max > target {
        let t = (max - target) / (max - uniform);
        w.iter_mut().for_each(|x| *x = (1.0 - t) * *x + t * uniform);
    }
    w
}

/// Pointwise max and min of the two CDFs, sampled on `0..=RANDOM_WINDOW`.
/// Both inherit the increment bound of their inputs.
fn envelope_pair(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let cdf = |p: &[f64]| {
        let mut acc = 0.0;
        let mut v = vec![0.0];
        for &x in p {
            acc += x;
            v.push(acc);
        }
        v
    };
    let (fa, fb) = (cdf(a), cdf(b));
    let hi = fa.iter().zip(&fb).map(|(x, y)| x.max(*y)).collect();
    let lo = fa.iter().zip(&fb).map(|(x, y)| x.min(*y)).collect();
    (hi, lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, q: f64) -> ModelParams {
        ModelParams::new(m, q).unwrap()
    }

    #[test]
    fn hand_computed_instance() {
        let law = StepLaw::parse_spec("0:0.5,2:0.5").unwrap();
        let p = params(1.0, 0.5);
        let v = find_monotonicity_violation(&law, &p, 1, 0).unwrap().unwrap();
        assert_eq!(v.origin, ViolationOrigin::Construction);
        assert_eq!(v.site, 3);
        assert!((v.dominant_image - 0.515).abs() < 1e-12);
        assert!((v.dominated_image - 0.475).abs() < 1e-12);
        assert!(v.dominant.dominates(&v.dominated));
        assert!((v.dominant.pmf(2) - 0.1).abs() < 1e-15);
        assert_eq!(v.dominated.pmf(2), 0.0);
    }

    #[test]
    fn mirror_construction_for_long_left_jumps() {
        for spec in ["-2:0.5,0:0.5", "-3:0.1,0:0.9", "-2:0.3,-1:0.3,0:0.4"] {
            let law = StepLaw::parse_spec(spec).unwrap();
            for m in [1.0, 2.0, 3.5] {
                let v = find_monotonicity_violation(&law, &params(m, 0.5), 1, 0).unwrap().unwrap();
                assert!(v.dominant.dominates(&v.dominated), "{spec}");
                assert!(v.dominant_image > v.dominated_image + VIOLATION_SLACK);
            }
        }
    }

    #[test]
    fn any_long_jump_law_yields_a_witness() {
        for spec in ["0:0.9,2:0.1", "0:0.5,3:0.5", "0:0.2,1:0.79,2:0.01", "-1:0.3,0:0.3,2:0.4", "1:0.5,2:0.5"] {
            let law = StepLaw::parse_spec(spec).unwrap();
            for m in [1.0, 2.0, 5.0] {
                let v = find_monotonicity_violation(&law, &params(m, 0.5), 1, 0).unwrap();
                let v = v.unwrap_or_else(|| panic!("{spec}, m={m}"));
                // Confirm independently on the images.
                let up = step_general(&v.dominant.cdf_seq(), &law, &params(m, 0.5)).unwrap().cdf;
                let down = step_general(&v.dominated.cdf_seq(), &law, &params(m, 0.5)).unwrap().cdf;
                assert!(up.at(v.site) > down.at(v.site));
            }
        }
    }

    #[test]
    fn bernoulli_has_no_violation_on_p_star_bounded_pairs() {
        for (m, q) in [(1.0, 0.5), (2.0, 0.5), (1.0, 0.9), (3.0, 0.7)] {
            let law = StepLaw::bernoulli(q).unwrap();
            assert!(find_monotonicity_violation(&law, &params(m, q), 2000, 7).unwrap().is_none());
        }
        let two_sided = StepLaw::parse_spec("-1:0.5,0:0.3,1:0.2").unwrap();
        assert!(find_monotonicity_violation(&two_sided, &params(2.0, 0.5), 2000, 3).unwrap().is_none());
    }

    #[test]
    fn random_pmfs_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = random_pmf(&mut rng, 0.5);
            assert!(p.iter().all(|&x| (0.0..0.5).contains(&x)));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        let law = StepLaw::bernoulli(0.5).unwrap();
        assert!(find_monotonicity_violation(&law, &params(1.0, 0.5), 0, 0).is_err());
    }
}
