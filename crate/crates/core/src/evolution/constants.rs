//! Analytic constants governing monotonicity and relaxation of the scheme.

use serde::{Deserialize, Serialize};

use crate::dist::ModelParams;

use super::step_law::StepLaw;

/// Threshold `p* = (1 / (q (m+1)))^(1/m)` on single-site mass below which
/// the Bernoulli evolution preserves stochastic order.
pub fn p_star(params: &ModelParams) -> f64 {
    (1.0 / (params.q() * (params.m() + 1.0))).powf(1.0 / params.m())
}

/// `f(p) = p − q p^(m+1)`: the mass left at a site after one step when its
/// left neighbour is empty. Increasing on `[0, p*]`, decreasing after.
pub fn f_map(p: f64, params: &ModelParams) -> f64 {
    p - params.q() * params.power(p)
}

/// `g(a, b) = f(a) − f(b)`.
pub fn g_func(a: f64, b: f64, params: &ModelParams) -> f64 {
    f_map(a, params) - f_map(b, params)
}

/// Constants of the relaxation bound: after `n1` steps every law on ℤ has
/// all atoms at most `p*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationBound {
    pub p_star: f64,
    /// `p* − 1/2`
    pub c1: f64,
    /// `q ((p*)^(m+1) − (1/2)^(m+1))`
    pub c2: f64,
    /// `min(g(p*, 1 − p*), 1 − q)`
    pub c3: f64,
    /// `min(c1, c2, c3)`: guaranteed per-step decrease of the largest atom while it exceeds `p*`.
    pub c: f64,
    /// `⌈(1 − p*) / c⌉`, or 0 when `p* >= 1`.
    pub n1: u64,
}

/// Ceilings within this distance of an integer snap to it; the constants are
/// rational for rational `(m, q)` and round-off must not add a step.
const CEIL_SNAP: f64 = 1e-9;

pub fn relaxation_bound(params: &ModelParams) -> RelaxationBound {
    let ps = p_star(params);
    let q = params.q();
    let c1 = ps - 0.5;
    let c2 = q * (params.power(ps) - params.power(0.5));
    let c3 = g_func(ps, 1.0 - ps, params).min(1.0 - q);
    let c = c1.min(c2).min(c3);
    let n1 = if ps >= 1.0 { 0 } else { ((1.0 - ps) / c - CEIL_SNAP).ceil().max(0.0) as u64 };
    RelaxationBound { p_star: ps, c1, c2, c3, c, n1 }
}

/// Largest `Λ` such that the one-step CDF map is non-decreasing in every
/// argument whenever all increments lie in `[0, Λ]`, or `None` when no such
/// `Λ > 0` exists.
///
/// For laws supported in `{−1, 0, 1}` the partial derivatives are
/// `(m+1) x^m P(D ≥ 1)`, `(m+1) y^m P(D ≤ −1)` (both non-negative) and
/// `1 − (m+1)(x^m P(D ≥ 1) + y^m P(D ≤ −1))`, so the region is
/// `Λ = (1 / ((m+1)(P(D ≥ 1) + P(D ≤ −1))))^(1/m)`, which is `p*` in the
/// Bernoulli case. Any atom with `|d| > 1` makes `∂G/∂f(k−1)` (or its mirror)
/// negative on a flat stretch next to a rise, for every `Λ`.
pub fn monotone_region_bound(step: &StepLaw, params: &ModelParams) -> Option<f64> {
    if step.has_long_jumps() {
        return None;
    }
    let moving = step.prob(1) + step.prob(-1);
    if moving <= 0.0 {
        return Some(f64::INFINITY);
    }
    Some((1.0 / (moving * (params.m() + 1.0))).powf(1.0 / params.m()))
}

/// Smallest horizon `N0 = ([q(m+1)]^(1/m) (K+1))^(m+1)` for which the
/// rescaled scheme is monotone on `[0, K+1]`.
pub fn lipschitz_threshold(params: &ModelParams, lipschitz: f64) -> f64 {
    let m = params.m();
    ((params.q() * (m + 1.0)).powf(1.0 / m) * (lipschitz + 1.0)).powf(m + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: f64, q: f64) -> ModelParams {
        ModelParams::new(m, q).unwrap()
    }

    #[test]
    fn p_star_examples() {
        assert!((p_star(&params(1.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((p_star(&params(2.0, 0.5)) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((p_star(&params(1.0, 0.25)) - 2.0).abs() < 1e-15);
        for m in [1.0, 1.5, 2.0, 3.0, 7.0] {
            for q in [0.01, 0.5, 0.99] {
                assert!(p_star(&params(m, q)) > 0.5);
            }
        }
    }

    #[test]
    fn f_map_examples_and_maximum() {
        let p1 = params(1.0, 0.5);
        assert_eq!(f_map(0.0, &p1), 0.0);
        assert_eq!(f_map(1.0, &p1), 0.5);

        let p2 = params(2.0, 0.5);
        let ps = p_star(&p2);
        let at_max = f_map(ps, &p2);
        // (2/3)^(1/2) · (1 − 0.5 · 2/3) = (2/3)^(3/2)
        assert!((at_max - (2.0f64 / 3.0).powf(1.5)).abs() < 1e-15);
        assert!((at_max - 0.544331).abs() < 1e-6);
        // Grid-search oracle for the maximiser.
        let grid_max = (0..=100_000).map(|i| f_map(i as f64 / 100_000.0, &p2)).fold(f64::MIN, f64::max);
        assert!(grid_max <= at_max + 1e-15);
        assert!(at_max - grid_max < 1e-9);
    }

    #[test]
    fn g_examples() {
        let p1 = params(1.0, 0.5);
        assert_eq!(g_func(0.3, 0.3, &p1), 0.0);
        assert_eq!(g_func(1.0, 0.0, &p1), 0.5);
        let p2 = params(2.0, 0.5);
        let ps = p_star(&p2);
        assert!((g_func(ps, 1.0 - ps, &p2) - 0.363920).abs() < 1e-5);
    }

    #[test]
    fn relaxation_examples() {
        let r = relaxation_bound(&params(1.0, 0.5));
        assert_eq!(r.n1, 0);

        let r = relaxation_bound(&params(2.0, 0.5));
        let ps = (2.0f64 / 3.0).sqrt();
        assert!((r.c1 - (ps - 0.5)).abs() < 1e-15);
        // 0.5 · ((2/3)^(3/2) − 1/8)
        assert!((r.c2 - 0.5 * ((2.0f64 / 3.0).powf(1.5) - 0.125)).abs() < 1e-15);
        assert!((r.c2 - 0.2096655).abs() < 1e-6);
        assert!((r.c3 - 0.363920).abs() < 1e-5);
        assert_eq!(r.c, r.c2);
        assert_eq!(r.n1, 1);

        // m = 1, q = 0.9: p* = 5/9, c3 = g(5/9, 4/9) = 1/90, (1 − p*)/c = 40.
        let r = relaxation_bound(&params(1.0, 0.9));
        assert!((r.p_star - 5.0 / 9.0).abs() < 1e-15);
        assert!((r.c1 - 1.0 / 18.0).abs() < 1e-15);
        assert!((r.c2 - 0.9 * (25.0 / 81.0 - 0.25)).abs() < 1e-15);
        assert!((r.c3 - 1.0 / 90.0).abs() < 1e-15);
        assert_eq!(r.n1, 40);
    }

    #[test]
    fn monotone_region_examples() {
        let p1 = params(1.0, 0.5);
        assert_eq!(monotone_region_bound(&StepLaw::bernoulli(0.5).unwrap(), &p1), Some(1.0));
        let long = StepLaw::parse_spec("0:0.5,2:0.5").unwrap();
        assert_eq!(monotone_region_bound(&long, &p1), None);
        let shifted = StepLaw::parse_spec("1:0.5,2:0.5").unwrap();
        assert_eq!(monotone_region_bound(&shifted, &p1), None);
        let p2 = params(2.0, 0.3);
        let b = StepLaw::bernoulli(0.3).unwrap();
        assert_eq!(monotone_region_bound(&b, &p2), Some(p_star(&p2)));
    }

    /// Numerical partial derivatives of the three-point map on a grid of
    /// increments: the closed-form bound must separate monotone from
    /// non-monotone configurations.
    #[test]
    fn two_sided_region_matches_derivative_oracle() {
        let law = StepLaw::parse_spec("-1:0.5,0:0.3,1:0.2").unwrap();
        for m in [1.0, 2.0, 3.0] {
            let p = params(m, 0.5);
            let lam = monotone_region_bound(&law, &p).unwrap();
            let expected = (1.0 / (0.7 * (m + 1.0))).powf(1.0 / m);
            assert!((lam - expected).abs() < 1e-15);

            // G(f_{k+1}, f_k, f_{k-1}) with increments x = f_k − f_{k−1}, y = f_{k+1} − f_k.
            let g = |fp: f64, f: f64, fm: f64| {
                f - p.power(f - fm) * law.prob_ge(1) + p.power(fp - f) * law.prob_lt(0)
            };
            // ∂G/∂f_k by a one-sided difference at f_{k−1} = −x, f_k = 0, f_{k+1} = y.
            let d_center = |x: f64, y: f64| {
                let h = 1e-7;
                (g(y, h, -x) - g(y, 0.0, -x)) / h
            };
            let min_inside = (0..=50)
                .flat_map(|i| (0..=50).map(move |j| (i, j)))
                .map(|(i, j)| d_center(lam * i as f64 / 50.0, lam * j as f64 / 50.0))
                .fold(f64::MAX, f64::min);
            assert!(min_inside > -1e-5, "m={m}: {min_inside}");
            let beyond = 1.05 * lam;
            assert!(d_center(beyond, beyond) < 0.0);
        }
    }

    #[test]
    fn lipschitz_threshold_values() {
        // ([0.5 · 2]^1 · 2)^2 = 4
        assert!((lipschitz_threshold(&params(1.0, 0.5), 1.0) - 4.0).abs() < 1e-12);
        assert_eq!(lipschitz_threshold(&params(1.0, 0.5), 0.0), 1.0);
    }
}
