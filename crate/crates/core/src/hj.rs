//! Reference solutions of `u_t + q |u_x|^(m+1) = 0`: Legendre transform,
//! Hopf–Lax formula, the explicit step solutions `u^{a,b}` and the limit laws
//! built from them.

use serde::{Deserialize, Serialize};

use crate::dist::ModelParams;
use crate::error::{Error, Result};

/// `m / (q^(1/m) (m+1)^((m+1)/m))`, the coefficient of the middle branch.
pub fn branch_coefficient(params: &ModelParams) -> f64 {
    let m = params.m();
    m / (params.q().powf(1.0 / m) * (m + 1.0).powf((m + 1.0) / m))
}

/// `H*(p) = q^(−1/m) |p|^((m+1)/m) m / (m+1)^((m+1)/m)`.
pub fn legendre_closed(p: f64, params: &ModelParams) -> f64 {
    let m = params.m();
    branch_coefficient(params) * p.abs().powf((m + 1.0) / m)
}

/// Grid maximum of `α p − q |α|^(m+1)` over `α ∈ [−W, W]`.
pub fn legendre_numeric(p: f64, params: &ModelParams, half_width: f64, points: usize) -> Result<f64> {
    if points < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 grid points, got {points}")));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid half-width must be positive, got {half_width}")));
    }
    let h = 2.0 * half_width / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let a = -half_width + h * i as f64;
            a * p - params.q() * params.power(a)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Slope `p` with `H*(p) = 1 / t`: minimisers of the Hopf–Lax formula for
/// data with oscillation at most 1 satisfy `|x − y| <= t p`.
fn slope_scale(t: f64, params: &ModelParams) -> f64 {
    let m = params.m();
    (1.0 / (t * branch_coefficient(params))).powf(m / (m + 1.0)).max(1.0)
}

/// `[x − 5 t p, x + 5 t p]` with `p` the slope scale for data in `[0, 1]`.
pub fn default_y_window(x: f64, t: f64, params: &ModelParams) -> (f64, f64) {
    let r = 5.0 * t * slope_scale(t, params);
    (x - r, x + r)
}

const MAX_DOUBLINGS: u32 = 3;
const GOLDEN_ITERS: usize = 80;

/// `inf_y { u0(y) + t H*((x − y)/t) }` by a uniform grid over `window`
/// followed by golden-section refinement around the grid minimiser. When
/// the minimiser sits on the window edge the window is doubled about its
/// centre, at most three times.
pub fn hopf_lax_numeric<F>(u0: F, x: f64, t: f64, params: &ModelParams, window: (f64, f64), points: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidArgument(format!("Hopf-Lax evaluation needs t > 0, got {t}")));
    }
    if points < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 grid points, got {points}")));
    }
    let (mut lo, mut hi) = window;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    let cost = |y: f64| u0(y) + t * legendre_closed((x - y) / t, params);

    for _ in 0..=MAX_DOUBLINGS {
        let h = (hi - lo) / (points - 1) as f64;
        let (best, best_val) = (0..points)
            .map(|i| (i, cost(lo + h * i as f64)))
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        if best == 0 || best == points - 1 {
            let (c, r) = ((lo + hi) / 2.0, hi - lo);
            lo = c - r;
            hi = c + r;
            continue;
        }
        let y = lo + h * best as f64;
        let refined = golden_min(&cost, y - h, y + h);
        return Ok(best_val.min(refined));
    }
    Err(Error::HopfLaxWindow { lo, hi, doublings: MAX_DOUBLINGS })
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd);
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

/// Continuous piecewise-linear function through `knots`, constant beyond the
/// first and last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidArgument("piecewise-linear function needs a knot".into()));
        }
        if knots.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidArgument("knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("knot abscissae must be strictly increasing".into()));
        }
        Ok(Self { knots })
    }

    /// Ramp from 0 at `x = 0` to 1 at `x = 1 / slope`.
    pub fn ramp(slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(Error::InvalidArgument(format!("ramp slope must be positive, got {slope}")));
        }
        Self::new(vec![(0.0, 0.0), (1.0 / slope, 1.0)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Largest absolute slope.
    pub fn lipschitz(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 {
            return k[0].1;
        }
        if x >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|&(kx, _)| kx <= x) - 1;
        let (x0, v0) = k[i];
        let (x1, v1) = k[i + 1];
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Exact Hopf–Lax value. On a piece of slope `s` the cost is convex and
    /// its stationary point is `y = x − t H'(s)` with `H'(s) = q (m+1) |s|^m sgn s`;
    /// clamping that to each piece and taking the best piece gives the infimum.
    pub fn hopf_lax(&self, x: f64, t: f64, params: &ModelParams) -> f64 {
        if t <= 0.0 {
            return self.eval(x);
        }
        let cost = |y: f64| self.eval(y) + t * legendre_closed((x - y) / t, params);
        let k = &self.knots;
        // Outer constant pieces: stationary point is y = x.
        let mut best = cost(x.min(k[0].0)).min(cost(x.max(k[k.len() - 1].0)));
        for w in k.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let h_prime = params.q() * (params.m() + 1.0) * s.abs().powf(params.m()) * s.signum();
            let y = (x - t * h_prime).clamp(w[0].0, w[1].0);
            best = best.min(cost(y));
        }
        best
    }
}

/// The explicit solution `u^{a,b}` started from `a 1{x <= 0} + b 1{x > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSolution {
    a: f64,
    b: f64,
    params: ModelParams,
}

impl PiecewiseSolution {
    pub fn new(a: f64, b: f64, params: ModelParams) -> Result<Self> {
        if !((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)) {
            return Err(Error::InvalidArgument(format!("levels must lie in [0, 1], got a = {a}, b = {b}")));
        }
        if a >= b {
            return Err(Error::InvalidArgument(format!("need a < b, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b, params })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Smallest `x` at which the solution reaches `b` at time `t`.
    pub fn right_edge(&self, t: f64) -> f64 {
        let m = self.params.m();
        ((self.b - self.a) / branch_coefficient(&self.params)).powf(m / (m + 1.0)) * t.powf(1.0 / (m + 1.0))
    }

    /// Value at `(x, t)`; `t = 0` gives the initial step.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return if x <= 0.0 { self.a } else { self.b };
        }
        if x <= 0.0 {
            return self.a;
        }
        if x >= self.right_edge(t) {
            return self.b;
        }
        let m = self.params.m();
        let v = self.a + branch_coefficient(&self.params) * (x.powf(m + 1.0) / t).powf(1.0 / m);
        v.min(self.b)
    }
}

pub fn u_ab_closed(x: f64, t: f64, a: f64, b: f64, params: &ModelParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    Ok(PiecewiseSolution::new(a, b, *params)?.eval(x, t))
}

/// `u^{0,1}(x, 1)`: CDF of `(m+1)(q/m^m)^(1/(m+1)) B` with `B ~ Beta((m+1)/m, 1)`.
pub fn beta_limit_cdf(x: f64, params: &ModelParams) -> f64 {
    PiecewiseSolution { a: 0.0, b: 1.0, params: *params }.eval(x, 1.0)
}

/// `F^{a,b}(x) = u^{a,b}(x, 1)`.
pub fn extended_limit_cdf(x: f64, a: f64, b: f64, params: &ModelParams) -> Result<f64> {
    u_ab_closed(x, 1.0, a, b, params)
}

/// Limit CDF on the lattice `gℤ`, for `X_n / (g n^(1/(m+1)))` when `X_0 ≡ r`
/// (mod `g`) with probability `pi[r − 1]`.
///
/// Given residue `r` the walk is a cooperative motion on its own class
/// carrying mass `π_r`, so its conditional limit is `F^{0,π_r} / π_r`;
/// summing over classes gives `Σ_r min(c x^((m+1)/m), π_r)`.
pub fn mixture_limit_cdf(x: f64, g: usize, pi: &[f64], params: &ModelParams) -> Result<f64> {
    check_residue_weights(g, pi)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let m = params.m();
    let head = branch_coefficient(params) * x.powf((m + 1.0) / m);
    Ok(pi.iter().map(|&p| head.min(p)).sum::<f64>().min(1.0))
}

pub(crate) fn check_residue_weights(g: usize, pi: &[f64]) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidArgument("lattice spacing g must be >= 1".into()));
    }
    if pi.len() != g {
        return Err(Error::InvalidArgument(format!("expected {g} residue weights, got {}", pi.len())));
    }
    if pi.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidArgument("residue weights must lie in [0, 1]".into()));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("residue weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Shift `S(ε)` for which `u^{ε,1}(x − S(ε), ε)` and `u^{0,1−ε}(x, ε)` sandwich
/// a `p*`-bounded initial CDF:
/// `S(ε) = (1−ε)^(m/(m+1)) (m+1) q^(1/(m+1)) m^(−m/(m+1)) ε^(1/(m+1))`.
pub fn sandwich_radius(eps: f64, params: &ModelParams) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let m = params.m();
    let e = 1.0 / (m + 1.0);
    Ok((1.0 - eps).powf(m * e) * (m + 1.0) * params.q().powf(e) * m.powf(-m * e) * eps.powf(e))
}
