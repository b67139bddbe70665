use serde::{Deserialize, Serialize};

use crate::dist::MASS_TOLERANCE;
use crate::error::{Error, Result};

/// Law of a bounded integer step `D` with support in `[-left_reach, right_reach]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLaw {
    /// Smallest representable displacement; always `<= 0`.
    min_step: i64,
    /// `probs[i] = P(D = min_step + i)`; the window always contains 0.
    probs: Vec<f64>,
}

impl StepLaw {
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidStepLaw("no atoms".into()));
        }
        for &(d, p) in pairs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidStepLaw(format!("P(D = {d}) = {p} is not a probability")));
            }
        }
        let lo = pairs.iter().map(|x| x.0).min().unwrap().min(0);
        let hi = pairs.iter().map(|x| x.0).max().unwrap().max(0);
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for &(d, p) in pairs {
            probs[(d - lo) as usize] += p;
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidStepLaw(format!("probabilities sum to {total}")));
        }
        // Shrink to the tightest window that still contains 0.
        let first = probs.iter().position(|&p| p > 0.0).unwrap_or(0).min((-lo) as usize);
        let last = probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(0)
            .max((-lo) as usize);
        Ok(Self { min_step: lo + first as i64, probs: probs[first..=last].to_vec() })
    }

    /// `{0: 1 − q, 1: q}`.
    pub fn bernoulli(q: f64) -> Result<Self> {
        Self::scaled_bernoulli(1, q)
    }

    /// `{0: 1 − q, g: q}`.
    pub fn scaled_bernoulli(g: i64, q: f64) -> Result<Self> {
        if g < 1 {
            return Err(Error::InvalidStepLaw(format!("lattice spacing must be >= 1, got {g}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidStepLaw(format!("q must lie in (0, 1), got {q}")));
        }
        let mut probs = vec![0.0; g as usize + 1];
        probs[0] = 1.0 - q;
        probs[g as usize] = q;
        Ok(Self { min_step: 0, probs })
    }

    /// Parse `d:p,d:p,...`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (d, p) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::InvalidStepLaw(format!("expected `step:prob`, got {item:?}")))?;
            let d = d
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidStepLaw(format!("bad step {d:?}")))?;
            let p = p
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidStepLaw(format!("bad probability {p:?}")))?;
            pairs.push((d, p));
        }
        Self::from_pairs(&pairs)
    }

    /// `ℓ`: the largest leftward displacement.
    pub fn left_reach(&self) -> usize {
        (-self.min_step) as usize
    }

    /// `s`: the largest rightward displacement.
    pub fn right_reach(&self) -> usize {
        (self.min_step + self.probs.len() as i64 - 1) as usize
    }

    pub fn prob(&self, d: i64) -> f64 {
        let i = d - self.min_step;
        if i < 0 || i >= self.probs.len() as i64 {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    /// `P(D >= d)`.
    pub fn prob_ge(&self, d: i64) -> f64 {
        self.atoms().filter(|&(x, _)| x >= d).map(|(_, p)| p).sum()
    }

    /// `P(D < d)`.
    pub fn prob_lt(&self, d: i64) -> f64 {
        self.atoms().filter(|&(x, _)| x < d).map(|(_, p)| p).sum()
    }

    /// Atoms with positive probability, in increasing order of displacement.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(move |(i, &p)| (self.min_step + i as i64, p))
    }

    /// `Some(q)` when the law is exactly `{0: 1 − q, 1: q}` (or degenerate on one of them).
    pub fn unit_bernoulli_q(&self) -> Option<f64> {
        (self.min_step == 0 && self.probs.len() <= 2).then(|| self.prob(1))
    }

    /// Whether some atom has `|d| > 1`.
    pub fn has_long_jumps(&self) -> bool {
        self.atoms().any(|(d, _)| d.abs() > 1)
    }

    pub fn to_spec(&self) -> String {
        self.atoms().map(|(d, p)| format!("{d}:{p}")).collect::<Vec<_>>().join(",")
    }
}
