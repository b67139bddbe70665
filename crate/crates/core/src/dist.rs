//! Probability distributions on the extended lattice ℤ ∪ {−∞, +∞}.
//!
//! A [`LatticeDist`] stores a dense window of point masses starting at
//! `offset` plus the two extended atoms. Cumulative distribution functions
//! follow the strict convention `F(k) = P(X < k)` throughout; [`CdfSeq`] is
//! the sampled form of such a function that the finite-difference schemes
//! operate on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on total mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Edge atoms lighter than this are folded into their neighbour.
pub const TRIM_THRESHOLD: f64 = 1e-300;

/// Cooperation exponent `m` and move probability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    m: f64,
    q: f64,
    int_m: Option<i32>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    m: f64,
    q: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.m, raw.q)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams { m: p.m, q: p.q }
    }
}

impl ModelParams {
    pub fn new(m: f64, q: f64) -> Result<Self> {
        if !m.is_finite() || m < 1.0 {
            return Err(Error::InvalidParams(format!("m must be a real >= 1, got {m}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParams(format!("q must lie in (0, 1), got {q}")));
        }
        let int_m = (m.fract() == 0.0 && m <= 64.0).then_some(m as i32);
        Ok(Self { m, q, int_m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `m` as an integer, when it is one.
    pub fn integer_m(&self) -> Option<u32> {
        self.int_m.map(|m| m as u32)
    }

    pub fn require_integer_m(&self) -> Result<u32> {
        self.integer_m().ok_or_else(|| {
            Error::InvalidParams(format!("this operation needs an integer m, got {}", self.m))
        })
    }

    /// `|x|^(m+1)`, using repeated multiplication for integer `m`.
    #[inline]
    pub fn power(&self, x: f64) -> f64 {
        let x = x.abs();
        match self.int_m {
            Some(m) => x.powi(m + 1),
            None => x.powf(self.m + 1.0),
        }
    }

    /// The diffusive scale `n^(1/(m+1))`.
    pub fn scale(&self, n: f64) -> f64 {
        n.powf(1.0 / (self.m + 1.0))
    }
}

/// One site of the extended lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    NegInf,
    Finite(i64),
    PosInf,
}

impl Site {
    pub fn is_finite(&self) -> bool {
        matches!(self, Site::Finite(_))
    }

    /// Translate by a finite displacement; infinite sites absorb it.
    pub fn shifted(self, by: i64) -> Site {
        match self {
            Site::Finite(k) => Site::Finite(k + by),
            other => other,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::NegInf => f.write_str("-inf"),
            Site::PosInf => f.write_str("+inf"),
            Site::Finite(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" => Ok(Site::NegInf),
            "+inf" | "inf" => Ok(Site::PosInf),
            t => t
                .parse::<i64>()
                .map(Site::Finite)
                .map_err(|_| Error::Parse { line: 0, message: format!("bad site {t:?}") }),
        }
    }
}

/// A probability distribution on ℤ ∪ {−∞, +∞}.
///
/// Immutable once built. The finite window is trimmed so that its first and
/// last entries are non-zero, unless all mass sits on the extended atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDist {
    offset: i64,
    mass: Vec<f64>,
    mass_neg_inf: f64,
    mass_pos_inf: f64,
}

impl LatticeDist {
    /// Build from a dense window; validates signs and normalization.
    pub fn new(offset: i64, mass: Vec<f64>, mass_neg_inf: f64, mass_pos_inf: f64) -> Result<Self> {
        for (i, &p) in mass.iter().enumerate() {
            check_mass(&(offset + i as i64).to_string(), p)?;
        }
        check_mass("-inf", mass_neg_inf)?;
        check_mass("+inf", mass_pos_inf)?;
        let d = Self::from_parts(offset, mass, mass_neg_inf, mass_pos_inf);
        d.check_normalized()?;
        Ok(d)
    }

    /// Build and trim without checking normalization. Callers are the
    /// evolution kernels, which conserve mass by construction and verify it
    /// separately.
    pub(crate) fn from_parts(offset: i64, mut mass: Vec<f64>, neg: f64, pos: f64) -> Self {
        let offset = trim_window(offset, &mut mass);
        Self { offset, mass, mass_neg_inf: neg, mass_pos_inf: pos }
    }

    /// Point mass at `k`.
    pub fn point(k: i64) -> Self {
        Self { offset: k, mass: vec![1.0], mass_neg_inf: 0.0, mass_pos_inf: 0.0 }
    }

    /// Uniform on `lo..=hi`.
    pub fn uniform(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty range {lo}..={hi}")));
        }
        let len = (hi - lo + 1) as usize;
        Self::new(lo, vec![1.0 / len as f64; len], 0.0, 0.0)
    }

    /// From `(site, mass)` pairs; repeated sites accumulate.
    pub fn from_sites(pairs: &[(Site, f64)]) -> Result<Self> {
        let mut neg = 0.0;
        let mut pos = 0.0;
        let finite: Vec<(i64, f64)> = pairs
            .iter()
            .filter_map(|&(s, p)| match s {
                Site::NegInf => {
                    neg += p;
                    None
                }
                Site::PosInf => {
                    pos += p;
                    None
                }
                Site::Finite(k) => Some((k, p)),
            })
            .collect();
        for &(s, p) in pairs {
            check_mass(&s.to_string(), p)?;
        }
        let (offset, mass) = match (finite.iter().map(|x| x.0).min(), finite.iter().map(|x| x.0).max()) {
            (Some(lo), Some(hi)) => {
                let mut mass = vec![0.0; (hi - lo + 1) as usize];
                for &(k, p) in &finite {
                    mass[(k - lo) as usize] += p;
                }
                (lo, mass)
            }
            _ => (0, Vec::new()),
        };
        Self::new(offset, mass, neg, pos)
    }

    /// Convenience for finite pairs.
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        let sites: Vec<(Site, f64)> = pairs.iter().map(|&(k, p)| (Site::Finite(k), p)).collect();
        Self::from_sites(&sites)
    }

    /// Recover a distribution from sampled CDF values.
    pub fn from_cdf_seq(cdf: &CdfSeq) -> Result<Self> {
        cdf.check_monotone()?;
        let v = cdf.values();
        let mass: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        let neg = v[0].max(0.0);
        let pos = 1.0 - v[v.len() - 1];
        Self::new(cdf.start(), mass, neg, pos.max(0.0))
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Dense masses; `masses()[i] = P(X = offset + i)`.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass_neg_inf(&self) -> f64 {
        self.mass_neg_inf
    }

    pub fn mass_pos_inf(&self) -> f64 {
        self.mass_pos_inf
    }

    /// First and last finite sites of the window, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.mass.is_empty()).then(|| (self.offset, self.offset + self.mass.len() as i64 - 1))
    }

    pub fn pmf(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[i as usize]
        }
    }

    pub fn mass_at(&self, site: Site) -> f64 {
        match site {
            Site::NegInf => self.mass_neg_inf,
            Site::PosInf => self.mass_pos_inf,
            Site::Finite(k) => self.pmf(k),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_neg_inf + self.mass.iter().sum::<f64>() + self.mass_pos_inf
    }

    pub fn check_normalized(&self) -> Result<()> {
        let total = self.total_mass();
        if (total - 1.0).abs() > MASS_TOLERANCE || !total.is_finite() {
            return Err(Error::NotNormalized { total, tolerance: MASS_TOLERANCE });
        }
        Ok(())
    }

    /// `P(X < k)`.
    pub fn cdf_at(&self, k: i64) -> f64 {
        let upto = (k - self.offset).clamp(0, self.mass.len() as i64) as usize;
        self.mass_neg_inf + self.mass[..upto].iter().sum::<f64>()
    }

    /// CDF sampled on `offset ..= offset + len`, constant outside.
    pub fn cdf_seq(&self) -> CdfSeq {
        let mut values = Vec::with_capacity(self.mass.len() + 1);
        let mut acc = self.mass_neg_inf;
        values.push(acc);
        for &p in &self.mass {
            acc += p;
            values.push(acc);
        }
        CdfSeq { start: self.offset, values }
    }

    /// Largest atom, counting the extended ones.
    pub fn max_atom(&self) -> f64 {
        self.mass
            .iter()
            .copied()
            .fold(self.mass_neg_inf.max(self.mass_pos_inf), f64::max)
    }

    /// `max_k (F_self(k) − F_other(k))`; non-positive iff `self` dominates.
    pub fn dominance_gap(&self, other: &LatticeDist) -> f64 {
        let a = self.cdf_seq();
        let b = other.cdf_seq();
        let lo = a.start().min(b.start()) - 1;
        let hi = a.end().max(b.end()) + 1;
        (lo..=hi).map(|k| a.at(k) - b.at(k)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `self` stochastically dominates `other`: `P(self < k) <= P(other < k)` for all k.
    pub fn dominates(&self, other: &LatticeDist) -> bool {
        self.dominance_gap(other) <= 0.0
    }

    /// `P(X / n^(1/(m+1)) < x)`.
    pub fn rescaled_cdf(&self, n: u64, m: f64, x: f64) -> f64 {
        assert!(n >= 1, "rescaled_cdf needs n >= 1");
        let s = (n as f64).powf(1.0 / (m + 1.0));
        self.cdf_at(ceil_site(x * s))
    }

    /// Same law translated by `by` sites.
    pub fn shifted(&self, by: i64) -> Self {
        Self { offset: self.offset + by, ..self.clone() }
    }

    /// All atoms with positive mass, in lattice order.
    pub fn atoms(&self) -> Vec<(Site, f64)> {
        let mut out = Vec::with_capacity(self.mass.len() + 2);
        if self.mass_neg_inf > 0.0 {
            out.push((Site::NegInf, self.mass_neg_inf));
        }
        out.extend(
            self.mass
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, &p)| (Site::Finite(self.offset + i as i64), p)),
        );
        if self.mass_pos_inf > 0.0 {
            out.push((Site::PosInf, self.mass_pos_inf));
        }
        out
    }

    /// Parse the line-oriented literal format: one `site mass` pair per
    /// line, where the site may be `-inf` or `+inf`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_literal(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(s), Some(p), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse { line: i + 1, message: format!("expected `site mass`, got {line:?}") });
            };
            pairs.push(parse_pair(s, p, i + 1)?);
        }
        Self::from_sites(&pairs)
    }

    /// Render in the literal format accepted by [`LatticeDist::parse_literal`].
    pub fn to_literal(&self) -> String {
        self.atoms().iter().map(|(s, p)| format!("{s} {p}\n")).collect()
    }

    /// Parse the compact `site:mass,site:mass` form used on the command line.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, item) in spec.split(',').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
            let (s, p) = item.rsplit_once(':').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `site:mass`, got {item:?}"),
            })?;
            pairs.push(parse_pair(s, p, i + 1)?);
        }
        if pairs.is_empty() {
            return Err(Error::Parse { line: 1, message: "empty distribution".into() });
        }
        Self::from_sites(&pairs)
    }
}

fn parse_pair(site: &str, mass: &str, line: usize) -> Result<(Site, f64)> {
    let s = site.parse::<Site>().map_err(|_| Error::Parse { line, message: format!("bad site {site:?}") })?;
    let p = mass
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, message: format!("bad mass {mass:?}") })?;
    Ok((s, p))
}

fn check_mass(site: &str, p: f64) -> Result<()> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidMass { site: site.to_string(), value: p });
    }
    Ok(())
}

/// Smallest integer `k` with `k >= y`, saturating.
pub(crate) fn ceil_site(y: f64) -> i64 {
    let c = y.ceil();
    if c >= i64::MAX as f64 {
        i64::MAX
    } else if c <= i64::MIN as f64 {
        i64::MIN
    } else {
        c as i64
    }
}

/// Trim light edge cells in place; returns the new offset.
pub(crate) fn trim_window(mut offset: i64, mass: &mut Vec<f64>) -> i64 {
    let mut start = 0;
    while start < mass.len() && mass[start] < TRIM_THRESHOLD {
        if start + 1 < mass.len() {
            mass[start + 1] += mass[start];
        } else if mass[start] > 0.0 {
            break;
        }
        start += 1;
    }
    if start > 0 {
        mass.drain(..start);
        offset += start as i64;
    }
    while let Some(&last) = mass.last() {
        if last >= TRIM_THRESHOLD {
            break;
        }
        let n = mass.len();
        if n >= 2 {
            mass[n - 2] += last;
        } else if last > 0.0 {
            break;
        }
        mass.pop();
    }
    offset
}

/// Sampled CDF values `values[i] = F(start + i)`, extended as constants
/// beyond both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfSeq {
    start: i64,
    values: Vec<f64>,
}

impl CdfSeq {
    pub fn new(start: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("CDF sequence must be non-empty".into()));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::CdfOutOfRange { site: start + i as i64, value: v });
        }
        Ok(Self { start, values })
    }

    pub(crate) fn from_raw(start: i64, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last sampled site.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, k: i64) -> f64 {
        let i = (k - self.start).clamp(0, self.values.len() as i64 - 1);
        self.values[i as usize]
    }

    /// Error unless the values are non-decreasing and lie in `[0, 1]`.
    pub fn check_monotone(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !(-MASS_TOLERANCE..=1.0 + MASS_TOLERANCE).contains(&v) {
                return Err(Error::CdfOutOfRange { site: self.start + i as i64, value: v });
            }
        }
        if let Some(i) = self.values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NonMonotoneCdf {
                site: self.start + i as i64 + 1,
                prev: self.values[i],
                next: self.values[i + 1],
            });
        }
        Ok(())
    }

    /// Largest increment `F(k) − F(k−1)`.
    pub fn max_increment(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// `max_{x in grid} |f(x) − g(x)|`.
pub fn sup_distance<F, G>(f: F, g: G, grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid.iter().map(|&x| (f(x) - g(x)).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extended() -> LatticeDist {
        LatticeDist::new(0, vec![0.5], 0.25, 0.25).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let d = LatticeDist::point(0);
        assert_eq!(d.cdf_at(0), 0.0);
        assert_eq!(d.cdf_at(1), 1.0);
        assert_eq!(extended().cdf_at(5), 0.75);
        assert_eq!(extended().cdf_at(-100), 0.25);
    }

    #[test]
    fn max_atom_examples() {
        assert_eq!(LatticeDist::point(0).max_atom(), 1.0);
        let u = LatticeDist::uniform(0, 9).unwrap();
        assert!((u.max_atom() - 0.1).abs() < 1e-15);
        let d = LatticeDist::new(0, vec![0.4], 0.6, 0.0).unwrap();
        assert_eq!(d.max_atom(), 0.6);
    }

    #[test]
    fn dominates_examples() {
        let d0 = LatticeDist::point(0);
        let d1 = LatticeDist::point(1);
        assert!(d1.dominates(&d0));
        assert!(!d0.dominates(&d1));
        assert!(d0.dominates(&d0));
        let u = LatticeDist::uniform(0, 1).unwrap();
        assert!(!u.dominates(&d1));
    }

    #[test]
    fn rescaled_cdf_examples() {
        let d = LatticeDist::point(0);
        assert_eq!(d.rescaled_cdf(100, 1.0, 0.5), 1.0);
        assert_eq!(d.rescaled_cdf(100, 1.0, -0.5), 0.0);
        let u = LatticeDist::uniform(0, 9).unwrap();
        // Direct summation of P(U < 5).
        let oracle: f64 = (0..5).map(|k| u.pmf(k)).sum();
        assert!((u.rescaled_cdf(100, 1.0, 0.5) - oracle).abs() < 1e-15);
        assert!((oracle - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sup_distance_examples() {
        let grid = [0.0, 0.5, 1.0];
        assert_eq!(sup_distance(|x| x, |x| x, &grid).unwrap(), 0.0);
        assert_eq!(sup_distance(|_| 1.0, |_| 0.0, &grid).unwrap(), 1.0);
        assert_eq!(sup_distance(|x| x, |x| x * x, &grid).unwrap(), 0.25);
        assert!(matches!(sup_distance(|x| x, |x| x, &[]), Err(Error::EmptyGrid)));
    }

    #[test]
    fn rejects_unnormalized_and_negative() {
        assert!(matches!(LatticeDist::new(0, vec![0.5, 0.4], 0.0, 0.0), Err(Error::NotNormalized { .. })));
        assert!(matches!(LatticeDist::new(0, vec![1.5, -0.5], 0.0, 0.0), Err(Error::InvalidMass { .. })));
    }

    #[test]
    fn trims_zero_and_tiny_edges() {
        let d = LatticeDist::new(-2, vec![0.0, 1e-310, 0.5, 0.5, 0.0], 0.0, 0.0).unwrap();
        assert_eq!(d.offset(), 0);
        assert_eq!(d.masses().len(), 2);
        assert_eq!(d.masses()[0], 0.5);
        let ext = LatticeDist::new(3, vec![0.0, 0.0], 0.5, 0.5).unwrap();
        assert!(ext.masses().is_empty());
        assert_eq!(ext.support(), None);
    }

    #[test]
    fn literal_and_spec_formats() {
        let d = LatticeDist::parse_literal("# comment\n-inf 0.25\n0 0.5\n\n+inf 0.25\n").unwrap();
        assert_eq!(d, extended());
        let back = LatticeDist::parse_literal(&d.to_literal()).unwrap();
        assert_eq!(back, d);
        let s = LatticeDist::parse_spec("-inf:0.25, 0:0.5, +inf:0.25").unwrap();
        assert_eq!(s, d);
        assert!(LatticeDist::parse_spec("0:0.5").is_err());
        assert!(LatticeDist::parse_spec("zero:1").is_err());
        assert!(LatticeDist::parse_literal("0 0.5 extra").is_err());
    }

    #[test]
    fn cdf_seq_round_trip_with_extended_atoms() {
        let d = LatticeDist::new(-1, vec![0.2, 0.3], 0.1, 0.4).unwrap();
        let f = d.cdf_seq();
        assert_eq!(f.start(), -1);
        assert_eq!(f.at(-50), 0.1);
        assert!((f.at(50) - 0.6).abs() < 1e-15);
        let back = LatticeDist::from_cdf_seq(&f).unwrap();
        assert!(back.dominance_gap(&d).abs() < 1e-15 && d.dominance_gap(&back).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.5, 0.5).is_err());
        assert!(ModelParams::new(1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0).is_err());
        let p = ModelParams::new(2.0, 0.5).unwrap();
        assert_eq!(p.integer_m(), Some(2));
        assert_eq!(p.power(-0.5), 0.125);
        let r = ModelParams::new(1.5, 0.5).unwrap();
        assert_eq!(r.integer_m(), None);
        assert!(r.require_integer_m().is_err());
        assert!((r.power(0.25) - 0.25f64.powf(2.5)).abs() < 1e-16);
    }
}
