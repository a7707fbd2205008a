//! The polynomial `R(z) = z(m - z)`, its inverse branches, the limit functions
//! `frak_r` and `s_r`, eigenvalue addresses and their series, the `M` product
//! and backward orbits of the repelling fixed point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration cap shared by every limit in this module.
pub const MAX_ITER: usize = 200;
/// Absolute tolerance used to merge series members.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecimationPolynomial {
    pub multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    Lo,
    Hi,
}

impl DecimationPolynomial {
    pub const GASKET: Self = Self { multiplier: 5.0 };
    pub const INTERVAL: Self = Self { multiplier: 4.0 };

    pub fn new(multiplier: f64) -> Result<Self> {
        if !(multiplier.is_finite() && multiplier > 1.0) {
            return Err(Error::InvalidArgument(format!("multiplier {multiplier} must exceed 1")));
        }
        Ok(Self { multiplier })
    }

    pub fn apply(&self, z: f64) -> f64 {
        z * (self.multiplier - z)
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        z * (self.multiplier - z)
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.multiplier - 2.0 * z
    }

    /// `k`-fold composition.
    pub fn iterate(&self, z: f64, k: usize) -> f64 {
        (0..k).fold(z, |acc, _| self.apply(acc))
    }

    pub fn critical_value(&self) -> f64 {
        self.multiplier * self.multiplier / 4.0
    }

    /// Nonzero fixed point `m - 1`, repelling for `m > 3`.
    pub fn fixed_point(&self) -> f64 {
        self.multiplier - 1.0
    }

    pub fn inverse_branches(&self, w: f64) -> Result<(f64, f64)> {
        let m = self.multiplier;
        let disc = m * m - 4.0 * w;
        if disc < 0.0 || w.is_nan() {
            // tiny negative discriminants from rounding at the critical value
            if disc > -1e-12 * m * m {
                return Ok((m / 2.0, m / 2.0));
            }
            return Err(Error::Discriminant { w, limit: self.critical_value() });
        }
        let s = disc.sqrt();
        // the LO root is computed as 2w/(m+s) to avoid cancellation near 0
        let lo = 2.0 * w / (m + s);
        Ok((lo, (m + s) / 2.0))
    }

    pub fn branch(&self, b: Branch, w: f64) -> Result<f64> {
        let (lo, hi) = self.inverse_branches(w)?;
        Ok(match b {
            Branch::Lo => lo,
            Branch::Hi => hi,
        })
    }

    /// Pushes `w` through the letters of `word` in order.
    pub fn push_word(&self, w: f64, word: &[Branch]) -> Result<f64> {
        word.iter().try_fold(w, |acc, &b| self.branch(b, acc))
    }
}

/// Real interval on which `frak_r` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkingRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for WorkingRange {
    fn default() -> Self {
        Self { lo: -1.0, hi: 5f64.powi(8) }
    }
}

impl WorkingRange {
    pub fn contains(&self, z: f64) -> bool {
        z >= self.lo && z <= self.hi
    }
}

fn cauchy(prev: f64, next: f64, tol: f64) -> bool {
    (next - prev).abs() < tol * next.abs().max(1.0)
}

/// `lim_k R^k(z / m^k)`.
pub fn frak_r(poly: &DecimationPolynomial, z: f64, tol: f64) -> Result<f64> {
    let m = poly.multiplier;
    let mut prev = z;
    let mut scaled = z;
    for k in 1..=MAX_ITER {
        scaled /= m;
        let next = poly.iterate(scaled, k);
        if !next.is_finite() {
            return Err(Error::NonConvergence { iterations: k, last_step: f64::INFINITY });
        }
        if cauchy(prev, next, tol) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, last_step: f64::NAN })
}

/// `frak_r` restricted to a caller-supplied working range.
pub fn frak_r_in(poly: &DecimationPolynomial, z: f64, tol: f64, range: &WorkingRange) -> Result<f64> {
    if !range.contains(z) {
        return Err(Error::OutOfRange(z));
    }
    frak_r(poly, z, tol)
}

/// `lim_k m^k LO^k(w)`, the local inverse of `frak_r` at 0.
pub fn s_r(poly: &DecimationPolynomial, w: f64, tol: f64) -> Result<f64> {
    let m = poly.multiplier;
    let mut x = w;
    let mut scale = 1.0;
    let mut prev = w;
    for k in 1..=MAX_ITER {
        x = poly.branch(Branch::Lo, x)?;
        scale *= m;
        let next = scale * x;
        if !next.is_finite() {
            return Err(Error::NonConvergence { iterations: k, last_step: f64::INFINITY });
        }
        if cauchy(prev, next, tol) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, last_step: f64::NAN })
}

/// `(m0, seed, word)` followed by an implicit LO tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueAddress {
    pub m0: u32,
    pub seed: f64,
    pub word: Vec<Branch>,
    pub approx: f64,
}

impl EigenvalueAddress {
    /// Unresolved address with trailing LO letters trimmed.
    pub fn new(m0: u32, seed: f64, word: Vec<Branch>) -> Self {
        let mut word = word;
        while word.last() == Some(&Branch::Lo) {
            word.pop();
        }
        Self { m0, seed, word, approx: f64::NAN }
    }

    pub fn resolved(poly: &DecimationPolynomial, m0: u32, seed: f64, word: Vec<Branch>, tol: f64) -> Result<Self> {
        let mut a = Self::new(m0, seed, word);
        resolve_address(poly, &mut a, tol)?;
        Ok(a)
    }

    /// Value of the level sequence at index `m`, i.e. `frak_r(approx / m^level)`.
    pub fn level_value(&self, poly: &DecimationPolynomial, level: usize) -> Result<f64> {
        let m0 = self.m0 as usize;
        if level < m0 {
            return Ok(poly.iterate(self.seed, m0 - level));
        }
        let j = level - m0;
        let take = j.min(self.word.len());
        let mut x = poly.push_word(self.seed, &self.word[..take])?;
        for _ in take..j {
            x = poly.branch(Branch::Lo, x)?;
        }
        Ok(x)
    }
}

pub fn resolve_address(poly: &DecimationPolynomial, addr: &mut EigenvalueAddress, tol: f64) -> Result<f64> {
    let end = poly.push_word(addr.seed, &addr.word)?;
    let m = poly.multiplier;
    let base = m.powi(addr.word.len() as i32) * s_r(poly, end, tol)?;
    // one multiplication per unit of m0 so that shifting m0 scales exactly by m
    let v = (0..addr.m0).fold(base, |acc, _| acc * m);
    addr.approx = v;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    SigmaExt,
    SigmaInf,
    SigmaInfPrime,
    SigmaD,
    SigmaN,
}

impl SeriesKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::SigmaExt => "Sigma_ext",
            SeriesKind::SigmaInf => "Sigma_inf",
            SeriesKind::SigmaInfPrime => "Sigma_inf_prime",
            SeriesKind::SigmaD => "Sigma_D",
            SeriesKind::SigmaN => "Sigma_N",
        }
    }

    /// `(m0, seed)` generators with `m0 <= max_m0`.
    pub fn generators(&self, max_m0: u32) -> Vec<(u32, f64)> {
        let mut g = Vec::new();
        let each = |from: u32, seeds: &[f64], g: &mut Vec<(u32, f64)>| {
            for m0 in from..=max_m0 {
                for &s in seeds {
                    g.push((m0, s));
                }
            }
        };
        match self {
            SeriesKind::SigmaInf => {
                g.push((1, 2.0));
                each(1, &[3.0, 5.0], &mut g);
            }
            SeriesKind::SigmaInfPrime => each(2, &[3.0, 5.0], &mut g),
            SeriesKind::SigmaExt => {
                g.push((1, 2.0));
                each(1, &[5.0], &mut g);
            }
            SeriesKind::SigmaD => {
                g.push((1, 2.0));
                g.push((1, 5.0));
                g.push((2, 5.0));
                each(3, &[3.0, 5.0], &mut g);
            }
            SeriesKind::SigmaN => {
                g.push((0, 0.0));
                g.push((1, 3.0));
                each(2, &[3.0, 5.0], &mut g);
            }
        }
        g.retain(|&(m0, _)| m0 <= max_m0);
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoff {
    pub max_m0: u32,
    pub max_word_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSet {
    pub kind: SeriesKind,
    pub cutoff: Cutoff,
    pub members: Vec<EigenvalueAddress>,
}

impl SeriesSet {
    pub fn values(&self) -> Vec<f64> {
        self.members.iter().map(|a| a.approx).collect()
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        let i = self.members.partition_point(|a| a.approx < x - tol);
        self.members.get(i).is_some_and(|a| (a.approx - x).abs() <= tol)
    }
}

/// Words of length at most `max_len` that do not end in LO, shortest first.
pub fn canonical_words(max_len: usize) -> Vec<Vec<Branch>> {
    let mut out = vec![Vec::new()];
    for len in 1..=max_len {
        for bits in 0..(1u64 << (len - 1)) {
            let mut w: Vec<Branch> = (0..len - 1)
                .map(|i| if bits >> i & 1 == 1 { Branch::Hi } else { Branch::Lo })
                .collect();
            w.push(Branch::Hi);
            out.push(w);
        }
    }
    out
}

fn sort_dedup(mut members: Vec<EigenvalueAddress>) -> Vec<EigenvalueAddress> {
    members.sort_by(|a, b| a.approx.total_cmp(&b.approx).then(a.word.len().cmp(&b.word.len())));
    let mut out: Vec<EigenvalueAddress> = Vec::with_capacity(members.len());
    for a in members {
        match out.last() {
            Some(last) if (a.approx - last.approx).abs() <= DEDUP_TOL => {}
            _ => out.push(a),
        }
    }
    out
}

/// All addresses generated by `(m0, seed)` pairs, words within the cutoff.
pub fn enumerate_addresses(
    poly: &DecimationPolynomial,
    generators: &[(u32, f64)],
    max_word_len: usize,
    tol: f64,
) -> Result<Vec<EigenvalueAddress>> {
    let words = canonical_words(max_word_len);
    let mut members = Vec::with_capacity(generators.len() * words.len());
    for &(m0, seed) in generators {
        for w in &words {
            members.push(EigenvalueAddress::resolved(poly, m0, seed, w.clone(), tol)?);
        }
    }
    Ok(sort_dedup(members))
}

pub fn enumerate_series(poly: &DecimationPolynomial, kind: SeriesKind, cutoff: Cutoff, tol: f64) -> Result<SeriesSet> {
    let members = enumerate_addresses(poly, &kind.generators(cutoff.max_m0), cutoff.max_word_len, tol)?;
    Ok(SeriesSet { kind, cutoff, members })
}

/// `frak_r^{-1}{w}` to the given word length, ascending.
pub fn preimage_point(poly: &DecimationPolynomial, w: f64, max_word_len: usize, tol: f64) -> Result<Vec<f64>> {
    Ok(enumerate_addresses(poly, &[(0, w)], max_word_len, tol)?.into_iter().map(|a| a.approx).collect())
}

/// A preimage band of `frak_r` with the word length that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub generation: usize,
}

/// `frak_r^{-1}[a, b]` for `[a, b]` below the critical value, as sorted merged bands.
pub fn preimage_band(poly: &DecimationPolynomial, a: f64, b: f64, max_word_len: usize, tol: f64) -> Result<Vec<Band>> {
    if a > b {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let m = poly.multiplier;
    let mut bands = Vec::new();
    for w in canonical_words(max_word_len) {
        let scale = m.powi(w.len() as i32);
        let x = scale * s_r(poly, poly.push_word(a, &w)?, tol)?;
        let y = scale * s_r(poly, poly.push_word(b, &w)?, tol)?;
        bands.push(Band { lo: x.min(y), hi: x.max(y), generation: w.len() });
    }
    bands.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let mut merged: Vec<Band> = Vec::with_capacity(bands.len());
    for band in bands {
        match merged.last_mut() {
            Some(last) if band.lo <= last.hi + 1e-12 => {
                last.hi = last.hi.max(band.hi);
                last.generation = last.generation.min(band.generation);
            }
            _ => merged.push(band),
        }
    }
    Ok(merged)
}

/// Single factor of the `M` product.
pub fn m_factor(x: f64) -> Result<f64> {
    let den = (1.0 - x / 6.0) * (1.0 - 2.0 * x / 5.0);
    if den.abs() < 1e-14 {
        return Err(Error::Pole(x));
    }
    Ok((1.0 - x / 5.0) * (1.0 - x / 2.0) / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MProduct {
    pub value: f64,
    /// `partials[k]` is the product over levels `1..=k+1`.
    pub partials: Vec<f64>,
}

fn m_product_from(levels: impl Fn(usize) -> Result<f64>, first_free: usize, tol: f64) -> Result<MProduct> {
    let mut p = 1.0;
    let mut partials = Vec::new();
    for level in 1..=MAX_ITER {
        let next = p * m_factor(levels(level)?)?;
        partials.push(next);
        if level > first_free && (next - p).abs() < tol * next.abs().max(1.0) {
            return Ok(MProduct { value: next, partials });
        }
        p = next;
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, last_step: f64::NAN })
}

/// `M` along the level sequence of an address.
pub fn m_of_lambda(poly: &DecimationPolynomial, addr: &EigenvalueAddress, tol: f64) -> Result<MProduct> {
    let free = addr.m0 as usize + addr.word.len() + 1;
    m_product_from(|l| addr.level_value(poly, l), free, tol)
}

/// `M` along `frak_r(lambda / m^k)` for a bare value.
pub fn m_of_value(poly: &DecimationPolynomial, lambda: f64, tol: f64) -> Result<MProduct> {
    let m = poly.multiplier;
    // levels where lambda/m^k is still large are not in the geometric regime
    let free = (lambda.abs().max(1.0).ln() / m.ln()).ceil() as usize + 1;
    m_product_from(|l| frak_r(poly, lambda / m.powi(l as i32), tol * 1e-3), free, tol)
}

/// All `2^depth` backward iterates of the fixed point `m - 1`, ascending.
pub fn julia_backward_orbit(poly: &DecimationPolynomial, depth: usize) -> Result<Vec<f64>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut pts = vec![poly.fixed_point()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(pts.len() * 2);
        for &w in &pts {
            let (lo, hi) = poly.inverse_branches(w)?;
            next.push(lo);
            next.push(hi);
        }
        pts = next;
    }
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const G: DecimationPolynomial = DecimationPolynomial::GASKET;

    #[test]
    fn r_values() {
        assert_eq!(G.apply(2.0), 6.0);
        assert_eq!(G.apply(3.0), 6.0);
        assert_eq!(G.apply(0.0), 0.0);
        let z = Complex64::new(0.3, -1.1);
        assert_abs_diff_eq!((G.apply_complex(z) - z * (5.0 - z)).norm(), 0.0);
    }

    #[test]
    fn derivative_at_zero_by_differences() {
        let h = 1e-6;
        let d = (G.apply(h) - G.apply(-h)) / (2.0 * h);
        assert_abs_diff_eq!(d, 5.0, epsilon = 1e-8);
    }

    #[test]
    fn branches() {
        assert_eq!(G.inverse_branches(6.0).unwrap(), (2.0, 3.0));
        assert_eq!(G.inverse_branches(0.0).unwrap(), (0.0, 5.0));
        let (lo, hi) = G.inverse_branches(5.0).unwrap();
        assert_abs_diff_eq!(lo, (5.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, (5.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert!(matches!(G.inverse_branches(6.3), Err(Error::Discriminant { .. })));
    }

    #[test]
    fn trailing_lo_trimmed() {
        let a = EigenvalueAddress::new(1, 6.0, vec![Branch::Hi, Branch::Lo, Branch::Lo]);
        assert_eq!(a.word, vec![Branch::Hi]);
    }

    #[test]
    fn frak_r_at_zero() {
        assert_eq!(frak_r(&G, 0.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn range_rejects() {
        let r = WorkingRange { lo: 0.0, hi: 10.0 };
        assert!(matches!(frak_r_in(&G, 11.0, 1e-12, &r), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn orbit_depth_one() {
        assert_eq!(julia_backward_orbit(&G, 1).unwrap(), vec![1.0, 4.0]);
        assert!(julia_backward_orbit(&G, 0).is_err());
    }

    #[test]
    fn m_at_zero_is_one() {
        let a = EigenvalueAddress::resolved(&G, 0, 0.0, vec![], 1e-13).unwrap();
        assert_eq!(m_of_lambda(&G, &a, 1e-13).unwrap().value, 1.0);
    }

    #[test]
    fn m_pole() {
        assert!(matches!(m_factor(6.0), Err(Error::Pole(_))));
        assert!(matches!(m_factor(2.5), Err(Error::Pole(_))));
    }

    #[test]
    fn word_count() {
        assert_eq!(canonical_words(4).len(), 16);
    }
}
