//! Spectra of states (equivalently, probability distributions) in canonical
//! non-increasing form, together with the elementary quantities built on them:
//! eigenvalues `p_i`, tail weights `d_k`, the index `ℓ_ε`, rank and total
//! variation distance.
//!
//! Indices follow the mathematical convention: eigenvalues are numbered from 1,
//! tail weights from 0.

use std::fmt;

use crate::error::{Error, Result};

/// Environment variable that overrides the default tolerance in the CLI.
pub const TOLERANCE_ENV: &str = "MAJORBOUND_TOL";

/// Slack used for normalization checks, ordering and every `≥` comparison.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1e-3 {
            Ok(Tolerance(value))
        } else {
            Err(Error::InvalidTolerance(value))
        }
    }

    /// Reads [`TOLERANCE_ENV`]; falls back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(raw) => {
                let value: f64 = raw.trim().parse().map_err(|_| Error::Parse(format!("{TOLERANCE_ENV}={raw}")))?;
                Tolerance::new(value)
            }
            Err(_) => Ok(Tolerance::DEFAULT),
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    fn max(self, other: Tolerance) -> Tolerance {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

/// Rank of a state: a count of positive eigenvalues, or infinite support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl Rank {
    pub fn finite(self) -> Option<usize> {
        match self {
            Rank::Finite(n) => Some(n),
            Rank::Infinite => None,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Strictly positive, non-increasing entries; `tails[k] = Σ_{i>k} p_i`.
    Finite { p: Vec<f64>, tails: Vec<f64> },
    /// `p_i = (1-q) q^(i-1)`.
    Geometric { q: f64 },
}

/// A canonical spectrum: finite non-increasing probability vector or the
/// geometric (thermal oscillator) family.
///
/// Zero entries are not stored; the finite length is the support size.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    repr: Repr,
    tol: Tolerance,
}

/// Sorts `raw` into canonical form. Entries within `tol` below zero are
/// clamped; the sum must already be 1 within `tol` (no renormalization).
pub fn canonicalize(raw: &[f64], tol: Tolerance) -> Result<Spectrum> {
    if raw.is_empty() {
        return Err(Error::Empty);
    }
    let t = tol.value();
    let mut sum = 0.0;
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < -t {
            return Err(Error::NegativeEntry { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > t {
        return Err(Error::NotNormalized { sum });
    }
    let mut p: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).filter(|&x| x > 0.0).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum::from_sorted(p, tol))
}

impl Spectrum {
    /// Canonicalizes with the default tolerance.
    pub fn finite(raw: &[f64]) -> Result<Self> {
        canonicalize(raw, Tolerance::DEFAULT)
    }

    pub fn geometric(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(Spectrum { repr: Repr::Geometric { q }, tol: Tolerance::DEFAULT })
        } else {
            Err(Error::InvalidRatio(q))
        }
    }

    fn from_sorted(p: Vec<f64>, tol: Tolerance) -> Self {
        let mut tails = vec![0.0; p.len() + 1];
        for k in (0..p.len()).rev() {
            tails[k] = tails[k + 1] + p[k];
        }
        Spectrum { repr: Repr::Finite { p, tails }, tol }
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub(crate) fn joint_tolerance(&self, other: &Spectrum) -> Tolerance {
        self.tol.max(other.tol)
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self.repr, Repr::Geometric { .. })
    }

    /// Ratio `q` of a geometric spectrum.
    pub fn ratio(&self) -> Option<f64> {
        match self.repr {
            Repr::Geometric { q } => Some(q),
            Repr::Finite { .. } => None,
        }
    }

    /// Stored entries of a finite spectrum.
    pub fn entries(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Finite { p, .. } => Some(p),
            Repr::Geometric { .. } => None,
        }
    }

    /// Number of strictly positive entries; `None` for infinite support.
    pub fn support_len(&self) -> Option<usize> {
        self.entries().map(<[f64]>::len)
    }

    /// `p_i` for `i ≥ 1`; zero beyond a finite support. `i = 0` yields 0.
    pub fn eigen_at(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Finite { p, .. } => p.get(i - 1).copied().unwrap_or(0.0),
            Repr::Geometric { q } => (1.0 - q) * q.powi(exponent(i - 1)),
        }
    }

    /// `d_k = 1 - Σ_{i≤k} p_i`, with `d_0 = 1`.
    pub fn tail_weight(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match &self.repr {
            Repr::Finite { tails, .. } => tails.get(k).copied().unwrap_or(0.0).clamp(0.0, 1.0),
            Repr::Geometric { q } => q.powi(exponent(k)),
        }
    }

    /// `ℓ_ε`: the smallest `k ≥ 1` with `d_k ≤ ε` (within tolerance).
    pub fn ell_epsilon(&self, eps: f64) -> Result<usize> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidEpsilon(eps));
        }
        let bound = eps + self.tol.value();
        match &self.repr {
            Repr::Finite { p, .. } => {
                (1..=p.len()).find(|&k| self.tail_weight(k) <= bound).ok_or(Error::Unbounded { eps, cap: p.len() })
            }
            Repr::Geometric { q } => {
                if bound >= 1.0 {
                    return Ok(1);
                }
                let guess = (bound.ln() / q.ln()).ceil();
                if !guess.is_finite() || guess > i32::MAX as f64 {
                    return Err(Error::Unbounded { eps, cap: i32::MAX as usize });
                }
                let mut k = (guess as usize).max(1);
                while k > 1 && q.powi(exponent(k - 1)) <= bound {
                    k -= 1;
                }
                while q.powi(exponent(k)) > bound {
                    k += 1;
                }
                Ok(k)
            }
        }
    }

    /// Number of entries above tolerance.
    pub fn rank(&self) -> Rank {
        match &self.repr {
            Repr::Finite { p, .. } => Rank::Finite(p.iter().filter(|&&x| x > self.tol.value()).count()),
            Repr::Geometric { .. } => Rank::Infinite,
        }
    }

    /// Number of terms used when a geometric spectrum is handled as a vector:
    /// the smallest `K` with `q^K < τ`.
    pub fn materialized_len(&self) -> usize {
        match &self.repr {
            Repr::Finite { p, .. } => p.len(),
            Repr::Geometric { q } => {
                let t = self.tol.value();
                let mut k = ((t.ln() / q.ln()).floor().max(0.0)) as usize;
                while q.powi(exponent(k)) >= t {
                    k += 1;
                }
                while k > 0 && q.powi(exponent(k - 1)) < t {
                    k -= 1;
                }
                k.max(1)
            }
        }
    }

    /// Entries as a vector (geometric spectra truncated per
    /// [`materialized_len`](Self::materialized_len)).
    pub fn materialize(&self) -> Vec<f64> {
        self.head(self.materialized_len())
    }

    /// The first `len` eigenvalues, zero-padded past a finite support.
    pub fn head(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|i| self.eigen_at(i)).collect()
    }

    /// Sum of the `k` largest eigenvalues.
    pub fn prefix_sum(&self, k: usize) -> f64 {
        match &self.repr {
            Repr::Finite { p, .. } => p.iter().take(k).sum(),
            Repr::Geometric { q } => 1.0 - q.powi(exponent(k)),
        }
    }

    /// Total variation distance between sorted spectra.
    pub fn total_variation(&self, other: &Spectrum) -> f64 {
        let len = self.materialized_len().max(other.materialized_len());
        let a = self.head(len);
        let b = other.head(len);
        let termwise: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        let residual = (self.tail_weight(len) - other.tail_weight(len)).abs();
        (0.5 * (termwise + residual)).clamp(0.0, 1.0)
    }
}

#[inline]
pub(crate) fn exponent(k: usize) -> i32 {
    i32::try_from(k).unwrap_or(i32::MAX)
}

/// A state diagonal in a base spectrum's eigenbasis: coefficient `i` sits on
/// the base's `i`-th eigenvector, so coefficients need not be sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedState {
    base: Spectrum,
    coeffs: Vec<f64>,
    raw_l1: f64,
}

impl AlignedState {
    /// Entries within tolerance below zero are clamped; the sum must be 1
    /// within the base's tolerance. Coefficients past `coeffs.len()` are zero.
    pub fn new(base: Spectrum, mut coeffs: Vec<f64>) -> Result<Self> {
        let t = base.tol.value();
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        let mut sum = 0.0;
        for (index, c) in coeffs.iter_mut().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *c < -t {
                return Err(Error::NegativeEntry { index, value: *c });
            }
            *c = c.max(0.0);
            sum += *c;
        }
        if (sum - 1.0).abs() > t {
            return Err(Error::NotNormalized { sum });
        }
        let raw_l1 = aligned_l1(&base, &coeffs);
        Ok(AlignedState { base, coeffs, raw_l1 })
    }

    pub fn base(&self) -> &Spectrum {
        &self.base
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Σ |coeff_i - p_i|` over the alignment, including the base's mass past
    /// the stored coefficients.
    pub fn raw_l1(&self) -> f64 {
        self.raw_l1
    }

    /// Trace distance to the base, `raw_l1 / 2`.
    pub fn distance_to_base(&self) -> f64 {
        0.5 * self.raw_l1
    }

    pub fn sorted_entries(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.coeffs.iter().copied().filter(|&x| x > 0.0).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// The canonical spectrum of this state.
    pub fn sorted(&self) -> Spectrum {
        Spectrum::from_sorted(self.sorted_entries(), self.base.tol)
    }
}

/// Alignment-wise ℓ1 distance of `coeffs` to `base`.
pub(crate) fn aligned_l1(base: &Spectrum, coeffs: &[f64]) -> f64 {
    let len = coeffs.len();
    let head: f64 = coeffs.iter().enumerate().map(|(i, &c)| (c - base.eigen_at(i + 1)).abs()).sum();
    // coefficients are never empty, so `len ≥ 1` and d_len is a true tail
    head + base.tail_weight(len)
}
