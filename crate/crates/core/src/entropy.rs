//! Schur-concave entropies on spectra and the homogeneous extension of the
//! von Neumann entropy to subnormalized spectra. All logarithms are natural.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::majorization::tail_operator;
use crate::spectrum::{exponent, Spectrum, Tolerance};

/// `η(x) = -x ln x`, with `η(x) = 0` for `x ≤ 0`.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// [`eta`] that rejects inputs below `-τ`.
pub fn checked_eta(x: f64, tol: Tolerance) -> Result<f64> {
    if x < -tol.value() || x.is_nan() {
        Err(Error::NegativeInput(x))
    } else {
        Ok(eta(x))
    }
}

/// Natural-log binary entropy `h(q) = η(q) + η(1-q)`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if q > 0.0 && q < 1.0 {
        Ok(eta(q) + eta(1.0 - q))
    } else {
        Err(Error::OutOfRange { what: "q", value: q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyFunctional {
    VonNeumann,
    /// `ln(Σ p_i^α) / (1-α)`
    Renyi {
        alpha: f64,
    },
    /// `(Σ p_i^α - 1) / (1-α)`
    Tsallis {
        alpha: f64,
    },
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha > 0.0 && (alpha - 1.0).abs() > Tolerance::DEFAULT.value() {
        Ok(alpha)
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

impl EntropyFunctional {
    pub fn renyi(alpha: f64) -> Result<Self> {
        check_alpha(alpha).map(|alpha| EntropyFunctional::Renyi { alpha })
    }

    pub fn tsallis(alpha: f64) -> Result<Self> {
        check_alpha(alpha).map(|alpha| EntropyFunctional::Tsallis { alpha })
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            EntropyFunctional::VonNeumann => None,
            EntropyFunctional::Renyi { alpha } | EntropyFunctional::Tsallis { alpha } => Some(alpha),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.alpha() {
            Some(alpha) => check_alpha(alpha).map(|_| ()),
            None => Ok(()),
        }
    }

    /// Value on a spectrum. Geometric spectra use closed forms.
    pub fn evaluate(&self, s: &Spectrum) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            EntropyFunctional::VonNeumann => von_neumann(s),
            EntropyFunctional::Renyi { alpha } => power_sum(s, alpha).ln() / (1.0 - alpha),
            EntropyFunctional::Tsallis { alpha } => (power_sum(s, alpha) - 1.0) / (1.0 - alpha),
        })
    }

    /// Value on a raw non-negative weight vector summing to one (order and
    /// zeros are irrelevant). Used on hot paths that skip canonicalization.
    pub fn evaluate_weights(&self, w: &[f64]) -> f64 {
        match *self {
            EntropyFunctional::VonNeumann => w.iter().map(|&x| eta(x)).sum(),
            EntropyFunctional::Renyi { alpha } => raw_power_sum(w, alpha).ln() / (1.0 - alpha),
            EntropyFunctional::Tsallis { alpha } => (raw_power_sum(w, alpha) - 1.0) / (1.0 - alpha),
        }
    }
}

impl fmt::Display for EntropyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyFunctional::VonNeumann => f.write_str("vn"),
            EntropyFunctional::Renyi { alpha } => write!(f, "renyi:{alpha}"),
            EntropyFunctional::Tsallis { alpha } => write!(f, "tsallis:{alpha}"),
        }
    }
}

impl FromStr for EntropyFunctional {
    type Err = Error;

    /// Accepts `vn`, `renyi:<α>` and `tsallis:<α>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("vn") {
            return Ok(EntropyFunctional::VonNeumann);
        }
        let (name, alpha) = s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown functional `{s}`")))?;
        let alpha: f64 = alpha.trim().parse().map_err(|_| Error::Parse(format!("bad alpha in `{s}`")))?;
        match name.trim().to_ascii_lowercase().as_str() {
            "renyi" => EntropyFunctional::renyi(alpha),
            "tsallis" => EntropyFunctional::tsallis(alpha),
            _ => Err(Error::Parse(format!("unknown functional `{s}`"))),
        }
    }
}

fn von_neumann(s: &Spectrum) -> f64 {
    match (s.entries(), s.ratio()) {
        (Some(p), _) => p.iter().map(|&x| eta(x)).sum(),
        (None, Some(q)) => geometric_entropy(q),
        (None, None) => unreachable!("spectrum is finite or geometric"),
    }
}

/// `S = h(q)/(1-q)` for the geometric spectrum with ratio `q`.
pub(crate) fn geometric_entropy(q: f64) -> f64 {
    (eta(q) + eta(1.0 - q)) / (1.0 - q)
}

fn power_sum(s: &Spectrum, alpha: f64) -> f64 {
    match (s.entries(), s.ratio()) {
        (Some(p), _) => raw_power_sum(p, alpha),
        // Σ ((1-q) q^(i-1))^α = (1-q)^α / (1 - q^α)
        (None, Some(q)) => (1.0 - q).powf(alpha) / (1.0 - q.powf(alpha)),
        (None, None) => unreachable!("spectrum is finite or geometric"),
    }
}

fn raw_power_sum(w: &[f64], alpha: f64) -> f64 {
    w.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum()
}

/// A non-negative sequence of total weight at most one, such as the tail
/// operator left after removing the `m` largest eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub enum SubnormalizedSpectrum {
    Finite {
        weights: Vec<f64>,
        trace: f64,
    },
    /// Entries `(1-q) q^(i-1)` for `i > offset`; trace `q^offset`.
    GeometricTail {
        q: f64,
        offset: usize,
    },
}

impl SubnormalizedSpectrum {
    /// Fails on negative or non-finite weights, or a trace above `1 + τ`.
    pub fn from_weights(weights: Vec<f64>, tol: Tolerance) -> Result<Self> {
        let mut trace = 0.0;
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { index, value: w });
            }
            trace += w;
        }
        if trace > 1.0 + tol.value() {
            return Err(Error::OutOfRange { what: "trace", value: trace });
        }
        Ok(SubnormalizedSpectrum::Finite { weights, trace })
    }

    pub fn trace(&self) -> f64 {
        match *self {
            SubnormalizedSpectrum::Finite { trace, .. } => trace,
            SubnormalizedSpectrum::GeometricTail { q, offset } => q.powi(exponent(offset)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SubnormalizedSpectrum::Finite { weights, .. } => weights.iter().all(|&w| w == 0.0),
            SubnormalizedSpectrum::GeometricTail { .. } => false,
        }
    }
}

/// Homogeneous extension `Ŝ(w) = Σ η(w_i) - η(Σ w_i)`; zero for the zero
/// operator.
pub fn s_hat(w: &SubnormalizedSpectrum) -> f64 {
    match w {
        SubnormalizedSpectrum::Finite { weights, trace } => {
            if weights.is_empty() {
                return 0.0;
            }
            let value = weights.iter().map(|&x| eta(x)).sum::<f64>() - eta(*trace);
            value.max(0.0)
        }
        SubnormalizedSpectrum::GeometricTail { q, offset } => q.powi(exponent(*offset)) * geometric_entropy(*q),
    }
}

/// `Ŝ(ρ^[m])`: the extended entropy of the spectrum with its `m` largest
/// eigenvalues removed.
pub fn tail_entropy(s: &Spectrum, m: usize) -> f64 {
    s_hat(&tail_operator(s, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: &[f64]) -> Spectrum {
        Spectrum::finite(v).unwrap()
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0), 0.0);
        assert_eq!(eta(1.0), 0.0);
        assert!((eta(0.5) - 0.5 * LN2).abs() < 1e-15);
        assert!(checked_eta(-1e-3, Tolerance::DEFAULT).is_err());
        assert_eq!(checked_eta(-1e-12, Tolerance::DEFAULT), Ok(0.0));
    }

    #[test]
    fn evaluate_examples() {
        let half = fin(&[0.5, 0.5]);
        assert!((EntropyFunctional::VonNeumann.evaluate(&half).unwrap() - LN2).abs() < 1e-15);
        let r2 = EntropyFunctional::renyi(2.0).unwrap();
        assert!((r2.evaluate(&half).unwrap() - LN2).abs() < 1e-15);
        let g = Spectrum::geometric(2.0 / 3.0).unwrap();
        let s = EntropyFunctional::VonNeumann.evaluate(&g).unwrap();
        assert!((s - 1.909_542_504_884_438_5).abs() < 1e-12);
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert_eq!(EntropyFunctional::renyi(1.0), Err(Error::InvalidAlpha(1.0)));
        assert!(EntropyFunctional::tsallis(0.0).is_err());
        assert!(EntropyFunctional::tsallis(-2.0).is_err());
        let bad = EntropyFunctional::Renyi { alpha: 1.0 };
        assert!(bad.evaluate(&fin(&[1.0])).is_err());
    }

    #[test]
    fn s_hat_examples() {
        let w = SubnormalizedSpectrum::from_weights(vec![0.3, 0.2], Tolerance::DEFAULT).unwrap();
        assert!((s_hat(&w) - 0.336_505_833_504_628_2).abs() < 1e-15);
        let empty = SubnormalizedSpectrum::from_weights(vec![], Tolerance::DEFAULT).unwrap();
        assert_eq!(s_hat(&empty), 0.0);
        let full = SubnormalizedSpectrum::from_weights(vec![0.5, 0.3, 0.2], Tolerance::DEFAULT).unwrap();
        let s = EntropyFunctional::VonNeumann.evaluate(&fin(&[0.5, 0.3, 0.2])).unwrap();
        assert!((s_hat(&full) - s).abs() < 1e-15);
        assert!(SubnormalizedSpectrum::from_weights(vec![0.7, 0.7], Tolerance::DEFAULT).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert!((binary_entropy(0.5).unwrap() - LN2).abs() < 1e-15);
        assert!((binary_entropy(0.3).unwrap() - binary_entropy(0.7).unwrap()).abs() < 1e-15);
        assert!((binary_entropy(2.0 / 3.0).unwrap() - 0.636_514_168_294_812_8).abs() < 1e-15);
        assert!(binary_entropy(0.0).is_err());
        assert!(binary_entropy(1.0).is_err());
    }

    #[test]
    fn tail_entropy_examples() {
        assert!((tail_entropy(&fin(&[0.5, 0.3, 0.2]), 1) - 0.336_505_833_504_628_2).abs() < 1e-15);
        let g = Spectrum::geometric(0.5).unwrap();
        assert!((tail_entropy(&g, 3) - 0.125 * 2.0 * LN2).abs() < 1e-15);
        let s = fin(&[0.4, 0.3, 0.2, 0.1]);
        assert_eq!(tail_entropy(&s, 4), 0.0);
        let full = EntropyFunctional::VonNeumann.evaluate(&s).unwrap();
        assert!((tail_entropy(&s, 0) - full).abs() < 1e-15);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["vn", "renyi:2", "tsallis:0.5"] {
            let f: EntropyFunctional = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert!("renyi:1".parse::<EntropyFunctional>().is_err());
        assert!("shannon".parse::<EntropyFunctional>().is_err());
        assert!("renyi:x".parse::<EntropyFunctional>().is_err());
    }
}
