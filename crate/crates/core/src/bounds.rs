//! Upper bounds on `f(ρ) - f(σ)` over states `σ` that are m-partially
//! majorized by `ρ` and within trace distance `ε` of it.
//!
//! The generic bound for any Schur-concave `f` is `f(ρ) - f(ρ_{m,ε})`. For the
//! von Neumann entropy the same quantity has a closed form in terms of the
//! tail operators `ρ^[k]`; both routes are exposed so they can be checked
//! against each other.

use crate::entropy::{eta, tail_entropy, EntropyFunctional};
use crate::error::{Error, Result};
use crate::majorization::{clamp_epsilon, classify, rho_m_eps, ExtremalCase};
use crate::spectrum::{exponent, AlignedState, Rank, Spectrum};

/// A bound value together with the extremal state that witnesses it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub case: ExtremalCase,
    pub extremal: AlignedState,
}

/// `f(ρ) - f(ρ_{m,ε})`; `m = 0` bounds the plain ε-ball.
pub fn gap_bound(f: &EntropyFunctional, s: &Spectrum, m: usize, eps: f64) -> Result<BoundResult> {
    let reference = f.evaluate(s)?;
    let (extremal, case) = rho_m_eps(s, m, eps)?;
    let value = match case {
        ExtremalCase::Identity => 0.0,
        _ => reference - f.evaluate_weights(extremal.coeffs()),
    };
    Ok(BoundResult { value, case, extremal })
}

/// `f(ρ_{m,ε})`, the lower bound on `f(σ)` over the same constraint set.
pub fn min_f_lower_bound(f: &EntropyFunctional, s: &Spectrum, m: usize, eps: f64) -> Result<f64> {
    let (extremal, case) = rho_m_eps(s, m, eps)?;
    match case {
        ExtremalCase::Identity => f.evaluate(s),
        _ => {
            f.evaluate(s)?;
            Ok(f.evaluate_weights(extremal.coeffs()))
        }
    }
}

/// Index `ℓ` whose tail `ρ^[ℓ-1]` enters the closed form below `d_{m+1}`:
/// `n` when `ε ≤ p_n` on a finite spectrum, `ℓ_ε` otherwise.
fn drain_index(s: &Spectrum, eps: f64) -> Result<usize> {
    let t = s.tolerance().value();
    match s.support_len() {
        Some(n) if eps <= s.eigen_at(n) + t => Ok(n),
        _ => s.ell_epsilon(eps),
    }
}

fn delta_at(s: &Spectrum, m: usize, eps: f64, ell: usize) -> f64 {
    let head = s.eigen_at(m + 1);
    let drained = s.tail_weight(ell - 1);
    eta(head) + eta(drained) - eta(head + eps) - eta(drained - eps)
}

/// `Δ(ρ,m,ε) = η(p_{m+1}) + η(d_{ℓ-1}) - η(p_{m+1}+ε) - η(d_{ℓ-1}-ε)`,
/// defined for `ε < d_{m+1}`.
pub fn delta(s: &Spectrum, m: usize, eps: f64) -> Result<f64> {
    let eps = clamp_epsilon(eps, s.tolerance())?;
    let tail = s.tail_weight(m + 1);
    if eps >= tail + s.tolerance().value() {
        return Err(Error::BranchViolation { eps, tail });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let ell = drain_index(s, eps)?;
    Ok(delta_at(s, m, eps, ell))
}

/// Closed-form von Neumann bound `B(ρ,m,ε)`: `Ŝ(ρ^[m])` when `ε ≥ d_{m+1}`,
/// otherwise `Δ(ρ,m,ε) + Ŝ(ρ^[ℓ_ε-1])`.
pub fn vn_bound_closed(s: &Spectrum, m: usize, eps: f64) -> Result<f64> {
    let eps = clamp_epsilon(eps, s.tolerance())?;
    Ok(match classify(s, m, eps)? {
        ExtremalCase::Identity => 0.0,
        ExtremalCase::CaseF1 => tail_entropy(s, m),
        ExtremalCase::CaseF2 | ExtremalCase::CaseF3 { .. } => {
            let ell = drain_index(s, eps)?;
            delta_at(s, m, eps, ell) + tail_entropy(s, ell - 1)
        }
    })
}

/// `Ŝ(ρ^[m])`: the von Neumann bound under m-partial majorization alone.
pub fn vn_m_bound(s: &Spectrum, m: usize) -> f64 {
    tail_entropy(s, m)
}

/// Rényi entropy drop from `ρ` to its head truncation `ρ_m`, together with the
/// `ln(1+x) ≤ x` relaxation of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiGap {
    pub exact: f64,
    pub loose: f64,
}

pub fn renyi_gap(s: &Spectrum, m: usize, alpha: f64) -> Result<RenyiGap> {
    EntropyFunctional::renyi(alpha)?;
    let tail_mass = s.tail_weight(m);
    let (head_pow, tail_pow) = match (s.entries(), s.ratio()) {
        (Some(p), _) => {
            let pow = |x: &f64| x.powf(alpha);
            let split = m.min(p.len());
            (p[..split].iter().map(pow).sum::<f64>(), p[split..].iter().map(pow).sum::<f64>())
        }
        (None, Some(q)) => {
            let scale = (1.0 - q).powf(alpha) / (1.0 - q.powf(alpha));
            let cut = q.powf(alpha).powi(exponent(m));
            (scale * (1.0 - cut), scale * cut)
        }
        (None, None) => unreachable!("spectrum is finite or geometric"),
    };
    if tail_pow == 0.0 {
        return Ok(RenyiGap { exact: 0.0, loose: 0.0 });
    }
    let lumped = tail_mass.powf(alpha);
    let (x, scale) = if alpha < 1.0 {
        ((tail_pow - lumped) / (head_pow + lumped), 1.0 / (1.0 - alpha))
    } else {
        ((lumped - tail_pow) / (head_pow + tail_pow), 1.0 / (alpha - 1.0))
    };
    Ok(RenyiGap { exact: scale * x.ln_1p(), loose: scale * x })
}

/// Whether `p_1 + … + p_m ≥ 1 - p_m`, the condition under which `ρ_m` is itself
/// m-partially majorized by `ρ` and the m-partial bound is attained.
pub fn tightness_holds(s: &Spectrum, m: usize) -> bool {
    m >= 1 && s.tail_weight(m) <= s.eigen_at(m) + s.tolerance().value()
}

const RANK_SCAN_CAP: usize = 1 << 26;

/// Upper bound `m̂r_ε = min{m ≥ 1 : Ŝ(ρ^[m]) ≤ ε S(ρ)} + 1` on the
/// ε-sufficient majorization rank. At `ε = 0` this is the rank.
pub fn mr_hat(s: &Spectrum, eps: f64) -> Result<Rank> {
    let rank = s.rank();
    if rank == Rank::Finite(1) {
        return Err(Error::PureState);
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidEpsilon(eps));
    }
    if eps == 0.0 {
        return Ok(rank);
    }
    let entropy = EntropyFunctional::VonNeumann.evaluate(s)?;
    let threshold = eps * entropy + s.tolerance().value();
    (1..RANK_SCAN_CAP)
        .find(|&m| tail_entropy(s, m) <= threshold)
        .map(|m| Rank::Finite(m + 1))
        .ok_or(Error::Unbounded { eps, cap: RANK_SCAN_CAP })
}
