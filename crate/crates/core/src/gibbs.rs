//! Thermal state of a quantum oscillator with mean photon number `N`: the
//! geometric spectrum with ratio `q = N/(N+1)`. Closed forms for the entropy
//! bound and the sufficient-majorization-rank bound, and the tables behind the
//! bound and rank plots.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::entropy::{eta, geometric_entropy};
use crate::error::{Error, Result};
use crate::numfmt::g12;
use crate::spectrum::{exponent, Spectrum, Tolerance};

/// Relative tolerance under which `log_q ε` is treated as an integer.
const EXACT_POWER_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsParams {
    mean_quanta: f64,
    q: f64,
}

impl GibbsParams {
    pub fn new(mean_quanta: f64) -> Result<Self> {
        if !(mean_quanta.is_finite() && mean_quanta > 0.0) {
            return Err(Error::OutOfRange { what: "N", value: mean_quanta });
        }
        Ok(GibbsParams { mean_quanta, q: mean_quanta / (mean_quanta + 1.0) })
    }

    pub fn mean_quanta(&self) -> f64 {
        self.mean_quanta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::geometric(self.q).expect("q = N/(N+1) lies in (0,1)")
    }

    /// `S(ρ_N) = h(q)/(1-q)`.
    pub fn entropy(&self) -> f64 {
        geometric_entropy(self.q)
    }
}

pub fn gibbs_spectrum(mean_quanta: f64) -> Result<Spectrum> {
    GibbsParams::new(mean_quanta).map(|g| g.spectrum())
}

/// Integer and fractional parts of `log_q ε`, snapping near-integers down to
/// an exact integer.
pub fn log_q_parts(q: f64, eps: f64) -> (u64, f64) {
    let l = eps.ln() / q.ln();
    let nearest = l.round();
    if (l - nearest).abs() <= EXACT_POWER_RTOL * l.abs().max(1.0) {
        return (nearest.max(0.0) as u64, 0.0);
    }
    let whole = l.floor();
    (whole.max(0.0) as u64, l - whole)
}

fn check_eps(eps: f64) -> Result<f64> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(eps)
    } else {
        Err(Error::OutOfRange { what: "epsilon", value: eps })
    }
}

/// `B(ρ_N, m, ε)`: `q^m S(ρ_N)` when `ε ≥ q^{m+1}`, otherwise
/// `Δ(ρ_N,m,ε) + ε q^{-{log_q ε}} S(ρ_N)`.
pub fn gibbs_vn_bound(mean_quanta: f64, m: usize, eps: f64) -> Result<f64> {
    let g = GibbsParams::new(mean_quanta)?;
    let eps = check_eps(eps)?;
    let q = g.q;
    let entropy = g.entropy();
    let qm = q.powi(exponent(m));
    if eps >= q * qm - Tolerance::DEFAULT.value() {
        return Ok(qm * entropy);
    }
    let (_, frac) = log_q_parts(q, eps);
    // ε q^{-{log_q ε}} = q^{[log_q ε]}: the mass drained from the tail
    let drained = eps * q.powf(-frac);
    let head = qm * (1.0 - q);
    let delta = eta(head) + eta(drained) - eta(head + eps) - eta(drained - eps);
    Ok(delta + drained * entropy)
}

/// `m̂r_ε(ρ_N) = min{m ≥ 1 : q^m ≤ ε} + 1`.
pub fn gibbs_mr_hat(mean_quanta: f64, eps: f64) -> Result<u64> {
    let g = GibbsParams::new(mean_quanta)?;
    let eps = check_eps(eps)?;
    let (whole, frac) = log_q_parts(g.q, eps);
    let min_m = if frac == 0.0 { whole } else { whole + 1 };
    Ok(min_m.max(1) + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// `ε ↦ B(ρ_N, m, ε)` for `N = 2`.
    Fig1,
    /// `ε ↦ B(ρ_N, m, ε)` for `N = 10`.
    Fig2,
    /// `ε ↦ m̂r_ε(ρ_N)` for `N ∈ {1, 10, 100}`.
    Fig3,
}

pub const FIGURE_MS: [usize; 6] = [0, 1, 2, 3, 10, 20];
pub const FIGURE_NS: [f64; 3] = [1.0, 10.0, 100.0];

impl Figure {
    pub fn default_grid(self) -> EpsGrid {
        match self {
            Figure::Fig1 | Figure::Fig2 => EpsGrid::Linear { points: 200 },
            Figure::Fig3 => EpsGrid::Log { points: 200, decades: 6.0 },
        }
    }

    /// Mean photon number for the bound plots.
    pub fn mean_quanta(self) -> Option<f64> {
        match self {
            Figure::Fig1 => Some(2.0),
            Figure::Fig2 => Some(10.0),
            Figure::Fig3 => None,
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(Error::Parse(format!("unknown figure `{other}`"))),
        }
    }
}

/// Sample points for `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsGrid {
    /// `ε_i = i / points`, `i = 1..=points`.
    Linear { points: usize },
    /// `points` log-spaced values from `10^-decades` to 1.
    Log { points: usize, decades: f64 },
}

impl EpsGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            EpsGrid::Linear { points } if points >= 1 => Ok((1..=points).map(|i| i as f64 / points as f64).collect()),
            EpsGrid::Log { points, decades } if points >= 2 && decades > 0.0 => {
                Ok((0..points).map(|i| 10f64.powf(-decades * (1.0 - i as f64 / (points - 1) as f64))).collect())
            }
            _ => Err(Error::Parse(format!("invalid grid {self:?}"))),
        }
    }
}

/// A numeric table with a header row, rendered as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| g12(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn figure_data(which: Figure, grid: EpsGrid) -> Result<FigureTable> {
    let eps = grid.values()?;
    match which.mean_quanta() {
        Some(n) => {
            let mut header = vec!["eps".to_string()];
            header.extend(FIGURE_MS.iter().map(|m| format!("m{m}")));
            let rows = eps
                .iter()
                .map(|&e| {
                    let mut row = vec![e];
                    for &m in &FIGURE_MS {
                        row.push(gibbs_vn_bound(n, m, e)?);
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            Ok(FigureTable { header, rows })
        }
        None => {
            let mut header = vec!["eps".to_string()];
            header.extend(FIGURE_NS.iter().map(|n| format!("N{n}")));
            let rows = eps
                .iter()
                .map(|&e| {
                    let mut row = vec![e];
                    for &n in &FIGURE_NS {
                        row.push(gibbs_mr_hat(n, e)? as f64);
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            Ok(FigureTable { header, rows })
        }
    }
}
