//! Brute-force verification on small instances.
//!
//! Candidates `σ` are generated in the eigenbasis of the base spectrum and
//! independently re-checked for membership in one of two sets before use:
//!
//! * `Tset`: coefficients agree with `ρ` on the first `m` eigenvalues, the
//!   `(m+1)`-th is at least `p_{m+1}`, and `½‖ρ - σ‖₁ ≤ ε`;
//! * `Pset`: `ρ` m-partially majorizes `σ` and `½‖ρ - σ‖₁ ≤ ε`.
//!
//! The search lower-bounds the worst entropy drop over a set; the bounds
//! module upper-bounds it. A report passes when the two brackets are
//! consistent.

use std::fmt;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bounds::{gap_bound, tightness_holds};
use crate::entropy::EntropyFunctional;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::majorization::{majorization_violation, minimal_majorizer, rho_m_eps};
use crate::spectrum::{AlignedState, Spectrum, Tolerance};

/// Largest supported finite rank and candidate support size.
pub const MAX_RANK: usize = 12;
/// Largest supported lattice resolution.
pub const MAX_RESOLUTION: usize = 400;
/// Default support size for candidates over a geometric base.
pub const GEOMETRIC_SUPPORT: usize = 12;
/// Reports pass when the margin is at least `-SLACK_FACTOR · τ`.
pub const SLACK_FACTOR: f64 = 10.0;
/// Allowed gap between bound and search optimum in attainment checks.
pub const ATTAINMENT_SLACK: f64 = 1e-6;

const REFINE_PROPOSALS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateSet {
    Tset,
    Pset,
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateSet::Tset => "tset",
            CandidateSet::Pset => "pset",
        })
    }
}

impl std::str::FromStr for CandidateSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tset" => Ok(CandidateSet::Tset),
            "pset" => Ok(CandidateSet::Pset),
            other => Err(Error::Parse(format!("unknown candidate set `{other}`"))),
        }
    }
}

/// How hard to search. Every enabled source contributes candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Lattice steps per unit of displacement (`0` disables lattice and
    /// transfer sweeps).
    pub resolution: usize,
    /// Random candidates drawn from the ε-ball.
    pub samples: usize,
    /// Local-perturbation passes around the incumbent optimum.
    pub refine_passes: usize,
    pub seed: u64,
    /// Candidate support size (defaults to the base rank, or
    /// [`GEOMETRIC_SUPPORT`] for geometric bases).
    pub max_support: Option<usize>,
    /// Always test the analytic candidates `ρ`, `ρ_m` and `ρ_{m,ε}`.
    pub include_witnesses: bool,
    /// Cap on full lattice size; the lattice resolution is lowered until the
    /// lattice fits.
    pub max_lattice_points: usize,
    pub tolerance: Tolerance,
    pub execution: Execution,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            resolution: 0,
            samples: 0,
            refine_passes: 0,
            seed: 0,
            max_support: None,
            include_witnesses: true,
            max_lattice_points: 20_000,
            tolerance: Tolerance::DEFAULT,
            execution: Execution::default(),
        }
    }
}

impl SearchBudget {
    pub fn grid(resolution: usize) -> Self {
        SearchBudget { resolution, ..Default::default() }
    }

    pub fn random(samples: usize, seed: u64) -> Self {
        SearchBudget { samples, seed, ..Default::default() }
    }

    pub fn with_refine(mut self, passes: usize) -> Self {
        self.refine_passes = passes;
        self
    }

    pub fn with_samples(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn with_witnesses(mut self, include: bool) -> Self {
        self.include_witnesses = include;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 1 {
            return Err(Error::InvalidBudget("resolution must be 0 or at least 2".into()));
        }
        if self.resolution > MAX_RESOLUTION {
            return Err(Error::InvalidBudget(format!("resolution above {MAX_RESOLUTION}")));
        }
        if self.resolution == 0 && self.samples == 0 && !self.include_witnesses {
            return Err(Error::InvalidBudget("no candidate source enabled".into()));
        }
        if let Some(l) = self.max_support {
            if l == 0 || l > MAX_RANK {
                return Err(Error::TooLarge { rank: l, cap: MAX_RANK });
            }
        }
        Ok(())
    }
}

/// Outcome of a named property check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, counterexample: Option<String>) -> Self {
        Check { name: name.into(), passed, counterexample }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Largest violation measure found (entropy drop, prefix excess, …).
    pub worst_gap: f64,
    pub witness: Option<AlignedState>,
    /// Analytic value `worst_gap` is compared against.
    pub bound: f64,
    /// `bound - worst_gap`.
    pub margin: f64,
    pub checks: Vec<Check>,
    pub candidates_tested: usize,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.margin >= -SLACK_FACTOR * self.tolerance && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} worst_gap={} bound={} margin={} candidates={}",
            if self.passed() { "PASS" } else { "FAIL" },
            crate::numfmt::g12(self.worst_gap),
            crate::numfmt::g12(self.bound),
            crate::numfmt::g12(self.margin),
            self.candidates_tested,
        );
        for c in self.failures() {
            let _ = write!(out, " failed:{}", c.name);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "passed": self.passed(),
            "worst_gap": self.worst_gap,
            "bound": self.bound,
            "margin": self.margin,
            "candidates_tested": self.candidates_tested,
            "tolerance": self.tolerance,
            "witness": self.witness.as_ref().map(|w| json!({
                "coeffs": w.coeffs(),
                "raw_l1": w.raw_l1(),
            })),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "counterexample": c.counterexample,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Alignment-wise ℓ1 distance, recomputed here rather than trusted from the
/// candidate construction.
fn l1_to_base(base: &Spectrum, c: &[f64]) -> f64 {
    match base.entries() {
        Some(p) => (0..c.len().max(p.len()))
            .map(|i| (c.get(i).copied().unwrap_or(0.0) - p.get(i).copied().unwrap_or(0.0)).abs())
            .sum(),
        None => {
            let q = base.ratio().expect("geometric base");
            let mut pi = 1.0 - q;
            let mut head = 0.0;
            for &ci in c {
                head += (ci - pi).abs();
                pi *= q;
            }
            head + q.powi(c.len() as i32)
        }
    }
}

fn sorted_desc(c: &[f64]) -> Vec<f64> {
    let mut v = c.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// The instance a search runs on.
#[derive(Debug, Clone)]
struct Frame {
    base: Spectrum,
    /// Base eigenvalues `p_1..p_L`, with the geometric tail lumped into the
    /// last slot so the center is normalized.
    center: Vec<f64>,
    m: usize,
    eps: f64,
    set: CandidateSet,
    tol: f64,
    tolerance: Tolerance,
}

impl Frame {
    fn new(s: &Spectrum, m: usize, eps: f64, budget: &SearchBudget, set: CandidateSet) -> Result<Self> {
        budget.validate()?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidEpsilon(eps));
        }
        let base = s.clone().with_tolerance(budget.tolerance);
        let center = match base.support_len() {
            Some(n) => {
                if n > MAX_RANK {
                    return Err(Error::TooLarge { rank: n, cap: MAX_RANK });
                }
                let len = budget.max_support.unwrap_or(n).max(n);
                base.head(len)
            }
            None => {
                let len = budget.max_support.unwrap_or(GEOMETRIC_SUPPORT).max(m + 2).min(MAX_RANK);
                let mut c = base.head(len - 1);
                c.push(base.tail_weight(len - 1));
                c
            }
        };
        Ok(Frame { base, center, m, eps, set, tol: budget.tolerance.value(), tolerance: budget.tolerance })
    }

    fn free_start(&self) -> usize {
        match self.set {
            CandidateSet::Tset => self.m.min(self.center.len()),
            CandidateSet::Pset => 0,
        }
    }

    fn is_member(&self, c: &[f64]) -> bool {
        let t = self.tol;
        if c.iter().any(|&x| !x.is_finite() || x < -t) {
            return false;
        }
        if (c.iter().sum::<f64>() - 1.0).abs() > t {
            return false;
        }
        if 0.5 * l1_to_base(&self.base, c) > self.eps + t {
            return false;
        }
        match self.set {
            CandidateSet::Tset => {
                let agrees =
                    (0..self.m).all(|i| (c.get(i).copied().unwrap_or(0.0) - self.base.eigen_at(i + 1)).abs() <= t);
                agrees && c.get(self.m).copied().unwrap_or(0.0) >= self.base.eigen_at(self.m + 1) - t
            }
            CandidateSet::Pset => {
                let sorted = sorted_desc(c);
                let reference = self.base.head(self.m);
                let head = &sorted[..self.m.min(sorted.len())];
                majorization_violation(&reference, head, self.tolerance).is_none()
            }
        }
    }

    fn clamp(&self, mut c: Vec<f64>) -> Vec<f64> {
        for x in &mut c {
            if *x < 0.0 && *x >= -self.tol {
                *x = 0.0;
            }
        }
        c
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Compositions of `total` into `parts` positive integers.
fn positive_compositions(total: u64, parts: u64) -> f64 {
    match (total, parts) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => binomial(total - 1, parts - 1),
    }
}

/// Integer vectors in `Z^k` with zero sum and positive part at most `r`.
fn ball_lattice_size(k: usize, r: usize) -> f64 {
    let k = k as u64;
    let mut total = 0.0;
    for p in 0..=r as u64 {
        for a in 0..=k {
            for b in 0..=(k - a) {
                total +=
                    binomial(k, a) * binomial(k - a, b) * positive_compositions(p, a) * positive_compositions(p, b);
            }
        }
    }
    total
}

/// Displacement lattice `center + (ε/r)·z` over the free coordinates.
fn lattice(frame: &Frame, resolution: usize, cap: usize) -> Vec<Vec<f64>> {
    let start = frame.free_start();
    let k = frame.center.len() - start;
    if k < 2 || frame.eps == 0.0 {
        return Vec::new();
    }
    let mut r = resolution;
    while r > 1 && ball_lattice_size(k, r) > cap as f64 {
        r -= 1;
    }
    let h = frame.eps / r as f64;
    let mut out = Vec::new();
    let mut z = vec![0i64; k];

    struct Walk<'a> {
        frame: &'a Frame,
        start: usize,
        h: f64,
        out: &'a mut Vec<Vec<f64>>,
    }

    fn walk(w: &mut Walk<'_>, z: &mut [i64], i: usize, pos: i64, neg: i64) {
        if i == z.len() {
            if pos == 0 && neg == 0 {
                let mut c = w.frame.center.clone();
                for (j, &zj) in z.iter().enumerate() {
                    c[w.start + j] += w.h * zj as f64;
                }
                w.out.push(c);
            }
            return;
        }
        let coord = w.start + i;
        let floor = (w.frame.center[coord] / w.h + 1e-9).floor() as i64;
        let mut lo = -neg.min(floor);
        if w.frame.set == CandidateSet::Tset && i == 0 {
            lo = lo.max(0);
        }
        for v in lo..=pos {
            z[i] = v;
            walk(w, z, i + 1, pos - v.max(0), neg - (-v).max(0));
        }
        z[i] = 0;
    }

    let mut w = Walk { frame, start, h, out: &mut out };
    for p in 0..=r as i64 {
        walk(&mut w, &mut z, 0, p, p);
    }
    out
}

/// Two-coordinate transfers and smallest-first tail drains at full resolution.
fn transfers(frame: &Frame, resolution: usize) -> Vec<Vec<f64>> {
    let start = frame.free_start();
    let len = frame.center.len();
    let mut out = Vec::new();
    if frame.eps == 0.0 || len - start < 2 {
        return out;
    }
    for j in 1..=resolution {
        let t = frame.eps * j as f64 / resolution as f64;
        for sink in start..len {
            for source in start..len {
                if source == sink || frame.center[source] < t {
                    continue;
                }
                let mut c = frame.center.clone();
                c[sink] += t;
                c[source] -= t;
                out.push(c);
            }
            let mut c = frame.center.clone();
            c[sink] += t;
            let mut need = t;
            for source in (start..len).rev() {
                if source == sink || need <= 0.0 {
                    continue;
                }
                let take = need.min(c[source]);
                c[source] -= take;
                need -= take;
            }
            if need <= frame.tol {
                out.push(c);
            }
        }
    }
    out
}

/// A random displacement `λ (a - b)` with `a`, `b` random distributions over
/// the free coordinates, scaled to stay inside the ball and the simplex.
fn random_move(frame: &Frame, from: &[f64], radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let start = frame.free_start();
    let len = from.len();
    let k = len - start;
    if k < 2 {
        return from.to_vec();
    }
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let sparse = rng.gen_bool(0.5);
        let mut w: Vec<f64> =
            (0..k).map(|_| if sparse && rng.gen_bool(0.6) { 0.0 } else { -(1.0 - rng.gen::<f64>()).ln() }).collect();
        if w.iter().all(|&x| x == 0.0) {
            w[rng.gen_range(0..k)] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    };
    let a = draw(rng);
    let b = draw(rng);
    let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let half_l1: f64 = 0.5 * d.iter().map(|x| x.abs()).sum::<f64>();
    let mut lambda_max = if half_l1 > 0.0 { radius / half_l1 } else { 0.0 };
    for (j, &dj) in d.iter().enumerate() {
        if dj < 0.0 {
            lambda_max = lambda_max.min(from[start + j] / -dj);
        }
    }
    let lambda = lambda_max * rng.gen::<f64>();
    let mut c = from.to_vec();
    for (j, &dj) in d.iter().enumerate() {
        c[start + j] += lambda * dj;
    }
    c
}

fn random_candidates(frame: &Frame, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    if frame.eps == 0.0 || frame.center.len() - frame.free_start() < 2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let radius = frame.eps * rng.gen::<f64>().sqrt();
            random_move(frame, &frame.center, radius, &mut rng)
        })
        .collect()
}

fn witnesses(frame: &Frame) -> Vec<Vec<f64>> {
    let s = &frame.base;
    let mut out = vec![frame.center.clone()];
    let m = frame.m;
    let mut truncated = s.head(m);
    truncated.push(s.tail_weight(m));
    out.push(truncated);
    for shift in 0..=2 {
        if let Ok((st, _)) = rho_m_eps(s, m + shift, frame.eps) {
            out.push(st.coeffs().to_vec());
        }
    }
    if m > 0 {
        if let Ok((st, _)) = rho_m_eps(s, 0, frame.eps) {
            out.push(st.coeffs().to_vec());
        }
    }
    out
}

/// A membership-verified candidate stream for one `(ρ, m, ε, set)`.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    frame: Frame,
    candidates: Vec<Vec<f64>>,
    budget: SearchBudget,
}

impl CandidatePool {
    pub fn build(s: &Spectrum, m: usize, eps: f64, budget: &SearchBudget, set: CandidateSet) -> Result<Self> {
        let frame = Frame::new(s, m, eps, budget, set)?;
        let mut raw = Vec::new();
        if budget.include_witnesses {
            raw.extend(witnesses(&frame));
        } else {
            raw.push(frame.center.clone());
        }
        if budget.resolution >= 2 {
            raw.extend(lattice(&frame, budget.resolution, budget.max_lattice_points));
            raw.extend(transfers(&frame, budget.resolution));
        }
        raw.extend(random_candidates(&frame, budget.samples, budget.seed));
        let candidates = exec::filter_map(budget.execution, raw, |c| {
            let c = frame.clamp(c);
            frame.is_member(&c).then_some(c)
        });
        Ok(CandidatePool { frame, candidates, budget: *budget })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn set(&self) -> CandidateSet {
        self.frame.set
    }

    pub fn candidates(&self) -> &[Vec<f64>] {
        &self.candidates
    }

    /// Candidates as states aligned to the base spectrum.
    pub fn states(&self) -> Vec<AlignedState> {
        self.candidates.iter().filter_map(|c| AlignedState::new(self.frame.base.clone(), c.clone()).ok()).collect()
    }

    fn aligned(&self, c: &[f64]) -> Option<AlignedState> {
        AlignedState::new(self.frame.base.clone(), c.to_vec()).ok()
    }

    /// Largest `f(ρ) - f(σ)` over the pool (plus refinement), checked against
    /// `f(ρ) - f(ρ_{m,ε})`.
    pub fn worst_gap(&self, f: &EntropyFunctional) -> Result<VerificationReport> {
        let frame = &self.frame;
        let exec = self.budget.execution;
        let reference = f.evaluate(&frame.base)?;
        let bound = gap_bound(f, &frame.base, frame.m, frame.eps)?.value;
        let gaps = exec::map(exec, &self.candidates, |c| reference - f.evaluate_weights(c));
        let (best_idx, mut worst) = exec::argmax(exec, &gaps).unwrap_or((0, f64::NEG_INFINITY));
        let mut best = self.candidates.get(best_idx).cloned();
        let mut tested = self.candidates.len();

        if let Some(start) = best.clone() {
            let mut incumbent = start;
            let mut rng = ChaCha8Rng::seed_from_u64(self.budget.seed ^ 0x9E37_79B9_7F4A_7C15);
            let mut step = frame.eps;
            for _ in 0..self.budget.refine_passes {
                let proposals: Vec<Vec<f64>> = (0..REFINE_PROPOSALS)
                    .map(|_| frame.clamp(random_move(frame, &incumbent, step, &mut rng)))
                    .collect();
                let scores = exec::map(exec, &proposals, |c| {
                    if frame.is_member(c) {
                        reference - f.evaluate_weights(c)
                    } else {
                        f64::NAN
                    }
                });
                tested += scores.iter().filter(|s| !s.is_nan()).count();
                if let Some((i, v)) = exec::argmax(exec, &scores) {
                    if v > worst {
                        worst = v;
                        incumbent = proposals[i].clone();
                    }
                }
                step *= 0.5;
            }
            best = Some(incumbent);
        }

        let margin = bound - worst;
        let t = frame.tol;
        let witness = best.as_deref().and_then(|c| self.aligned(c));
        let mut checks = vec![Check::new(
            format!("soundness[{}]", frame.set),
            worst <= bound + SLACK_FACTOR * t,
            (worst > bound + SLACK_FACTOR * t).then(|| format!("gap {worst} exceeds bound {bound} at {best:?}")),
        )];
        let attainable = match frame.set {
            CandidateSet::Tset => true,
            CandidateSet::Pset => {
                tightness_holds(&frame.base, frame.m) && frame.eps >= frame.base.tail_weight(frame.m + 1) - t
            }
        };
        if attainable && self.budget.include_witnesses {
            checks.push(Check::new(
                format!("attainment[{}]", frame.set),
                margin <= ATTAINMENT_SLACK,
                (margin > ATTAINMENT_SLACK).then(|| format!("bound {bound} not reached, best {worst}")),
            ));
        }
        Ok(VerificationReport {
            worst_gap: worst,
            witness,
            bound,
            margin,
            checks,
            candidates_tested: tested,
            tolerance: t,
        })
    }

    /// Checks `ρ_{m,ε} ≻ σ` for every candidate. `worst_gap` is the largest
    /// prefix-sum excess of a candidate over `ρ_{m,ε}` (bound 0).
    pub fn dominance(&self) -> Result<VerificationReport> {
        let frame = &self.frame;
        let t = frame.tol;
        let (extremal, _) = rho_m_eps(&frame.base, frame.m, frame.eps)?;
        let top = extremal.sorted_entries();
        let excess = exec::map(self.budget.execution, &self.candidates, |c| {
            let sorted = sorted_desc(c);
            let len = sorted.len().max(top.len());
            let (mut a, mut b) = (0.0, 0.0);
            let mut worst = f64::NEG_INFINITY;
            for k in 0..len {
                a += top.get(k).copied().unwrap_or(0.0);
                b += sorted.get(k).copied().unwrap_or(0.0);
                worst = worst.max(b - a);
            }
            worst
        });
        let (idx, worst) = exec::argmax(self.budget.execution, &excess).unwrap_or((0, f64::NEG_INFINITY));
        let violations = excess.iter().filter(|&&e| e > t).count();
        let counterexample = (violations > 0).then(|| {
            let c = &self.candidates[idx];
            let k = majorization_violation(&top, &sorted_desc(c), frame.tolerance).unwrap_or(0);
            format!("{violations} violations; worst at prefix {k}: sigma={c:?}")
        });
        Ok(VerificationReport {
            worst_gap: worst,
            witness: self.candidates.get(idx).and_then(|c| self.aligned(c)),
            bound: 0.0,
            margin: -worst,
            checks: vec![Check::new(format!("dominance[{}]", frame.set), violations == 0, counterexample)],
            candidates_tested: self.candidates.len(),
            tolerance: t,
        })
    }
}

/// Membership-verified candidates from `set` around `s`.
pub fn sample_constrained(
    s: &Spectrum,
    m: usize,
    eps: f64,
    budget: &SearchBudget,
    set: CandidateSet,
) -> Result<Vec<AlignedState>> {
    Ok(CandidatePool::build(s, m, eps, budget, set)?.states())
}

pub fn worst_gap(
    f: &EntropyFunctional,
    s: &Spectrum,
    m: usize,
    eps: f64,
    budget: &SearchBudget,
    set: CandidateSet,
) -> Result<VerificationReport> {
    CandidatePool::build(s, m, eps, budget, set)?.worst_gap(f)
}

/// Dominance of `ρ_{m,ε}` over both candidate sets, merged into one report.
pub fn verify_dominance(s: &Spectrum, m: usize, eps: f64, budget: &SearchBudget) -> Result<VerificationReport> {
    let t = CandidatePool::build(s, m, eps, budget, CandidateSet::Tset)?.dominance()?;
    let p = CandidatePool::build(s, m, eps, budget, CandidateSet::Pset)?.dominance()?;
    Ok(merge(t, p))
}

/// Combines two reports: worst of the two gaps, all checks, summed counts.
pub fn merge(a: VerificationReport, b: VerificationReport) -> VerificationReport {
    let (worse, other) = if b.margin < a.margin { (b, a) } else { (a, b) };
    let mut checks = worse.checks;
    checks.extend(other.checks);
    VerificationReport {
        checks,
        candidates_tested: worse.candidates_tested + other.candidates_tested,
        tolerance: worse.tolerance.max(other.tolerance),
        ..VerificationReport { checks: Vec::new(), ..worse }
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// A random `(p, q, m)` with `p` m-partially majorizing `q`.
fn random_triple(rng: &mut ChaCha8Rng, tol: Tolerance) -> (Spectrum, Spectrum, usize) {
    let m = rng.gen_range(0..=2usize);
    let n = rng.gen_range(1..=8usize);
    let p = crate::spectrum::canonicalize(&random_distribution(rng, n), tol).expect("normalized");
    for _ in 0..1000 {
        let nq = rng.gen_range(1..=8usize);
        let q = crate::spectrum::canonicalize(&random_distribution(rng, nq), tol).expect("normalized");
        if crate::majorization::partially_majorizes(&p, &q, m) {
            return (p, q, m);
        }
    }
    // mixing with the uniform distribution is always majorized
    let lambda = rng.gen::<f64>();
    let len = p.support_len().unwrap_or(1).max(2);
    let mixed: Vec<f64> = p.head(len).iter().map(|&x| lambda * x + (1.0 - lambda) / len as f64).collect();
    let q = crate::spectrum::canonicalize(&mixed, tol).expect("normalized");
    (p, q, m)
}

/// Checks the majorizer postconditions on `budget.samples` random triples:
/// (i) agreement with `p` on `1..m` and coefficient `m+1 ≥ p_{m+1}`,
/// (ii) `σ* ≻ q`, (iii) `‖p - σ*‖₁ ≤ ‖p - q‖₁` (sorted).
pub fn verify_sigma_star(budget: &SearchBudget) -> Result<VerificationReport> {
    if budget.samples == 0 {
        return Err(Error::InvalidBudget("sigma-star verification needs samples".into()));
    }
    let tol = budget.tolerance;
    let t = tol.value();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let triples: Vec<_> = (0..budget.samples).map(|_| random_triple(&mut rng, tol)).collect();

    struct Outcome {
        membership: bool,
        dominates: bool,
        excess: f64,
        star: AlignedState,
    }

    let outcomes = exec::map(budget.execution, &triples, |(p, q, m)| {
        let star = minimal_majorizer(p, q, *m)?;
        let c = star.coeffs();
        let agrees = (0..*m).all(|i| (c.get(i).copied().unwrap_or(0.0) - p.eigen_at(i + 1)).abs() <= t);
        let membership = agrees && c.get(*m).copied().unwrap_or(0.0) >= p.eigen_at(*m + 1) - t;
        let dominates = majorization_violation(&sorted_desc(c), &q.materialize(), tol).is_none();
        let reference = 2.0 * p.total_variation(q);
        let excess = l1_to_base(p, c) - reference;
        Ok(Outcome { membership, dominates, excess, star })
    });
    let outcomes: Vec<Outcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let describe = |pred: &dyn Fn(&Outcome) -> bool| -> (bool, Option<String>) {
        match outcomes.iter().zip(&triples).find(|(o, _)| !pred(o)) {
            None => (true, None),
            Some((o, (p, q, m))) => (
                false,
                Some(format!("p={:?} q={:?} m={m} sigma*={:?}", p.materialize(), q.materialize(), o.star.coeffs())),
            ),
        }
    };
    let (ok1, ce1) = describe(&|o| o.membership);
    let (ok2, ce2) = describe(&|o| o.dominates);
    let (ok3, ce3) = describe(&|o| o.excess <= t);
    let excesses: Vec<f64> = outcomes.iter().map(|o| o.excess).collect();
    let (idx, worst) = exec::argmax(budget.execution, &excesses).unwrap_or((0, 0.0));
    Ok(VerificationReport {
        worst_gap: worst,
        witness: outcomes.get(idx).map(|o| o.star.clone()),
        bound: 0.0,
        margin: -worst,
        checks: vec![
            Check::new("sigma_star_membership", ok1, ce1),
            Check::new("sigma_star_majorizes", ok2, ce2),
            Check::new("sigma_star_distance", ok3, ce3),
        ],
        candidates_tested: outcomes.len(),
        tolerance: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: &[f64]) -> Spectrum {
        Spectrum::finite(v).unwrap()
    }

    const VN: EntropyFunctional = EntropyFunctional::VonNeumann;

    #[test]
    fn lattice_size_counts_small_cases() {
        // k = 2: z = (j, -j), |j| ≤ r
        assert_eq!(ball_lattice_size(2, 3), 7.0);
        // brute-force count for k = 3, r = 2
        let mut count = 0;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let c = -a - b;
                let pos: i64 = [a, b, c].iter().map(|x| x.max(&0)).sum();
                if pos <= 2 {
                    count += 1;
                }
            }
        }
        assert_eq!(ball_lattice_size(3, 2), count as f64);
    }

    #[test]
    fn zero_radius_yields_only_the_state() {
        let s = fin(&[0.5, 0.5]);
        let pool =
            CandidatePool::build(&s, 1, 0.0, &SearchBudget::grid(20).with_samples(50, 1), CandidateSet::Tset).unwrap();
        assert!(pool.candidates().iter().all(|c| c == &vec![0.5, 0.5]));
    }

    #[test]
    fn tset_members_fix_the_head() {
        let s = fin(&[0.5, 0.3, 0.2]);
        let states =
            sample_constrained(&s, 1, 0.2, &SearchBudget::grid(50).with_samples(200, 3), CandidateSet::Tset).unwrap();
        assert!(states.len() > 10);
        for st in states {
            assert!((st.coeffs()[0] - 0.5).abs() <= 1e-9);
            assert!(st.coeffs()[1] >= 0.3 - 1e-9);
            assert!(st.distance_to_base() <= 0.2 + 1e-9);
        }
    }

    #[test]
    fn pset_contains_head_truncation_when_tight() {
        let s = fin(&[0.6, 0.25, 0.15]);
        let pool = CandidatePool::build(&s, 1, 1.0, &SearchBudget::default(), CandidateSet::Pset).unwrap();
        assert!(pool.candidates().iter().any(|c| c == &vec![0.6, 0.4]));
        // without the tightness condition the truncation leaves the set
        let s = fin(&[0.25; 4]);
        let pool = CandidatePool::build(&s, 2, 1.0, &SearchBudget::default(), CandidateSet::Pset).unwrap();
        assert!(!pool.candidates().iter().any(|c| c == &vec![0.25, 0.25, 0.5]));
    }

    #[test]
    fn tight_case_is_attained() {
        let s = fin(&[0.6, 0.25, 0.15]);
        let r = worst_gap(&VN, &s, 1, 1.0, &SearchBudget::grid(100), CandidateSet::Pset).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let expected = crate::bounds::vn_m_bound(&s, 1);
        assert!((r.worst_gap - expected).abs() < 1e-12);
        let w = r.witness.unwrap().sorted_entries();
        assert!((w[0] - 0.6).abs() < 1e-12 && (w[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn search_stays_below_the_bound() {
        let s = fin(&[0.4, 0.3, 0.2, 0.1]);
        let budget = SearchBudget::grid(200).with_samples(2000, 7).with_refine(8);
        for set in [CandidateSet::Tset, CandidateSet::Pset] {
            let r = worst_gap(&VN, &s, 1, 0.15, &budget, set).unwrap();
            assert!(r.passed(), "{set}: {}", r.summary());
            assert!(r.worst_gap <= 0.269_441_472_053_126 + 1e-8);
        }
    }

    #[test]
    fn dominance_holds_on_grid() {
        let s = fin(&[0.5, 0.3, 0.2]);
        let r = verify_dominance(&s, 1, 0.2, &SearchBudget::grid(100)).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.checks.len(), 2);
    }

    #[test]
    fn zero_epsilon_gap_is_zero() {
        let s = fin(&[0.4, 0.3, 0.2, 0.1]);
        let r = worst_gap(&VN, &s, 0, 0.0, &SearchBudget::grid(10), CandidateSet::Pset).unwrap();
        assert_eq!(r.worst_gap, 0.0);
    }

    #[test]
    fn sigma_star_sweep_passes() {
        let r = verify_sigma_star(&SearchBudget::random(500, 11)).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_given_budget() {
        let s = fin(&[0.45, 0.25, 0.2, 0.1]);
        let b = SearchBudget::grid(30).with_samples(300, 5).with_refine(4);
        let a = worst_gap(&VN, &s, 1, 0.1, &b, CandidateSet::Pset).unwrap();
        let c = worst_gap(&VN, &s, 1, 0.1, &b.with_execution(Execution::Sequential), CandidateSet::Pset).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_oversized_inputs() {
        let big = fin(&[1.0 / 13.0; 13]);
        assert!(matches!(
            CandidatePool::build(&big, 0, 0.1, &SearchBudget::grid(10), CandidateSet::Tset),
            Err(Error::TooLarge { .. })
        ));
        assert!(SearchBudget::grid(1).validate().is_err());
        assert!(SearchBudget::grid(401).validate().is_err());
    }

    #[test]
    fn report_json_and_summary() {
        let s = fin(&[0.5, 0.3, 0.2]);
        let r = worst_gap(&VN, &s, 1, 0.3, &SearchBudget::grid(20), CandidateSet::Tset).unwrap();
        let j = r.to_json();
        assert_eq!(j["passed"], serde_json::Value::Bool(true));
        assert!(!j["checks"].as_array().unwrap().is_empty());
        assert!(r.summary().starts_with("PASS"));
    }
}
