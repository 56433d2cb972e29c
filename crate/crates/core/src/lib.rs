//! Tight bounds for Schur-concave functions (entropies) of states that are
//! close in trace distance and partially majorized by a reference state.
//!
//! Spectra are handled in canonical non-increasing form, either as finite
//! vectors or as the geometric family `p_i = (1-q) q^{i-1}` used for thermal
//! oscillator states.
//!
//! ```
//! use majorbound::{gap_bound, EntropyFunctional, Spectrum};
//!
//! let rho = Spectrum::finite(&[0.5, 0.3, 0.2]).unwrap();
//! let b = gap_bound(&EntropyFunctional::VonNeumann, &rho, 1, 0.3).unwrap();
//! assert!((b.value - 0.336505833505).abs() < 1e-9);
//! ```

pub mod bounds;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod gibbs;
pub mod majorization;
pub mod numfmt;
pub mod oracle;
pub mod spectrum;
pub mod textio;

pub use bounds::{
    delta, gap_bound, min_f_lower_bound, mr_hat, renyi_gap, tightness_holds, vn_bound_closed, vn_m_bound, BoundResult,
    RenyiGap,
};
pub use entropy::{eta, s_hat, tail_entropy, EntropyFunctional, SubnormalizedSpectrum};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gibbs::{figure_data, gibbs_mr_hat, gibbs_spectrum, gibbs_vn_bound, EpsGrid, Figure, FigureTable, GibbsParams};
pub use majorization::{
    head_truncation, majorizes, minimal_majorizer, partially_majorizes, rho_m_eps, tail_operator, ExtremalCase,
};
pub use oracle::{
    sample_constrained, verify_dominance, verify_sigma_star, worst_gap, CandidatePool, CandidateSet, SearchBudget,
    VerificationReport,
};
pub use spectrum::{canonicalize, AlignedState, Rank, Spectrum, Tolerance};
