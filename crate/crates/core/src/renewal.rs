//! The renewal sequence `p_0 = 1`, `p_n = Σ_{i=1}^n q_i p_{n-i}`, the
//! convolution identities it satisfies, and two-sided limit brackets.

use serde::Serialize;
use thiserror::Error;

use crate::dist::{DistError, IncrementDistribution};
use crate::scalar::Scalar;
use crate::seq::{convolve, delta, identity_seq, ones_seq, SeqError, Sequence};

/// Window start is this multiple of the cutoff `M` in [`estimate_limit`].
pub const WINDOW_RATIO: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenewalError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("identity checks need exact rational arithmetic")]
    ExactModeRequired,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("budget of {budget} terms exhausted before reaching tolerance")]
    BudgetExhausted { budget: usize, partial: Box<LimitEstimate> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenewalSequence<S> {
    dist: IncrementDistribution,
    terms: Sequence<S>,
    error_bound: f64,
}

impl<S: Scalar> RenewalSequence<S> {
    pub fn dist(&self) -> &IncrementDistribution {
        &self.dist
    }

    pub fn terms(&self) -> &Sequence<S> {
        &self.terms
    }

    pub fn last_index(&self) -> usize {
        self.terms.last_index()
    }

    pub fn get(&self, n: usize) -> Result<&S, SeqError> {
        self.terms.get(n)
    }

    /// Per-term bound on accumulated rounding: `N·ε` in float mode, 0 exact.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }
}

/// Runs the recurrence through index `upto`.
pub fn compute_renewal<S: Scalar>(
    dist: &IncrementDistribution,
    upto: usize,
) -> Result<RenewalSequence<S>, RenewalError> {
    let q: Vec<S> = dist.weights_prefix(upto)?;
    let last_q = q.len() - 1;
    let mut p: Vec<S> = Vec::with_capacity(upto + 1);
    p.push(S::one());
    for n in 1..=upto {
        let hi = n.min(last_q);
        let term = if hi >= 1 {
            S::cauchy_term(&q, &p, 1, hi, n)
        } else {
            S::zero()
        };
        p.push(term);
    }
    let error_bound = if S::EXACT {
        0.0
    } else {
        upto as f64 * f64::EPSILON
    };
    Ok(RenewalSequence {
        dist: dist.clone(),
        terms: Sequence::new(p)?,
        error_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First index where the two sides differ.
    pub first_mismatch: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub upto: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn compare<S: Scalar>(name: &'static str, lhs: &Sequence<S>, rhs: &Sequence<S>) -> IdentityCheck {
    let first_mismatch = lhs
        .terms()
        .iter()
        .zip(rhs.terms())
        .position(|(a, b)| a != b)
        .or_else(|| (lhs.len() != rhs.len()).then(|| lhs.len().min(rhs.len())));
    IdentityCheck {
        name,
        passed: first_mismatch.is_none(),
        first_mismatch,
    }
}

/// Checks, bit-exactly on the stored prefix:
/// `p = I + p*q`, `p*(I-q) = I`, `(I-q)*1 = Q`, `p*Q = 1`.
pub fn check_identities<S: Scalar>(r: &RenewalSequence<S>) -> Result<IdentityReport, RenewalError> {
    if !S::EXACT || !r.dist.is_rational() {
        return Err(RenewalError::ExactModeRequired);
    }
    let n = r.last_index();
    let d = &r.dist;
    let p = &r.terms;
    let q = Sequence::from_fn(n, |i| d.weight::<S>(i).expect("rational law"));
    let tail = Sequence::from_fn(n, |i| d.tail::<S>(i).expect("rational law"));
    let id = identity_seq::<S>(n);
    let one = ones_seq::<S>(n);
    let i_minus_q = id.sub(&q)?;

    let checks = vec![
        compare("p = I + p*q", p, &id.add(&convolve(p, &q, n)?)?),
        compare("p*(I-q) = I", &convolve(p, &i_minus_q, n)?, &id),
        compare("(I-q)*1 = Q", &convolve(&i_minus_q, &one, n)?, &tail),
        compare("p*Q = 1", &convolve(p, &tail, n)?, &one),
    ];
    Ok(IdentityReport { upto: n, checks })
}

/// Two-sided bound on `lim p_n` at cutoff `M`:
/// `hi = 1 / Σ_{i≤M} Q_i` and, for finite mean,
/// `lo = (1 - Σ_{i>M} Q_i) / Σ_{i≤M} Q_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitBracket<S> {
    pub cutoff: usize,
    pub window_start: usize,
    pub lo: Option<S>,
    pub hi: S,
}

impl<S: Scalar> LimitBracket<S> {
    pub fn lo_valid(&self) -> bool {
        self.lo.is_some()
    }

    pub fn hi_valid(&self) -> bool {
        true
    }

    /// `hi - lo`, or `hi` itself when the lower bound is unavailable.
    pub fn width(&self) -> S {
        match &self.lo {
            Some(lo) => self.hi.clone() - lo.clone(),
            None => self.hi.clone(),
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        let lo_ok = self.lo.as_ref().is_none_or(|lo| lo <= x);
        lo_ok && x <= &self.hi
    }

    pub fn to_f64(&self) -> LimitBracket<f64> {
        LimitBracket {
            cutoff: self.cutoff,
            window_start: self.window_start,
            lo: self.lo.as_ref().map(Scalar::to_f64),
            hi: self.hi.to_f64(),
        }
    }
}

pub fn limit_bracket<S: Scalar>(dist: &IncrementDistribution, cutoff: usize) -> Result<LimitBracket<S>, RenewalError> {
    let head: S = dist.tail_sum(cutoff)?;
    let hi = S::one() / head.clone();
    let lo = dist
        .tail_remainder::<S>(cutoff)?
        .map(|rest| (S::one() - rest) / head);
    Ok(LimitBracket {
        cutoff,
        window_start: WINDOW_RATIO * cutoff,
        lo,
        hi,
    })
}

/// `sup |Δ^k[p]_n|` over `n ∈ [from, to]`.
pub fn decay_report<S: Scalar>(
    r: &RenewalSequence<S>,
    order: usize,
    from: usize,
    to: usize,
) -> Result<S, RenewalError> {
    // Δ^k[p]_n only reads p_{n-k..=n}
    let prefix = r.terms.prefix(to)?;
    Ok(delta(&prefix, order).sup_abs(from, to)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketTraceRow {
    pub cutoff: usize,
    pub lo: Option<f64>,
    pub hi: f64,
    pub window_osc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub estimate: f64,
    pub bracket: LimitBracket<f64>,
    pub n_used: usize,
    /// `max - min` of `p_n` over `[N/2, N]`.
    pub oscillation: f64,
    pub converged: bool,
    pub trace: Vec<BracketTraceRow>,
}

/// Doubles the cutoff `M` (with `N = 10·M`) until the bracket is within
/// `tol` and `p_n` varies by at most `tol` over `[N/2, N]`.
///
/// With infinite mean the lower bound is taken as 0, since `p_n ≥ 0`.
/// The estimate is the bracket midpoint.
pub fn estimate_limit(dist: &IncrementDistribution, tol: f64, budget: usize) -> Result<LimitEstimate, RenewalError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(RenewalError::BadTolerance(tol));
    }
    let mut cutoff = 1usize;
    let mut trace = Vec::new();
    loop {
        let n = WINDOW_RATIO * cutoff;
        let bracket = limit_bracket::<f64>(dist, cutoff)?;
        let p = compute_renewal::<f64>(dist, n)?;
        let window = &p.terms.terms()[n / 2..=n];
        let max = window.iter().copied().fold(f64::MIN, f64::max);
        let min = window.iter().copied().fold(f64::MAX, f64::min);
        let oscillation = max - min;
        trace.push(BracketTraceRow {
            cutoff,
            lo: bracket.lo,
            hi: bracket.hi,
            window_osc: oscillation,
        });
        let lo = bracket.lo.unwrap_or(0.0).max(0.0);
        let converged = bracket.hi - lo <= tol && oscillation <= tol;
        let result = LimitEstimate {
            estimate: 0.5 * (lo + bracket.hi),
            bracket,
            n_used: n,
            oscillation,
            converged,
            trace: trace.clone(),
        };
        if converged {
            return Ok(result);
        }
        if WINDOW_RATIO * cutoff * 2 > budget {
            return Err(RenewalError::BudgetExhausted {
                budget,
                partial: Box::new(result),
            });
        }
        cutoff *= 2;
    }
}

impl<S: Scalar> RenewalSequence<S> {
    /// `Δ^k[p]` over the whole stored prefix.
    pub fn differences(&self, order: usize) -> Sequence<S> {
        delta(&self.terms, order)
    }
}

/// Whether every term lies in `[0, 1]` and `p_0 = 1`.
pub fn within_unit_interval<S: Scalar>(r: &RenewalSequence<S>) -> bool {
    let t = r.terms.terms();
    t[0].is_one() && t.iter().all(|x| *x >= S::zero() && *x <= S::one())
}
