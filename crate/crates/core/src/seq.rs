//! Finite prefixes of sequences indexed from 0, with Cauchy convolution
//! and the backward difference operator.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("a sequence prefix needs at least one term")]
    Empty,
    #[error("index {index} is outside the stored prefix 0..={last}")]
    OutOfRange { index: usize, last: usize },
    #[error("prefix too short: index {needed} requested, terms stored through {available}")]
    ShortPrefix { needed: usize, available: usize },
}

/// The prefix `a_0, …, a_N` of a sequence `a: Z+ → S`.
///
/// Immutable once built. Reading past `N` is an error; there is no
/// implicit zero extension.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence<S> {
    terms: Vec<S>,
}

impl<S: Scalar> Sequence<S> {
    pub fn new(terms: Vec<S>) -> Result<Self, SeqError> {
        if terms.is_empty() {
            return Err(SeqError::Empty);
        }
        Ok(Self { terms })
    }

    pub fn from_fn(upto: usize, f: impl FnMut(usize) -> S) -> Self {
        Self {
            terms: (0..=upto).map(f).collect(),
        }
    }

    /// Index of the last stored term.
    pub fn last_index(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> Result<&S, SeqError> {
        self.terms.get(index).ok_or(SeqError::OutOfRange {
            index,
            last: self.last_index(),
        })
    }

    pub fn terms(&self) -> &[S] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<S> {
        self.terms
    }

    pub fn prefix(&self, upto: usize) -> Result<Self, SeqError> {
        self.require(upto)?;
        Ok(Self {
            terms: self.terms[..=upto].to_vec(),
        })
    }

    fn require(&self, upto: usize) -> Result<(), SeqError> {
        if upto > self.last_index() {
            return Err(SeqError::ShortPrefix {
                needed: upto,
                available: self.last_index(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self, SeqError> {
        let upto = self.last_index().max(other.last_index());
        self.require(upto)?;
        other.require(upto)?;
        Ok(Self {
            terms: self.terms.iter().zip(&other.terms).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Termwise sum; both prefixes must have the same length.
    pub fn add(&self, other: &Self) -> Result<Self, SeqError> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeqError> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// Cumulative sums `Σ_{i≤n} a_i`, the inverse of [`delta`] with order 1.
    pub fn partial_sums(&self) -> Self {
        let mut acc = S::zero();
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    acc = acc.clone() + t.clone();
                    acc.clone()
                })
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Sequence<f64> {
        Sequence {
            terms: self.terms.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `sup |a_n|` over `n ∈ [from, to]`.
    pub fn sup_abs(&self, from: usize, to: usize) -> Result<S, SeqError> {
        self.require(to)?;
        Ok(self.terms[from.min(to)..=to]
            .iter()
            .map(Scalar::abs_value)
            .fold(S::zero(), |m, x| if x > m { x } else { m }))
    }
}

/// Prefix of the Cauchy product `(a*b)_n = Σ_{i=0}^n a_i b_{n-i}` through
/// index `upto`. Exact in exact mode; compensated in float mode.
pub fn convolve<S: Scalar>(a: &Sequence<S>, b: &Sequence<S>, upto: usize) -> Result<Sequence<S>, SeqError> {
    a.require(upto)?;
    b.require(upto)?;
    Ok(Sequence::from_fn(upto, |n| S::cauchy_term(&a.terms, &b.terms, 0, n, n)))
}

/// `Δ^k[a]` on the same index range, where `Δ[a]_0 = a_0` and
/// `Δ[a]_n = a_n - a_{n-1}`.
pub fn delta<S: Scalar>(a: &Sequence<S>, order: usize) -> Sequence<S> {
    let mut terms = a.terms.clone();
    for _ in 0..order {
        for n in (1..terms.len()).rev() {
            terms[n] = terms[n].clone() - terms[n - 1].clone();
        }
    }
    Sequence { terms }
}

/// The convolution identity `I = (1, 0, 0, …)` through `upto`.
pub fn identity_seq<S: Scalar>(upto: usize) -> Sequence<S> {
    Sequence::from_fn(upto, |n| if n == 0 { S::one() } else { S::zero() })
}

/// The all-ones sequence through `upto`.
pub fn ones_seq<S: Scalar>(upto: usize) -> Sequence<S> {
    Sequence::from_fn(upto, |_| S::one())
}
