//! Discrete renewal sequences: the recurrence, its exact convolution
//! identities, limit brackets, generating-function checks on the closed
//! unit disk, Fourier-coefficient quadrature and a Monte Carlo cross-check.

mod dd;
pub mod dist;
pub mod fourier;
pub mod gentools;
pub mod mcsim;
pub mod renewal;
pub mod scalar;
pub mod seq;

pub use dist::{CustomSeries, DistError, DistKind, DistSpec, ExtendedReal, IncrementDistribution, WeightLiteral};
pub use fourier::{FourierError, IntegrandId, QuadratureResult};
pub use gentools::{ComplexValue, GenError, PolarPoint};
pub use mcsim::{ComparisonReport, HitEstimate, SimConfig, SimError};
pub use renewal::{
    compute_renewal, estimate_limit, limit_bracket, IdentityReport, LimitBracket, LimitEstimate, RenewalError,
    RenewalSequence,
};
pub use scalar::{parse_rational, Rational, Scalar};
pub use seq::{convolve, delta, SeqError, Sequence};
