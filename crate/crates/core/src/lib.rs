//! Exact q-series and eta-quotient toolkit for partition congruences.
//!
//! This crate provides:
//! - [`series`]: truncated formal power series in `q` with exact integer or
//!   mod-M coefficients, including Euler-product factors and the `U_p`
//!   coefficient-extraction operator
//! - [`eta`]: symbolic eta-quotients on `Gamma_0(N)`: weight, the mod-24
//!   modularity conditions, character discriminant, cusp orders, q-expansion
//! - [`partitions`]: broken k-diamond generating functions and their
//!   arithmetic-progression subsequences
//! - [`congruence`]: index and Sturm-bound arithmetic, the Eisenstein series
//!   `E_4`, congruence certificates, and the two built-in broken-diamond
//!   congruence verifications (mod 7 and mod 11)
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs, so everything here is safe to share across
//! threads. Truncation orders are tracked honestly: asking for a coefficient
//! beyond the recorded order of a series is an error, never a silent zero.

pub mod cli;
pub mod congruence;
pub mod eta;
pub mod partitions;
pub mod series;

mod arith;

pub use congruence::{
    e4_series, index_gamma0, sturm_bound, verify_congruence, verify_general, verify_theorem_1_1,
    verify_theorem_1_2, CoefficientMismatch, CongruenceCertificate, CongruenceError, EtaExpression,
    SturmData,
};
pub use eta::{
    kronecker_symbol, CharacterData, EtaError, EtaQuotient, GnhConditions, ModularityReport,
};
pub use partitions::{BrokenDiamondFamily, PartitionError};
pub use series::{
    eta_euler_factor, product_oracle, CoefficientDomain, SeriesError, TruncatedSeries,
};
