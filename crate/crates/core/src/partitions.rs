//! Broken k-diamond partition counts via their generating function.
//!
//! For a family parameter `k >= 1` the counts `Delta_k(n)` are defined by
//!
//! ```text
//! sum_{n>=0} Delta_k(n) q^n
//!   = prod_{n>=1} (1 - q^{2n})(1 - q^{(2k+1)n})
//!     / ((1 - q^n)^3 (1 - q^{(4k+2)n}))
//! ```
//!
//! The generating function is the definition of record here; the underlying
//! plane-partition combinatorics is not modeled. Coefficients grow quickly,
//! so they are exact big integers throughout.

use num_bigint::BigInt;
use thiserror::Error;

use crate::series::{eta_euler_factor, SeriesError, TruncatedSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("family parameter k must be at least 1, got {0}")]
    InvalidFamilyParameter(u64),
    #[error("Delta_k({n}) is outside the computed range 0..={trunc}")]
    CoefficientOutOfRange { n: i64, trunc: i64 },
    #[error("progression {p}n+{r} needs 0 <= r < p")]
    InvalidProgression { p: u64, r: i64 },
    #[error("progression residue {r} exceeds the truncation order {trunc}; no terms available")]
    EmptyProgression { r: i64, trunc: i64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The counts `Delta_k(0..=T)` for one family parameter `k`, held as the
/// expanded generating function.
#[derive(Clone, Debug)]
pub struct BrokenDiamondFamily {
    k: u64,
    gf: TruncatedSeries,
}

impl BrokenDiamondFamily {
    /// Expands the defining Euler product for family `k` through `q^t`.
    pub fn new(k: u64, t: i64) -> Result<Self, PartitionError> {
        if k == 0 {
            return Err(PartitionError::InvalidFamilyParameter(0));
        }
        let gf = eta_euler_factor(1, -3, t)?
            .mul(&eta_euler_factor(2, 1, t)?)?
            .mul(&eta_euler_factor(2 * k + 1, 1, t)?)?
            .mul(&eta_euler_factor(4 * k + 2, -1, t)?)?;
        Ok(BrokenDiamondFamily { k, gf })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Counts are known for `0 <= n <= truncation()`.
    pub fn truncation(&self) -> i64 {
        self.gf.truncation()
    }

    /// The generating function `sum Delta_k(n) q^n` as a series.
    pub fn gf(&self) -> &TruncatedSeries {
        &self.gf
    }

    /// `Delta_k(n)`, exact.
    pub fn delta_coeff(&self, n: i64) -> Result<BigInt, PartitionError> {
        if n < 0 || n > self.truncation() {
            return Err(PartitionError::CoefficientOutOfRange { n, trunc: self.truncation() });
        }
        Ok(self.gf.coeff(n)?)
    }

    /// The subsequence on an arithmetic progression:
    /// `sum_{n>=0} Delta_k(pn + r) q^n`, truncated at `floor((T - r)/p)`.
    /// `p` is any positive step, not necessarily prime; `(1, 0)` is the
    /// identity.
    pub fn progression_series(&self, p: u64, r: i64) -> Result<TruncatedSeries, PartitionError> {
        if p == 0 || r < 0 || r >= p as i64 {
            return Err(PartitionError::InvalidProgression { p, r });
        }
        let t = self.truncation();
        if r > t {
            return Err(PartitionError::EmptyProgression { r, trunc: t });
        }
        let p = p as i64;
        let out_trunc = (t - r).div_euclid(p);
        let coeffs: Result<Vec<BigInt>, SeriesError> =
            (0..=out_trunc).map(|m| self.gf.coeff(p * m + r)).collect();
        Ok(TruncatedSeries::from_exact_coeffs(0, coeffs?)?)
    }
}
