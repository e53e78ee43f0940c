//! Exact truncated formal power series in one variable `q`.
//!
//! A [`TruncatedSeries`] represents `q^n0 * (a(n0) + a(n0+1) q + ...)` with
//! every coefficient known exactly up to and including a recorded truncation
//! order `T`. Coefficients live either in `Z` (arbitrary precision) or in
//! `Z/MZ` (single-word canonical residues), tagged by [`CoefficientDomain`].
//!
//! Invariants:
//! - Stored coefficients span exactly `lead ..= trunc`; the first stored
//!   coefficient of a nonzero series is nonzero (leading zeros are trimmed,
//!   which only ever tightens the recorded lead, never the truncation).
//! - The zero series is normalized to `lead = 0` with no stored coefficients.
//! - Every operation records the honest truncation order of its result:
//!   `min` for addition, the convolution rule `min(T_f + lead_g, T_g +
//!   lead_f)` for multiplication. Asking for a coefficient beyond the
//!   recorded order is an error, never a silent zero.
//! - Residues are canonical in `[0, M)` with `M >= 2`.
//!
//! Negative leads are first-class: inverses of series with positive lead and
//! eta-quotients with negative exponent sums produce them routinely.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::is_prime;

/// Where coefficients live: exact integers or canonical residues mod `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientDomain {
    ExactInteger,
    /// Residues stored canonically in `[0, M)`; requires `M >= 2`.
    ModularResidue(u64),
}

impl CoefficientDomain {
    fn validate(self) -> Result<(), SeriesError> {
        match self {
            CoefficientDomain::ExactInteger => Ok(()),
            CoefficientDomain::ModularResidue(m) if m >= 2 => Ok(()),
            CoefficientDomain::ModularResidue(m) => Err(SeriesError::InvalidModulus(m)),
        }
    }
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientDomain::ExactInteger => write!(f, "exact integers"),
            CoefficientDomain::ModularResidue(m) => write!(f, "residues mod {m}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("coefficient domains differ: {0} vs {1}")]
    DomainMismatch(CoefficientDomain, CoefficientDomain),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("empty coefficient sequence")]
    EmptyCoefficients,
    #[error("leading coefficient is not invertible in the coefficient domain")]
    NonInvertibleLead,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dilation factor must be positive")]
    ZeroDilation,
    #[error("truncation order must be nonnegative")]
    NegativeTruncation,
    #[error("coefficient of q^{n} is beyond the recorded truncation order {trunc}")]
    BeyondTruncation { n: i64, trunc: i64 },
    #[error("reduce_mod requires exact integer coefficients")]
    NotExactDomain,
    #[error("eta factor dilation delta must be positive")]
    ZeroEtaDelta,
}

#[derive(Clone, Debug)]
enum CoeffVec {
    Exact(Vec<BigInt>),
    Residue(Vec<u64>),
}

impl CoeffVec {
    fn len(&self) -> usize {
        match self {
            CoeffVec::Exact(v) => v.len(),
            CoeffVec::Residue(v) => v.len(),
        }
    }

    fn is_zero_at(&self, i: usize) -> bool {
        match self {
            CoeffVec::Exact(v) => v[i].is_zero(),
            CoeffVec::Residue(v) => v[i] == 0,
        }
    }
}

/// A truncated formal power series `sum_{n=lead}^{trunc} a(n) q^n + O(q^{trunc+1})`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    domain: CoefficientDomain,
    lead: i64,
    trunc: i64,
    coeffs: CoeffVec,
}

fn addm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn canonical_i64(c: i64, m: u64) -> u64 {
    (c as i128).rem_euclid(m as i128) as u64
}

fn canonical_bigint(c: &BigInt, m: u64) -> u64 {
    c.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits u64")
}

/// Modular inverse via extended Euclid; `None` when `gcd(a, m) != 1`.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

impl TruncatedSeries {
    /// Canonical form: trim leading zeros; an all-zero series gets `lead = 0`.
    fn normalized(domain: CoefficientDomain, lead: i64, trunc: i64, coeffs: CoeffVec) -> Self {
        let first_nonzero = (0..coeffs.len()).find(|&i| !coeffs.is_zero_at(i));
        match first_nonzero {
            None => TruncatedSeries {
                domain,
                lead: 0,
                trunc,
                coeffs: match coeffs {
                    CoeffVec::Exact(_) => CoeffVec::Exact(Vec::new()),
                    CoeffVec::Residue(_) => CoeffVec::Residue(Vec::new()),
                },
            },
            Some(k) => {
                let coeffs = match coeffs {
                    CoeffVec::Exact(mut v) => {
                        v.drain(..k);
                        CoeffVec::Exact(v)
                    }
                    CoeffVec::Residue(mut v) => {
                        v.drain(..k);
                        CoeffVec::Residue(v)
                    }
                };
                TruncatedSeries { domain, lead: lead + k as i64, trunc, coeffs }
            }
        }
    }

    /// The zero series, known to vanish through `q^trunc`.
    pub fn zero(domain: CoefficientDomain, trunc: i64) -> Self {
        let coeffs = match domain {
            CoefficientDomain::ExactInteger => CoeffVec::Exact(Vec::new()),
            CoefficientDomain::ModularResidue(_) => CoeffVec::Residue(Vec::new()),
        };
        TruncatedSeries { domain, lead: 0, trunc, coeffs }
    }

    /// The constant series `1`, truncated at `trunc >= 0`.
    pub fn one(domain: CoefficientDomain, trunc: i64) -> Result<Self, SeriesError> {
        Self::monomial(domain, 1, 0, trunc)
    }

    /// `c * q^exp`, truncated at `trunc >= exp`.
    pub fn monomial(
        domain: CoefficientDomain,
        c: i64,
        exp: i64,
        trunc: i64,
    ) -> Result<Self, SeriesError> {
        domain.validate()?;
        if trunc < exp {
            return Err(SeriesError::BeyondTruncation { n: exp, trunc });
        }
        let len = (trunc - exp + 1) as usize;
        let coeffs = match domain {
            CoefficientDomain::ExactInteger => {
                let mut v = vec![BigInt::zero(); len];
                v[0] = BigInt::from(c);
                CoeffVec::Exact(v)
            }
            CoefficientDomain::ModularResidue(m) => {
                let mut v = vec![0u64; len];
                v[0] = canonical_i64(c, m);
                CoeffVec::Residue(v)
            }
        };
        Ok(Self::normalized(domain, exp, trunc, coeffs))
    }

    /// Build a series from machine-integer coefficients `a(lead), a(lead+1), ...`.
    ///
    /// The truncation order is `lead + coeffs.len() - 1`; residues are
    /// canonicalized when the domain is modular.
    pub fn from_coeffs(
        lead: i64,
        coeffs: &[i64],
        domain: CoefficientDomain,
    ) -> Result<Self, SeriesError> {
        domain.validate()?;
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyCoefficients);
        }
        let trunc = lead + coeffs.len() as i64 - 1;
        let data = match domain {
            CoefficientDomain::ExactInteger => {
                CoeffVec::Exact(coeffs.iter().map(|&c| BigInt::from(c)).collect())
            }
            CoefficientDomain::ModularResidue(m) => {
                CoeffVec::Residue(coeffs.iter().map(|&c| canonical_i64(c, m)).collect())
            }
        };
        Ok(Self::normalized(domain, lead, trunc, data))
    }

    /// Build an exact-integer series from big-integer coefficients.
    pub fn from_exact_coeffs(lead: i64, coeffs: Vec<BigInt>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyCoefficients);
        }
        let trunc = lead + coeffs.len() as i64 - 1;
        Ok(Self::normalized(
            CoefficientDomain::ExactInteger,
            lead,
            trunc,
            CoeffVec::Exact(coeffs),
        ))
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.domain
    }

    /// Exponent of the first stored (possibly nonzero) coefficient; 0 for the
    /// zero series.
    pub fn lead(&self) -> i64 {
        self.lead
    }

    /// Coefficients are known exactly for all `n <= trunc`.
    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 0
    }

    fn check_domain(&self, other: &Self) -> Result<(), SeriesError> {
        if self.domain != other.domain {
            return Err(SeriesError::DomainMismatch(self.domain, other.domain));
        }
        Ok(())
    }

    fn nonzero_count(&self) -> usize {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs.is_zero_at(i)).count()
    }

    fn stored_index(&self, n: i64) -> Option<usize> {
        if n < self.lead {
            return None;
        }
        let i = (n - self.lead) as usize;
        (i < self.coeffs.len()).then_some(i)
    }

    fn exact_at(&self, n: i64) -> BigInt {
        match (&self.coeffs, self.stored_index(n)) {
            (CoeffVec::Exact(v), Some(i)) => v[i].clone(),
            (CoeffVec::Residue(v), Some(i)) => BigInt::from(v[i]),
            (_, None) => BigInt::zero(),
        }
    }

    fn residue_at(&self, n: i64) -> u64 {
        match (&self.coeffs, self.stored_index(n)) {
            (CoeffVec::Residue(v), Some(i)) => v[i],
            (CoeffVec::Residue(_), None) => 0,
            (CoeffVec::Exact(_), _) => unreachable!("residue_at on exact series"),
        }
    }

    /// The coefficient of `q^n`. Zero below the lead; an error beyond the
    /// recorded truncation order.
    pub fn coeff(&self, n: i64) -> Result<BigInt, SeriesError> {
        if n > self.trunc {
            return Err(SeriesError::BeyondTruncation { n, trunc: self.trunc });
        }
        Ok(self.exact_at(n))
    }

    /// Coefficientwise sum. Result truncation is `min(T_f, T_g)`.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_domain(other)?;
        let trunc = self.trunc.min(other.trunc);
        let lead = self.lead.min(other.lead);
        if trunc < lead {
            return Ok(Self::zero(self.domain, trunc));
        }
        let len = (trunc - lead + 1) as usize;
        let coeffs = match self.domain {
            CoefficientDomain::ExactInteger => CoeffVec::Exact(
                (0..len).map(|i| self.exact_at(lead + i as i64) + other.exact_at(lead + i as i64)).collect(),
            ),
            CoefficientDomain::ModularResidue(m) => CoeffVec::Residue(
                (0..len)
                    .map(|i| addm(self.residue_at(lead + i as i64), other.residue_at(lead + i as i64), m))
                    .collect(),
            ),
        };
        Ok(Self::normalized(self.domain, lead, trunc, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scalar_mul(-1))
    }

    /// Every coefficient multiplied by `c` (canonicalized when modular).
    pub fn scalar_mul(&self, c: i64) -> Self {
        if c == 0 || self.is_zero() {
            return Self::zero(self.domain, self.trunc);
        }
        let coeffs = match &self.coeffs {
            CoeffVec::Exact(v) => {
                let big = BigInt::from(c);
                CoeffVec::Exact(v.iter().map(|a| a * &big).collect())
            }
            CoeffVec::Residue(v) => {
                let m = match self.domain {
                    CoefficientDomain::ModularResidue(m) => m,
                    CoefficientDomain::ExactInteger => unreachable!(),
                };
                let cm = canonical_i64(c, m);
                CoeffVec::Residue(v.iter().map(|&a| mulm(a, cm, m)).collect())
            }
        };
        Self::normalized(self.domain, self.lead, self.trunc, coeffs)
    }

    /// Cauchy convolution. Result lead is `lead_f + lead_g`; result truncation
    /// is `min(T_f + lead_g, T_g + lead_f)` (the tight honest rule).
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_domain(other)?;
        let trunc = (self.trunc + other.lead).min(other.trunc + self.lead);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.domain, trunc));
        }
        let lead = self.lead + other.lead;
        let out_len = (trunc - lead + 1) as usize;
        // Iterate the operand with fewer nonzero terms on the outside; exact
        // integer sums are order-independent, so this is purely a speedup.
        let (x, y) = if self.nonzero_count() <= other.nonzero_count() {
            (self, other)
        } else {
            (other, self)
        };
        let coeffs = match (&x.coeffs, &y.coeffs) {
            (CoeffVec::Exact(a), CoeffVec::Exact(b)) => {
                let mut out = vec![BigInt::zero(); out_len];
                for (i, ai) in a.iter().enumerate() {
                    if i >= out_len {
                        break;
                    }
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate().take(out_len - i) {
                        if bj.is_zero() {
                            continue;
                        }
                        out[i + j] += ai * bj;
                    }
                }
                CoeffVec::Exact(out)
            }
            (CoeffVec::Residue(a), CoeffVec::Residue(b)) => {
                let m = match self.domain {
                    CoefficientDomain::ModularResidue(m) => m,
                    CoefficientDomain::ExactInteger => unreachable!(),
                };
                let mut out = vec![0u64; out_len];
                for (i, &ai) in a.iter().enumerate() {
                    if i >= out_len {
                        break;
                    }
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate().take(out_len - i) {
                        if bj == 0 {
                            continue;
                        }
                        out[i + j] = addm(out[i + j], mulm(ai, bj, m), m);
                    }
                }
                CoeffVec::Residue(out)
            }
            _ => unreachable!("domain checked"),
        };
        Ok(Self::normalized(self.domain, lead, trunc, coeffs))
    }

    /// Multiplicative inverse. Requires the lowest stored coefficient to be a
    /// unit (`+-1` over the integers, coprime to `M` modulo `M`). The result
    /// has lead `-n0` and truncation `T - 2*n0`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::NonInvertibleLead);
        }
        let n0 = self.lead;
        let rel_len = (self.trunc - n0 + 1) as usize;
        let coeffs = match &self.coeffs {
            CoeffVec::Exact(a) => {
                let u0 = &a[0];
                if !(u0.is_one() || (-u0).is_one()) {
                    return Err(SeriesError::NonInvertibleLead);
                }
                // u0 = +-1, so u0^{-1} = u0 and the recurrence is
                // b[n] = -u0 * sum_{k=1..n} a[k] b[n-k].
                let mut b = vec![BigInt::zero(); rel_len];
                b[0] = u0.clone();
                for n in 1..rel_len {
                    let mut acc = BigInt::zero();
                    for (k, ak) in a.iter().enumerate().take(n + 1).skip(1) {
                        if ak.is_zero() {
                            continue;
                        }
                        acc += ak * &b[n - k];
                    }
                    if !acc.is_zero() {
                        b[n] = -(u0 * acc);
                    }
                }
                CoeffVec::Exact(b)
            }
            CoeffVec::Residue(a) => {
                let m = match self.domain {
                    CoefficientDomain::ModularResidue(m) => m,
                    CoefficientDomain::ExactInteger => unreachable!(),
                };
                let u0_inv = mod_inverse(a[0], m).ok_or(SeriesError::NonInvertibleLead)?;
                let neg_u0_inv = (m - u0_inv % m) % m;
                let mut b = vec![0u64; rel_len];
                b[0] = u0_inv;
                for n in 1..rel_len {
                    let mut acc = 0u64;
                    for (k, &ak) in a.iter().enumerate().take(n + 1).skip(1) {
                        if ak == 0 {
                            continue;
                        }
                        acc = addm(acc, mulm(ak, b[n - k], m), m);
                    }
                    b[n] = mulm(neg_u0_inv, acc, m);
                }
                CoeffVec::Residue(b)
            }
        };
        Ok(Self::normalized(self.domain, -n0, self.trunc - 2 * n0, coeffs))
    }

    /// `f^e` by binary exponentiation; `f^0 = 1`, negative `e` via [`invert`].
    ///
    /// [`invert`]: TruncatedSeries::invert
    pub fn pow_int(&self, e: i64) -> Result<Self, SeriesError> {
        if e == 0 {
            return Self::one(self.domain, (self.trunc - self.lead).max(0));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Option<TruncatedSeries> = None;
        let mut power = base;
        loop {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => power.clone(),
                    Some(r) => r.mul(&power)?,
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            power = power.mul(&power)?;
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Substitute `q -> q^m`: the coefficient of `q^n` moves to `q^{m n}`.
    /// The truncation order becomes `m * T`.
    pub fn dilate(&self, m: u64) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::ZeroDilation);
        }
        let m = m as i64;
        if self.is_zero() {
            return Ok(Self::zero(self.domain, m * self.trunc));
        }
        let lead = m * self.lead;
        let trunc = m * self.trunc;
        let out_len = (trunc - lead + 1) as usize;
        let coeffs = match &self.coeffs {
            CoeffVec::Exact(v) => {
                let mut out = vec![BigInt::zero(); out_len];
                for (i, a) in v.iter().enumerate() {
                    out[i * m as usize] = a.clone();
                }
                CoeffVec::Exact(out)
            }
            CoeffVec::Residue(v) => {
                let mut out = vec![0u64; out_len];
                for (i, &a) in v.iter().enumerate() {
                    out[i * m as usize] = a;
                }
                CoeffVec::Residue(out)
            }
        };
        Ok(Self::normalized(self.domain, lead, trunc, coeffs))
    }

    /// Multiply by `q^k`: shifts the lead and the truncation order by `k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.trunc += k;
        if !out.is_zero() {
            out.lead += k;
        }
        out
    }

    /// The coefficient-extraction operator `U_p`: keeps `a(pn)` as the new
    /// coefficient of `q^n`, dropping every `a(m)` with `p` not dividing `m`.
    /// Result lead is `ceil(n0/p)`, result truncation `floor(T/p)`.
    pub fn u_p(&self, p: u64) -> Result<Self, SeriesError> {
        if !is_prime(p) {
            return Err(SeriesError::NotPrime(p));
        }
        let p = p as i64;
        let trunc = self.trunc.div_euclid(p);
        if self.is_zero() {
            return Ok(Self::zero(self.domain, trunc));
        }
        let lead = -(-self.lead).div_euclid(p);
        if trunc < lead {
            return Ok(Self::zero(self.domain, trunc));
        }
        let out_len = (trunc - lead + 1) as usize;
        let coeffs = match &self.coeffs {
            CoeffVec::Exact(_) => CoeffVec::Exact(
                (0..out_len).map(|i| self.exact_at(p * (lead + i as i64))).collect(),
            ),
            CoeffVec::Residue(_) => CoeffVec::Residue(
                (0..out_len).map(|i| self.residue_at(p * (lead + i as i64))).collect(),
            ),
        };
        Ok(Self::normalized(self.domain, lead, trunc, coeffs))
    }

    /// View an exact-integer series in `Z/MZ`.
    pub fn reduce_mod(&self, m: u64) -> Result<Self, SeriesError> {
        if m < 2 {
            return Err(SeriesError::InvalidModulus(m));
        }
        let v = match &self.coeffs {
            CoeffVec::Exact(v) => v,
            CoeffVec::Residue(_) => return Err(SeriesError::NotExactDomain),
        };
        let out: Vec<u64> = v.iter().map(|a| canonical_bigint(a, m)).collect();
        Ok(Self::normalized(
            CoefficientDomain::ModularResidue(m),
            self.lead,
            self.trunc,
            CoeffVec::Residue(out),
        ))
    }

    /// The M-adic order: the smallest `n <= T` whose coefficient is nonzero
    /// mod `M`, or `None` when every stored coefficient vanishes mod `M`
    /// (nothing below the truncation order witnesses a nonzero coefficient).
    pub fn ord_m(&self, m: u64) -> Result<Option<i64>, SeriesError> {
        if m < 2 {
            return Err(SeriesError::InvalidModulus(m));
        }
        match &self.coeffs {
            CoeffVec::Exact(v) => {
                let big = BigInt::from(m);
                for (i, a) in v.iter().enumerate() {
                    if !(a % &big).is_zero() {
                        return Ok(Some(self.lead + i as i64));
                    }
                }
            }
            CoeffVec::Residue(v) => {
                for (i, &a) in v.iter().enumerate() {
                    if a % m != 0 {
                        return Ok(Some(self.lead + i as i64));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Equality of coefficients over the common known range
    /// `min(lead) ..= min(trunc)`; anything beyond is outside both records.
    pub fn equal_up_to_truncation(&self, other: &Self) -> Result<bool, SeriesError> {
        Ok(self.first_difference(other)?.is_none())
    }

    /// First exponent in the common known range where the coefficients
    /// disagree, if any.
    pub fn first_difference(&self, other: &Self) -> Result<Option<i64>, SeriesError> {
        self.check_domain(other)?;
        let lo = self.lead.min(other.lead);
        let hi = self.trunc.min(other.trunc);
        for n in lo..=hi {
            let differ = match self.domain {
                CoefficientDomain::ExactInteger => self.exact_at(n) != other.exact_at(n),
                CoefficientDomain::ModularResidue(_) => self.residue_at(n) != other.residue_at(n),
            };
            if differ {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for n in self.lead..=self.trunc {
            let c = self.exact_at(n);
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c) };
            if wrote {
                write!(f, " {sign} ")?;
            } else if sign == "-" {
                write!(f, "-")?;
            }
            match (n, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{n}")?,
                (_, false) => write!(f, "{mag}*q^{n}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc + 1)
    }
}

/// The series of `prod_{n>=1} (1 - q^{delta n})` truncated at `t`, via the
/// pentagonal number expansion `sum_j (-1)^j q^{delta j(3j-1)/2}` over both
/// signs of `j`.
fn pentagonal_factor(delta: u64, t: i64) -> TruncatedSeries {
    let mut v = vec![BigInt::zero(); (t + 1) as usize];
    v[0] = BigInt::one();
    let d = delta as i64;
    let mut j: i64 = 1;
    loop {
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let e1 = d * (j * (3 * j - 1) / 2);
        if e1 > t {
            break;
        }
        v[e1 as usize] = BigInt::from(sign);
        let e2 = d * (j * (3 * j + 1) / 2);
        if e2 <= t {
            v[e2 as usize] = BigInt::from(sign);
        }
        j += 1;
    }
    TruncatedSeries::from_exact_coeffs(0, v).expect("nonempty")
}

/// `prod_{n>=1} (1 - q^{delta n})^r` truncated at `t`, over exact integers.
///
/// The `r = +-1` cases come straight from the pentagonal number expansion;
/// general `r` is binary exponentiation of the `r = 1` series. The slow
/// reference implementation [`product_oracle`] computes the same value
/// factor by factor.
pub fn eta_euler_factor(delta: u64, r: i64, t: i64) -> Result<TruncatedSeries, SeriesError> {
    if delta == 0 {
        return Err(SeriesError::ZeroEtaDelta);
    }
    if t < 0 {
        return Err(SeriesError::NegativeTruncation);
    }
    if r == 0 {
        return TruncatedSeries::one(CoefficientDomain::ExactInteger, t);
    }
    let base = pentagonal_factor(delta, t);
    match r {
        1 => Ok(base),
        -1 => base.invert(),
        _ => base.pow_int(r),
    }
}

/// Slow reference for [`eta_euler_factor`]: multiplies the product out one
/// binomial factor `(1 - q^{delta n})^{+-1}` at a time, `|r|` passes. Kept
/// permanently as the independent oracle for tests; do not use in pipelines.
pub fn product_oracle(delta: u64, r: i64, t: i64) -> Result<TruncatedSeries, SeriesError> {
    if delta == 0 {
        return Err(SeriesError::ZeroEtaDelta);
    }
    if t < 0 {
        return Err(SeriesError::NegativeTruncation);
    }
    let len = (t + 1) as usize;
    let mut acc = vec![BigInt::zero(); len];
    acc[0] = BigInt::one();
    let d = delta as usize;
    for _ in 0..r.unsigned_abs() {
        let mut n = d;
        while n <= t as usize {
            if r > 0 {
                // multiply by (1 - q^n): new[k] = old[k] - old[k - n]
                for k in (n..len).rev() {
                    let sub = acc[k - n].clone();
                    acc[k] -= sub;
                }
            } else {
                // multiply by 1/(1 - q^n) = 1 + q^n + q^{2n} + ...:
                // forward sweep new[k] = old[k] + new[k - n]
                for k in n..len {
                    let add = acc[k - n].clone();
                    acc[k] += add;
                }
            }
            n += d;
        }
    }
    TruncatedSeries::from_exact_coeffs(0, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: CoefficientDomain = CoefficientDomain::ExactInteger;

    fn zs(lead: i64, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(lead, coeffs, Z).unwrap()
    }

    fn coeffs_of(f: &TruncatedSeries, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).map(|n| f.coeff(n).unwrap().to_i64().unwrap()).collect()
    }

    /// Independent convolution oracle over a common index window.
    fn naive_product_coeff(a: &TruncatedSeries, b: &TruncatedSeries, n: i64) -> BigInt {
        let mut acc = BigInt::zero();
        for i in a.lead()..=a.truncation() {
            let j = n - i;
            if j < b.lead() || j > b.truncation() {
                continue;
            }
            acc += a.coeff(i).unwrap() * b.coeff(j).unwrap();
        }
        acc
    }

    #[test]
    fn from_coeffs_examples() {
        let one = zs(0, &[1]);
        assert_eq!(one.lead(), 0);
        assert_eq!(one.truncation(), 0);
        assert_eq!(one.coeff(0).unwrap(), BigInt::one());

        let f = zs(2, &[1, 0, -3]);
        assert_eq!(f.lead(), 2);
        assert_eq!(f.truncation(), 4);
        assert_eq!(coeffs_of(&f, 0, 4), vec![0, 0, 1, 0, -3]);

        let m = TruncatedSeries::from_coeffs(0, &[9, 15], CoefficientDomain::ModularResidue(7))
            .unwrap();
        assert_eq!(coeffs_of(&m, 0, 1), vec![2, 1]);
    }

    #[test]
    fn from_coeffs_rejects_bad_input() {
        assert_eq!(
            TruncatedSeries::from_coeffs(0, &[], Z).unwrap_err(),
            SeriesError::EmptyCoefficients
        );
        assert_eq!(
            TruncatedSeries::from_coeffs(0, &[1], CoefficientDomain::ModularResidue(1))
                .unwrap_err(),
            SeriesError::InvalidModulus(1)
        );
    }

    #[test]
    fn zero_series_normalizes_lead() {
        let f = zs(5, &[0, 0, 0]);
        assert!(f.is_zero());
        assert_eq!(f.lead(), 0);
        assert_eq!(f.truncation(), 7);
    }

    #[test]
    fn leading_zeros_are_trimmed() {
        let f = zs(2, &[0, 0, 4, 1]);
        assert_eq!(f.lead(), 4);
        assert_eq!(f.truncation(), 5);
    }

    #[test]
    fn add_examples() {
        let s = zs(0, &[1, 1]).add(&zs(0, &[1, -1])).unwrap();
        assert_eq!(coeffs_of(&s, 0, 1), vec![2, 0]);

        let f = zs(1, &[3, -2, 7]);
        let z = TruncatedSeries::zero(Z, 10);
        let s = f.add(&z).unwrap();
        assert_eq!(s.truncation(), 3);
        assert!(s.equal_up_to_truncation(&f).unwrap());

        let s = zs(2, &[1]).add(&zs(2, &[-1])).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.lead(), 0);
    }

    #[test]
    fn add_requires_same_domain() {
        let f = zs(0, &[1]);
        let g = TruncatedSeries::from_coeffs(0, &[1], CoefficientDomain::ModularResidue(5))
            .unwrap();
        assert!(matches!(f.add(&g), Err(SeriesError::DomainMismatch(_, _))));
    }

    #[test]
    fn mul_examples() {
        let p = zs(0, &[1, 1]).mul(&zs(0, &[1, -1])).unwrap();
        assert_eq!(coeffs_of(&p, 0, 1), vec![1, 0]);
        // truncation of a product of two T=1 series is 1, so q^2 is unknown
        assert!(p.coeff(2).is_err());

        let f = zs(0, &[1, -1, 0, 0, 0, 0]);
        let p = f.mul(&f.invert().unwrap()).unwrap();
        assert_eq!(p.coeff(0).unwrap(), BigInt::one());
        for n in 1..=p.truncation() {
            assert!(p.coeff(n).unwrap().is_zero());
        }
    }

    #[test]
    fn mul_geometric_squared_matches_convolution_oracle() {
        // (sum q^n)^2 = sum (n+1) q^n, checked against the naive convolution
        let t = 30;
        let geom = zs(0, &vec![1; (t + 1) as usize]);
        let sq = geom.mul(&geom).unwrap();
        for n in 0..=t {
            assert_eq!(sq.coeff(n).unwrap(), BigInt::from(n + 1));
            assert_eq!(sq.coeff(n).unwrap(), naive_product_coeff(&geom, &geom, n));
        }
    }

    #[test]
    fn mul_truncation_rule_with_leads() {
        // f known to T=5 with lead 2, g known to T=3 with lead 1:
        // product known to min(5+1, 3+2) = 5
        let f = zs(2, &[1, 1, 1, 1]);
        let g = zs(1, &[1, 2, 3]);
        let p = f.mul(&g).unwrap();
        assert_eq!(p.lead(), 3);
        assert_eq!(p.truncation(), 5);
    }

    #[test]
    fn scalar_mul_examples() {
        let f = TruncatedSeries::from_coeffs(0, &[1, 1], CoefficientDomain::ModularResidue(7))
            .unwrap();
        assert_eq!(coeffs_of(&f.scalar_mul(6), 0, 1), vec![6, 6]);

        let z = zs(0, &[5, 3]).scalar_mul(0);
        assert!(z.is_zero());
        assert_eq!(z.truncation(), 1);

        let m = zs(3, &[1]).scalar_mul(256);
        assert_eq!(m.coeff(3).unwrap(), BigInt::from(256));
    }

    #[test]
    fn invert_examples() {
        let geo = zs(0, &[1, -1, 0, 0, 0]).invert().unwrap();
        assert_eq!(coeffs_of(&geo, 0, 4), vec![1, 1, 1, 1, 1]);

        let one = zs(0, &[1]).invert().unwrap();
        assert_eq!(one.coeff(0).unwrap(), BigInt::one());

        // invert(q(1-q)) = q^{-1} (1 + q + q^2 + ...)
        let f = zs(1, &[1, -1, 0, 0, 0, 0]);
        let inv = f.invert().unwrap();
        assert_eq!(inv.lead(), -1);
        assert_eq!(inv.truncation(), f.truncation() - 2);
        assert_eq!(coeffs_of(&inv, -1, 3), vec![1, 1, 1, 1, 1]);
        let p = f.mul(&inv).unwrap();
        assert_eq!(p.coeff(0).unwrap(), BigInt::one());
        for n in 1..=p.truncation() {
            assert!(p.coeff(n).unwrap().is_zero());
        }
    }

    #[test]
    fn invert_rejects_non_units() {
        assert_eq!(zs(0, &[2, 1]).invert().unwrap_err(), SeriesError::NonInvertibleLead);
        assert_eq!(
            TruncatedSeries::zero(Z, 5).invert().unwrap_err(),
            SeriesError::NonInvertibleLead
        );
        let f = TruncatedSeries::from_coeffs(0, &[3, 1], CoefficientDomain::ModularResidue(9))
            .unwrap();
        assert_eq!(f.invert().unwrap_err(), SeriesError::NonInvertibleLead);
        // but 2 is a unit mod 9
        let g = TruncatedSeries::from_coeffs(0, &[2, 1], CoefficientDomain::ModularResidue(9))
            .unwrap();
        let gi = g.invert().unwrap();
        assert_eq!(gi.coeff(0).unwrap(), BigInt::from(5)); // 2*5 = 10 = 1 mod 9
        let p = g.mul(&gi).unwrap();
        assert_eq!(p.coeff(0).unwrap(), BigInt::one());
        assert!(p.coeff(1).unwrap().is_zero());
    }

    #[test]
    fn pow_examples() {
        let sq = zs(0, &[1, -1, 0]).pow_int(2).unwrap();
        assert_eq!(coeffs_of(&sq, 0, 2), vec![1, -2, 1]);

        let one = zs(0, &[4, 7, 9]).pow_int(0).unwrap();
        assert_eq!(one.coeff(0).unwrap(), BigInt::one());
        assert_eq!(one.truncation(), 2);
    }

    #[test]
    fn pow_frobenius_mod_7() {
        // (1-q)^7 = 1 - q^7 mod 7, by direct expansion then reduction
        let t = 20;
        let f = zs(0, &{
            let mut v = vec![0i64; (t + 1) as usize];
            v[0] = 1;
            v[1] = -1;
            v
        });
        let lhs = f.pow_int(7).unwrap().reduce_mod(7).unwrap();
        let rhs = f.dilate(7).unwrap().reduce_mod(7).unwrap();
        assert!(lhs.equal_up_to_truncation(&rhs).unwrap());
    }

    #[test]
    fn dilate_examples() {
        let d = zs(0, &[1, 1]).dilate(2).unwrap();
        assert_eq!(coeffs_of(&d, 0, 2), vec![1, 0, 1]);

        let f = zs(1, &[2, 0, 5]);
        assert!(f.dilate(1).unwrap().equal_up_to_truncation(&f).unwrap());

        let a = f.dilate(2).unwrap().dilate(7).unwrap();
        let b = f.dilate(14).unwrap();
        assert_eq!(a.truncation(), b.truncation());
        assert!(a.equal_up_to_truncation(&b).unwrap());

        assert_eq!(f.dilate(0).unwrap_err(), SeriesError::ZeroDilation);
    }

    #[test]
    fn u_p_examples() {
        // q^3 + 2q^5 + 4q^6 under U_3: a(3) -> q, a(6) -> 4q^2; a(5) dropped
        let f = zs(3, &[1, 0, 2, 4]);
        let g = f.u_p(3).unwrap();
        assert_eq!(g.lead(), 1);
        assert_eq!(g.truncation(), 2);
        assert_eq!(coeffs_of(&g, 1, 2), vec![1, 4]);

        let g = zs(7, &[1]).u_p(7).unwrap();
        assert_eq!(coeffs_of(&g, 0, 1), vec![0, 1]);

        assert_eq!(zs(0, &[1]).u_p(4).unwrap_err(), SeriesError::NotPrime(4));
        assert_eq!(zs(0, &[1]).u_p(1).unwrap_err(), SeriesError::NotPrime(1));
    }

    #[test]
    fn u_p_drops_off_progression_lead() {
        // lead 2 not divisible by 7: result lead is ceil(2/7) = 1, and the
        // coefficients a(m) with 7 not dividing m must be dropped.
        let mut v = vec![0i64; 20];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = (i + 1) as i64; // a(n) = n - 1 for n = 2..21
        }
        let f = zs(2, &v);
        let g = f.u_p(7).unwrap();
        assert_eq!(g.lead(), 1);
        assert_eq!(g.truncation(), 3);
        // a(7) = 6, a(14) = 13, a(21) = 20
        assert_eq!(coeffs_of(&g, 1, 3), vec![6, 13, 20]);
    }

    #[test]
    fn u_p_negative_lead() {
        let f = zs(-3, &[5, 0, 0, 7, 0, 0, 11]);
        let g = f.u_p(3).unwrap();
        assert_eq!(g.lead(), -1);
        assert_eq!(coeffs_of(&g, -1, 1), vec![5, 7, 11]);
    }

    #[test]
    fn reduce_mod_examples() {
        let f = zs(0, &[0, 7, 0, 1]).reduce_mod(7).unwrap();
        assert_eq!(f.lead(), 3);
        assert_eq!(f.coeff(3).unwrap(), BigInt::one());

        let z = TruncatedSeries::zero(Z, 4).reduce_mod(11).unwrap();
        assert!(z.is_zero());

        let f = zs(0, &[-1]).reduce_mod(7).unwrap();
        assert_eq!(f.coeff(0).unwrap(), BigInt::from(6));

        assert_eq!(zs(0, &[1]).reduce_mod(1).unwrap_err(), SeriesError::InvalidModulus(1));
        let r = TruncatedSeries::from_coeffs(0, &[1], CoefficientDomain::ModularResidue(5))
            .unwrap();
        assert_eq!(r.reduce_mod(5).unwrap_err(), SeriesError::NotExactDomain);
    }

    #[test]
    fn ord_m_examples() {
        assert_eq!(zs(0, &[0, 7, 0, 1]).ord_m(7).unwrap(), Some(3));
        assert_eq!(zs(0, &[1, 1]).ord_m(5).unwrap(), Some(0));
        assert_eq!(zs(0, &[7, 14]).ord_m(7).unwrap(), None);
    }

    #[test]
    fn coeff_beyond_truncation_is_an_error() {
        let f = zs(0, &[1, 2]);
        assert_eq!(f.coeff(-5).unwrap(), BigInt::zero());
        assert!(matches!(
            f.coeff(2),
            Err(SeriesError::BeyondTruncation { n: 2, trunc: 1 })
        ));
    }

    #[test]
    fn eta_euler_factor_pentagonal_window() {
        let f = eta_euler_factor(1, 1, 7).unwrap();
        assert_eq!(coeffs_of(&f, 0, 7), vec![1, -1, -1, 0, 0, 1, 0, 1]);

        let one = eta_euler_factor(9, 0, 5).unwrap();
        assert_eq!(one.coeff(0).unwrap(), BigInt::one());
        assert_eq!(one.truncation(), 5);

        let f = eta_euler_factor(2, 1, 6).unwrap();
        assert_eq!(coeffs_of(&f, 0, 6), vec![1, 0, -1, 0, -1, 0, 0]);
        let g = eta_euler_factor(1, 1, 3).unwrap().dilate(2).unwrap();
        assert!(f.equal_up_to_truncation(&g).unwrap());
    }

    #[test]
    fn product_oracle_examples() {
        let a = eta_euler_factor(1, 1, 50).unwrap();
        let b = product_oracle(1, 1, 50).unwrap();
        assert!(a.equal_up_to_truncation(&b).unwrap());

        // 1/prod(1-q^n) generates partition counts
        let p = product_oracle(1, -1, 5).unwrap();
        assert_eq!(coeffs_of(&p, 0, 5), vec![1, 1, 2, 3, 5, 7]);
        // cross-check against direct partition enumeration
        fn count_partitions(n: i64, max_part: i64) -> i64 {
            if n == 0 {
                return 1;
            }
            (1..=max_part.min(n)).map(|p| count_partitions(n - p, p)).sum()
        }
        for n in 0..=5 {
            assert_eq!(p.coeff(n).unwrap(), BigInt::from(count_partitions(n, n)));
        }

        let c = product_oracle(1, 24, 0).unwrap();
        assert_eq!(c.coeff(0).unwrap(), BigInt::one());
    }

    #[test]
    fn display_formats() {
        assert_eq!(zs(2, &[1, 0, -3]).to_string(), "q^2 - 3*q^4 + O(q^5)");
        assert_eq!(TruncatedSeries::zero(Z, 3).to_string(), "0 + O(q^4)");
    }

    // --- property tests -------------------------------------------------

    fn small_series() -> impl Strategy<Value = TruncatedSeries> {
        (-4i64..5, proptest::collection::vec(-9i64..10, 1..10))
            .prop_map(|(lead, v)| TruncatedSeries::from_coeffs(lead, &v, Z).unwrap())
    }

    fn unit_series() -> impl Strategy<Value = TruncatedSeries> {
        // constant term 1, so inversion and Frobenius both apply
        proptest::collection::vec(-9i64..10, 1..10).prop_map(|mut v| {
            v.insert(0, 1);
            TruncatedSeries::from_coeffs(0, &v, Z).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(f in small_series(), g in small_series(), h in small_series()) {
            let fg = f.add(&g).unwrap();
            let gf = g.add(&f).unwrap();
            prop_assert!(fg.equal_up_to_truncation(&gf).unwrap());

            let fg_m = f.mul(&g).unwrap();
            let gf_m = g.mul(&f).unwrap();
            prop_assert!(fg_m.equal_up_to_truncation(&gf_m).unwrap());

            let assoc_l = f.add(&g).unwrap().add(&h).unwrap();
            let assoc_r = f.add(&g.add(&h).unwrap()).unwrap();
            prop_assert!(assoc_l.equal_up_to_truncation(&assoc_r).unwrap());

            let massoc_l = f.mul(&g).unwrap().mul(&h).unwrap();
            let massoc_r = f.mul(&g.mul(&h).unwrap()).unwrap();
            prop_assert!(massoc_l.equal_up_to_truncation(&massoc_r).unwrap());

            let dist_l = f.mul(&g.add(&h).unwrap()).unwrap();
            let dist_r = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
            prop_assert!(dist_l.equal_up_to_truncation(&dist_r).unwrap());
        }

        #[test]
        fn mul_invert_is_identity(f in unit_series(), shift in -3i64..4) {
            let f = f.shift(shift);
            let p = f.mul(&f.invert().unwrap()).unwrap();
            prop_assert_eq!(p.coeff(0).unwrap(), BigInt::one());
            for n in p.lead()..=p.truncation() {
                if n != 0 {
                    prop_assert!(p.coeff(n).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn frobenius_congruence(f in unit_series(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let lhs = f.pow_int(p as i64).unwrap().reduce_mod(p).unwrap();
            let rhs = f.dilate(p).unwrap().reduce_mod(p).unwrap();
            prop_assert!(lhs.equal_up_to_truncation(&rhs).unwrap());
        }

        #[test]
        fn u_p_is_linear(f in small_series(), g in small_series(),
                         c in -9i64..10, p in prop::sample::select(vec![2u64, 3, 7, 11])) {
            let lhs = f.add(&g).unwrap().u_p(p).unwrap();
            let rhs = f.u_p(p).unwrap().add(&g.u_p(p).unwrap()).unwrap();
            prop_assert!(lhs.equal_up_to_truncation(&rhs).unwrap());

            let lhs = f.scalar_mul(c).u_p(p).unwrap();
            let rhs = f.u_p(p).unwrap().scalar_mul(c);
            prop_assert!(lhs.equal_up_to_truncation(&rhs).unwrap());
        }

        #[test]
        fn u_p_sifting_identity(f in small_series(), g in small_series(),
                                p in prop::sample::select(vec![2u64, 3, 7, 11])) {
            // U_p(f * g(q^p)) = U_p(f) * g
            let lhs = f.mul(&g.dilate(p).unwrap()).unwrap().u_p(p).unwrap();
            let rhs = f.u_p(p).unwrap().mul(&g).unwrap();
            prop_assert!(lhs.equal_up_to_truncation(&rhs).unwrap());
        }

        #[test]
        fn reduce_mod_commutes(f in small_series(), g in small_series(),
                               m in prop::sample::select(vec![2u64, 5, 7, 11, 12])) {
            let fm = f.reduce_mod(m).unwrap();
            let gm = g.reduce_mod(m).unwrap();

            let a = f.add(&g).unwrap().reduce_mod(m).unwrap();
            prop_assert!(a.equal_up_to_truncation(&fm.add(&gm).unwrap()).unwrap());

            let a = f.mul(&g).unwrap().reduce_mod(m).unwrap();
            prop_assert!(a.equal_up_to_truncation(&fm.mul(&gm).unwrap()).unwrap());

            let a = f.pow_int(3).unwrap().reduce_mod(m).unwrap();
            prop_assert!(a.equal_up_to_truncation(&fm.pow_int(3).unwrap()).unwrap());

            let a = f.dilate(3).unwrap().reduce_mod(m).unwrap();
            prop_assert!(a.equal_up_to_truncation(&fm.dilate(3).unwrap()).unwrap());

            let a = f.u_p(3).unwrap().reduce_mod(m).unwrap();
            prop_assert!(a.equal_up_to_truncation(&fm.u_p(3).unwrap()).unwrap());
        }

        #[test]
        fn eta_factor_matches_oracle_small(delta in 1u64..7, r in -6i64..7, t in 0i64..41) {
            let fast = eta_euler_factor(delta, r, t).unwrap();
            let slow = product_oracle(delta, r, t).unwrap();
            prop_assert_eq!(fast.truncation(), t);
            prop_assert!(fast.equal_up_to_truncation(&slow).unwrap());
        }
    }
}
