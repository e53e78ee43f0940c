//! Symbolic eta-quotients on `Gamma_0(N)`.
//!
//! An [`EtaQuotient`] is the formal product `prod_{delta | N} eta(delta z)^{r_delta}`,
//! kept symbolically as its level and exponent map. The module computes the
//! classical invariants that decide whether such a product is a modular form:
//! the weight `k = (1/2) sum r_delta`, the two mod-24 integrality conditions
//! of Gordon-Hughes-Newman, the Kronecker character `d -> ((-1)^k s | d)`
//! with `s = prod delta^{r_delta}`, and Ligozat's rational order of vanishing
//! at each cusp denominator `d | N`. Reports carry what was computed, not
//! what is expected: a negative cusp order is recorded as such.
//!
//! Expansion to a [`TruncatedSeries`] always happens over exact integers;
//! reductions mod M are taken downstream so there is a single source of
//! truth for coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{divisors, prime_factors};
use crate::series::{eta_euler_factor, CoefficientDomain, SeriesError, TruncatedSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EtaError {
    #[error("invalid eta spec: {0}")]
    Parse(String),
    #[error("level must be positive")]
    InvalidLevel,
    #[error("{delta} does not divide the level {level}")]
    NotADivisor { delta: u64, level: u64 },
    #[error("divisor {0} listed more than once")]
    DuplicateDivisor(u64),
    #[error("all exponents are zero")]
    AllZeroExponents,
    #[error("weight is half-integral (exponent sum {0} is odd)")]
    HalfIntegralWeight(i64),
    #[error("exponent-weighted sum {0} is not divisible by 24, so the leading q-exponent is not an integer")]
    NonIntegralLeadingExponent(i64),
    #[error("levels differ: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `prod_{delta | N} eta(delta z)^{r_delta}`: a level `N` plus a map from
/// divisors of `N` to nonzero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u64,
    // sorted by divisor; zero exponents are dropped at construction
    exponents: Vec<(u64, i64)>,
}

/// The mod-24 sums and weight data behind the modularity criterion: both
/// sums must vanish mod 24 and the weight must be an integer for the
/// quotient to transform like a modular form on `Gamma_0(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnhConditions {
    /// `sum r_delta`; the weight is half this.
    pub weight_twice: i64,
    /// `sum delta * r_delta`
    pub sum_delta_r: i64,
    /// `sum (N/delta) * r_delta`
    pub sum_level_over_delta_r: i64,
    /// `sum_delta_r == 0 (mod 24)`
    pub condition_24_a: bool,
    /// `sum_level_over_delta_r == 0 (mod 24)`
    pub condition_24_b: bool,
    /// `weight_twice` is even
    pub weight_integral: bool,
}

impl GnhConditions {
    pub fn all_pass(&self) -> bool {
        self.condition_24_a && self.condition_24_b && self.weight_integral
    }
}

/// The character attached to an eta-quotient of integral weight `k`:
/// `chi(d) = ((-1)^k s | d)` as a Kronecker symbol, where
/// `s = prod delta^{r_delta}` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterData {
    /// numerator of `s` in lowest terms
    pub s_numerator: BigUint,
    /// denominator of `s` in lowest terms
    pub s_denominator: BigUint,
    /// parity of the weight `k`; odd weight contributes the factor `(-1 | d)`
    pub weight_odd: bool,
    /// squarefree part of `(-1)^k s`; `chi` equals the Kronecker symbol of
    /// this integer at every `d` coprime to `s`
    pub squarefree_part: BigInt,
    // prime factorization of s (nonzero exponents only), for evaluation
    prime_exponents: Vec<(u64, i64)>,
}

impl CharacterData {
    /// `chi(d) = ((-1)^k s | d)`, evaluated prime by prime through complete
    /// multiplicativity of the Kronecker symbol in its top argument. Zero
    /// exactly when `d` shares a factor with `s`.
    pub fn eval(&self, d: i64) -> i32 {
        let mut acc = if self.weight_odd { kronecker_symbol(-1, d) } else { 1 };
        for &(p, e) in &self.prime_exponents {
            let kp = kronecker_symbol(p as i64, d);
            if kp == 0 {
                return 0;
            }
            if e.unsigned_abs() % 2 == 1 {
                acc *= kp;
            }
        }
        acc
    }
}

/// Everything the modularity and holomorphy checks computed: the mod-24
/// data, the character constant `s`, and the cusp orders at every divisor
/// of the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularityReport {
    pub weight_twice: i64,
    pub sum_delta_r: i64,
    pub sum_level_over_delta_r: i64,
    pub condition_24_a: bool,
    pub condition_24_b: bool,
    pub weight_integral: bool,
    pub s_numerator: BigUint,
    pub s_denominator: BigUint,
    /// squarefree part of `(-1)^k s`; absent for half-integral weight
    pub character_squarefree: Option<BigInt>,
    /// vanishing order at the cusp with denominator `d`, for each `d | N`,
    /// sorted by `d`; negative order means a pole
    pub cusp_orders: Vec<(u64, BigRational)>,
    /// true when every cusp order is `>= 0`
    pub holomorphic_at_all_cusps: bool,
}

impl EtaQuotient {
    /// Validates that every divisor divides the level and appears once;
    /// zero exponents are dropped, and at least one must remain.
    pub fn new(level: u64, exponents: &[(u64, i64)]) -> Result<Self, EtaError> {
        if level == 0 {
            return Err(EtaError::InvalidLevel);
        }
        let mut seen = BTreeMap::new();
        for &(delta, r) in exponents {
            if delta == 0 || level % delta != 0 {
                return Err(EtaError::NotADivisor { delta, level });
            }
            if seen.insert(delta, r).is_some() {
                return Err(EtaError::DuplicateDivisor(delta));
            }
        }
        let exponents: Vec<(u64, i64)> =
            seen.into_iter().filter(|&(_, r)| r != 0).collect();
        if exponents.is_empty() {
            return Err(EtaError::AllZeroExponents);
        }
        Ok(EtaQuotient { level, exponents })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Divisor/exponent pairs, sorted by divisor, exponents all nonzero.
    pub fn exponents(&self) -> &[(u64, i64)] {
        &self.exponents
    }

    /// `sum r_delta`, twice the weight.
    pub fn weight_twice(&self) -> i64 {
        self.exponents.iter().map(|&(_, r)| r).sum()
    }

    /// The weight `k = (1/2) sum r_delta` as an exact rational.
    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.weight_twice(), 2)
    }

    /// The two mod-24 sums and the weight-integrality flag.
    pub fn check_gnh_conditions(&self) -> GnhConditions {
        let sum_delta_r: i128 = self
            .exponents
            .iter()
            .map(|&(d, r)| d as i128 * r as i128)
            .sum();
        let sum_level_over_delta_r: i128 = self
            .exponents
            .iter()
            .map(|&(d, r)| (self.level / d) as i128 * r as i128)
            .sum();
        let sum_delta_r = i64::try_from(sum_delta_r).expect("exponent sums fit i64");
        let sum_level_over_delta_r =
            i64::try_from(sum_level_over_delta_r).expect("exponent sums fit i64");
        let weight_twice = self.weight_twice();
        GnhConditions {
            weight_twice,
            sum_delta_r,
            sum_level_over_delta_r,
            condition_24_a: sum_delta_r.rem_euclid(24) == 0,
            condition_24_b: sum_level_over_delta_r.rem_euclid(24) == 0,
            weight_integral: weight_twice % 2 == 0,
        }
    }

    /// The exponent of the first term of the q-expansion,
    /// `(sum delta r_delta) / 24`; fractional expansions are rejected.
    pub fn leading_exponent(&self) -> Result<i64, EtaError> {
        let s = self.check_gnh_conditions().sum_delta_r;
        if s.rem_euclid(24) != 0 {
            return Err(EtaError::NonIntegralLeadingExponent(s));
        }
        Ok(s / 24)
    }

    // prime -> exponent in s = prod delta^{r_delta}, zero entries dropped
    fn s_prime_exponents(&self) -> Vec<(u64, i64)> {
        let mut acc: BTreeMap<u64, i64> = BTreeMap::new();
        for &(delta, r) in &self.exponents {
            for (p, e) in prime_factors(delta) {
                *acc.entry(p).or_insert(0) += e as i64 * r;
            }
        }
        acc.into_iter().filter(|&(_, e)| e != 0).collect()
    }

    fn s_lowest_terms(primes: &[(u64, i64)]) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &(p, e) in primes {
            let pw = BigUint::from(p).pow(u32::try_from(e.unsigned_abs()).expect("exponent fits u32"));
            if e > 0 {
                num *= pw;
            } else {
                den *= pw;
            }
        }
        (num, den)
    }

    fn squarefree_part(primes: &[(u64, i64)], weight_odd: bool) -> BigInt {
        let mut acc = if weight_odd { -BigInt::one() } else { BigInt::one() };
        for &(p, e) in primes {
            if e.unsigned_abs() % 2 == 1 {
                acc *= BigInt::from(p);
            }
        }
        acc
    }

    /// The constant `s = prod delta^{r_delta}` in lowest terms together with
    /// the weight parity, packaged for evaluating `chi(d) = ((-1)^k s | d)`.
    /// Requires integral weight.
    pub fn character_discriminant(&self) -> Result<CharacterData, EtaError> {
        let twice = self.weight_twice();
        if twice % 2 != 0 {
            return Err(EtaError::HalfIntegralWeight(twice));
        }
        let weight_odd = (twice / 2).rem_euclid(2) == 1;
        let prime_exponents = self.s_prime_exponents();
        let (s_numerator, s_denominator) = Self::s_lowest_terms(&prime_exponents);
        let squarefree_part = Self::squarefree_part(&prime_exponents, weight_odd);
        Ok(CharacterData {
            s_numerator,
            s_denominator,
            weight_odd,
            squarefree_part,
            prime_exponents,
        })
    }

    /// Rational order of vanishing at the cusp with denominator `d | N`:
    /// `(N/24) * sum_delta gcd(d, delta)^2 r_delta / (gcd(d, N/d) d delta)`.
    /// The order depends only on `d`, not on the cusp numerator.
    pub fn cusp_order(&self, d: u64) -> Result<BigRational, EtaError> {
        if d == 0 || self.level % d != 0 {
            return Err(EtaError::NotADivisor { delta: d, level: self.level });
        }
        let gd = d.gcd(&(self.level / d));
        let mut acc = BigRational::zero();
        for &(delta, r) in &self.exponents {
            let g = d.gcd(&delta);
            let numer = BigInt::from(g) * BigInt::from(g) * BigInt::from(r);
            let denom = BigInt::from(gd) * BigInt::from(d) * BigInt::from(delta);
            acc += BigRational::new(numer, denom);
        }
        Ok(acc * BigRational::new(BigInt::from(self.level), BigInt::from(24)))
    }

    /// The full report: mod-24 data, character constant, and the cusp order
    /// at every divisor of the level. Values are reported as computed, so a
    /// quotient with a pole at some cusp gets `holomorphic_at_all_cusps =
    /// false` no matter what it is expected to be.
    pub fn holomorphy_report(&self) -> ModularityReport {
        let gnh = self.check_gnh_conditions();
        let prime_exponents = self.s_prime_exponents();
        let (s_numerator, s_denominator) = Self::s_lowest_terms(&prime_exponents);
        let character_squarefree = if gnh.weight_integral {
            let weight_odd = (gnh.weight_twice / 2).rem_euclid(2) == 1;
            Some(Self::squarefree_part(&prime_exponents, weight_odd))
        } else {
            None
        };
        let cusp_orders: Vec<(u64, BigRational)> = divisors(self.level)
            .into_iter()
            .map(|d| {
                let o = self.cusp_order(d).expect("divisor of the level");
                (d, o)
            })
            .collect();
        let holomorphic_at_all_cusps =
            cusp_orders.iter().all(|(_, o)| !o.is_negative());
        ModularityReport {
            weight_twice: gnh.weight_twice,
            sum_delta_r: gnh.sum_delta_r,
            sum_level_over_delta_r: gnh.sum_level_over_delta_r,
            condition_24_a: gnh.condition_24_a,
            condition_24_b: gnh.condition_24_b,
            weight_integral: gnh.weight_integral,
            s_numerator,
            s_denominator,
            character_squarefree,
            cusp_orders,
            holomorphic_at_all_cusps,
        }
    }

    /// The q-expansion `q^{leading} prod_delta prod_n (1 - q^{delta n})^{r_delta}`
    /// over exact integers, truncated at `t`.
    pub fn expand(&self, t: i64) -> Result<TruncatedSeries, EtaError> {
        let c = self.leading_exponent()?;
        let rel = t - c;
        if rel < 0 {
            return Ok(TruncatedSeries::zero(CoefficientDomain::ExactInteger, t));
        }
        let mut acc = TruncatedSeries::one(CoefficientDomain::ExactInteger, rel)?;
        for &(delta, r) in &self.exponents {
            acc = acc.mul(&eta_euler_factor(delta, r, rel)?)?;
        }
        Ok(acc.shift(c))
    }

    /// Pointwise sum of exponent maps; both factors must share the level.
    pub fn mul(&self, other: &Self) -> Result<Self, EtaError> {
        if self.level != other.level {
            return Err(EtaError::LevelMismatch(self.level, other.level));
        }
        let mut acc: BTreeMap<u64, i64> = self.exponents.iter().copied().collect();
        for &(delta, r) in &other.exponents {
            *acc.entry(delta).or_insert(0) += r;
        }
        let pairs: Vec<(u64, i64)> = acc.into_iter().collect();
        Self::new(self.level, &pairs)
    }

    /// All exponents negated; the expansion is the series inverse.
    pub fn inverse(&self) -> Self {
        let pairs: Vec<(u64, i64)> =
            self.exponents.iter().map(|&(d, r)| (d, -r)).collect();
        EtaQuotient { level: self.level, exponents: pairs }
    }
}

impl FromStr for EtaQuotient {
    type Err = EtaError;

    /// Parses `N=<level>; <delta>:<exp> <delta>:<exp> ...`, whitespace
    /// separated, exponents signed decimal.
    fn from_str(s: &str) -> Result<Self, EtaError> {
        let (head, tail) = s
            .split_once(';')
            .ok_or_else(|| EtaError::Parse("expected `N=<level>; <delta>:<exp> ...`".into()))?;
        let head: String = head.chars().filter(|c| !c.is_whitespace()).collect();
        let level_str = head
            .strip_prefix("N=")
            .ok_or_else(|| EtaError::Parse(format!("expected `N=<level>`, got `{head}`")))?;
        let level: u64 = level_str
            .parse()
            .map_err(|_| EtaError::Parse(format!("invalid level `{level_str}`")))?;
        let mut pairs = Vec::new();
        for tok in tail.split_whitespace() {
            let (d, r) = tok
                .split_once(':')
                .ok_or_else(|| EtaError::Parse(format!("expected `<delta>:<exp>`, got `{tok}`")))?;
            let delta: u64 = d
                .parse()
                .map_err(|_| EtaError::Parse(format!("invalid divisor `{d}`")))?;
            let exp: i64 = r
                .parse()
                .map_err(|_| EtaError::Parse(format!("invalid exponent `{r}`")))?;
            pairs.push((delta, exp));
        }
        Self::new(level, &pairs)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={};", self.level)?;
        for &(delta, r) in &self.exponents {
            write!(f, " {delta}:{r}")?;
        }
        Ok(())
    }
}

/// The Kronecker symbol `(a | n)`, extended to all integer pairs: Jacobi on
/// odd positive `n`, the mod-8 rule at 2, `(a | -1) = sign(a)`, and
/// `(a | 0) = 1` exactly for `a = +-1`.
pub fn kronecker_symbol(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        if a < 0 {
            result = -result;
        }
        n = -n;
    }
    let mut a = a;
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let mut twos = 0u32;
        while n % 2 == 0 {
            n /= 2;
            twos += 1;
        }
        // (a | 2) for odd a: +1 when a = +-1 mod 8, -1 when a = +-3 mod 8
        if twos % 2 == 1 {
            let m = a.rem_euclid(8);
            if m == 3 || m == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a | n) for odd n >= 1 by reciprocity
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let m = n % 8;
            if m == 3 || m == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}
