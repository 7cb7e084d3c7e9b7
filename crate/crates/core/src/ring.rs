//! Elements of the ring of integers `O` as finite base-q digit strings.
//!
//! A point `x = sum a_k pi^k` is stored as its digit vector `[a_0, a_1, ...]`
//! with trailing zeros stripped, so equality of digit vectors is equality in
//! `O`.  The absolute value is `q^{-v}` where `v` is the index of the first
//! nonzero digit.  Arithmetic is always carried out at an explicit working
//! depth `n`, i.e. modulo `pi^n`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::{Error, Result};

/// How digit strings add.
///
/// `Padic` is base-q addition with carries (the ring `Z_q`; requires prime
/// q).  `PowerSeries` is digitwise addition mod q (the ring `F_q[[T]]` when
/// q is prime; for composite q it is still the compact group `(Z/q)^N`
/// acting on the digit tree, which is all the order-free modules need).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithmeticMode {
    Padic,
    PowerSeries,
}

/// Residue field size together with the arithmetic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    q: u32,
    mode: ArithmeticMode,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl RingSpec {
    pub fn new(q: u32, mode: ArithmeticMode) -> Result<Self> {
        if q < 2 {
            return Err(Error::ResidueSizeTooSmall { q });
        }
        if mode == ArithmeticMode::Padic && !is_prime(q) {
            return Err(Error::PrimeRequired {
                q,
                context: "carry arithmetic",
            });
        }
        Ok(RingSpec { q, mode })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn has_prime_q(&self) -> bool {
        is_prime(self.q)
    }

    /// `q^{-depth}`, the radius and Haar measure of a depth-`depth` disc.
    pub fn radius(&self, depth: usize) -> BigRational {
        qpow(self.q, -(depth as i64))
    }
}

/// Exact `q^exp` as a rational, `exp` of either sign.
pub fn qpow(q: u32, exp: i64) -> BigRational {
    let p = BigInt::from(q).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// An element of `O`, canonical form: no trailing zero digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    digits: Vec<u32>,
}

fn strip_trailing_zeros(digits: &mut Vec<u32>) {
    while digits.last() == Some(&0) {
        digits.pop();
    }
}

impl Point {
    pub fn zero() -> Self {
        Point { digits: Vec::new() }
    }

    pub fn one() -> Self {
        Point { digits: vec![1] }
    }

    /// `pi^k`: the digit string with a single 1 at index `k`.
    pub fn uniformizer_pow(k: usize) -> Self {
        let mut digits = vec![0; k + 1];
        digits[k] = 1;
        Point { digits }
    }

    pub fn from_digits(digits: Vec<u32>, spec: RingSpec) -> Result<Self> {
        for &d in &digits {
            if d >= spec.q {
                return Err(Error::DigitOutOfRange { digit: d, q: spec.q });
            }
        }
        let mut digits = digits;
        strip_trailing_zeros(&mut digits);
        Ok(Point { digits })
    }

    /// The point whose first `depth` digits are the base-q expansion of
    /// `index`, least significant digit first; `index` is reduced modulo
    /// `q^depth`.  In p-adic mode this is the integer `index` itself.
    pub fn from_cell_index(index: u64, depth: usize, spec: RingSpec) -> Point {
        let q = spec.q as u64;
        let mut digits = Vec::with_capacity(depth);
        let mut rest = index;
        for _ in 0..depth {
            digits.push((rest % q) as u32);
            rest /= q;
        }
        strip_trailing_zeros(&mut digits);
        Point { digits }
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at index `i`, trailing zeros implied.
    pub fn digit(&self, i: usize) -> u32 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    /// Number of stored digits; 0 only for the zero point.
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Index of the first nonzero digit; `None` for 0 (valuation infinity).
    pub fn valuation(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }

    /// `|x| = q^{-valuation}`, 0 for the zero point.
    pub fn abs(&self, spec: RingSpec) -> BigRational {
        match self.valuation() {
            None => BigRational::zero(),
            Some(v) => qpow(spec.q, -(v as i64)),
        }
    }

    /// First `depth` digits, i.e. the residue mod `pi^depth`.
    pub fn truncate(&self, depth: usize) -> Point {
        let take = depth.min(self.digits.len());
        let mut digits = self.digits[..take].to_vec();
        strip_trailing_zeros(&mut digits);
        Point { digits }
    }

    /// `x + y mod pi^depth`.
    pub fn add_mod(&self, other: &Point, depth: usize, spec: RingSpec) -> Point {
        let q = spec.q;
        let mut digits = Vec::with_capacity(depth);
        match spec.mode {
            ArithmeticMode::Padic => {
                let mut carry = 0u32;
                for i in 0..depth {
                    let s = self.digit(i) + other.digit(i) + carry;
                    digits.push(s % q);
                    carry = s / q;
                }
            }
            ArithmeticMode::PowerSeries => {
                for i in 0..depth {
                    digits.push((self.digit(i) + other.digit(i)) % q);
                }
            }
        }
        strip_trailing_zeros(&mut digits);
        Point { digits }
    }

    /// `-x mod pi^depth`.
    pub fn neg_mod(&self, depth: usize, spec: RingSpec) -> Point {
        Point::zero().sub_mod(self, depth, spec)
    }

    /// `x - y mod pi^depth`.
    pub fn sub_mod(&self, other: &Point, depth: usize, spec: RingSpec) -> Point {
        let q = spec.q;
        let mut digits = Vec::with_capacity(depth);
        match spec.mode {
            ArithmeticMode::Padic => {
                let mut borrow = 0i64;
                for i in 0..depth {
                    let mut d = self.digit(i) as i64 - other.digit(i) as i64 - borrow;
                    if d < 0 {
                        d += q as i64;
                        borrow = 1;
                    } else {
                        borrow = 0;
                    }
                    digits.push(d as u32);
                }
            }
            ArithmeticMode::PowerSeries => {
                for i in 0..depth {
                    let d = (self.digit(i) + q - other.digit(i)) % q;
                    digits.push(d);
                }
            }
        }
        strip_trailing_zeros(&mut digits);
        Point { digits }
    }

    /// Parse the text form: base-q digits most-significant-last, separated
    /// by commas, e.g. `1,0,2` for `1 + 2 pi^2`.
    pub fn parse(s: &str, spec: RingSpec) -> Result<Point> {
        let mut digits = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let d: u32 = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad digit {part:?} in point {s:?}")))?;
            digits.push(d);
        }
        Point::from_digits(digits, spec)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Truncation of `s / (1 - pi)` to `depth` digits.
///
/// In both modes this is the digit string `[s, s, ..., s]`: the geometric
/// series `s (1 + pi + pi^2 + ...)` has no carries because `s <= q - 1`.
/// For `Padic` that string equals `s (q^n - 1)/(q - 1)`, the unique solution
/// of `(1 - q) x = s mod q^n`.
pub fn geometric_point(s: u32, depth: usize, spec: RingSpec) -> Result<Point> {
    if s >= spec.q {
        return Err(Error::DigitOutOfRange { digit: s, q: spec.q });
    }
    Point::from_digits(vec![s; depth], spec)
}

/// A total order on the digit set `{0, ..., q-1}`.
///
/// `rank` maps a digit to its position in the order; `s_i`, the digit with
/// rank `i`, is `digit_with_rank(i)`.  The default is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitOrdering {
    rank: Vec<u32>,
    by_rank: Vec<u32>,
}

impl DigitOrdering {
    pub fn identity(q: u32) -> Self {
        let ranks: Vec<u32> = (0..q).collect();
        DigitOrdering {
            rank: ranks.clone(),
            by_rank: ranks,
        }
    }

    /// Build from the digit values listed smallest rank first.
    pub fn from_ordered_digits(ordered: Vec<u32>) -> Result<Self> {
        let q = ordered.len() as u32;
        if q == 0 {
            return Err(Error::InvalidDigitOrdering);
        }
        let mut rank = vec![u32::MAX; q as usize];
        for (i, &d) in ordered.iter().enumerate() {
            if d >= q || rank[d as usize] != u32::MAX {
                return Err(Error::InvalidDigitOrdering);
            }
            rank[d as usize] = i as u32;
        }
        Ok(DigitOrdering {
            rank,
            by_rank: ordered,
        })
    }

    pub fn q(&self) -> u32 {
        self.by_rank.len() as u32
    }

    pub fn rank(&self, digit: u32) -> u32 {
        self.rank[digit as usize]
    }

    pub fn digit_with_rank(&self, rank: u32) -> u32 {
        self.by_rank[rank as usize]
    }

    /// `s_0`, the smallest digit.
    pub fn smallest(&self) -> u32 {
        self.by_rank[0]
    }

    /// `s_{q-1}`, the largest digit.
    pub fn largest(&self) -> u32 {
        *self.by_rank.last().unwrap()
    }
}
