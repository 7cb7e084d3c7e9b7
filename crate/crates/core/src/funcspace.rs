//! Locally constant functions on `O` as collapsed q-ary tries.
//!
//! A level-n function is constant on every disc of radius `q^{-n}`.  The
//! trie stores one leaf per maximal constancy disc; subtrees whose leaves
//! all carry the same value are collapsed, so structural equality of
//! canonical tries is pointwise equality of functions.
//!
//! Values are exact rationals whenever the constructor guarantees
//! rationality (indicators, alternating sums, tables, random functions) and
//! double precision otherwise (the `|x - c|^t` family).  Exactness is
//! contagious downward: averages, combinations and variations of rational
//! functions stay rational.

use num::rational::BigRational;
use num::{FromPrimitive, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Disc;
use crate::ring::{DigitOrdering, Point, RingSpec};
use crate::{Error, Result};

/// A function value: exact rational or double.
///
/// Mixed-kind arithmetic degrades to doubles; all-rational arithmetic is
/// exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rational(BigRational),
    Real(f64),
}

impl Value {
    pub fn zero() -> Value {
        Value::Rational(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Value {
        Value::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Value {
        Value::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Rational(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Rational(r) => r.to_f64().expect("rational representable as double"),
            Value::Real(x) => *x,
        }
    }

    pub fn add(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            _ => Value::Real(self.to_f64() + rhs.to_f64()),
        }
    }

    pub fn sub(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a - b),
            _ => Value::Real(self.to_f64() - rhs.to_f64()),
        }
    }

    pub fn mul(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            _ => Value::Real(self.to_f64() * rhs.to_f64()),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Rational(r) => Value::Rational(r.abs()),
            Value::Real(x) => Value::Real(x.abs()),
        }
    }

    pub fn div_nat(&self, d: u32) -> Value {
        match self {
            Value::Rational(r) => Value::Rational(r / BigRational::from_integer(d.into())),
            Value::Real(x) => Value::Real(x / d as f64),
        }
    }

    pub fn scale_int(&self, k: i64) -> Value {
        match self {
            Value::Rational(r) => Value::Rational(r * BigRational::from_integer(k.into())),
            Value::Real(x) => Value::Real(x * k as f64),
        }
    }

    fn cmp_values(&self, rhs: &Value) -> std::cmp::Ordering {
        match (self, rhs) {
            (Value::Rational(a), Value::Rational(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&rhs.to_f64())
                .expect("function values are never NaN"),
        }
    }

    pub fn max(&self, rhs: &Value) -> Value {
        if self.cmp_values(rhs) == std::cmp::Ordering::Less {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, rhs: &Value) -> Value {
        if self.cmp_values(rhs) == std::cmp::Ordering::Greater {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    pub fn le(&self, rhs: &Value) -> bool {
        self.cmp_values(rhs) != std::cmp::Ordering::Greater
    }
}

impl From<BigRational> for Value {
    fn from(r: BigRational) -> Value {
        Value::Rational(r)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Value {
        Value::Real(x)
    }
}

/// How `abs_power` assigns the value of the level-n cell around its center:
/// the exact conditional expectation over the cell, or the sample at the
/// cell center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Average,
    Sample,
}

/// Coefficients of the alternating sum of indicator functions of the discs
/// `A_k` of radius `q^{-(k+1)}` around `pi^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternatingWeights {
    /// `(-1)^k / (k+1)` for every resolvable k.
    Harmonic,
    /// `(-1)^k` for `k < 2M`.
    Unit { pairs: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Leaf(Value),
    Internal(Vec<Node>),
}

impl Node {
    fn collapse(self) -> Node {
        match self {
            Node::Leaf(v) => Node::Leaf(v),
            Node::Internal(children) => {
                let children: Vec<Node> = children.into_iter().map(Node::collapse).collect();
                let all_same_leaf = children.windows(2).all(|w| w[0] == w[1])
                    && matches!(children[0], Node::Leaf(_));
                if all_same_leaf {
                    children.into_iter().next().unwrap()
                } else {
                    Node::Internal(children)
                }
            }
        }
    }

    fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Internal(children) => children.iter().map(Node::leaf_count).sum(),
        }
    }
}

/// A locally constant function of some level n, stored as a collapsed trie.
#[derive(Debug, Clone, PartialEq)]
pub struct LcFunction {
    spec: RingSpec,
    level: usize,
    root: Node,
}

impl LcFunction {
    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    /// The declared constancy level n: the function is constant on every
    /// disc of radius `q^{-n}`.
    pub fn level(&self) -> usize {
        self.level
    }

    pub(crate) fn root(&self) -> &Node {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn constant(value: Value, spec: RingSpec) -> LcFunction {
        LcFunction {
            spec,
            level: 0,
            root: Node::Leaf(value),
        }
    }

    /// Indicator of a disc; level equals the disc depth.
    pub fn indicator(disc: &Disc) -> LcFunction {
        let spec = disc.spec();
        let q = spec.q() as usize;
        fn build(prefix: &[u32], j: usize, q: usize) -> Node {
            if j == prefix.len() {
                return Node::Leaf(Value::from_int(1));
            }
            let children = (0..q)
                .map(|d| {
                    if d as u32 == prefix[j] {
                        build(prefix, j + 1, q)
                    } else {
                        Node::Leaf(Value::zero())
                    }
                })
                .collect();
            Node::Internal(children)
        }
        LcFunction {
            spec,
            level: disc.depth(),
            root: build(disc.prefix(), 0, q),
        }
    }

    /// Level-n truncation of `x -> |x - c|^t`, `t > 0`.
    ///
    /// Away from `c` the function is constant on the level-n cells, so both
    /// truncations agree there: the cell first differing from `c` at digit
    /// j carries `q^{-jt}`.  On the cell around `c` the conditional
    /// expectation is `(q-1)/(q - q^{-t}) * q^{-nt}` and the center sample
    /// is 0.  The center must be representable at level n.
    pub fn abs_power(
        c: &Point,
        t: f64,
        level: usize,
        truncation: Truncation,
        spec: RingSpec,
    ) -> Result<LcFunction> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveExponent { t });
        }
        if c.depth() > level {
            return Err(Error::CenterTooDeep {
                center_depth: c.depth(),
                level,
            });
        }
        let q = spec.q();
        let qf = q as f64;
        let center_cell_value = match truncation {
            Truncation::Average => {
                let c_const = (qf - 1.0) / (qf - qf.powf(-t));
                c_const * qf.powf(-(level as f64) * t)
            }
            Truncation::Sample => 0.0,
        };
        fn build(c: &Point, j: usize, level: usize, q: u32, t: f64, center_value: f64) -> Node {
            if j == level {
                return Node::Leaf(Value::Real(center_value));
            }
            let sibling = Value::Real((q as f64).powf(-(j as f64) * t));
            let children = (0..q)
                .map(|d| {
                    if d == c.digit(j) {
                        build(c, j + 1, level, q, t, center_value)
                    } else {
                        Node::Leaf(sibling.clone())
                    }
                })
                .collect();
            Node::Internal(children)
        }
        Ok(LcFunction {
            spec,
            level,
            root: build(c, 0, level, q, t, center_cell_value).collapse(),
        })
    }

    /// Alternating sum `sum_k w_k * indicator(A_k)` where `A_k` is the disc
    /// of radius `q^{-(k+1)}` around `pi^k`.  Harmonic weights run through
    /// every `A_k` resolvable strictly inside the level (`k <= level - 2`);
    /// unit weights run through `k < 2 * pairs` and need `level >= 2*pairs + 1`.
    pub fn alternating(
        level: usize,
        weights: AlternatingWeights,
        spec: RingSpec,
    ) -> Result<LcFunction> {
        let k_max = match weights {
            AlternatingWeights::Harmonic => {
                if level < 2 {
                    return Err(Error::LevelTooSmall {
                        required: 2,
                        got: level,
                    });
                }
                level - 2
            }
            AlternatingWeights::Unit { pairs } => {
                if pairs < 1 {
                    return Err(Error::LevelTooSmall {
                        required: 1,
                        got: pairs,
                    });
                }
                if level < 2 * pairs + 1 {
                    return Err(Error::LevelTooSmall {
                        required: 2 * pairs + 1,
                        got: level,
                    });
                }
                2 * pairs - 1
            }
        };
        let weight = |k: usize| -> Value {
            let sign = if k % 2 == 0 { 1i64 } else { -1i64 };
            match weights {
                AlternatingWeights::Harmonic => Value::ratio(sign, (k + 1) as i64),
                AlternatingWeights::Unit { .. } => Value::from_int(sign),
            }
        };
        let q = spec.q();
        // Zero spine: at depth k the digit-1 child is A_k, other nonzero
        // digits never meet any A_j.
        let mut node = Node::Leaf(Value::zero());
        for k in (0..=k_max).rev() {
            let children = (0..q)
                .map(|d| match d {
                    0 => node.clone(),
                    1 => Node::Leaf(weight(k)),
                    _ => Node::Leaf(Value::zero()),
                })
                .collect();
            node = Node::Internal(children);
        }
        Ok(LcFunction {
            spec,
            level,
            root: node.collapse(),
        })
    }

    /// Build from the `q^level` cell values listed in dictionary order of
    /// the cell digits (first digit most significant).
    pub fn from_table(level: usize, values: Vec<Value>, spec: RingSpec) -> Result<LcFunction> {
        let q = spec.q() as usize;
        let expected = q.checked_pow(level as u32).expect("table size overflow");
        if values.len() != expected {
            return Err(Error::TableSizeMismatch {
                expected,
                got: values.len(),
            });
        }
        fn build(values: &[Value], start: usize, width: usize, q: usize) -> Node {
            if width == 1 {
                return Node::Leaf(values[start].clone());
            }
            let child_width = width / q;
            let children = (0..q)
                .map(|d| build(values, start + d * child_width, child_width, q))
                .collect();
            Node::Internal(children)
        }
        Ok(LcFunction {
            spec,
            level,
            root: build(&values, 0, expected, q).collapse(),
        })
    }

    /// Seeded uniform random level-n function with rational values drawn
    /// from the dyadic grid of step (hi-lo)/4096 inside `[lo, hi]`.
    pub fn random(level: usize, lo: f64, hi: f64, seed: u64, spec: RingSpec) -> LcFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo_r = BigRational::from_f64(lo).expect("finite range");
        let hi_r = BigRational::from_f64(hi).expect("finite range");
        let step = (&hi_r - &lo_r) / BigRational::from_integer(4096.into());
        let count = (spec.q() as usize).pow(level as u32);
        let values = (0..count)
            .map(|_| {
                let k: u32 = rng.gen_range(0..=4096);
                Value::Rational(&lo_r + &step * BigRational::from_integer(k.into()))
            })
            .collect();
        LcFunction::from_table(level, values, spec).expect("table size matches level")
    }

    /// Value at `x` (digits beyond the stored leaves are irrelevant).
    pub fn evaluate(&self, x: &Point) -> Value {
        let mut node = &self.root;
        let mut depth = 0usize;
        loop {
            match node {
                Node::Leaf(v) => return v.clone(),
                Node::Internal(children) => {
                    node = &children[x.digit(depth) as usize];
                    depth += 1;
                }
            }
        }
    }

    /// Exact mean over a disc; the tower property `avg(D) = mean of child
    /// averages` holds by construction.
    pub fn disc_average(&self, disc: &Disc) -> Value {
        fn subtree_average(node: &Node, q: u32) -> Value {
            match node {
                Node::Leaf(v) => v.clone(),
                Node::Internal(children) => children
                    .iter()
                    .map(|c| subtree_average(c, q))
                    .reduce(|a, b| a.add(&b))
                    .expect("q >= 2 children")
                    .div_nat(q),
            }
        }
        let mut node = &self.root;
        for &d in disc.prefix() {
            match node {
                Node::Leaf(v) => return v.clone(),
                Node::Internal(children) => node = &children[d as usize],
            }
        }
        subtree_average(node, self.spec.q())
    }

    /// Haar integral over the whole ring.
    pub fn integral(&self) -> Value {
        self.disc_average(&Disc::root(self.spec))
    }

    /// `x -> f(x - c)`.  Translation permutes the level-n cells, so the
    /// result is again level n and exact: the first n digits of `x - c`
    /// depend only on the first n digits of `x` and `c`.
    pub fn translate(&self, c: &Point) -> LcFunction {
        let n = self.level;
        let q = self.spec.q() as usize;
        let count = q.pow(n as u32);
        let mut values = Vec::with_capacity(count);
        let mut digits = vec![0u32; n];
        for idx in 0..count {
            // Dictionary order: first digit most significant.
            let mut rest = idx;
            for slot in digits.iter_mut().rev() {
                *slot = (rest % q) as u32;
                rest /= q;
            }
            let x = Point::from_digits(digits.clone(), self.spec).expect("digits < q");
            let y = x.sub_mod(c, n, self.spec);
            values.push(self.evaluate(&y));
        }
        LcFunction::from_table(n, values, self.spec).expect("table size matches level")
    }

    /// Pointwise `sum_i coeff_i * f_i`; level is the max of the input
    /// levels, rationality is preserved when every input is rational.
    pub fn linear_combine(terms: &[(Value, &LcFunction)]) -> Result<LcFunction> {
        let (_, first) = terms.first().ok_or(Error::EmptyCombination)?;
        let spec = first.spec;
        if terms.iter().any(|(_, f)| f.spec != spec) {
            return Err(Error::SpecMismatch);
        }
        let level = terms.iter().map(|(_, f)| f.level).max().unwrap();
        let q = spec.q() as usize;

        fn combine(parts: &[(&Value, &Node)], q: usize) -> Node {
            if parts.iter().all(|(_, n)| matches!(n, Node::Leaf(_))) {
                let total = parts
                    .iter()
                    .map(|(c, n)| match n {
                        Node::Leaf(v) => c.mul(v),
                        Node::Internal(_) => unreachable!(),
                    })
                    .reduce(|a, b| a.add(&b))
                    .expect("nonempty term list");
                return Node::Leaf(total);
            }
            let children = (0..q)
                .map(|d| {
                    let sub: Vec<(&Value, &Node)> = parts
                        .iter()
                        .map(|&(c, n)| match n {
                            Node::Leaf(_) => (c, n),
                            Node::Internal(ch) => (c, &ch[d]),
                        })
                        .collect();
                    combine(&sub, q)
                })
                .collect();
            Node::Internal(children)
        }

        let parts: Vec<(&Value, &Node)> = terms.iter().map(|(c, f)| (c, &f.root)).collect();
        Ok(LcFunction {
            spec,
            level,
            root: combine(&parts, q).collapse(),
        })
    }

    /// Same function viewed at a deeper level (refining the declared cell
    /// structure changes nothing).
    pub fn at_level(&self, level: usize) -> Result<LcFunction> {
        if level < self.level {
            return Err(Error::LevelTooSmall {
                required: self.level,
                got: level,
            });
        }
        Ok(LcFunction {
            spec: self.spec,
            level,
            root: self.root.clone(),
        })
    }

    /// Leaf values in Beer order: children visited by digit rank.  A leaf
    /// at depth d stands for a block of `q^{n-d}` consecutive level-n
    /// cells, so consecutive leaves are consecutive cells.
    pub fn leaf_values_in_rank_order(&self, ord: &DigitOrdering) -> Vec<Value> {
        fn walk(node: &Node, ord: &DigitOrdering, out: &mut Vec<Value>) {
            match node {
                Node::Leaf(v) => out.push(v.clone()),
                Node::Internal(children) => {
                    for r in 0..ord.q() {
                        walk(&children[ord.digit_with_rank(r) as usize], ord, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, ord, &mut out);
        out
    }

    /// All `q^level` cell values, indexed little-endian: cell of `x` sits
    /// at index `sum_j x_j q^j`.
    pub fn cell_values_le(&self) -> Vec<Value> {
        let q = self.spec.q() as usize;
        let count = q.pow(self.level as u32);
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0u32; self.level];
        for idx in 0..count {
            let mut rest = idx;
            for slot in digits.iter_mut() {
                *slot = (rest % q) as u32;
                rest /= q;
            }
            let x = Point::from_digits(digits.clone(), self.spec).expect("digits < q");
            out.push(self.evaluate(&x));
        }
        out
    }

    /// Largest leaf value.
    pub fn max_value(&self) -> Value {
        fn walk(node: &Node) -> Value {
            match node {
                Node::Leaf(v) => v.clone(),
                Node::Internal(ch) => ch.iter().map(walk).reduce(|a, b| a.max(&b)).unwrap(),
            }
        }
        walk(&self.root)
    }

    /// Smallest leaf value.
    pub fn min_value(&self) -> Value {
        fn walk(node: &Node) -> Value {
            match node {
                Node::Leaf(v) => v.clone(),
                Node::Internal(ch) => ch.iter().map(walk).reduce(|a, b| a.min(&b)).unwrap(),
            }
        }
        walk(&self.root)
    }
}
