//! Discs in `O` as nodes of the rooted q-ary digit tree.
//!
//! A disc of radius `q^{-k}` is exactly a length-k digit prefix; its Haar
//! measure equals its radius.  The whole tree is addressed lazily through
//! prefixes, it is never materialized.

use num::rational::BigRational;

use crate::ring::{qpow, DigitOrdering, Point, RingSpec};
use crate::{Error, Result};

/// A disc `D_{q^{-k}}(a)`, stored as the length-k digit prefix shared by its
/// elements.  Depth 0 is the whole ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Disc {
    prefix: Vec<u32>,
    spec: RingSpec,
}

/// Discs double as addresses into the digit tree.
pub type TreeAddress = Disc;

impl Disc {
    pub fn root(spec: RingSpec) -> Self {
        Disc {
            prefix: Vec::new(),
            spec,
        }
    }

    pub fn new(prefix: Vec<u32>, spec: RingSpec) -> Result<Self> {
        for &d in &prefix {
            if d >= spec.q() {
                return Err(Error::DigitOutOfRange { digit: d, q: spec.q() });
            }
        }
        Ok(Disc { prefix, spec })
    }

    /// Disc of radius `q^{-depth}` around `center`; digits of `center`
    /// beyond `depth` are irrelevant and dropped.
    pub fn around(center: &Point, depth: usize, spec: RingSpec) -> Self {
        let mut prefix = Vec::with_capacity(depth);
        for i in 0..depth {
            prefix.push(center.digit(i));
        }
        Disc { prefix, spec }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    /// Haar measure, equal to the radius `q^{-depth}`.
    pub fn measure(&self) -> BigRational {
        qpow(self.spec.q(), -(self.depth() as i64))
    }

    pub fn radius(&self) -> BigRational {
        self.measure()
    }

    /// The canonical center: the prefix read as a point.
    pub fn center(&self) -> Point {
        Point::from_digits(self.prefix.clone(), self.spec).expect("prefix digits are valid")
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.prefix
            .iter()
            .enumerate()
            .all(|(i, &d)| x.digit(i) == d)
    }

    /// True if `other` is a (not necessarily proper) subdisc.
    pub fn contains_disc(&self, other: &Disc) -> bool {
        other.prefix.len() >= self.prefix.len() && other.prefix.starts_with(&self.prefix)
    }

    pub fn child(&self, digit: u32) -> Result<Disc> {
        if digit >= self.spec.q() {
            return Err(Error::DigitOutOfRange {
                digit,
                q: self.spec.q(),
            });
        }
        let mut prefix = self.prefix.clone();
        prefix.push(digit);
        Ok(Disc {
            prefix,
            spec: self.spec,
        })
    }

    /// The q depth-(k+1) subdiscs partitioning this disc.
    pub fn children(&self) -> Vec<Disc> {
        (0..self.spec.q())
            .map(|d| self.child(d).expect("digit < q"))
            .collect()
    }

    pub fn parent(&self) -> Option<Disc> {
        if self.prefix.is_empty() {
            return None;
        }
        let mut prefix = self.prefix.clone();
        prefix.pop();
        Some(Disc {
            prefix,
            spec: self.spec,
        })
    }

    /// Position of this depth-k disc in the dictionary order of its digits
    /// under `ord`, with the first digit most significant.  The level-k
    /// Beer partition cell `E_i` is the disc with index `i`.
    pub fn beer_index(&self, ord: &DigitOrdering) -> u64 {
        let q = self.spec.q() as u64;
        let mut idx = 0u64;
        for &d in &self.prefix {
            idx = idx * q + ord.rank(d) as u64;
        }
        idx
    }

    /// Inverse of [`Disc::beer_index`] at a given depth.
    pub fn from_beer_index(index: u64, depth: usize, ord: &DigitOrdering, spec: RingSpec) -> Disc {
        let q = spec.q() as u64;
        let mut prefix = vec![0u32; depth];
        let mut rest = index;
        for slot in prefix.iter_mut().rev() {
            *slot = ord.digit_with_rank((rest % q) as u32);
            rest /= q;
        }
        debug_assert_eq!(rest, 0, "index out of range at this depth");
        Disc { prefix, spec }
    }

    /// Parse the text form `k:d0,d1,...` (root is `0:`).
    pub fn parse(s: &str, spec: RingSpec) -> Result<Disc> {
        let (depth_part, digits_part) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("disc {s:?} missing ':'")))?;
        let depth: usize = depth_part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad disc depth in {s:?}")))?;
        let digits_part = digits_part.trim();
        let mut prefix = Vec::new();
        if !digits_part.is_empty() {
            for part in digits_part.split(',') {
                let d: u32 = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad digit {part:?} in disc {s:?}")))?;
                prefix.push(d);
            }
        }
        if prefix.len() != depth {
            return Err(Error::Parse(format!(
                "disc {s:?} declares depth {depth} but lists {} digits",
                prefix.len()
            )));
        }
        Disc::new(prefix, spec)
    }
}

impl std::fmt::Display for Disc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.prefix.iter().map(|d| d.to_string()).collect();
        write!(f, "{}:{}", self.prefix.len(), parts.join(","))
    }
}

/// The smallest disc containing both points: the longest common digit
/// prefix.  Errors when the points coincide (no smallest disc exists).
pub fn smallest_disc_containing(x: &Point, y: &Point, spec: RingSpec) -> Result<Disc> {
    if x == y {
        return Err(Error::IdenticalPoints);
    }
    let mut prefix = Vec::new();
    let mut i = 0usize;
    while x.digit(i) == y.digit(i) {
        prefix.push(x.digit(i));
        i += 1;
    }
    Ok(Disc { prefix, spec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ArithmeticMode;
    use num::One;
    use proptest::prelude::*;

    fn spec(q: u32) -> RingSpec {
        RingSpec::new(q, ArithmeticMode::PowerSeries).unwrap()
    }

    fn pt(digits: &[u32], s: RingSpec) -> Point {
        Point::from_digits(digits.to_vec(), s).unwrap()
    }

    #[test]
    fn measure_equals_radius() {
        let s = spec(3);
        assert_eq!(Disc::root(s).measure(), BigRational::one());
        let d = Disc::new(vec![1, 0], s).unwrap();
        assert_eq!(d.measure(), BigRational::new(1.into(), 9.into()));
        // Children partition the parent measure.
        let total: BigRational = d.children().iter().map(Disc::measure).sum();
        assert_eq!(total, d.measure());
    }

    #[test]
    fn containment_pads_with_zeros() {
        let s = spec(2);
        let root = Disc::root(s);
        assert!(root.contains(&Point::zero()));
        assert!(root.contains(&Point::one()));
        let d = Disc::new(vec![0, 1], s).unwrap();
        assert!(d.contains(&Point::uniformizer_pow(1)));
        assert!(!d.contains(&Point::one()));
        // Zero-padding: the prefix [1,0] contains 1 itself.
        let d10 = Disc::new(vec![1, 0], s).unwrap();
        assert!(d10.contains(&Point::one()));
    }

    #[test]
    fn exactly_one_child_contains_each_point() {
        let s = spec(3);
        let d = Disc::new(vec![2], s).unwrap();
        let x = pt(&[2, 0, 1], s);
        let holders: Vec<_> = d.children().into_iter().filter(|c| c.contains(&x)).collect();
        assert_eq!(holders.len(), 1);
        assert_eq!(holders[0].prefix(), &[2, 0]);
        assert_eq!(d.children().len(), 3);
    }

    #[test]
    fn parent_child_roundtrip() {
        let s = spec(5);
        let d = Disc::new(vec![4, 0, 3], s).unwrap();
        assert_eq!(d.parent().unwrap().prefix(), &[4, 0]);
        assert_eq!(Disc::root(s).parent(), None);
        assert!(d.parent().unwrap().contains_disc(&d));
        assert!(!d.contains_disc(&d.parent().unwrap()));
    }

    #[test]
    fn smallest_disc_examples() {
        let s = spec(2);
        // x = 0, y = pi^2 agree on the first two digits.
        let d = smallest_disc_containing(&Point::zero(), &Point::uniformizer_pow(2), s).unwrap();
        assert_eq!(d.prefix(), &[0, 0]);
        // Differ in the leading digit: whole ring.
        let d = smallest_disc_containing(&Point::zero(), &Point::one(), s).unwrap();
        assert_eq!(d.depth(), 0);
        let s3 = spec(3);
        let d = smallest_disc_containing(&pt(&[1, 2], s3), &pt(&[1, 1], s3), s3).unwrap();
        assert_eq!(d.prefix(), &[1]);
        assert!(smallest_disc_containing(&Point::one(), &Point::one(), s).is_err());
    }

    #[test]
    fn beer_index_dictionary_order() {
        let s = spec(2);
        let ord = DigitOrdering::identity(2);
        let idx: Vec<u64> = [[0u32, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|p| Disc::new(p.to_vec(), s).unwrap().beer_index(&ord))
            .collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }

    #[test]
    fn beer_cells_start_at_alpha_and_end_at_beta() {
        // alpha = geometric_point(s_0) lies in E_0 and beta in the last cell,
        // for the identity and for a shuffled ordering.
        for ord in [
            DigitOrdering::identity(3),
            DigitOrdering::from_ordered_digits(vec![2, 0, 1]).unwrap(),
        ] {
            let s = spec(3);
            let depth = 4usize;
            let alpha = crate::ring::geometric_point(ord.smallest(), depth, s).unwrap();
            let beta = crate::ring::geometric_point(ord.largest(), depth, s).unwrap();
            let first = Disc::from_beer_index(0, depth, &ord, s);
            let last = Disc::from_beer_index(3u64.pow(4) - 1, depth, &ord, s);
            assert!(first.contains(&alpha));
            assert!(last.contains(&beta));
        }
    }

    // Every disc is a consecutive block of Beer cells: the level-m subdiscs
    // of a depth-k disc occupy indices [i * q^{m-k}, (i+1) * q^{m-k}).
    #[test]
    fn discs_are_consecutive_beer_blocks() {
        let s = spec(3);
        let ord = DigitOrdering::from_ordered_digits(vec![1, 2, 0]).unwrap();
        let m = 4usize;
        for k in 0..=m {
            for raw in 0..3u64.pow(k as u32) {
                let d = Disc::from_beer_index(raw, k, &ord, s);
                let i = d.beer_index(&ord);
                let width = 3u64.pow((m - k) as u32);
                let mut seen: Vec<u64> = (0..3u64.pow(m as u32))
                    .filter(|&j| d.contains_disc(&Disc::from_beer_index(j, m, &ord, s)))
                    .collect();
                seen.sort_unstable();
                let expect: Vec<u64> = (i * width..(i + 1) * width).collect();
                assert_eq!(seen, expect);
            }
        }
    }

    #[test]
    fn disc_text_roundtrip() {
        let s = spec(3);
        let d = Disc::parse("2:0,1", s).unwrap();
        assert_eq!(d.prefix(), &[0, 1]);
        assert_eq!(d.to_string(), "2:0,1");
        let root = Disc::parse("0:", s).unwrap();
        assert_eq!(root, Disc::root(s));
        assert_eq!(root.to_string(), "0:");
        assert!(Disc::parse("2:0", s).is_err());
        assert!(Disc::parse("1:7", s).is_err());
        assert!(Disc::parse("nope", s).is_err());
    }

    proptest! {
        // Measure of the smallest disc containing x and y equals |x - y|.
        #[test]
        fn separating_disc_measure_is_distance(
            a in proptest::collection::vec(0u32..3, 0..8),
            b in proptest::collection::vec(0u32..3, 0..8),
            padic_mode in any::<bool>(),
        ) {
            let mode = if padic_mode { ArithmeticMode::Padic } else { ArithmeticMode::PowerSeries };
            let s = RingSpec::new(3, mode).unwrap();
            let x = Point::from_digits(a, s).unwrap();
            let y = Point::from_digits(b, s).unwrap();
            prop_assume!(x != y);
            let d = smallest_disc_containing(&x, &y, s).unwrap();
            let diff = x.sub_mod(&y, 10, s);
            prop_assert_eq!(d.measure(), diff.abs(s));
            prop_assert!(d.contains(&x) && d.contains(&y));
        }

        // Beer index respects radius: level-k indices are exactly 0..q^k.
        #[test]
        fn beer_index_bijective(k in 0usize..5) {
            let s = spec(3);
            let ord = DigitOrdering::from_ordered_digits(vec![2, 1, 0]).unwrap();
            let count = 3u64.pow(k as u32);
            let mut seen = vec![false; count as usize];
            for raw in 0..count {
                let d = Disc::from_beer_index(raw, k, &ord, s);
                prop_assert_eq!(d.beer_index(&ord), raw);
                seen[raw as usize] = true;
            }
            prop_assert!(seen.iter().all(|&b| b));
        }

        #[test]
        fn contains_iff_around_matches(
            a in proptest::collection::vec(0u32..2, 0..7),
            k in 0usize..7,
        ) {
            let s = spec(2);
            let x = Point::from_digits(a, s).unwrap();
            let d = Disc::around(&x, k, s);
            prop_assert!(d.contains(&x));
            prop_assert_eq!(d.depth(), k);
        }
    }
}
