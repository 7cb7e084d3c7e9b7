//! Finite point multisets in `O` and their exact disc discrepancy.
//!
//! The discrepancy of a multiset X of N points is the supremum over all
//! discs D of `| |X ∩ D|/N - measure(D) |`.  The supremum decomposes into
//! three finite families, so it is computed exactly in rationals:
//!
//! * visited discs: every disc containing at least one point is a node of
//!   the count trie built over the padded digit strings;
//! * the largest empty disc: among discs missing X entirely the measure is
//!   maximal for the shallowest one, always a sibling of a visited node;
//! * shrinking discs around a point: the terms `|mult(x)/N - q^{-k}|`
//!   increase to `mult(x)/N` as the disc shrinks, giving the point-mass
//!   supremum.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Disc;
use crate::ring::{qpow, Point, RingSpec};
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct CountNode {
    count: u64,
    /// `None` below `maxdepth` (leaf); empty subtrees are `None` slots.
    children: Option<Vec<Option<CountNode>>>,
}

/// A nonempty multiset of points with its count trie.
#[derive(Debug, Clone)]
pub struct PointSet {
    spec: RingSpec,
    /// Distinct points with multiplicities, sorted by digit string.
    points: Vec<(Point, u64)>,
    total: u64,
    maxdepth: usize,
    root: CountNode,
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl PointSet {
    pub fn new(points: Vec<Point>, spec: RingSpec) -> Result<PointSet> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut sorted = points;
        sorted.sort();
        let mut distinct: Vec<(Point, u64)> = Vec::new();
        for p in sorted {
            match distinct.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => distinct.push((p, 1)),
            }
        }
        let total: u64 = distinct.iter().map(|(_, m)| m).sum();
        let maxdepth = distinct.iter().map(|(p, _)| p.depth()).max().unwrap();
        let q = spec.q() as usize;

        let mut root = CountNode {
            count: 0,
            children: None,
        };
        for (p, mult) in &distinct {
            let mut node = &mut root;
            node.count += mult;
            for i in 0..maxdepth {
                let children = node
                    .children
                    .get_or_insert_with(|| (0..q).map(|_| None).collect());
                let slot = &mut children[p.digit(i) as usize];
                let child = slot.get_or_insert_with(|| CountNode {
                    count: 0,
                    children: None,
                });
                child.count += mult;
                node = child;
            }
        }

        Ok(PointSet {
            spec,
            points: distinct,
            total,
            maxdepth,
            root,
        })
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    /// Number of points counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Deepest canonical digit length among the points.
    pub fn maxdepth(&self) -> usize {
        self.maxdepth
    }

    /// Distinct points with multiplicities, sorted.
    pub fn iter(&self) -> impl Iterator<Item = &(Point, u64)> {
        self.points.iter()
    }

    /// `|X ∩ D|`, exact.
    pub fn count_in(&self, disc: &Disc) -> u64 {
        let mut node = &self.root;
        for (i, &d) in disc.prefix().iter().enumerate() {
            if i >= self.maxdepth {
                // Beyond the trie all stored digits are zero.
                if disc.prefix()[i..].iter().any(|&d| d != 0) {
                    return 0;
                }
                return node.count;
            }
            match node.children.as_ref().and_then(|c| c[d as usize].as_ref()) {
                Some(child) => node = child,
                None => return 0,
            }
        }
        node.count
    }

    /// Exact disc discrepancy.
    pub fn discrepancy(&self) -> BigRational {
        let q = self.spec.q();
        let n = self.total;
        let mut best = BigRational::zero();

        // Visited discs.
        fn walk(node: &CountNode, depth: usize, q: u32, n: u64, best: &mut BigRational) {
            let term = (ratio(node.count, n) - qpow(q, -(depth as i64))).abs();
            if term > *best {
                *best = term;
            }
            if let Some(children) = &node.children {
                for child in children.iter().flatten() {
                    walk(child, depth + 1, q, n, best);
                }
            }
        }
        walk(&self.root, 0, q, n, &mut best);

        // Point masses: discs shrinking onto a point approach mult/N.
        for (_, mult) in &self.points {
            let term = ratio(*mult, n);
            if term > best {
                best = term;
            }
        }

        // Largest empty disc.
        let empty = qpow(q, -(self.shallowest_empty_depth() as i64));
        if empty > best {
            best = empty;
        }

        best
    }

    /// Depth of the shallowest disc containing no point.  A maximal empty
    /// disc is a sibling subtree of a visited node, and below `maxdepth`
    /// every visited node keeps only its zero-digit child, so the search
    /// never needs to descend past `maxdepth + 1`.
    fn shallowest_empty_depth(&self) -> usize {
        let mut frontier: Vec<&CountNode> = vec![&self.root];
        for depth in 1..=self.maxdepth {
            let mut next = Vec::new();
            for node in frontier {
                let children = node.children.as_ref().expect("node above maxdepth");
                if children.iter().any(|c| c.is_none()) {
                    return depth;
                }
                next.extend(children.iter().flatten());
            }
            frontier = next;
        }
        self.maxdepth + 1
    }

    /// The multiset `{x + c : x in X}`; addition is exact (one digit of
    /// headroom absorbs any carry).
    pub fn translate(&self, c: &Point) -> PointSet {
        let mut moved = Vec::with_capacity(self.total as usize);
        for (p, mult) in &self.points {
            let depth = p.depth().max(c.depth()) + 1;
            let sum = p.add_mod(c, depth, self.spec);
            for _ in 0..*mult {
                moved.push(sum.clone());
            }
        }
        PointSet::new(moved, self.spec).expect("translate preserves cardinality")
    }

    /// Parse one point per line; `#` starts a comment, blank lines skipped.
    pub fn parse_lines(text: &str, spec: RingSpec) -> Result<PointSet> {
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            points.push(Point::parse(line, spec)?);
        }
        PointSet::new(points, spec)
    }
}

/// All `q^depth` digit strings of length `depth`: the exact uniform grid.
pub fn full_grid(depth: usize, spec: RingSpec) -> PointSet {
    let count = (spec.q() as u64).pow(depth as u32);
    let points = (0..count)
        .map(|idx| Point::from_cell_index(idx, depth, spec))
        .collect();
    PointSet::new(points, spec).expect("grid is nonempty")
}

/// The perturbed grid that defeats every Koksma-type bound: start from the
/// full depth-`depth` grid, add `pi^k + pi^depth` for even k < 2*pairs and
/// remove `pi^k` for odd k < 2*pairs.  Cardinality stays `q^depth` and the
/// discrepancy stays exactly `q^{-depth}`, but the QMC error against the
/// alternating unit function is `2*pairs / q^depth`.
pub fn anti_koksma_set(pairs: usize, depth: usize, spec: RingSpec) -> Result<PointSet> {
    if pairs < 1 {
        return Err(Error::LevelTooSmall {
            required: 1,
            got: pairs,
        });
    }
    if depth < 2 * pairs {
        return Err(Error::GridDepthTooSmall {
            pairs,
            depth,
            required: 2 * pairs,
        });
    }
    let grid = full_grid(depth, spec);
    let mut points: Vec<Point> = Vec::with_capacity(grid.total as usize);
    for (p, mult) in grid.iter() {
        for _ in 0..*mult {
            points.push(p.clone());
        }
    }
    for k in (0..2 * pairs).step_by(2) {
        let mut digits = vec![0u32; depth + 1];
        digits[k] = 1;
        digits[depth] = 1;
        points.push(Point::from_digits(digits, spec).expect("digits < q"));
    }
    for k in (1..2 * pairs).step_by(2) {
        let target = Point::uniformizer_pow(k);
        let pos = points
            .iter()
            .position(|p| *p == target)
            .expect("grid contains pi^k for k < depth");
        points.swap_remove(pos);
    }
    PointSet::new(points, spec)
}

/// Seeded i.i.d. uniform digit strings of the given length.
pub fn random_set(count: usize, depth: usize, seed: u64, spec: RingSpec) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = spec.q();
    let points = (0..count)
        .map(|_| {
            let digits: Vec<u32> = (0..depth).map(|_| rng.gen_range(0..q)).collect();
            Point::from_digits(digits, spec).expect("digits < q")
        })
        .collect();
    PointSet::new(points, spec)
}
