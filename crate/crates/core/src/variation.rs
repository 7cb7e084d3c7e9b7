//! The three variation functionals for locally constant functions.
//!
//! * Taibleson: sup over disc partitions of the summed oscillations,
//!   computed exactly by the recursion `V(D) = max(osc(D), sum of V over
//!   the children)`.
//! * Beer: total variation of the cell values read in the dictionary order
//!   induced by a digit ordering.  For a level-n function the level-m Beer
//!   sums stabilize at m = n, so the leaf traversal already gives the limit.
//! * Berkovich: sum of `|avg(D') - avg(D)|` over all parent-child pairs of
//!   the tree; below a constancy disc every term vanishes, so the collapsed
//!   trie carries the whole sum.
//!
//! All three are exact on rational-valued functions.

use crate::funcspace::{LcFunction, Node, Value};
use crate::geometry::Disc;
use crate::ring::DigitOrdering;
use crate::{Error, Result};

/// `max f - min f` over a disc; zero on discs where `f` is constant.
pub fn oscillation(f: &LcFunction, disc: &Disc) -> Value {
    fn min_max(node: &Node) -> (Value, Value) {
        match node {
            Node::Leaf(v) => (v.clone(), v.clone()),
            Node::Internal(children) => children
                .iter()
                .map(min_max)
                .reduce(|(lo1, hi1), (lo2, hi2)| (lo1.min(&lo2), hi1.max(&hi2)))
                .expect("q >= 2 children"),
        }
    }
    let mut node = f.root();
    for &d in disc.prefix() {
        match node {
            Node::Leaf(_) => return Value::zero(),
            Node::Internal(children) => node = &children[d as usize],
        }
    }
    let (lo, hi) = min_max(node);
    hi.sub(&lo)
}

/// Taibleson variation: the supremum over all partitions of `O` into discs
/// of the summed oscillations.
///
/// Every partition of a disc either keeps it whole or refines through its
/// q children, which is exactly the recursion below; leaves contribute
/// nothing because the function is constant there.
pub fn taibleson_variation(f: &LcFunction) -> Value {
    struct Summary {
        min: Value,
        max: Value,
        variation: Value,
    }
    fn walk(node: &Node) -> Summary {
        match node {
            Node::Leaf(v) => Summary {
                min: v.clone(),
                max: v.clone(),
                variation: Value::zero(),
            },
            Node::Internal(children) => {
                let parts: Vec<Summary> = children.iter().map(walk).collect();
                let mut iter = parts.iter();
                let first = iter.next().expect("q >= 2 children");
                let mut min = first.min.clone();
                let mut max = first.max.clone();
                let mut sum = first.variation.clone();
                for p in iter {
                    min = min.min(&p.min);
                    max = max.max(&p.max);
                    sum = sum.add(&p.variation);
                }
                let osc = max.sub(&min);
                Summary {
                    min,
                    max,
                    variation: osc.max(&sum),
                }
            }
        }
    }
    walk(f.root()).variation
}

/// Beer variation at the function's own level: the sum of absolute
/// differences of consecutive cell values in Beer order.
pub fn beer_variation(f: &LcFunction, ord: &DigitOrdering) -> Value {
    let leaves = f.leaf_values_in_rank_order(ord);
    total_variation_of_sequence(&leaves)
}

/// Beer sum at an explicit level `m >= level(f)`, by walking all `q^m`
/// cells one by one in Beer order.  Refining past the function's level
/// inserts only zero differences, so this equals [`beer_variation`] for
/// every such m; the explicit enumeration keeps the stabilization testable
/// against the leaf traversal.
pub fn beer_variation_at_level(f: &LcFunction, m: usize, ord: &DigitOrdering) -> Result<Value> {
    if m < f.level() {
        return Err(Error::LevelTooSmall {
            required: f.level(),
            got: m,
        });
    }
    let spec = f.spec();
    let count = (spec.q() as u64).pow(m as u32);
    let mut total = Value::zero();
    let mut prev: Option<Value> = None;
    for i in 0..count {
        let cell = Disc::from_beer_index(i, m, ord, spec);
        let v = f.evaluate(&cell.center());
        if let Some(p) = &prev {
            total = total.add(&v.sub(p).abs());
        }
        prev = Some(v);
    }
    Ok(total)
}

fn total_variation_of_sequence(values: &[Value]) -> Value {
    let mut total = Value::zero();
    for pair in values.windows(2) {
        total = total.add(&pair[1].sub(&pair[0]).abs());
    }
    total
}

/// Berkovich-analytic variation: `sum |avg(D') - avg(D)|` over all
/// parent-child pairs `D' < D`, accumulated bottom-up on the collapsed trie.
pub fn berkovich_variation(f: &LcFunction) -> Value {
    struct Summary {
        average: Value,
        variation: Value,
    }
    fn walk(node: &Node, q: u32) -> Summary {
        match node {
            Node::Leaf(v) => Summary {
                average: v.clone(),
                variation: Value::zero(),
            },
            Node::Internal(children) => {
                let parts: Vec<Summary> = children.iter().map(|c| walk(c, q)).collect();
                let average = parts
                    .iter()
                    .map(|p| p.average.clone())
                    .reduce(|a, b| a.add(&b))
                    .expect("q >= 2 children")
                    .div_nat(q);
                let mut variation = Value::zero();
                for p in &parts {
                    variation = variation.add(&p.variation);
                    variation = variation.add(&p.average.sub(&average).abs());
                }
                Summary { average, variation }
            }
        }
    }
    walk(f.root(), f.spec().q()).variation
}

/// All three functionals side by side.
#[derive(Debug, Clone)]
pub struct VariationReport {
    pub taibleson: f64,
    pub beer: f64,
    pub berkovich: f64,
    pub level: usize,
    /// True when the input is rational-valued, so the three numbers above
    /// are exact rationals rounded once for display.
    pub exact: bool,
}

pub fn variation_report(f: &LcFunction, ord: &DigitOrdering) -> VariationReport {
    let taibleson = taibleson_variation(f);
    let beer = beer_variation(f, ord);
    let berkovich = berkovich_variation(f);
    let exact = taibleson.is_exact() && beer.is_exact() && berkovich.is_exact();
    VariationReport {
        taibleson: taibleson.to_f64(),
        beer: beer.to_f64(),
        berkovich: berkovich.to_f64(),
        level: f.level(),
        exact,
    }
}
