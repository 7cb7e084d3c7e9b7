//! Slow reference implementations of the main quantities.
//!
//! Each function here recomputes something the fast modules produce, by a
//! different route: explicit enumeration instead of trie recursion, direct
//! character sums instead of the fast transform, containment scans instead
//! of the count trie.  They exist to be diffed against in tests and are
//! exponential or worse, so keep inputs tiny.

use num::complex::Complex64;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::discrepancy::PointSet;
use crate::fourier::CharacterGroup;
use crate::funcspace::{LcFunction, Value};
use crate::geometry::Disc;
use crate::ring::{Point, RingSpec};
use crate::Result;

fn cells_of(disc: &Disc, level: usize, spec: RingSpec) -> Vec<Point> {
    let q = spec.q() as u64;
    let free = level - disc.depth();
    (0..q.pow(free as u32))
        .map(|idx| {
            let mut digits = disc.prefix().to_vec();
            let mut rest = idx;
            for _ in 0..free {
                digits.push((rest % q) as u32);
                rest /= q;
            }
            Point::from_digits(digits, spec).expect("digits < q")
        })
        .collect()
}

fn oscillation_by_cells(f: &LcFunction, disc: &Disc) -> Value {
    let cells = cells_of(disc, f.level().max(disc.depth()), f.spec());
    let mut min = f.evaluate(&cells[0]);
    let mut max = min.clone();
    for x in &cells[1..] {
        let v = f.evaluate(x);
        min = min.min(&v);
        max = max.max(&v);
    }
    max.sub(&min)
}

fn average_by_cells(f: &LcFunction, disc: &Disc) -> Value {
    let cells = cells_of(disc, f.level().max(disc.depth()), f.spec());
    let mut acc = Value::zero();
    for x in &cells {
        acc = acc.add(&f.evaluate(x));
    }
    acc.div_nat(cells.len() as u32)
}

/// All partitions of `disc` into subdiscs of depth at most
/// `disc.depth() + depth_left`.
fn partitions(disc: &Disc, depth_left: usize) -> Vec<Vec<Disc>> {
    let mut all = vec![vec![disc.clone()]];
    if depth_left > 0 {
        let mut combos: Vec<Vec<Disc>> = vec![Vec::new()];
        for child in disc.children() {
            let child_parts = partitions(&child, depth_left - 1);
            let mut next = Vec::with_capacity(combos.len() * child_parts.len());
            for combo in &combos {
                for part in &child_parts {
                    let mut merged = combo.clone();
                    merged.extend(part.iter().cloned());
                    next.push(merged);
                }
            }
            combos = next;
        }
        all.extend(combos);
    }
    all
}

/// Taibleson variation as a literal supremum over disc partitions.
pub fn taibleson_by_partition_enumeration(f: &LcFunction) -> Value {
    let mut best = Value::zero();
    for partition in partitions(&Disc::root(f.spec()), f.level()) {
        let mut total = Value::zero();
        for part in &partition {
            total = total.add(&oscillation_by_cells(f, part));
        }
        best = best.max(&total);
    }
    best
}

/// Berkovich-analytic variation summed over the full uncollapsed tree.
pub fn berkovich_by_tree_enumeration(f: &LcFunction) -> Value {
    fn walk(f: &LcFunction, disc: &Disc, parent_avg: &Value, acc: &mut Value) {
        let avg = average_by_cells(f, disc);
        *acc = acc.add(&avg.sub(parent_avg).abs());
        if disc.depth() < f.level() {
            for child in disc.children() {
                walk(f, &child, &avg, acc);
            }
        }
    }
    let root = Disc::root(f.spec());
    let root_avg = average_by_cells(f, &root);
    let mut acc = Value::zero();
    for child in root.children() {
        walk(f, &child, &root_avg, &mut acc);
    }
    acc
}

/// Disc discrepancy by scanning every disc of depth up to `maxdepth + 1`
/// with direct containment tests.  Deeper discs only repeat point masses.
pub fn discrepancy_by_enumeration(x: &PointSet) -> BigRational {
    let spec = x.spec();
    let q = spec.q() as u64;
    let total = BigRational::from_integer(x.len().into());
    let mut best = BigRational::zero();
    for depth in 0..=x.maxdepth() + 1 {
        for idx in 0..q.pow(depth as u32) {
            let mut prefix = Vec::with_capacity(depth);
            let mut rest = idx;
            for _ in 0..depth {
                prefix.push((rest % q) as u32);
                rest /= q;
            }
            let disc = Disc::new(prefix, spec).expect("digits < q");
            let mut count = 0u64;
            for (p, mult) in x.iter() {
                if disc.contains(p) {
                    count += mult;
                }
            }
            let term =
                (BigRational::from_integer(count.into()) / &total - disc.measure()).abs();
            best = best.max(term);
        }
    }
    for (_, mult) in x.iter() {
        best = best.max(BigRational::from_integer((*mult).into()) / &total);
    }
    best
}

/// Fourier coefficients as direct inner products against each character.
pub fn fourier_coefficients_by_inner_products(f: &LcFunction) -> Result<Vec<Complex64>> {
    let group = CharacterGroup::new(f.spec(), f.level())?;
    let size = group.size();
    let values: Vec<Complex64> = (0..size)
        .map(|idx| {
            let x = Point::from_cell_index(idx, f.level(), f.spec());
            Complex64::new(f.evaluate(&x).to_f64(), 0.0)
        })
        .collect();
    let mut out = Vec::with_capacity(size as usize);
    for m in 0..size {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, v) in values.iter().enumerate() {
            let x = Point::from_cell_index(idx as u64, f.level(), f.spec());
            acc += v * group.eval(m, &x).conj();
        }
        out.push(acc / size as f64);
    }
    Ok(out)
}
