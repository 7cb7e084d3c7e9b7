//! Koksma-type inequalities: quasi-Monte Carlo error against discrepancy
//! times a variation-derived constant.
//!
//! For a locally constant f and a finite multiset X the error
//! `|mean_X f - integral f|` is bounded by `C * discrepancy(X)` where `C`
//! may be taken as `2q * V_Beer(f)`, `(1 + 1/q) * V_Berkovich(f)`, or the
//! Fourier-analytic variation itself.  No such bound exists with a constant
//! depending only on the Taibleson variation: `anti_koksma_demo` exhibits
//! perturbed grids whose error-to-discrepancy ratio grows without bound
//! while the Taibleson variation of the test function stays at 2.

use num::rational::BigRational;



use crate::discrepancy::{anti_koksma_set, PointSet};
use crate::fourier::fourier_variation;
use crate::funcspace::{AlternatingWeights, LcFunction, Truncation, Value};
use crate::geometry::Disc;
use crate::ring::{DigitOrdering, Point, RingSpec};
use crate::variation::{beer_variation, berkovich_variation, taibleson_variation};
use crate::{Error, Result};

/// `|mean_X f - integral f|`, exact whenever f is rational-valued.
pub fn qmc_error(f: &LcFunction, x: &PointSet) -> Result<Value> {
    if f.spec() != x.spec() {
        return Err(Error::SpecMismatch);
    }
    let mut acc = Value::zero();
    for (p, mult) in x.iter() {
        acc = acc.add(&f.evaluate(p).scale_int(*mult as i64));
    }
    let mean = acc.mul(&Value::ratio(1, x.len() as i64));
    Ok(mean.sub(&f.integral()).abs())
}

/// One empirical check of all three valid inequalities for a pair (f, X).
pub struct KoksmaReport {
    pub lhs: Value,
    pub delta: BigRational,
    pub v_taibleson: Value,
    pub v_beer: Value,
    /// `2q * v_beer`.
    pub c_beer: Value,
    pub bound_beer: Value,
    pub beer_holds: bool,
    pub v_berkovich: Value,
    /// `(1 + 1/q) * v_berkovich`.
    pub c_berkovich: Value,
    pub bound_berkovich: Value,
    pub berkovich_holds: bool,
    /// `None` when the coefficient table would be too large.
    pub v_fourier: Option<f64>,
    pub c_fourier: Option<f64>,
    pub bound_fourier: Option<f64>,
    pub fourier_holds: Option<bool>,
}

/// Additive slack for verdicts on floating-point routes; the inequalities
/// themselves are exact statements.
const FLOAT_SLACK: f64 = 1e-9;

pub fn koksma_check(f: &LcFunction, x: &PointSet, ord: &DigitOrdering) -> Result<KoksmaReport> {
    if f.spec() != x.spec() || ord.q() != f.spec().q() {
        return Err(Error::SpecMismatch);
    }
    let q = f.spec().q();
    let lhs = qmc_error(f, x)?;
    let delta = x.discrepancy();
    let delta_v = Value::Rational(delta.clone());

    let v_taibleson = taibleson_variation(f);

    let v_beer = beer_variation(f, ord);
    let c_beer = v_beer.scale_int(2 * q as i64);
    let bound_beer = c_beer.mul(&delta_v);
    let beer_holds = holds(&lhs, &bound_beer);

    let v_berkovich = berkovich_variation(f);
    let c_berkovich = v_berkovich.mul(&Value::ratio(q as i64 + 1, q as i64));
    let bound_berkovich = c_berkovich.mul(&delta_v);
    let berkovich_holds = holds(&lhs, &bound_berkovich);

    // The other two bounds still apply when the Fourier route is out of
    // reach (table too big, or composite q with no character theory).
    let v_fourier = match fourier_variation(f) {
        Ok(v) => Some(v),
        Err(Error::TableTooLarge { .. }) | Err(Error::PrimeRequired { .. }) => None,
        Err(e) => return Err(e),
    };
    let c_fourier = v_fourier;
    let bound_fourier = c_fourier.map(|c| c * delta_v.to_f64());
    let fourier_holds = bound_fourier.map(|b| lhs.to_f64() <= b + FLOAT_SLACK);

    Ok(KoksmaReport {
        lhs,
        delta,
        v_taibleson,
        v_beer,
        c_beer,
        bound_beer,
        beer_holds,
        v_berkovich,
        c_berkovich,
        bound_berkovich,
        berkovich_holds,
        v_fourier,
        c_fourier,
        bound_fourier,
        fourier_holds,
    })
}

fn holds(lhs: &Value, bound: &Value) -> bool {
    if lhs.is_exact() && bound.is_exact() {
        lhs.le(bound)
    } else {
        lhs.to_f64() <= bound.to_f64() + FLOAT_SLACK
    }
}

/// `2q * (|a - c|^t + |b - c|^t)` where a, b repeat the first and last
/// digits of the ordering: the Beer constant of the untruncated kernel
/// `|x - c|^t`.
pub fn beer_constant_closed(
    center: &Point,
    t: f64,
    ord: &DigitOrdering,
    spec: RingSpec,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveExponent { t });
    }
    if ord.q() != spec.q() {
        return Err(Error::SpecMismatch);
    }
    let endpoints = geometric_distance_pow(ord.smallest(), center, t, spec.q())
        + geometric_distance_pow(ord.largest(), center, t, spec.q());
    Ok(2.0 * spec.q() as f64 * endpoints)
}

/// `|a - c|^t` for the point a repeating digit `s` forever.
fn geometric_distance_pow(s: u32, center: &Point, t: f64, q: u32) -> f64 {
    for i in 0..=center.depth() {
        if center.digit(i) != s {
            return (q as f64).powf(-(i as f64) * t);
        }
    }
    // Only reachable when s = 0 and the center is 0 itself.
    0.0
}

/// `(1 + 1/q) * V_Berkovich(|x - c|^t)` in the untruncated limit:
/// `2 (q^2 - 1) / (q (q - q^{-t}))`, independent of the center.
pub fn berkovich_constant_closed(t: f64, spec: RingSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveExponent { t });
    }
    let q = spec.q() as f64;
    Ok(2.0 * (q * q - 1.0) / (q * (q - q.powf(-t))))
}

/// Fourier-analytic variation of the untruncated kernel, finite only for
/// t > 1: `q^t (q^t - 1)(q - 1) / ((q^{t+1} - 1)(q^{t-1} - 1))`.
pub fn fourier_constant_closed(t: f64, spec: RingSpec) -> Option<f64> {
    if t <= 1.0 {
        return None;
    }
    let q = spec.q() as f64;
    let num = q.powf(t) * (q.powf(t) - 1.0) * (q - 1.0);
    let den = (q.powf(t + 1.0) - 1.0) * (q.powf(t - 1.0) - 1.0);
    Some(num / den)
}

/// Constants of all three inequalities for the kernel `|x - c|^t` across a
/// range of exponents, closed forms next to level-`level` truncations.
pub struct SweepRow {
    pub t: f64,
    pub c_beer_closed: f64,
    pub c_beer_truncated: f64,
    pub c_berkovich_closed: f64,
    pub c_fourier_truncated: f64,
    /// Empty for t <= 1 where the untruncated variation diverges.
    pub c_fourier_closed: Option<f64>,
}

impl SweepRow {
    /// The functional giving the best constant at this exponent, using
    /// closed forms where they exist.
    pub fn smallest(&self) -> (&'static str, f64) {
        let fourier = self.c_fourier_closed.unwrap_or(self.c_fourier_truncated);
        let mut best = ("beer", self.c_beer_closed);
        if self.c_berkovich_closed < best.1 {
            best = ("berkovich", self.c_berkovich_closed);
        }
        if fourier < best.1 {
            best = ("fourier", fourier);
        }
        best
    }
}

pub fn constant_sweep(
    center: &Point,
    exponents: &[f64],
    level: usize,
    truncation: Truncation,
    ord: &DigitOrdering,
    spec: RingSpec,
) -> Result<Vec<SweepRow>> {
    let q = spec.q();
    let mut rows = Vec::with_capacity(exponents.len());
    for &t in exponents {
        let f = LcFunction::abs_power(center, t, level, truncation, spec)?;
        rows.push(SweepRow {
            t,
            c_beer_closed: beer_constant_closed(center, t, ord, spec)?,
            c_beer_truncated: beer_variation(&f, ord).to_f64() * 2.0 * q as f64,
            c_berkovich_closed: berkovich_constant_closed(t, spec)?,
            c_fourier_truncated: fourier_variation(&f)?,
            c_fourier_closed: fourier_constant_closed(t, spec),
        });
    }
    Ok(rows)
}

/// The counterexample shutting the door on Taibleson-based constants.
pub struct AntiKoksmaReport {
    pub pairs: usize,
    pub depth: usize,
    /// Exactly 2, independent of `pairs`.
    pub v_taibleson: Value,
    pub v_beer: Value,
    /// Exactly `q^{-depth}`: the perturbation is invisible to discrepancy.
    pub delta: BigRational,
    /// Exactly `2 * pairs * q^{-depth}`.
    pub qmc_error: Value,
    /// `qmc_error / delta = 2 * pairs`, unbounded in `pairs`.
    pub ratio: BigRational,
}

pub fn anti_koksma_demo(pairs: usize, depth: usize, spec: RingSpec) -> Result<AntiKoksmaReport> {
    let x = anti_koksma_set(pairs, depth, spec)?;
    let f = LcFunction::alternating(2 * pairs + 1, AlternatingWeights::Unit { pairs }, spec)?;
    let lhs = qmc_error(&f, &x)?;
    let delta = x.discrepancy();
    let ratio = lhs
        .as_rational()
        .expect("alternating sums are rational")
        .clone()
        / delta.clone();
    Ok(AntiKoksmaReport {
        pairs,
        depth,
        v_taibleson: taibleson_variation(&f),
        v_beer: beer_variation(&f, &DigitOrdering::identity(spec.q())),
        delta,
        qmc_error: lhs,
        ratio,
    })
}

/// Residual of the node-by-node error decomposition
/// `sum_i f(x_i) - N int f = sum_D (N_D - N_parent/q)(avg_D - avg_parent)`
/// over all discs down to the level of f.  Always exactly zero; exposed so
/// tests and the CLI can verify the identity on arbitrary inputs.
pub fn berkovich_recursion_residual(f: &LcFunction, x: &PointSet) -> Result<Value> {
    if f.spec() != x.spec() {
        return Err(Error::SpecMismatch);
    }
    let spec = f.spec();
    let q = spec.q() as u64;
    let n = f.level();

    let mut direct = Value::zero();
    for (p, mult) in x.iter() {
        direct = direct.add(&f.evaluate(p).scale_int(*mult as i64));
    }
    direct = direct.sub(&f.integral().scale_int(x.len() as i64));

    let mut node_sum = Value::zero();
    let mut parents: Vec<(u64, Value)> = vec![(x.len(), f.integral())];
    for depth in 1..=n {
        let count = q.pow(depth as u32);
        let parent_block = count / q;
        let mut current = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let mut prefix = Vec::with_capacity(depth);
            let mut rest = idx;
            for _ in 0..depth {
                prefix.push((rest % q) as u32);
                rest /= q;
            }
            let disc = Disc::new(prefix, spec).expect("digits < q");
            let n_d = x.count_in(&disc);
            let avg = f.disc_average(&disc);
            // Little-endian cell indices: the parent drops the last prefix
            // digit, the highest place of idx.
            let (n_p, avg_p) = &parents[(idx % parent_block) as usize];
            let weight = Value::ratio(n_d as i64, 1).sub(&Value::ratio(*n_p as i64, q as i64));
            node_sum = node_sum.add(&weight.mul(&avg.sub(avg_p)));
            current.push((n_d, avg));
        }
        parents = current;
    }

    Ok(direct.sub(&node_sum).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{full_grid, random_set};
    use crate::ring::ArithmeticMode;
    use num::ToPrimitive;

    fn padic(q: u32) -> RingSpec {
        RingSpec::new(q, ArithmeticMode::Padic).unwrap()
    }

    fn series(q: u32) -> RingSpec {
        RingSpec::new(q, ArithmeticMode::PowerSeries).unwrap()
    }

    #[test]
    fn qmc_error_is_exact_on_rationals() {
        let spec = padic(3);
        let x = PointSet::new(vec![Point::zero()], spec).unwrap();
        let f = LcFunction::indicator(&Disc::new(vec![0], spec).unwrap());
        assert_eq!(qmc_error(&f, &x).unwrap(), Value::ratio(2, 3));
        // The full grid integrates every function of matching level exactly.
        let g = LcFunction::random(3, -5.0, 5.0, 3, spec);
        let grid = full_grid(3, spec);
        assert_eq!(qmc_error(&g, &grid).unwrap(), Value::zero());
        let other = series(3);
        let y = PointSet::new(vec![Point::zero()], other).unwrap();
        assert!(matches!(qmc_error(&f, &y), Err(Error::SpecMismatch)));
    }

    #[test]
    fn all_three_bounds_hold_on_random_inputs() {
        for spec in [padic(3), series(2)] {
            let ord = DigitOrdering::identity(spec.q());
            for seed in 0..12u64 {
                let f = LcFunction::random(3, -2.0, 2.0, seed, spec);
                let x = random_set(5 + 11 * seed as usize % 50, 3, seed ^ 0xabcd, spec).unwrap();
                let report = koksma_check(&f, &x, &ord).unwrap();
                assert!(report.beer_holds, "beer seed={seed}");
                assert!(report.berkovich_holds, "berkovich seed={seed}");
                assert_eq!(report.fourier_holds, Some(true), "fourier seed={seed}");
                assert!(report.lhs.le(&Value::Rational(report.delta.clone())
                    .mul(&report.c_beer)));
            }
        }
    }

    #[test]
    fn grid_integration_gives_zero_error_reports() {
        let spec = padic(2);
        let ord = DigitOrdering::identity(2);
        let f = LcFunction::random(4, 0.0, 1.0, 9, spec);
        let report = koksma_check(&f, &full_grid(4, spec), &ord).unwrap();
        assert_eq!(report.lhs, Value::zero());
        assert_eq!(report.delta, BigRational::new(1.into(), 16.into()));
        assert!(report.beer_holds && report.berkovich_holds);
    }

    #[test]
    fn composite_q_reports_skip_the_fourier_bound() {
        let spec = series(4);
        let ord = DigitOrdering::identity(4);
        let f = LcFunction::random(2, -1.0, 1.0, 3, spec);
        let x = random_set(10, 3, 4, spec).unwrap();
        let report = koksma_check(&f, &x, &ord).unwrap();
        assert!(report.v_fourier.is_none() && report.fourier_holds.is_none());
        assert!(report.beer_holds && report.berkovich_holds);
    }

    #[test]
    fn anti_koksma_demo_exact_values() {
        let spec = padic(2);
        let r = anti_koksma_demo(1, 2, spec).unwrap();
        assert_eq!(r.v_taibleson, Value::from_int(2));
        assert_eq!(r.delta, BigRational::new(1.into(), 4.into()));
        assert_eq!(r.qmc_error, Value::ratio(1, 2));
        assert_eq!(r.ratio, BigRational::from_integer(2.into()));

        let r = anti_koksma_demo(3, 8, spec).unwrap();
        assert_eq!(r.v_taibleson, Value::from_int(2));
        assert_eq!(r.delta, BigRational::new(1.into(), 256.into()));
        assert_eq!(r.qmc_error, Value::ratio(3, 128));
        assert_eq!(r.ratio, BigRational::from_integer(6.into()));
        // Rank-ordered cells cross every weighted shell twice except the
        // innermost, so the Beer variation grows with the pair count.
        assert_eq!(r.v_beer, Value::from_int(11));

        let r = anti_koksma_demo(2, 6, padic(3)).unwrap();
        assert_eq!(r.v_taibleson, Value::from_int(2));
        assert_eq!(r.ratio, BigRational::from_integer(4.into()));
    }

    #[test]
    fn anti_koksma_sets_do_not_break_the_valid_bounds() {
        let spec = padic(2);
        let ord = DigitOrdering::identity(2);
        for pairs in 1..=3usize {
            let depth = 2 * pairs + 1;
            let x = anti_koksma_set(pairs, depth, spec).unwrap();
            let f = LcFunction::alternating(
                2 * pairs + 1,
                AlternatingWeights::Unit { pairs },
                spec,
            )
            .unwrap();
            let report = koksma_check(&f, &x, &ord).unwrap();
            assert!(report.beer_holds);
            assert!(report.berkovich_holds);
            assert_eq!(report.fourier_holds, Some(true));
            // The ratio doubles per pair while V_Taibleson pins at 2: no
            // fixed multiple of V_Taibleson can bound the left side.
            assert_eq!(report.v_taibleson, Value::from_int(2));
            let ratio = report.lhs.to_f64() / report.delta.to_f64().unwrap();
            assert!((ratio - 2.0 * pairs as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn beer_closed_form_matches_truncations() {
        let spec = padic(3);
        let ord = DigitOrdering::identity(3);
        assert_eq!(
            beer_constant_closed(&Point::zero(), 2.0, &ord, spec).unwrap(),
            6.0
        );
        let c = Point::parse("0,2", spec).unwrap();
        // Repeating 0 differs from c at index 1, repeating 2 at index 0.
        let closed = beer_constant_closed(&c, 2.0, &ord, spec).unwrap();
        assert!((closed - 6.0 * (1.0 / 9.0 + 1.0)).abs() < 1e-12);
        let f = LcFunction::abs_power(&c, 2.0, 8, Truncation::Average, spec).unwrap();
        let truncated = beer_variation(&f, &ord).to_f64() * 6.0;
        assert!((truncated - closed).abs() < 1e-5);
    }

    #[test]
    fn berkovich_closed_form_matches_truncations() {
        let spec = padic(3);
        assert!((berkovich_constant_closed(1.0, spec).unwrap() - 2.0).abs() < 1e-12);
        let f =
            LcFunction::abs_power(&Point::zero(), 1.0, 10, Truncation::Average, spec).unwrap();
        let truncated = berkovich_variation(&f).to_f64() * (4.0 / 3.0);
        assert!((truncated - 2.0).abs() < 1e-4);
    }

    #[test]
    fn fourier_closed_form_matches_truncations() {
        let spec = padic(3);
        assert!(fourier_constant_closed(1.0, spec).is_none());
        assert!(fourier_constant_closed(0.5, spec).is_none());
        for (t, level, tol) in [(2.0, 8, 1e-3), (8.0, 6, 1e-6)] {
            let closed = fourier_constant_closed(t, spec).unwrap();
            let f = LcFunction::abs_power(&Point::zero(), t, level, Truncation::Average, spec)
                .unwrap();
            let truncated = fourier_variation(&f).unwrap();
            assert!(
                (closed - truncated).abs() / closed < tol,
                "t={t} closed={closed} truncated={truncated}"
            );
        }
        // Large exponents approach q - 1.
        let spec2 = padic(2);
        assert!((fourier_constant_closed(8.0, spec2).unwrap() - 1.0).abs() < 0.01);
        assert!((fourier_constant_closed(8.0, spec).unwrap() - 2.0).abs() < 0.01);
    }

    #[test]
    fn sweep_rows_are_complete_and_ranked() {
        let spec = padic(3);
        let ord = DigitOrdering::identity(3);
        let ts = [0.5, 1.0, 2.0, 8.0];
        let rows = constant_sweep(&Point::zero(), &ts, 6, Truncation::Average, &ord, spec)
            .unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.c_beer_closed > 0.0);
            assert!(row.c_fourier_truncated > 0.0);
            if row.t <= 1.0 {
                assert!(row.c_fourier_closed.is_none());
            } else {
                assert!(row.c_fourier_closed.is_some());
            }
        }
        // At q = 3 the Berkovich constant wins for large t.
        let (name, value) = rows[3].smallest();
        assert_eq!(name, "berkovich");
        assert!((value - 16.0 / (3.0 * (3.0 - 3f64.powi(-8)))).abs() < 1e-12);
        // At q = 2 the Fourier constant takes over.
        let rows2 = constant_sweep(
            &Point::zero(),
            &[8.0],
            6,
            Truncation::Average,
            &DigitOrdering::identity(2),
            padic(2),
        )
        .unwrap();
        assert_eq!(rows2[0].smallest().0, "fourier");
    }

    #[test]
    fn recursion_residual_vanishes_exactly() {
        for spec in [padic(2), padic(3), series(3)] {
            for seed in [1u64, 2, 3] {
                let f = LcFunction::random(3, -2.0, 2.0, seed, spec);
                let x = random_set(17, 4, seed, spec).unwrap();
                assert_eq!(
                    berkovich_recursion_residual(&f, &x).unwrap(),
                    Value::zero()
                );
            }
            // Multisets included.
            let f = LcFunction::random(2, 0.0, 1.0, 5, spec);
            let pts = vec![Point::zero(), Point::zero(), Point::one()];
            let x = PointSet::new(pts, spec).unwrap();
            assert_eq!(berkovich_recursion_residual(&f, &x).unwrap(), Value::zero());
        }
    }
}
