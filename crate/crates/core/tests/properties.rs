//! Randomized cross-module invariants.  Each test here ties at least two
//! layers of the stack together; single-module properties live next to the
//! modules themselves.

use num::{BigRational, ToPrimitive};
use proptest::prelude::*;
use ultrametric_koksma::discrepancy::PointSet;
use ultrametric_koksma::fourier::{fourier_variation, CharacterGroup};
use ultrametric_koksma::funcspace::{LcFunction, Value};
use ultrametric_koksma::geometry::Disc;
use ultrametric_koksma::koksma::qmc_error;
use ultrametric_koksma::ring::{ArithmeticMode, DigitOrdering, Point, RingSpec};
use ultrametric_koksma::variation::{beer_variation, berkovich_variation, taibleson_variation};

fn arb_spec() -> impl Strategy<Value = RingSpec> {
    prop_oneof![
        Just(RingSpec::new(2, ArithmeticMode::Padic).unwrap()),
        Just(RingSpec::new(3, ArithmeticMode::Padic).unwrap()),
        Just(RingSpec::new(2, ArithmeticMode::PowerSeries).unwrap()),
        Just(RingSpec::new(3, ArithmeticMode::PowerSeries).unwrap()),
    ]
}

/// Integer-valued function of the given level, as a dictionary-order table.
fn arb_function(spec: RingSpec, level: usize) -> impl Strategy<Value = LcFunction> {
    let size = (spec.q() as usize).pow(level as u32);
    proptest::collection::vec(-8i64..8, size).prop_map(move |table| {
        let values = table.into_iter().map(Value::from_int).collect();
        LcFunction::from_table(level, values, spec).unwrap()
    })
}

fn arb_points(spec: RingSpec, maxdepth: usize) -> impl Strategy<Value = PointSet> {
    let digit = 0..spec.q();
    proptest::collection::vec(
        proptest::collection::vec(digit, 0..=maxdepth),
        1..20,
    )
    .prop_map(move |raw| {
        let points = raw
            .into_iter()
            .map(|digits| Point::from_digits(digits, spec).unwrap())
            .collect();
        PointSet::new(points, spec).unwrap()
    })
}

/// Conditional expectation of `f` on the level-`m` cells.
fn average_to_level(f: &LcFunction, m: usize) -> LcFunction {
    let spec = f.spec();
    let ord = DigitOrdering::identity(spec.q());
    let cells = (spec.q() as u64).pow(m as u32);
    let values = (0..cells)
        .map(|i| f.disc_average(&Disc::from_beer_index(i, m, &ord, spec)))
        .collect();
    LcFunction::from_table(m, values, spec).unwrap()
}

proptest! {
    /// Replacing a function by its cell averages never increases any of the
    /// three variations computed here.
    #[test]
    fn averaging_contracts_every_variation(
        (f, m) in arb_spec().prop_flat_map(|spec| {
            (2usize..=3).prop_flat_map(move |level| {
                (arb_function(spec, level), 0..level)
            })
        })
    ) {
        let g = average_to_level(&f, m);
        let fine = taibleson_variation(&f);
        let coarse = taibleson_variation(&g);
        prop_assert!(coarse.as_rational().unwrap() <= fine.as_rational().unwrap());

        let fine = berkovich_variation(&f);
        let coarse = berkovich_variation(&g);
        prop_assert!(coarse.as_rational().unwrap() <= fine.as_rational().unwrap());

        let fine = fourier_variation(&f).unwrap();
        let coarse = fourier_variation(&g).unwrap();
        prop_assert!(coarse <= fine + 1e-9);
    }

    /// Disc discrepancy is invariant under translating the whole multiset.
    #[test]
    fn discrepancy_ignores_translation(
        (x, shift) in arb_spec().prop_flat_map(|spec| {
            (arb_points(spec, 4), proptest::collection::vec(0..spec.q(), 0..=5)
                .prop_map(move |d| Point::from_digits(d, spec).unwrap()))
        })
    ) {
        let translated = x.translate(&shift);
        prop_assert_eq!(translated.discrepancy(), x.discrepancy());
    }

    /// The Beer-variation Koksma bound holds with exact rational arithmetic
    /// for arbitrary integer tables and point multisets.
    #[test]
    fn beer_koksma_bound_holds_exactly(
        (spec, f, x) in arb_spec().prop_flat_map(|spec| {
            (1usize..=3).prop_flat_map(move |level| {
                (Just(spec), arb_function(spec, level), arb_points(spec, 4))
            })
        })
    ) {
        let err = qmc_error(&f, &x).unwrap();
        let ord = DigitOrdering::identity(spec.q());
        let v = beer_variation(&f, &ord);
        let bound = v.as_rational().unwrap()
            * x.discrepancy()
            * BigRational::from_integer((2 * spec.q() as i64).into());
        prop_assert!(err.as_rational().unwrap() <= &bound);
    }

    /// Sampled character means obey `|mean| <= q^level(m) * discrepancy`,
    /// the estimate behind the Fourier-analytic Koksma bound.
    #[test]
    fn character_means_are_discrepancy_bounded(
        (spec, x) in arb_spec().prop_flat_map(|spec| (Just(spec), arb_points(spec, 3)))
    ) {
        let group = CharacterGroup::new(spec, 3).unwrap();
        let delta = x.discrepancy().to_f64().unwrap();
        let n = x.len() as f64;
        for m in 1..group.size() {
            let mut mean = num::complex::Complex64::new(0.0, 0.0);
            for (p, mult) in x.iter() {
                mean += group.eval(m, p) * *mult as f64;
            }
            mean /= n;
            let scale = (spec.q() as f64).powi(group.character_level(m) as i32);
            prop_assert!(mean.norm() <= scale * delta + 1e-9);
        }
    }
}

/// `|gamma(x - y) - 1|` is at most `2 q^(level - 1 - k)` when `x` and `y`
/// share a depth-`k` prefix, and vanishes once `k` reaches the level.
#[test]
fn character_increments_scale_with_shared_prefix() {
    for spec in [
        RingSpec::new(3, ArithmeticMode::Padic).unwrap(),
        RingSpec::new(3, ArithmeticMode::PowerSeries).unwrap(),
    ] {
        let n = 3usize;
        let group = CharacterGroup::new(spec, n).unwrap();
        let cells = (spec.q() as u64).pow(n as u32);
        let points: Vec<Point> = (0..cells)
            .map(|i| Point::from_cell_index(i, n, spec))
            .collect();
        for m in 1..group.size() {
            let level = group.character_level(m) as i32;
            for x in &points {
                for y in &points {
                    let mut shared = 0usize;
                    while shared < n && x.digit(shared) == y.digit(shared) {
                        shared += 1;
                    }
                    // gamma(x - y) via the homomorphism property.
                    let increment = group.eval(m, x) * group.eval(m, y).conj();
                    let gap = (increment - 1.0).norm();
                    if shared as i32 >= level {
                        assert!(gap < 1e-12, "q={} m={} gap={}", spec.q(), m, gap);
                    } else {
                        let bound = 2.0 * (spec.q() as f64).powi(level - 1 - shared as i32);
                        assert!(
                            gap <= bound + 1e-12,
                            "q={} m={} shared={} gap={} bound={}",
                            spec.q(),
                            m,
                            shared,
                            gap,
                            bound
                        );
                    }
                }
            }
        }
    }
}
