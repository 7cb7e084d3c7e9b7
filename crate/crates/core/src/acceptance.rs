//! The acceptance battery: nine end-to-end checks covering the closed
//! forms, the counterexample, the oracle cross-checks and the empirical
//! inequality sweeps.  Each criterion returns a pass/fail verdict with a
//! short summary; the `acceptance` integration test asserts all nine and
//! the CLI exposes them under `uk reproduce`.

use std::time::Instant;

use num::rational::BigRational;

use crate::discrepancy::random_set;
use crate::fourier::{
    dirichlet_kernel, fourier_coefficients, fourier_variation, CharacterGroup,
};
use crate::funcspace::{LcFunction, Truncation, Value};
use crate::geometry::Disc;
use crate::koksma::{
    anti_koksma_demo, berkovich_constant_closed, berkovich_recursion_residual,
    constant_sweep, fourier_constant_closed, koksma_check,
};
use crate::oracles::{
    berkovich_by_tree_enumeration, discrepancy_by_enumeration,
    taibleson_by_partition_enumeration,
};
use crate::ring::{qpow, ArithmeticMode, DigitOrdering, Point, RingSpec};
use crate::variation::{beer_variation, berkovich_variation, taibleson_variation};

pub struct CriterionResult {
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
}

struct Checker {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checker {
    fn new() -> Checker {
        Checker {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, name: &'static str) -> CriterionResult {
        let pass = self.failures.is_empty();
        let details = if pass {
            self.notes.join("; ")
        } else {
            format!("FAILED: {}", self.failures.join(" | "))
        };
        CriterionResult {
            name,
            pass,
            details,
        }
    }
}

fn padic(q: u32) -> RingSpec {
    RingSpec::new(q, ArithmeticMode::Padic).expect("prime q")
}

fn series(q: u32) -> RingSpec {
    RingSpec::new(q, ArithmeticMode::PowerSeries).expect("q >= 2")
}

/// The perturbed grid keeps discrepancy q^{-T} and Taibleson variation 2
/// while the QMC error is 2*pairs*q^{-T}: no Taibleson-based constant can
/// close a Koksma inequality.
pub fn criterion_anti_koksma() -> CriterionResult {
    let mut c = Checker::new();
    for (q, pairs, depth) in [(2u32, 1usize, 2usize), (2, 3, 8), (3, 2, 6)] {
        let started = Instant::now();
        let demo = anti_koksma_demo(pairs, depth, padic(q)).expect("valid demo sizes");
        let elapsed = started.elapsed();
        let qt = qpow(q, -(depth as i64));
        c.check(
            demo.v_taibleson == Value::from_int(2),
            format!("q={q} M={pairs}: V_Taib != 2"),
        );
        c.check(demo.delta == qt, format!("q={q} M={pairs}: delta != q^-T"));
        c.check(
            demo.qmc_error == Value::Rational(qt.clone() * BigRational::from_integer((2 * pairs as i64).into())),
            format!("q={q} M={pairs}: error != 2M/q^T"),
        );
        c.check(
            demo.ratio == BigRational::from_integer((2 * pairs as i64).into()),
            format!("q={q} M={pairs}: ratio != 2M"),
        );
        c.check(
            elapsed.as_secs_f64() < 1.0,
            format!("q={q} M={pairs}: took {elapsed:?}"),
        );
        c.note(format!(
            "q={q} M={pairs} T={depth}: ratio={} in {:.0?}",
            demo.ratio, elapsed
        ));
    }
    c.finish("anti-koksma counterexample")
}

/// Closed forms for the kernel |x - c|^t under average truncation, each
/// matched within its explicit geometric tail.
pub fn criterion_kernel_closed_forms() -> CriterionResult {
    let started = Instant::now();
    let mut c = Checker::new();
    let spec = padic(3);
    let ord = DigitOrdering::identity(3);
    let zero = Point::zero();

    // Taibleson: the truncation gap (q-1)/(q-q^{-t}) * q^{-nt} sits far
    // below the tolerance at t = 4.
    let f = LcFunction::abs_power(&zero, 4.0, 12, Truncation::Average, spec).unwrap();
    let v_taib = taibleson_variation(&f).to_f64();
    c.check((v_taib - 1.0).abs() <= 1e-12, format!("V_Taib = {v_taib}"));
    c.note(format!("V_Taib(t=4,n=12) = {v_taib}"));

    // Berkovich at t = 1, n = 12 against the limit 2(q-1)/(q-q^{-t}).
    let t = 1.0;
    let n = 12;
    let kernel_avg = 2.0 / (3.0 - 3f64.powf(-t));
    let limit = 2.0 * kernel_avg;
    let tail = limit * 3f64.powf(-(n as f64) * t);
    let g = LcFunction::abs_power(&zero, t, n, Truncation::Average, spec).unwrap();
    let v_berk = berkovich_variation(&g).to_f64();
    c.check(tail < 1e-5, format!("tail {tail} not < 1e-5"));
    c.check(
        (v_berk - limit).abs() <= tail + 1e-12,
        format!("V_Berk = {v_berk}, limit {limit}, tail {tail}"),
    );
    c.note(format!("V_Berk(t=1,n=12) = {v_berk:.9} vs {limit}"));

    // Beer endpoints: both geometric endpoint distances from c = 0.
    let closed_beer = 1.0;
    let v_beer = beer_variation(&g, &ord).to_f64();
    c.check(
        (v_beer - closed_beer).abs() <= tail + 1e-12,
        format!("V_Beer = {v_beer}"),
    );
    c.note(format!("V_Beer(t=1,n=12) = {v_beer:.9} vs 1"));

    // Fourier at t = 2, n = 8: level terms decay by q^{1-t} per level, so
    // the truncated sum misses exactly the factor (1 - r^n).
    let t = 2.0;
    let n = 8;
    let closed = fourier_constant_closed(t, spec).unwrap();
    let h = LcFunction::abs_power(&zero, t, n, Truncation::Average, spec).unwrap();
    let v_fourier = fourier_variation(&h).unwrap();
    let tail = closed * 3f64.powf((1.0 - t) * n as f64);
    c.check(
        (closed - v_fourier).abs() <= tail * (1.0 + 1e-6) + 1e-9,
        format!("V_Fourier = {v_fourier}, closed {closed}, tail {tail}"),
    );
    c.note(format!("V_Fourier(t=2,n=8) = {v_fourier:.9} vs {closed:.9}"));

    let elapsed = started.elapsed();
    c.check(elapsed.as_secs_f64() < 10.0, format!("took {elapsed:?}"));
    c.finish("kernel closed forms")
}

/// Indicator functions: all three lattice variations in exact rationals,
/// with both branches of the Beer endpoint case split.
pub fn criterion_indicator_suite() -> CriterionResult {
    let mut c = Checker::new();
    for spec in [padic(2), padic(3), series(3), padic(5)] {
        let q = spec.q();
        let ord = DigitOrdering::identity(q);
        // (prefix, does the disc contain a geometric endpoint?)
        let cases: Vec<(Vec<u32>, bool)> = vec![
            (vec![0], true),              // contains the repeating-0 point
            (vec![q - 1, q - 1], true),   // contains the repeating-(q-1) point
            (vec![1, 0], false),
            (vec![0, 1], false),
        ];
        for (prefix, has_endpoint) in cases {
            let depth = prefix.len();
            let disc = Disc::new(prefix.clone(), spec).unwrap();
            let f = LcFunction::indicator(&disc);
            c.check(
                taibleson_variation(&f) == Value::from_int(1),
                format!("q={q} {prefix:?}: V_Taib != 1"),
            );
            let expected_berk =
                Value::from_int(2).mul(&Value::Rational(BigRational::from_integer(1.into()) - qpow(q, -(depth as i64))));
            c.check(
                berkovich_variation(&f) == expected_berk,
                format!("q={q} {prefix:?}: V_Berk != 2(1-mu)"),
            );
            let expected_beer = Value::from_int(if has_endpoint { 1 } else { 2 });
            c.check(
                beer_variation(&f, &ord) == expected_beer,
                format!("q={q} {prefix:?}: V_Beer case split"),
            );
        }
    }
    c.note("V_Taib = 1, V_Berk = 2(1-mu), V_Beer in {1,2}, exact");
    c.finish("indicator suite")
}

/// Variation orderings on random functions.
pub fn criterion_variation_orderings() -> CriterionResult {
    let mut c = Checker::new();
    let mut tested = 0u32;
    let mut worst_margin = f64::INFINITY;
    for q in [2u32, 3] {
        for mode in [ArithmeticMode::Padic, ArithmeticMode::PowerSeries] {
            let spec = RingSpec::new(q, mode).unwrap();
            let ord = DigitOrdering::identity(q);
            for seed in 0..130u64 {
                let level = 3 + (seed % 3) as usize;
                let f = LcFunction::random(level, -2.0, 2.0, seed, spec);
                let v_taib = taibleson_variation(&f).to_f64();
                let v_beer = beer_variation(&f, &ord).to_f64();
                let v_berk = berkovich_variation(&f).to_f64();
                let v_fourier = fourier_variation(&f).unwrap();
                let scaled_fourier = 2.0 / q as f64 * v_fourier;
                c.check(
                    v_taib <= v_beer + 1e-10,
                    format!("q={q} {mode:?} seed={seed}: Taib > Beer"),
                );
                c.check(
                    v_taib <= v_berk + 1e-10,
                    format!("q={q} {mode:?} seed={seed}: Taib > Berk"),
                );
                c.check(
                    v_taib <= scaled_fourier + 1e-10,
                    format!("q={q} {mode:?} seed={seed}: Taib > (2/q) Fourier"),
                );
                worst_margin = worst_margin
                    .min(v_beer - v_taib)
                    .min(v_berk - v_taib)
                    .min(scaled_fourier - v_taib);
                tested += 1;
            }
        }
    }
    c.check(tested >= 500, format!("only {tested} functions"));
    c.note(format!(
        "{tested} random functions, worst margin {worst_margin:.3e}"
    ));
    c.finish("variation orderings")
}

/// All three Koksma bounds and the exact error decomposition on random
/// function/point-set pairs.
pub fn criterion_koksma_verdicts() -> CriterionResult {
    let mut c = Checker::new();
    let mut tested = 0u32;
    for q in [2u32, 3] {
        for mode in [ArithmeticMode::Padic, ArithmeticMode::PowerSeries] {
            let spec = RingSpec::new(q, mode).unwrap();
            let ord = DigitOrdering::identity(q);
            for seed in 0..130u64 {
                let f = LcFunction::random(3, -2.0, 2.0, seed, spec);
                let count = 1 + (seed as usize * 7) % 40;
                let depth = 1 + (seed as usize) % 4;
                let x = random_set(count, depth, seed ^ 0x5eed, spec).unwrap();
                let report = koksma_check(&f, &x, &ord).unwrap();
                c.check(
                    report.beer_holds && report.berkovich_holds
                        && report.fourier_holds == Some(true),
                    format!("q={q} {mode:?} seed={seed}: a bound failed"),
                );
                let residual = berkovich_recursion_residual(&f, &x).unwrap().to_f64();
                c.check(
                    residual <= 1e-10,
                    format!("q={q} {mode:?} seed={seed}: residual {residual}"),
                );
                tested += 1;
            }
        }
    }
    c.check(tested >= 500, format!("only {tested} pairs"));
    c.note(format!("{tested} random (f, X) pairs, all bounds hold"));
    c.finish("koksma verdicts")
}

/// Fast implementations against the enumeration oracles.
pub fn criterion_oracle_equivalence() -> CriterionResult {
    let mut c = Checker::new();
    let spec = padic(2);
    // Random functions at q = 2, n = 3.
    for seed in 0..10_000u64 {
        let f = LcFunction::random(3, -1.0, 1.0, seed, spec);
        c.check(
            taibleson_variation(&f) == taibleson_by_partition_enumeration(&f),
            format!("taibleson seed={seed}"),
        );
        c.check(
            berkovich_variation(&f) == berkovich_by_tree_enumeration(&f),
            format!("berkovich seed={seed}"),
        );
        if !c.failures.is_empty() {
            break;
        }
    }
    // Every 0/1-valued function at q = 2, n = 3.
    for mask in 0..256u32 {
        let values = (0..8)
            .map(|i| Value::from_int(((mask >> i) & 1) as i64))
            .collect();
        let f = LcFunction::from_table(3, values, spec).unwrap();
        c.check(
            taibleson_variation(&f) == taibleson_by_partition_enumeration(&f),
            format!("binary taibleson mask={mask}"),
        );
        c.check(
            berkovich_variation(&f) == berkovich_by_tree_enumeration(&f),
            format!("binary berkovich mask={mask}"),
        );
    }
    // Discrepancy against containment scans, q^{maxdepth+1} <= 3^6.
    let mut sets = 0;
    for q in [2u32, 3] {
        for mode in [ArithmeticMode::Padic, ArithmeticMode::PowerSeries] {
            let spec = RingSpec::new(q, mode).unwrap();
            for seed in 0..50u64 {
                let count = 1 + (seed as usize * 3) % 30;
                let depth = 1 + (seed as usize) % 5;
                let x = random_set(count, depth, seed, spec).unwrap();
                c.check(
                    x.discrepancy() == discrepancy_by_enumeration(&x),
                    format!("discrepancy q={q} {mode:?} seed={seed}"),
                );
                sets += 1;
            }
        }
    }
    c.note(format!(
        "10000 random + 256 binary functions, {sets} point sets, exact"
    ));
    c.finish("oracle equivalence")
}

/// Character identities at every residue: kernel case split, vanishing
/// sums, Parseval, pointwise inversion, indicator coefficients.
pub fn criterion_fourier_identities() -> CriterionResult {
    let mut c = Checker::new();
    for spec in [padic(3), series(3), padic(2), series(2)] {
        let n = 6;
        let g = CharacterGroup::new(spec, n).unwrap();
        let size = g.size();
        // Kernel case split at every residue and cutoff.
        for idx in 0..size {
            let x = Point::from_cell_index(idx, n, spec);
            for cutoff in 0..=n {
                let direct: num::complex::Complex64 = g
                    .indices_up_to_level(cutoff)
                    .unwrap()
                    .iter()
                    .map(|&m| g.eval(m, &x))
                    .sum();
                let closed = dirichlet_kernel(&g, cutoff, &x).unwrap();
                c.check(
                    (direct.re - closed).abs() <= 1e-10 && direct.im.abs() <= 1e-10,
                    format!("kernel q={} {:?} idx={idx} L={cutoff}", spec.q(), spec.mode()),
                );
            }
        }
        // Nontrivial characters sum to zero over coset representatives.
        for m in 1..size {
            let level = g.character_level(m);
            let reps = (spec.q() as u64).pow(level as u32);
            let total: num::complex::Complex64 = (0..reps)
                .map(|idx| g.eval(m, &Point::from_cell_index(idx, level, spec)))
                .sum();
            c.check(
                total.norm() <= 1e-10,
                format!("character sum q={} {:?} m={m}", spec.q(), spec.mode()),
            );
        }
        if !c.failures.is_empty() {
            break;
        }
    }

    // Parseval (relative) and pointwise inversion.
    for spec in [padic(3), series(3)] {
        let n = 4;
        let f = LcFunction::random(n, -2.0, 2.0, 31, spec);
        let table = fourier_coefficients(&f).unwrap();
        let size = table.group().size();
        let mut mean_sq = 0.0;
        for idx in 0..size {
            let x = Point::from_cell_index(idx, n, spec);
            let v = f.evaluate(&x).to_f64();
            mean_sq += v * v;
            let rebuilt = table.partial_sum(n, &x).unwrap();
            c.check(
                (rebuilt.re - v).abs() <= 1e-10 && rebuilt.im.abs() <= 1e-10,
                format!("inversion idx={idx} {:?}", spec.mode()),
            );
        }
        mean_sq /= size as f64;
        let coeff_sq: f64 = table.coefficients().iter().map(|z| z.norm_sqr()).sum();
        c.check(
            (mean_sq - coeff_sq).abs() <= 1e-9 * mean_sq.max(1.0),
            format!("parseval {:?}", spec.mode()),
        );
    }

    // Indicator of a depth-k disc: q^{-k} times the conjugated character at
    // the center, for levels <= k; zero above.
    let spec = padic(3);
    let center = Point::parse("1,2", spec).unwrap();
    let disc = Disc::around(&center, 2, spec);
    let f = LcFunction::indicator(&disc).at_level(5).unwrap();
    let table = fourier_coefficients(&f).unwrap();
    for m in 0..table.group().size() {
        let expected = if table.group().character_level(m) <= 2 {
            table.group().eval(m, &center).conj() / 9.0
        } else {
            num::complex::Complex64::new(0.0, 0.0)
        };
        c.check(
            (table.coefficient(m) - expected).norm() <= 1e-12,
            format!("indicator coefficient m={m}"),
        );
    }

    c.note("kernel, vanishing sums, Parseval, inversion, indicator coefficients");
    c.finish("fourier identities")
}

/// Translation invariance of the three translation-invariant functionals,
/// exhaustively over all translations, plus the pinned Beer witness.
pub fn criterion_translation_invariance() -> CriterionResult {
    let mut c = Checker::new();
    let mut translations = 0u32;
    for (q, n) in [(3u32, 5usize), (2, 5)] {
        for mode in [ArithmeticMode::Padic, ArithmeticMode::PowerSeries] {
            let spec = RingSpec::new(q, mode).unwrap();
            let f = LcFunction::random(n, -2.0, 2.0, 77, spec);
            let v_taib = taibleson_variation(&f);
            let v_berk = berkovich_variation(&f);
            let v_fourier = fourier_variation(&f).unwrap();
            for idx in 0..(q as u64).pow(n as u32) {
                let shift = Point::from_cell_index(idx, n, spec);
                let g = f.translate(&shift);
                c.check(
                    taibleson_variation(&g) == v_taib,
                    format!("taibleson q={q} {mode:?} idx={idx}"),
                );
                c.check(
                    berkovich_variation(&g) == v_berk,
                    format!("berkovich q={q} {mode:?} idx={idx}"),
                );
                let vf = fourier_variation(&g).unwrap();
                c.check(
                    (vf - v_fourier).abs() <= 1e-10,
                    format!("fourier q={q} {mode:?} idx={idx}"),
                );
                translations += 1;
            }
            if !c.failures.is_empty() {
                break;
            }
        }
    }

    // Beer depends on the digit ordering of the tree, so translation can
    // change it: pin one witness.
    let spec = padic(2);
    let ord = DigitOrdering::identity(2);
    let f = LcFunction::indicator(&Disc::new(vec![0, 1], spec).unwrap());
    let shift = Point::parse("0,1", spec).unwrap();
    let before = beer_variation(&f, &ord);
    let after = beer_variation(&f.translate(&shift), &ord);
    c.check(
        before == Value::from_int(2) && after == Value::from_int(1),
        format!("beer witness moved {before:?} -> {after:?}"),
    );

    c.note(format!(
        "{translations} exhaustive translations; Beer witness 2 -> 1"
    ));
    c.finish("translation invariance")
}

/// The constant sweep: Berkovich beats the Beer closed form everywhere,
/// and at t = 8 the Fourier constant approaches q - 1, winning only at
/// q = 2.
pub fn criterion_constant_sweep() -> CriterionResult {
    let mut c = Checker::new();
    let ts = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0];
    for q in [2u32, 3, 5] {
        let spec = padic(q);
        let ord = DigitOrdering::identity(q);
        let level = if q == 5 { 5 } else { 6 };
        let rows = constant_sweep(&Point::zero(), &ts, level, Truncation::Average, &ord, spec)
            .unwrap();
        for row in &rows {
            c.check(
                row.c_berkovich_closed < row.c_beer_closed,
                format!("q={q} t={}: Berk !< Beer", row.t),
            );
        }
        let c_fourier = fourier_constant_closed(8.0, spec).unwrap();
        let c_berk = berkovich_constant_closed(8.0, spec).unwrap();
        c.check(
            (c_fourier / (q as f64 - 1.0) - 1.0).abs() <= 0.01,
            format!("q={q}: C_Fourier(8) = {c_fourier} not within 1% of q-1"),
        );
        let berk_wins = c_berk < c_fourier;
        c.check(
            berk_wins == (q != 2),
            format!("q={q}: C_Berk {c_berk} vs C_Fourier {c_fourier}"),
        );
        c.note(format!(
            "q={q}: C_Berk(8)={c_berk:.4}, C_Fourier(8)={c_fourier:.4}"
        ));
    }
    c.finish("constant sweep")
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_anti_koksma(),
        criterion_kernel_closed_forms(),
        criterion_indicator_suite(),
        criterion_variation_orderings(),
        criterion_koksma_verdicts(),
        criterion_oracle_equivalence(),
        criterion_fourier_identities(),
        criterion_translation_invariance(),
        criterion_constant_sweep(),
    ]
}
