//! `uk`: variation functionals, disc discrepancy and Koksma bounds from the
//! command line.  JSON on stdout for single results, CSV for sweeps and
//! coefficient dumps; all output is byte-stable for fixed flags and seeds.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigRational, ToPrimitive};
use serde::Deserialize;
use serde_json::json;
use ultrametric_koksma::discrepancy::{anti_koksma_set, full_grid, random_set, PointSet};
use ultrametric_koksma::fourier::fourier_coefficients;
use ultrametric_koksma::funcspace::{AlternatingWeights, LcFunction, Truncation, Value};
use ultrametric_koksma::geometry::Disc;
use ultrametric_koksma::koksma::{anti_koksma_demo, constant_sweep, koksma_check};
use ultrametric_koksma::ring::{ArithmeticMode, DigitOrdering, Point, RingSpec};
use ultrametric_koksma::variation::{beer_variation, berkovich_variation, taibleson_variation};
use ultrametric_koksma::acceptance;

const INPUT_HELP: &str = "\
Function literals (JSON, pass with --func):
  {\"kind\":\"indicator\",\"disc\":\"k:d0,d1,...\"}                   disc indicator; root is \"0:\"
  {\"kind\":\"abs_power\",\"c\":\"digits\",\"t\":2.0,\"mode\":\"average\"}  |x - c|^t, mode average|sample
  {\"kind\":\"alternating\",\"weights\":\"harmonic\"}                 sum_k (-1)^k/(k+1) on shells around pi^k
  {\"kind\":\"alternating\",\"weights\":\"unit\",\"M\":3}               sum_{k<2M} of (-1)^k on those shells
  {\"kind\":\"table\",\"level\":2,\"values\":[...]}                   q^level cell values in dictionary order

Point sources (pass with --points):
  a file path (one point per line as comma-separated digits, # comments),
  grid:DEPTH, anti:PAIRS:DEPTH, or random:COUNT:DEPTH:SEED";

#[derive(Parser)]
#[command(
    name = "uk",
    version,
    about = "variation, discrepancy and Koksma bounds over the ring of integers of a local field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Taibleson, Beer and Berkovich variations of a function literal.
    #[command(after_help = INPUT_HELP)]
    Variation(VariationArgs),
    /// Exact disc discrepancy of a point multiset.
    #[command(after_help = INPUT_HELP)]
    Discrepancy(DiscrepancyArgs),
    /// Fourier coefficients and the Fourier-analytic variation.
    #[command(after_help = INPUT_HELP)]
    Fourier(FourierArgs),
    /// QMC error of a (function, point set) pair against all three bounds.
    #[command(after_help = INPUT_HELP)]
    Koksma(KoksmaArgs),
    /// CSV sweep of the Koksma constants for |x - c|^t over a t range.
    Sweep(SweepArgs),
    /// The unbounded-ratio family: qmc_error / discrepancy = 2M.
    AntiKoksma(AntiKoksmaArgs),
    /// Run the built-in reproduction battery, one line per check.
    Reproduce,
}

#[derive(Args)]
struct RingArgs {
    /// Residue field size q.
    #[arg(long)]
    q: u32,
    /// Digit arithmetic: p-adic carries or digitwise power series.
    #[arg(long, value_enum, default_value_t = ModeArg::Padic)]
    mode: ModeArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Padic,
    Series,
}

impl RingArgs {
    fn spec(&self) -> Result<RingSpec> {
        let mode = match self.mode {
            ModeArg::Padic => ArithmeticMode::Padic,
            ModeArg::Series => ArithmeticMode::PowerSeries,
        };
        Ok(RingSpec::new(self.q, mode)?)
    }
}

#[derive(Args)]
struct VariationArgs {
    /// Function literal (JSON).
    #[arg(long)]
    func: String,
    #[command(flatten)]
    ring: RingArgs,
    /// Working depth: functions live on the level-n cells.
    #[arg(long)]
    level: usize,
    /// Digit ordering for the Beer variation, e.g. "2,0,1".
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Args)]
struct DiscrepancyArgs {
    /// Point-set file or generator.
    #[arg(long)]
    points: String,
    #[command(flatten)]
    ring: RingArgs,
}

#[derive(Args)]
struct FourierArgs {
    /// Function literal (JSON).
    #[arg(long)]
    func: String,
    #[command(flatten)]
    ring: RingArgs,
    /// Working depth: the coefficient table has q^n entries.
    #[arg(long)]
    level: usize,
    /// Write the full coefficient table to this CSV file.
    #[arg(long, value_name = "FILE")]
    dump_coeffs: Option<PathBuf>,
}

#[derive(Args)]
struct KoksmaArgs {
    /// Function literal (JSON).
    #[arg(long)]
    func: String,
    /// Point-set file or generator.
    #[arg(long)]
    points: String,
    #[command(flatten)]
    ring: RingArgs,
    /// Working depth for the function.
    #[arg(long)]
    level: usize,
    /// Digit ordering for the Beer variation, e.g. "2,0,1".
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    ring: RingArgs,
    /// Exponent range as A:B:STEP, endpoints inclusive.
    #[arg(long, value_name = "A:B:STEP")]
    t_range: String,
    /// Truncation depth for the non-closed columns.
    #[arg(long, default_value_t = 8)]
    level: usize,
    /// Center c of |x - c|^t, as comma-separated digits.
    #[arg(long, default_value = "0")]
    center: String,
    /// Truncation mode for the function itself.
    #[arg(long, value_enum, default_value_t = TruncationArg::Average)]
    truncation: TruncationArg,
    /// Digit ordering for the Beer columns, e.g. "2,0,1".
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum TruncationArg {
    Average,
    Sample,
}

#[derive(Args)]
struct AntiKoksmaArgs {
    #[command(flatten)]
    ring: RingArgs,
    /// Number of cancelling pairs M.
    #[arg(long = "M")]
    pairs: usize,
    /// Grid depth T; needs T >= 2M.
    #[arg(long = "T")]
    depth: usize,
}

/// Function literal grammar; see `INPUT_HELP`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FuncLiteral {
    Indicator {
        disc: String,
    },
    AbsPower {
        c: String,
        t: f64,
        #[serde(default)]
        mode: Option<TruncationLiteral>,
    },
    Alternating {
        weights: WeightsLiteral,
        #[serde(rename = "M", default)]
        pairs: Option<usize>,
    },
    Table {
        level: usize,
        values: Vec<f64>,
    },
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum TruncationLiteral {
    Average,
    Sample,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum WeightsLiteral {
    Harmonic,
    Unit,
}

fn build_function(raw: &str, level: usize, spec: RingSpec) -> Result<LcFunction> {
    let literal: FuncLiteral = serde_json::from_str(raw).context("malformed function literal")?;
    let f = match literal {
        FuncLiteral::Indicator { disc } => {
            let disc = Disc::parse(&disc, spec)?;
            LcFunction::indicator(&disc).at_level(level)?
        }
        FuncLiteral::AbsPower { c, t, mode } => {
            let c = Point::parse(&c, spec)?;
            let truncation = match mode.unwrap_or(TruncationLiteral::Average) {
                TruncationLiteral::Average => Truncation::Average,
                TruncationLiteral::Sample => Truncation::Sample,
            };
            LcFunction::abs_power(&c, t, level, truncation, spec)?
        }
        FuncLiteral::Alternating { weights, pairs } => {
            let weights = match (weights, pairs) {
                (WeightsLiteral::Harmonic, None) => AlternatingWeights::Harmonic,
                (WeightsLiteral::Harmonic, Some(_)) => {
                    bail!("harmonic weights do not take an M")
                }
                (WeightsLiteral::Unit, Some(pairs)) => AlternatingWeights::Unit { pairs },
                (WeightsLiteral::Unit, None) => bail!("unit weights need an M"),
            };
            LcFunction::alternating(level, weights, spec)?
        }
        FuncLiteral::Table {
            level: table_level,
            values,
        } => {
            let values = values.into_iter().map(Value::Real).collect();
            LcFunction::from_table(table_level, values, spec)?.at_level(level)?
        }
    };
    Ok(f)
}

fn load_points(source: &str, spec: RingSpec) -> Result<PointSet> {
    if let Some(rest) = source.strip_prefix("grid:") {
        let depth = rest.parse().context("grid:DEPTH needs an integer depth")?;
        return Ok(full_grid(depth, spec));
    }
    if let Some(rest) = source.strip_prefix("anti:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [pairs, depth] = parts[..] else {
            bail!("anti generator is anti:PAIRS:DEPTH");
        };
        let pairs = pairs.parse().context("anti: PAIRS must be an integer")?;
        let depth = depth.parse().context("anti: DEPTH must be an integer")?;
        return Ok(anti_koksma_set(pairs, depth, spec)?);
    }
    if let Some(rest) = source.strip_prefix("random:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [count, depth, seed] = parts[..] else {
            bail!("random generator is random:COUNT:DEPTH:SEED");
        };
        let count = count.parse().context("random: COUNT must be an integer")?;
        let depth = depth.parse().context("random: DEPTH must be an integer")?;
        let seed = seed.parse().context("random: SEED must be an integer")?;
        return Ok(random_set(count, depth, seed, spec)?);
    }
    let text =
        fs::read_to_string(source).with_context(|| format!("cannot read point file {source}"))?;
    Ok(PointSet::parse_lines(&text, spec)?)
}

fn parse_ordering(raw: Option<&str>, q: u32) -> Result<DigitOrdering> {
    let Some(raw) = raw else {
        return Ok(DigitOrdering::identity(q));
    };
    let digits = raw
        .split(',')
        .map(|part| part.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .context("ordering must be comma-separated digits")?;
    Ok(DigitOrdering::from_ordered_digits(digits)?)
}

fn parse_range(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [a, b, step] = parts[..] else {
        bail!("t range is A:B:STEP");
    };
    let a: f64 = a.parse().context("t range start must be a number")?;
    let b: f64 = b.parse().context("t range end must be a number")?;
    let step: f64 = step.parse().context("t range step must be a number")?;
    if !(step > 0.0) || !a.is_finite() || !(b >= a) {
        bail!("t range needs a <= b and step > 0");
    }
    let mut out = Vec::new();
    for k in 0.. {
        let t = a + k as f64 * step;
        if t > b + 1e-9 {
            break;
        }
        out.push(t);
    }
    Ok(out)
}

fn decimal(x: f64) -> String {
    format!("{x:.12}")
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_json(r: &BigRational) -> serde_json::Value {
    json!({
        "exact": rational_string(r),
        "decimal": decimal(r.to_f64().expect("rational fits in a double")),
    })
}

fn value_json(v: &Value) -> serde_json::Value {
    match v.as_rational() {
        Some(r) => rational_json(r),
        None => json!({ "decimal": decimal(v.to_f64()) }),
    }
}

/// Write to stdout, treating a closed pipe (e.g. `uk ... | head`) as a
/// normal early exit instead of a panic.
fn write_out(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e.into()),
    }
}

fn emit(out: serde_json::Value) -> Result<()> {
    write_out(&format!("{}\n", serde_json::to_string_pretty(&out)?))
}

fn cmd_variation(args: VariationArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let f = build_function(&args.func, args.level, spec)?;
    let ord = parse_ordering(args.ordering.as_deref(), spec.q())?;
    emit(json!({
        "taibleson": value_json(&taibleson_variation(&f)),
        "beer": value_json(&beer_variation(&f, &ord)),
        "berkovich": value_json(&berkovich_variation(&f)),
    }))
}

fn cmd_discrepancy(args: DiscrepancyArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let x = load_points(&args.points, spec)?;
    emit(json!({
        "count": x.len(),
        "maxdepth": x.maxdepth(),
        "delta": rational_json(&x.discrepancy()),
    }))
}

fn cmd_fourier(args: FourierArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let f = build_function(&args.func, args.level, spec)?;
    let table = fourier_coefficients(&f)?;
    if let Some(path) = &args.dump_coeffs {
        let mut csv = String::from("index,level,re,im,abs\n");
        for (m, c) in table.coefficients().iter().enumerate() {
            let level = table.group().character_level(m as u64);
            csv.push_str(&format!("{m},{level},{},{},{}\n", c.re, c.im, c.norm()));
        }
        fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
    }
    emit(json!({
        "level": f.level(),
        "coefficients": table.group().size(),
        "variation": { "decimal": decimal(table.variation()) },
    }))
}

fn cmd_koksma(args: KoksmaArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let f = build_function(&args.func, args.level, spec)?;
    let x = load_points(&args.points, spec)?;
    let ord = parse_ordering(args.ordering.as_deref(), spec.q())?;
    let report = koksma_check(&f, &x, &ord)?;
    let fourier = match report.v_fourier {
        Some(v) => json!({
            "variation": { "decimal": decimal(v) },
            "constant": { "decimal": decimal(report.c_fourier.unwrap()) },
            "bound": { "decimal": decimal(report.bound_fourier.unwrap()) },
            "holds": report.fourier_holds.unwrap(),
        }),
        None => serde_json::Value::Null,
    };
    emit(json!({
        "qmc_error": value_json(&report.lhs),
        "delta": rational_json(&report.delta),
        "taibleson": value_json(&report.v_taibleson),
        "beer": {
            "variation": value_json(&report.v_beer),
            "constant": value_json(&report.c_beer),
            "bound": value_json(&report.bound_beer),
            "holds": report.beer_holds,
        },
        "berkovich": {
            "variation": value_json(&report.v_berkovich),
            "constant": value_json(&report.c_berkovich),
            "bound": value_json(&report.bound_berkovich),
            "holds": report.berkovich_holds,
        },
        "fourier": fourier,
    }))
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let exponents = parse_range(&args.t_range)?;
    let center = Point::parse(&args.center, spec)?;
    let ord = parse_ordering(args.ordering.as_deref(), spec.q())?;
    let truncation = match args.truncation {
        TruncationArg::Average => Truncation::Average,
        TruncationArg::Sample => Truncation::Sample,
    };
    let rows = constant_sweep(&center, &exponents, args.level, truncation, &ord, spec)?;
    let mut out = String::from("t,c_beer_closed,c_beer_trunc,c_berkovich,c_fourier_trunc,c_fourier_closed\n");
    for row in &rows {
        let closed = row
            .c_fourier_closed
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{closed}\n",
            row.t, row.c_beer_closed, row.c_beer_truncated, row.c_berkovich_closed, row.c_fourier_truncated,
        ));
    }
    write_out(&out)
}

fn cmd_anti_koksma(args: AntiKoksmaArgs) -> Result<()> {
    let spec = args.ring.spec()?;
    let report = anti_koksma_demo(args.pairs, args.depth, spec)?;
    emit(json!({
        "pairs": report.pairs,
        "depth": report.depth,
        "taibleson": value_json(&report.v_taibleson),
        "beer": value_json(&report.v_beer),
        "delta": rational_json(&report.delta),
        "qmc_error": value_json(&report.qmc_error),
        "ratio": rational_json(&report.ratio),
    }))
}

fn cmd_reproduce() -> Result<()> {
    let results = acceptance::run_all();
    let mut failed = 0usize;
    let mut out = String::new();
    for r in &results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict}  {:<24} {}\n", r.name, r.details));
        if !r.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        out.push_str(&format!("{failed} of {} checks failed\n", results.len()));
        write_out(&out)?;
        std::process::exit(1);
    }
    out.push_str(&format!("all {} checks passed\n", results.len()));
    write_out(&out)
}

fn run() -> Result<()> {
    if let Ok(raw) = std::env::var("UK_THREADS") {
        // The engine is single-threaded today; the cap is validated so a
        // misconfigured value fails loudly instead of silently doing nothing.
        let threads: usize = raw
            .parse()
            .context("UK_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("UK_THREADS must be a positive integer");
        }
    }
    match Cli::parse().command {
        Command::Variation(args) => cmd_variation(args),
        Command::Discrepancy(args) => cmd_discrepancy(args),
        Command::Fourier(args) => cmd_fourier(args),
        Command::Koksma(args) => cmd_koksma(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::AntiKoksma(args) => cmd_anti_koksma(args),
        Command::Reproduce => cmd_reproduce(),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
