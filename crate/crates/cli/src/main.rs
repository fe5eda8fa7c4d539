//! Command-line surface for the tiling engine: counting, weighted counting,
//! verification suites, the intrusion scan, the dented-axis identity, and
//! SVG rendering.
//!
//! - regions come in as JSON, either inline or as a file path
//! - exit code 0 means success, 1 means a verification found a mismatch,
//!   2 means malformed input (with an error JSON on stderr)
//! - every number is printed as a decimal string; counts routinely exceed
//!   64 bits

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

use fernhex::harness::{run_suite, scan_intrusion, ScanMode, ScanOutcome, SUITE_NAMES};
use fernhex::lattice::{build_region, Region, RegionParams, WeightScheme};
use fernhex::oracle::{count_tilings, extract_first_tiling, weighted_count};
use fernhex::render::render_svg;
use fernhex::schur::{explore_ratio, verify_schur_identity};

#[derive(Parser)]
#[command(
    name = "fernhex",
    version,
    about = "Exact lozenge-tiling counts of hexagons with fern intrusions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count the lozenge tilings of a region.
    Count {
        /// Region JSON, inline or a file path.
        #[arg(long)]
        region: String,
    },
    /// The height-weighted tiling polynomial, whole or evaluated at a point.
    Qcount {
        /// Region JSON, inline or a file path.
        #[arg(long)]
        region: String,
        /// Weight scheme: wt1 (right lozenges) or wt2 (left lozenges).
        #[arg(long)]
        weight: String,
        /// Evaluate at this q, given as "n" or "n/d"; omit for the polynomial.
        #[arg(long)]
        at: Option<String>,
    },
    /// Run a verification suite; exit 0 only if every check passes.
    Verify {
        /// One of: thm2.1, thm3.1, thm5.2, thm7.1, lemmas, kuo, recurrences, schur.
        #[arg(long)]
        suite: String,
        /// Scalar parameters run over 0..=max-param.
        #[arg(long, default_value_t = 1)]
        max_param: i64,
        /// Seed for the randomized checks (kuo, recurrences, thm7.1).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random placements per condensation variant.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Double the fern lobe menu.
        #[arg(long)]
        extended: bool,
        /// Report stream format: text or json (JSON lines).
        #[arg(long, default_value = "text")]
        format: String,
        /// Write the report stream to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep fern splits through hexagons and report per-size argmax rows.
    Scan {
        /// Lobe-to-size ratio, "n" or "n/d", with 0 < p < 2.
        #[arg(long)]
        p: String,
        /// Comma-separated hexagon sizes, e.g. "2,4,6".
        #[arg(long)]
        sizes: String,
        /// float (log-space) or exact (product formula).
        #[arg(long, default_value = "float")]
        mode: String,
        /// Write the CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the dented-axis identity, or evaluate its subset-sum ratio.
    Schur {
        /// JSON file: {"up":[..],"down":[..],"y":..,"z":..} checks the
        /// identity; adding "t", "width", "n", "xs" evaluates the ratio.
        #[arg(long)]
        identity: PathBuf,
    },
    /// Draw a region, optionally with its first tiling, as SVG.
    Render {
        /// Region JSON, inline or a file path.
        #[arg(long)]
        region: String,
        /// Pass "first" to overlay the canonical tiling.
        #[arg(long)]
        tiling: Option<String>,
        /// Write the SVG here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            eprintln!("{}", serde_json::json!({ "error": rendered.trim() }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Count { region } => {
            let region = load_region(&region)?;
            println!("{}", count_tilings(&region));
            Ok(0)
        }
        Cmd::Qcount { region, weight, at } => {
            let region = load_region(&region)?;
            let scheme = parse_weight(&weight)?;
            let poly = weighted_count(&region, scheme);
            match at {
                Some(q) => {
                    let q = parse_rational(&q)?;
                    println!("{}", rational_string(&poly.eval(&q)));
                }
                None => {
                    let terms: Vec<(i64, String)> =
                        poly.terms().map(|(e, c)| (e, c.to_string())).collect();
                    let json = serde_json::json!({
                        "weight": weight,
                        "terms": terms,
                        "degree": poly.degree(),
                        "at1": poly.at_one().to_string(),
                    });
                    println!("{json}");
                }
            }
            Ok(0)
        }
        Cmd::Verify { suite, max_param, seed, trials, extended, format, output } => {
            verify_cmd(&suite, max_param, seed, trials, extended, &format, output)
        }
        Cmd::Scan { p, sizes, mode, output } => scan_cmd(&p, &sizes, &mode, output),
        Cmd::Schur { identity } => schur_cmd(&identity),
        Cmd::Render { region, tiling, output } => {
            let region = load_region(&region)?;
            let tiling = match tiling.as_deref() {
                None => None,
                Some("first") => Some(
                    extract_first_tiling(&region)
                        .ok_or_else(|| anyhow!("region has no tiling to draw"))?,
                ),
                Some(other) => bail!("unknown tiling selector {other:?}; supported: first"),
            };
            let svg = render_svg(&region, tiling.as_deref());
            match output {
                Some(path) => fs::write(&path, svg)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{svg}"),
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// input parsing
// ---------------------------------------------------------------------------

fn load_region(spec: &str) -> Result<Region> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).with_context(|| format!("reading region file {spec}"))?
    };
    let params: RegionParams =
        serde_json::from_str(&text).context("parsing region JSON")?;
    build_region(&params).map_err(|e| anyhow!("invalid region: {e}"))
}

fn parse_weight(s: &str) -> Result<WeightScheme> {
    match s {
        "wt1" => Ok(WeightScheme::Wt1),
        "wt2" => Ok(WeightScheme::Wt2),
        other => bail!("unknown weight scheme {other:?}; supported: wt1, wt2"),
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().with_context(|| format!("parsing rational {s:?}"))?;
    let den: BigInt = den.trim().parse().with_context(|| format!("parsing rational {s:?}"))?;
    if den.is_zero() {
        bail!("rational {s:?} has denominator zero");
    }
    Ok(BigRational::new(num, den))
}

fn parse_i64(s: &str, what: &str) -> Result<i64> {
    s.trim().parse().with_context(|| format!("parsing {what} {s:?}"))
}

fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn verify_cmd(
    suite: &str,
    max_param: i64,
    seed: u64,
    trials: usize,
    extended: bool,
    format: &str,
    output: Option<PathBuf>,
) -> Result<u8> {
    if !matches!(format, "text" | "json") {
        bail!("unknown format {format:?}; supported: text, json");
    }
    let started = Instant::now();
    let reports = run_suite(suite, max_param, trials, seed, extended).ok_or_else(|| {
        anyhow!("unknown suite {suite:?}; supported: {}", SUITE_NAMES.join(", "))
    })?;
    let mut stream = String::new();
    for r in &reports {
        if format == "json" {
            stream.push_str(&serde_json::to_string(r)?);
        } else {
            stream.push_str(&r.human_line());
        }
        stream.push('\n');
    }
    match output {
        Some(path) => {
            fs::write(&path, stream).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            print!("{stream}");
            std::io::stdout().flush().ok();
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let all = reports.len();
    eprintln!(
        "suite {suite}: {passed}/{all} checks passed in {:.1}s",
        started.elapsed().as_secs_f64()
    );
    Ok(if passed == all { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

fn scan_cmd(p: &str, sizes: &str, mode: &str, output: Option<PathBuf>) -> Result<u8> {
    let (pn, pd) = match p.split_once('/') {
        Some((n, d)) => (parse_i64(n, "ratio numerator")?, parse_i64(d, "ratio denominator")?),
        None => (parse_i64(p, "ratio")?, 1),
    };
    let sizes: Vec<i64> = sizes
        .split(',')
        .map(|s| parse_i64(s, "size"))
        .collect::<Result<_>>()?;
    let mode = match mode {
        "float" => ScanMode::Float,
        "exact" => ScanMode::Exact,
        other => bail!("unknown scan mode {other:?}; supported: float, exact"),
    };
    let ScanOutcome { records, summaries } =
        scan_intrusion(pn, pd, &sizes, mode).map_err(|e| anyhow!("{e}"))?;
    let mut csv = String::from(fernhex::harness::SCAN_CSV_HEADER);
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.csv_line());
        csv.push('\n');
    }
    match output {
        Some(path) => {
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            for s in &summaries {
                println!(
                    "p={} N={} M={} best m={} n={} x={} logcount={:.9} balanced={}",
                    s.p, s.hex_size, s.lobe_total, s.best_m, s.best_n, s.best_x, s.logcount,
                    s.balanced
                );
            }
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// schur
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchurSpec {
    up: Vec<i64>,
    down: Vec<i64>,
    #[serde(default)]
    y: Option<i64>,
    #[serde(default)]
    z: Option<i64>,
    #[serde(default)]
    t: Option<Vec<i64>>,
    #[serde(default)]
    width: Option<i64>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    xs: Option<Vec<String>>,
}

fn schur_cmd(path: &PathBuf) -> Result<u8> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: SchurSpec = serde_json::from_str(&text).context("parsing identity JSON")?;
    if let Some(t) = &spec.t {
        let width = spec.width.ok_or_else(|| anyhow!("ratio spec needs \"width\""))?;
        let n = spec.n.ok_or_else(|| anyhow!("ratio spec needs \"n\""))?;
        let xs: Vec<BigRational> = spec
            .xs
            .ok_or_else(|| anyhow!("ratio spec needs \"xs\""))?
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_>>()?;
        let value = explore_ratio(t, &spec.up, &spec.down, width, n, &xs)
            .map_err(|e| anyhow!("{e}"))?;
        println!("{}", serde_json::json!({ "ratio": rational_string(&value) }));
        return Ok(0);
    }
    let y = spec.y.ok_or_else(|| anyhow!("identity spec needs \"y\""))?;
    let z = spec.z.ok_or_else(|| anyhow!("identity spec needs \"z\""))?;
    let ident = verify_schur_identity(&spec.up, &spec.down, y, z).map_err(|e| anyhow!("{e}"))?;
    let holds = ident.holds();
    println!(
        "{}",
        serde_json::json!({
            "lhs": ident.lhs.to_string(),
            "rhs": rational_string(&ident.rhs),
            "region_count": ident.region_count.to_string(),
            "holds": holds,
        })
    );
    Ok(if holds { 0 } else { 1 })
}
