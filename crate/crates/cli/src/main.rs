//! Batch front end for the toric-endo library.
//!
//! Exit status: 0 when the requested check passes mathematically, 1 when
//! it completes but the verdict is negative (a failed gluing, a common
//! zero, an unresolved certificate), 2 on input errors. Reports are
//! emitted as text or as schema-versioned JSON; identical inputs produce
//! byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use toric_endo::chern::{expand_pullback, expand_pullback_at, ChernTable, PullbackReport};
use toric_endo::fiber::FiberPoly;
use toric_endo::lattice::{
    frobenius_power_analysis, hirzebruch, p1, p1_power, p1xp1, p2, EndoError, Fan, FanJson,
    FrobeniusAnalysis, LatticeEndo,
};
use toric_endo::obstruction::{
    certify_variety, verify_compat_cotangent, verify_compat_tangent, BundleKind, CertificateStatus,
    CompatInstance, VarietyVerdict,
};
use toric_endo::poly::VarSet;
use toric_endo::sections::{polytope_of, SplitBundleSpec, ToricDivisor};
use toric_endo::split::{
    classify_p1n_tangent, gluing_check_all, hirzebruch_enumerate, no_common_zero, BasedMapData,
    GluingFailure, GluingReport, HirzebruchFamily, P1nReason, P1nVerdict, SectionChoice,
    ZeroStatus, ZeroWitness,
};

#[derive(Parser)]
#[command(
    name = "toric-endo",
    version,
    about = "Exact checks for based endomorphisms of projectivized toric bundles"
)]
struct Cli {
    /// Fan to operate on: a JSON file or builtin:{p1,p2,p1xp1,fN,p1^N}
    #[arg(long, global = true, default_value = "builtin:p2")]
    fan: String,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bundle {
    Tangent,
    Cotangent,
}

impl Bundle {
    fn kind(self) -> BundleKind {
        match self {
            Bundle::Tangent => BundleKind::Tangent,
            Bundle::Cotangent => BundleKind::Cotangent,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fan utilities
    Fan {
        #[command(subcommand)]
        action: FanAction,
    },
    /// List the walls of the fan with their integer relations
    Walls,
    /// Lattice points of a toric divisor's section polytope
    Sections {
        /// Ray coefficients c1,c2,... of the divisor, in ray order
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        divisor: Vec<i64>,
        /// List the points themselves, not just the count
        #[arg(long)]
        points: bool,
    },
    /// Check a split-bundle based-map candidate: gluing plus common zeros
    ClassifySplit {
        /// Candidate JSON file (bundle plus chosen sections)
        #[arg(long)]
        spec: PathBuf,
    },
    /// Enumerate the based-map family on a Hirzebruch surface and verify
    /// random members
    Hirzebruch {
        /// Twist of the surface F_n
        #[arg(long)]
        n: i64,
        /// Relative degree of the candidate maps
        #[arg(long)]
        degree: u32,
        /// Number of random family members to verify
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Classify based tangent maps over a product of projective lines
    P1nClassify {
        /// Base degrees d1,d2,... of the product map
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
    },
    /// Emit a nonexistence certificate for the projectivized (co)tangent
    /// bundle
    Certify {
        #[arg(long, value_enum)]
        bundle: Bundle,
        /// Relative degree d >= 2 of the hypothetical map
        #[arg(long)]
        degree: u32,
    },
    /// Compatibility equations for a candidate pair across a wall
    Compat {
        #[command(subcommand)]
        action: CompatAction,
    },
    /// Chern-class pullback identities
    Chern {
        #[command(subcommand)]
        action: ChernAction,
    },
    /// Detect Frobenius structure in a lattice endomorphism
    FrobeniusAnalyze {
        /// Integer matrix: rows separated by ';', entries by ','
        #[arg(long)]
        matrix: String,
        /// Largest power tried for scalar collapse
        #[arg(long, default_value_t = 64)]
        max_power: u32,
    },
}

#[derive(Subcommand)]
enum FanAction {
    /// Validate smoothness and completeness
    Check,
}

#[derive(Subcommand)]
enum CompatAction {
    /// Verify the compatibility equations for a data file
    Verify {
        /// JSON file with fields a, d, bundle, f, g
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Subcommand)]
enum ChernAction {
    /// Expand the pulled-back relation and report the residuals
    Verify {
        /// Rank of the bundle
        #[arg(long)]
        rank: usize,
        /// Dimension of the base (truncation order)
        #[arg(long)]
        dim: usize,
        /// Base degree of the map (numeric mode)
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        /// Scaling exponent of the pullback (numeric mode)
        #[arg(long, allow_negative_numbers = true)]
        q: Option<i64>,
        /// Keep d and q symbolic
        #[arg(long, conflicts_with_all = ["d", "q"])]
        symbolic: bool,
    },
}

/// A finished report: machine form, human form, and the verdict that
/// decides the exit status.
struct Outcome {
    ok: bool,
    json: Value,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => outcome.text,
    };
    if let Some(path) = &cli.out {
        if let Err(e) = fs::write(path, &body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{body}");
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Fan { action: FanAction::Check } => cmd_fan_check(&cli.fan),
        Command::Walls => cmd_walls(&cli.fan),
        Command::Sections { divisor, points } => cmd_sections(&cli.fan, divisor, *points),
        Command::ClassifySplit { spec } => cmd_classify_split(&cli.fan, spec),
        Command::Hirzebruch { n, degree, samples } => {
            cmd_hirzebruch(*n, *degree, *samples, cli.seed)
        }
        Command::P1nClassify { degrees } => cmd_p1n_classify(degrees),
        Command::Certify { bundle, degree } => cmd_certify(&cli.fan, *bundle, *degree),
        Command::Compat { action: CompatAction::Verify { data } } => cmd_compat_verify(data),
        Command::Chern { action: ChernAction::Verify { rank, dim, d, q, symbolic } } => {
            cmd_chern_verify(*rank, *dim, *d, *q, *symbolic)
        }
        Command::FrobeniusAnalyze { matrix, max_power } => {
            cmd_frobenius(&cli.fan, matrix, *max_power)
        }
    }
}

// ---- Fan loading ----

fn builtin_fan(name: &str) -> Option<Fan> {
    match name {
        "p1" => Some(p1()),
        "p2" => Some(p2()),
        "p1xp1" => Some(p1xp1()),
        _ => {
            if let Some(ns) = name.strip_prefix("p1^") {
                let n: usize = ns.parse().ok().filter(|&n| (1..=8).contains(&n))?;
                Some(p1_power(n))
            } else if let Some(ns) = name.strip_prefix('f') {
                let n: i64 = ns.parse().ok().filter(|&n| n >= 0)?;
                Some(hirzebruch(n))
            } else {
                None
            }
        }
    }
}

fn load_fan(spec: &str) -> Result<Fan> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_fan(name)
            .ok_or_else(|| anyhow!("unknown builtin fan {name:?} (try p1, p2, p1xp1, fN, p1^N)"));
    }
    let text =
        fs::read_to_string(spec).with_context(|| format!("cannot read fan file {spec}"))?;
    Fan::from_json_str(&text).map_err(|e| anyhow!("fan file {spec}: {e}"))
}

// ---- fan check ----

fn cmd_fan_check(fan_arg: &str) -> Result<Outcome> {
    // Builtins and well-formed files share the happy path; a file whose
    // JSON parses but whose fan is rejected gets a negative verdict
    // rather than an input error, so scripts can triage bad geometry.
    let staged: std::result::Result<Fan, String> =
        if let Some(name) = fan_arg.strip_prefix("builtin:") {
            Ok(builtin_fan(name).ok_or_else(|| {
                anyhow!("unknown builtin fan {name:?} (try p1, p2, p1xp1, fN, p1^N)")
            })?)
        } else {
            let text = fs::read_to_string(fan_arg)
                .with_context(|| format!("cannot read fan file {fan_arg}"))?;
            let raw: FanJson = serde_json::from_str(&text)
                .map_err(|e| anyhow!("fan file {fan_arg}: invalid JSON: {e}"))?;
            raw.try_into_fan()
        };
    match staged {
        Ok(fan) => {
            let walls = fan.find_walls();
            let j = fan.to_json();
            let json = json!({
                "schema": 1,
                "command": "fan-check",
                "valid": true,
                "rank": j.rank,
                "rays": j.rays,
                "max_cones": j.max_cones,
                "walls": walls.len(),
            });
            let text = format!(
                "fan {}: rank {}, {} rays, {} maximal cones\n\
                 smooth: yes (every maximal cone is a lattice basis)\n\
                 complete: yes (facet pairing and adjacency verified)\n\
                 walls: {}\n",
                fan_arg,
                fan.rank(),
                fan.rays().len(),
                fan.max_cones().len(),
                walls.len()
            );
            Ok(Outcome { ok: true, json, text })
        }
        Err(msg) => {
            let json = json!({
                "schema": 1,
                "command": "fan-check",
                "valid": false,
                "reason": msg,
            });
            let text = format!("fan {fan_arg}: rejected\nreason: {msg}\n");
            Ok(Outcome { ok: false, json, text })
        }
    }
}

// ---- walls ----

fn cmd_walls(fan_arg: &str) -> Result<Outcome> {
    let fan = load_fan(fan_arg)?;
    let walls = fan.find_walls();
    let mut rows = Vec::new();
    let mut lines = format!(
        "fan {}: rank {}, {} rays, {} maximal cones, {} walls\n",
        fan_arg,
        fan.rank(),
        fan.rays().len(),
        fan.max_cones().len(),
        walls.len()
    );
    for (i, wall) in walls.iter().enumerate() {
        let relation = fan.wall_relation(wall).map_err(|e| anyhow!("wall {i}: {e}"))?;
        let a = relation.coeffs_i64();
        rows.push(json!({
            "index": i,
            "tau": wall.tau_indices,
            "sigma": wall.sigma,
            "sigma_prime": wall.sigma_prime,
            "v_n": wall.v_n,
            "v_n_prime": wall.v_n_prime,
            "a": a,
        }));
        lines.push_str(&format!(
            "wall {i}: tau rays {:?}, cones {} | {}, opposite rays {} and {}, a = {:?}\n",
            wall.tau_indices, wall.sigma, wall.sigma_prime, wall.v_n, wall.v_n_prime, a
        ));
    }
    let json = json!({
        "schema": 1,
        "command": "walls",
        "rank": fan.rank(),
        "walls": rows,
    });
    Ok(Outcome { ok: true, json, text: lines })
}

// ---- sections ----

fn cmd_sections(fan_arg: &str, coeffs: &[i64], list_points: bool) -> Result<Outcome> {
    let fan = load_fan(fan_arg)?;
    let divisor = ToricDivisor::new(coeffs.to_vec());
    let polytope = polytope_of(&fan, &divisor).map_err(|e| anyhow!("{e}"))?;
    let pts = polytope.lattice_points();
    let (low, high) = polytope.bounding_box();
    let mut text = format!(
        "divisor {:?} on fan {}\nsection space dimension: {}\nbounding box: {:?} .. {:?}\n",
        coeffs,
        fan_arg,
        pts.len(),
        low,
        high
    );
    if list_points {
        for p in &pts {
            text.push_str(&format!("  {p:?}\n"));
        }
    }
    let mut json = json!({
        "schema": 1,
        "command": "sections",
        "divisor": coeffs,
        "dimension": pts.len(),
        "bounding_box": { "low": low, "high": high },
    });
    if list_points {
        json["points"] = json!(pts);
    }
    Ok(Outcome { ok: true, json, text })
}

// ---- classify-split ----

#[derive(Deserialize)]
struct CandidateFile {
    bundle: BundleSpecJson,
    sections: Vec<SectionJson>,
}

#[derive(Deserialize)]
struct BundleSpecJson {
    line_bundles: Vec<Vec<i64>>,
    q: u32,
    d: u32,
}

#[derive(Deserialize)]
struct SectionJson {
    ell: usize,
    lambda: Vec<u32>,
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
struct TermJson {
    point: Vec<i64>,
    coeff: String,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

fn rational_strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn gluing_failure_line(f: &GluingFailure) -> String {
    match f {
        GluingFailure::NotRegular { chart, ell, lambda, point } => format!(
            "chart {chart}: slot (ell={ell}, lambda={lambda:?}) monomial {point:?} is not regular"
        ),
        GluingFailure::CoefficientMismatch { ell, lambda, lhs, rhs } => format!(
            "slot (ell={ell}, lambda={lambda:?}): transition identity fails: {lhs} != {rhs}"
        ),
    }
}

fn zero_verdict_json(verdict: &toric_endo::split::CommonZeroVerdict) -> Value {
    let method = match verdict.method {
        toric_endo::split::ZeroMethod::Triangular => "triangular",
        toric_endo::split::ZeroMethod::Resultant => "resultant",
        toric_endo::split::ZeroMethod::FixedPointBezout => "fixed-point-bezout",
    };
    match &verdict.status {
        ZeroStatus::NoCommonZero => json!({ "status": "no-common-zero", "method": method }),
        ZeroStatus::CommonZeroFound(ZeroWitness::Point { chart, base, fiber }) => json!({
            "status": "common-zero",
            "method": method,
            "witness": {
                "chart": chart,
                "base": rational_strings(base),
                "fiber": rational_strings(fiber),
            },
        }),
        ZeroStatus::CommonZeroFound(ZeroWitness::VanishingComponent { ell }) => json!({
            "status": "common-zero",
            "method": method,
            "witness": { "vanishing_component": ell },
        }),
        ZeroStatus::Inconclusive { note } => {
            json!({ "status": "inconclusive", "method": method, "note": note })
        }
    }
}

fn zero_verdict_line(verdict: &toric_endo::split::CommonZeroVerdict) -> String {
    match &verdict.status {
        ZeroStatus::NoCommonZero => format!("no common zero ({:?} criterion)", verdict.method),
        ZeroStatus::CommonZeroFound(ZeroWitness::Point { chart, base, fiber }) => format!(
            "common zero on chart {chart} at base {:?}, fiber {:?}",
            rational_strings(base),
            rational_strings(fiber)
        ),
        ZeroStatus::CommonZeroFound(ZeroWitness::VanishingComponent { ell }) => {
            format!("component {ell} vanishes identically, forcing a common zero")
        }
        ZeroStatus::Inconclusive { note } => format!("inconclusive: {note}"),
    }
}

fn cmd_classify_split(fan_arg: &str, spec_path: &PathBuf) -> Result<Outcome> {
    let fan = load_fan(fan_arg)?;
    let text = fs::read_to_string(spec_path)
        .with_context(|| format!("cannot read candidate file {}", spec_path.display()))?;
    let file: CandidateFile = serde_json::from_str(&text)
        .map_err(|e| anyhow!("candidate file {}: {e}", spec_path.display()))?;

    let bundles: Vec<ToricDivisor> =
        file.bundle.line_bundles.into_iter().map(ToricDivisor::new).collect();
    let spec = SplitBundleSpec::new(bundles, file.bundle.q, file.bundle.d)
        .map_err(|e| anyhow!("bundle spec: {e}"))?;
    let mut data = BasedMapData::new(fan, spec);
    for s in &file.sections {
        let mut terms = Vec::with_capacity(s.terms.len());
        for t in &s.terms {
            terms.push((t.point.clone(), parse_rational(&t.coeff)?));
        }
        data.set_section(s.ell, s.lambda.clone(), SectionChoice { terms })
            .map_err(|e| anyhow!("section slot: {e}"))?;
    }

    // Out-of-polytope monomials are a negative verdict, not bad input.
    if let Err(e) = data.validate() {
        let json = json!({
            "schema": 1,
            "command": "classify-split",
            "ok": false,
            "verdict": "invalid-candidate",
            "reason": e.to_string(),
        });
        let text = format!("candidate rejected: {e}\n");
        return Ok(Outcome { ok: false, json, text });
    }

    let reports = gluing_check_all(&data);
    let gluing_ok = reports.iter().all(GluingReport::ok);
    let mut report_rows = Vec::new();
    let mut lines = String::new();
    for r in &reports {
        let failures: Vec<String> = r.failures.iter().map(gluing_failure_line).collect();
        lines.push_str(&format!(
            "gluing {} -> {}: {}\n",
            r.pair.0,
            r.pair.1,
            if r.ok() { "ok".to_string() } else { failures.join("; ") }
        ));
        report_rows.push(json!({
            "from": r.pair.0,
            "to": r.pair.1,
            "ok": r.ok(),
            "failures": failures,
        }));
    }

    let (zero_json, ok) = if gluing_ok {
        let verdict = no_common_zero(&data).map_err(|e| anyhow!("{e}"))?;
        lines.push_str(&format!("zero check: {}\n", zero_verdict_line(&verdict)));
        let ok = matches!(verdict.status, ZeroStatus::NoCommonZero);
        (zero_verdict_json(&verdict), ok)
    } else {
        lines.push_str("zero check: skipped (gluing failed)\n");
        (Value::Null, false)
    };
    lines.push_str(if ok { "verdict: based map\n" } else { "verdict: rejected\n" });

    let json = json!({
        "schema": 1,
        "command": "classify-split",
        "ok": ok,
        "gluing": { "ok": gluing_ok, "reports": report_rows },
        "zero_check": zero_json,
    });
    Ok(Outcome { ok, json, text: lines })
}

// ---- hirzebruch ----

fn cmd_hirzebruch(n: i64, degree: u32, samples: usize, seed: u64) -> Result<Outcome> {
    if n < 1 {
        bail!("--n must be at least 1");
    }
    if degree < 1 {
        bail!("--degree must be at least 1");
    }
    let template = hirzebruch_enumerate(n, degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nonzero = |rng: &mut ChaCha8Rng| loop {
        let v: i64 = rng.gen_range(-3..=3);
        if v != 0 {
            return BigRational::from(BigInt::from(v));
        }
    };

    let mut rows = Vec::new();
    let mut all_pass = true;
    for idx in 0..samples {
        let s: Vec<Vec<BigRational>> = (0..=degree)
            .map(|i| {
                let len = (n as usize) * (i as usize) + 1;
                (0..len)
                    .map(|j| {
                        if i == 0 && j == 0 {
                            nonzero(&mut rng)
                        } else {
                            BigRational::from(BigInt::from(rng.gen_range(-3..=3i64)))
                        }
                    })
                    .collect()
            })
            .collect();
        let c = nonzero(&mut rng);
        let fam = HirzebruchFamily::new(n, degree, s, c)
            .map_err(|e| anyhow!("sampled family rejected: {e}"))?;
        let data = fam.to_based_map();
        let gluing_ok = gluing_check_all(&data).iter().all(GluingReport::ok);
        let verdict = no_common_zero(&data).map_err(|e| anyhow!("{e}"))?;
        let zero_ok = matches!(verdict.status, ZeroStatus::NoCommonZero);
        all_pass &= gluing_ok && zero_ok;
        rows.push(json!({
            "index": idx,
            "gluing_ok": gluing_ok,
            "zero_check": zero_verdict_json(&verdict),
        }));
    }

    let json = json!({
        "schema": 1,
        "command": "hirzebruch",
        "n": template.n,
        "degree": template.d,
        "slot_dims": template.slot_dims,
        "scale_dim": template.scale_dim,
        "parameter_sum": template.parameter_sum,
        "samples": rows,
        "ok": all_pass,
    });
    let mut text = format!(
        "based-map family on F_{} with relative degree {}\n\
         slot dims (s_0..s_{}): {:?}, plus {} scale parameter\n\
         parameter sum: {}\n",
        template.n, template.d, template.d, template.slot_dims, template.scale_dim,
        template.parameter_sum
    );
    for (idx, row) in rows.iter().enumerate() {
        text.push_str(&format!(
            "sample {idx}: gluing {}, {}\n",
            if row["gluing_ok"].as_bool().unwrap() { "ok" } else { "FAILED" },
            match row["zero_check"]["status"].as_str().unwrap() {
                "no-common-zero" => "no common zero",
                "common-zero" => "COMMON ZERO",
                other => other,
            }
        ));
    }
    text.push_str(if all_pass {
        "all samples define based maps\n"
    } else {
        "some samples failed\n"
    });
    Ok(Outcome { ok: all_pass, json, text })
}

// ---- p1n-classify ----

fn cmd_p1n_classify(degrees: &[u32]) -> Result<Outcome> {
    if degrees.is_empty() {
        bail!("--degrees needs at least one entry");
    }
    if degrees.iter().any(|&d| d == 0) {
        bail!("factor degrees must be positive");
    }
    let verdict = classify_p1n_tangent(degrees);
    let (json, text) = match &verdict {
        P1nVerdict::Admissible { degree, free_scalars } => {
            let json = json!({
                "schema": 1,
                "command": "p1n-classify",
                "degrees": degrees,
                "verdict": "admissible",
                "degree": degree,
                "free_scalars": free_scalars,
                "family": "f_l = A_l z_l^d, A_l nonzero",
            });
            let text = format!(
                "tangent classification over (P^1)^{} with degrees {:?}\n\
                 every based map is f_l = A_l z_l^{} with nonzero scalars A_l ({} free scalars)\n",
                degrees.len(),
                degrees,
                degree,
                free_scalars
            );
            (json, text)
        }
        P1nVerdict::NoBasedMapExists { candidate_degree, trace } => {
            let reasons: Vec<Value> = trace
                .iter()
                .map(|o| {
                    json!({
                        "ell": o.ell,
                        "base_degree": o.base_degree,
                        "reason": match o.reason {
                            P1nReason::ComponentVanishes => "component-vanishes",
                            P1nReason::CoefficientMustVanishSomewhere =>
                                "coefficient-vanishes-somewhere",
                        },
                    })
                })
                .collect();
            let json = json!({
                "schema": 1,
                "command": "p1n-classify",
                "degrees": degrees,
                "verdict": "no-based-map",
                "candidate_degree": candidate_degree,
                "trace": reasons,
            });
            let mut text = format!(
                "tangent classification over (P^1)^{} with degrees {:?}\n\
                 no based map exists; obstruction at candidate degree {}:\n",
                degrees.len(),
                degrees,
                candidate_degree
            );
            for o in trace {
                let why = match o.reason {
                    P1nReason::ComponentVanishes => {
                        "every admissible slot vanishes, so the component is identically zero"
                    }
                    P1nReason::CoefficientMustVanishSomewhere => {
                        "its coefficient is a positive-degree section and vanishes somewhere"
                    }
                };
                text.push_str(&format!(
                    "  factor {} (base degree {}): {}\n",
                    o.ell, o.base_degree, why
                ));
            }
            (json, text)
        }
    };
    Ok(Outcome { ok: true, json, text })
}

// ---- certify ----

fn cmd_certify(fan_arg: &str, bundle: Bundle, degree: u32) -> Result<Outcome> {
    if degree < 2 {
        bail!("--degree must be at least 2");
    }
    let fan = load_fan(fan_arg)?;
    let report = certify_variety(&fan, bundle.kind(), degree).map_err(|e| anyhow!("{e}"))?;
    let ok = matches!(report.verdict, VarietyVerdict::Certified { .. });

    let mut text = format!(
        "nonexistence certificate for the {} bundle, degree {}, fan {} ({} walls)\n",
        report.bundle.label(),
        report.d,
        fan_arg,
        report.walls.len()
    );
    for w in &report.walls {
        let status = match &w.certificate.status {
            CertificateStatus::Valid => {
                format!("valid ({} obstruction checks)", w.certificate.checks.len())
            }
            CertificateStatus::Invalid { reason } => format!("invalid: {reason}"),
            CertificateStatus::HypothesisUnmet { reason } => {
                format!("hypothesis unmet: {reason}")
            }
        };
        text.push_str(&format!("wall {}: {}\n", w.wall_index, status));
    }
    text.push_str(&match &report.verdict {
        VarietyVerdict::Certified { wall_index } => {
            format!("verdict: certified via wall {wall_index}; no such based map exists\n")
        }
        VarietyVerdict::NoApplicableWall => {
            "verdict: no applicable wall; the obstruction does not engage this fan\n".to_string()
        }
        VarietyVerdict::Unresolved => "verdict: unresolved\n".to_string(),
    });

    let json = json!({
        "schema": 1,
        "command": "certify",
        "ok": ok,
        "report": report.to_json(),
    });
    Ok(Outcome { ok, json, text })
}

// ---- compat verify ----

#[derive(Deserialize)]
struct CompatFile {
    bundle: String,
    a: Vec<i64>,
    d: u32,
    f: Vec<String>,
    g: Vec<String>,
}

fn cmd_compat_verify(path: &PathBuf) -> Result<Outcome> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read data file {}", path.display()))?;
    let file: CompatFile = serde_json::from_str(&text)
        .map_err(|e| anyhow!("data file {}: {e}", path.display()))?;
    let n = file.a.len() + 1;
    let vars = VarSet::base(n);
    let parse_all = |label: &str, items: &[String]| -> Result<Vec<FiberPoly>> {
        items
            .iter()
            .enumerate()
            .map(|(j, s)| {
                FiberPoly::parse(&vars, n, s).map_err(|e| anyhow!("{label}[{j}]: {e}"))
            })
            .collect()
    };
    let f = parse_all("f", &file.f)?;
    let g = parse_all("g", &file.g)?;
    let inst = CompatInstance::new(file.a.clone(), file.d, f, g).map_err(|e| anyhow!("{e}"))?;
    let report = match file.bundle.as_str() {
        "tangent" => verify_compat_tangent(&inst),
        "cotangent" => verify_compat_cotangent(&inst),
        other => bail!("bundle must be \"tangent\" or \"cotangent\", got {other:?}"),
    };
    let ok = report.ok();
    let residuals: Vec<String> = report.residuals.iter().map(|r| r.to_string()).collect();

    let mut text = format!(
        "compatibility equations for the {} bundle, a = {:?}, degree {}\n",
        file.bundle, file.a, file.d
    );
    for (j, r) in report.residuals.iter().enumerate() {
        if r.is_zero() {
            text.push_str(&format!("equation {j}: holds\n"));
        } else {
            text.push_str(&format!("equation {j}: residual {r}\n"));
        }
    }
    text.push_str(if ok {
        "all compatibility equations hold\n"
    } else {
        "the pair does not glue\n"
    });

    let json = json!({
        "schema": 1,
        "command": "compat-verify",
        "bundle": file.bundle,
        "a": file.a,
        "d": file.d,
        "ok": ok,
        "residuals": residuals,
    });
    Ok(Outcome { ok, json, text })
}

// ---- chern verify ----

fn cmd_chern_verify(
    rank: usize,
    dim: usize,
    d: Option<i64>,
    q: Option<i64>,
    symbolic: bool,
) -> Result<Outcome> {
    if rank < 1 {
        bail!("--rank must be at least 1");
    }
    if dim < 1 {
        bail!("--dim must be at least 1");
    }
    let table = ChernTable::canonical(rank);
    let (report, mode): (PullbackReport, Value) = if symbolic {
        (expand_pullback(&table, dim), json!("symbolic"))
    } else {
        let (d, q) = match (d, q) {
            (Some(d), Some(q)) => (d, q),
            _ => bail!("numeric mode needs both --d and --q (or pass --symbolic)"),
        };
        if d == q {
            bail!("--d and --q must differ; equal degrees make the map an isomorphism");
        }
        (expand_pullback_at(&table, dim, d, q), json!({ "d": d, "q": q }))
    };
    let ok = report.ok();
    let residuals: Vec<String> = report.residuals.iter().map(|r| r.to_string()).collect();

    let mode_text = if symbolic {
        "symbolic d, q".to_string()
    } else {
        format!("d = {}, q = {}", d.unwrap(), q.unwrap())
    };
    let mut text = format!(
        "pullback relation residuals for rank {} over a dimension-{} base ({})\n",
        report.rank, report.dim, mode_text
    );
    for (k, r) in report.residuals.iter().enumerate() {
        let power = report.rank - k;
        if r.is_zero() {
            text.push_str(&format!("coefficient of L^{power}: 0\n"));
        } else {
            text.push_str(&format!("coefficient of L^{power}: {r}\n"));
        }
    }
    text.push_str(if ok { "all residuals vanish\n" } else { "nonzero residuals remain\n" });

    let json = json!({
        "schema": 1,
        "command": "chern-verify",
        "rank": report.rank,
        "dim": report.dim,
        "mode": mode,
        "ok": ok,
        "residuals": residuals,
    });
    Ok(Outcome { ok, json, text })
}

// ---- frobenius-analyze ----

fn parse_matrix(input: &str) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<i64>> = input
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| anyhow!("bad matrix entry {:?}", e.trim()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        bail!("matrix must be square; got {} rows", rows.len());
    }
    Ok(rows)
}

fn cmd_frobenius(fan_arg: &str, matrix: &str, max_power: u32) -> Result<Outcome> {
    let fan = load_fan(fan_arg)?;
    let rows = parse_matrix(matrix)?;
    if rows.len() != fan.rank() {
        bail!("matrix is {}x{} but the fan has rank {}", rows.len(), rows.len(), fan.rank());
    }
    let phi = LatticeEndo::from_i64(&rows);
    let analysis = match frobenius_power_analysis(&phi, &fan, max_power) {
        Ok(a) => a,
        Err(EndoError::NotToric(cone)) => {
            let json = json!({
                "schema": 1,
                "command": "frobenius-analyze",
                "matrix": rows,
                "ok": false,
                "verdict": "not-toric",
                "cone": cone,
            });
            let text = format!(
                "matrix {rows:?} on fan {fan_arg}\n\
                 not toric: the image of maximal cone {cone} lies in no maximal cone\n"
            );
            return Ok(Outcome { ok: false, json, text });
        }
        Err(EndoError::SingularMatrix) => {
            let json = json!({
                "schema": 1,
                "command": "frobenius-analyze",
                "matrix": rows,
                "ok": false,
                "verdict": "singular",
            });
            let text = format!("matrix {rows:?} is singular over Q\n");
            return Ok(Outcome { ok: false, json, text });
        }
        Err(e) => bail!("{e}"),
    };

    let (ok, verdict_json, verdict_text) = match &analysis {
        FrobeniusAnalysis::Scalar { power, scale } => (
            true,
            json!({ "kind": "scalar", "power": power, "scale": scale.to_string() }),
            format!("phi^{power} = {scale} * identity (smallest such power)\n"),
        ),
        FrobeniusAnalysis::ProductDecomposition { power, factors } => {
            let fs: Vec<Value> = factors
                .iter()
                .map(|f| {
                    json!({
                        "scale": f.scale.to_string(),
                        "rays": f.rays,
                        "rank": f.rank,
                    })
                })
                .collect();
            let mut line = format!("phi^{power} splits the rays into eigenfactors:\n");
            for f in factors {
                line.push_str(&format!(
                    "  scale {} on rays {:?} (rank {})\n",
                    f.scale, f.rays, f.rank
                ));
            }
            (true, json!({ "kind": "product", "power": power, "factors": fs }), line)
        }
        FrobeniusAnalysis::NotFound { max_power } => (
            false,
            json!({ "kind": "not-found", "max_power": max_power }),
            format!("no scalar power or eigen-splitting up to power {max_power}\n"),
        ),
    };

    let json = json!({
        "schema": 1,
        "command": "frobenius-analyze",
        "matrix": rows,
        "ok": ok,
        "verdict": verdict_json,
    });
    let text = format!("matrix {rows:?} on fan {fan_arg}\n{verdict_text}");
    Ok(Outcome { ok, json, text })
}
