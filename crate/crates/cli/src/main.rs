use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use ppants::census::{self, brute_table_cached, motif_table_cached, poly_from_motifs, CensusTable, Format};
use ppants::chord::{form_report, quad_bound_report};
use ppants::class::{aut_orbit_partition, canonical_class, enumerate_classes, CurveClass};
use ppants::intersection::{class_intersection, defect_and_delta, self_intersection};
use ppants::motif::{is_abc_thin, motif_of, motifs_cached, partition_mismatches, verify_motif_bounds, MotifRecord};
use ppants::oracle::{default_radius, intersection_via_cosets};
use ppants::surgery::{contract, distinguished_runs, expand, rank, runs, verify_surgery, Run, RunType};
use ppants::word::{parse_word, ReflectionWord};

#[derive(Parser, Debug)]
#[command(name = "ppants", version, about = "Self-intersection numbers and census of closed geodesics on the pair of pants")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, env = "PPANTS_THREADS")]
    threads: Option<usize>,
    /// Directory for motif lists and census checkpoints.
    #[arg(long, global = true, env = "PPANTS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Output format; plain text when omitted (csv for tables).
    #[arg(long, global = true, env = "PPANTS_FORMAT")]
    format: Option<OutFormat>,
    /// Largest combinatorial length.
    #[arg(long, global = true, env = "PPANTS_LMAX")]
    lmax: Option<usize>,
    /// Largest defect.
    #[arg(long, global = true, env = "PPANTS_DMAX")]
    dmax: Option<i64>,
    /// Starting radius for the coset oracle.
    #[arg(long, global = true, env = "PPANTS_RADIUS")]
    radius: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Markdown,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
            OutFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CensusMethod {
    Brute,
    Motif,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Surgery,
    Oracle,
    Motif,
    Form,
    Defect,
    Census,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Self-intersection number of a word (xyz or abc alphabet).
    Intersect {
        word: String,
        /// Also compute it from hyperbolic geometry and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Intersection number, length and both defects.
    Defect { word: String },
    /// Runs of the canonical representative, marking distinguished ones.
    Runs { word: String },
    /// Doubles a run, given as `xy@3` with positions in the canonical word.
    Expand { word: String, run: String },
    /// Shortens a run of length at least 3 by two letters.
    Contract { word: String, run: String },
    /// The motif a class descends from.
    Motif { word: String },
    /// Lists the motifs of a defect.
    Motifs {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        /// Group into automorphism orbits.
        #[arg(long)]
        orbits: bool,
    },
    /// Counts classes by length and defect.
    Census {
        #[arg(long, value_enum, default_value = "brute")]
        method: CensusMethod,
        /// Smallest length (motif method only).
        #[arg(long, default_value_t = 2)]
        lmin: usize,
    },
    /// The quadratic that counts classes of a defect for long lengths.
    Polyfit {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Runs a verification suite; exits 1 on any violation.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Converts a census CSV file to another format.
    Export {
        input: PathBuf,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Config {
    cache_dir: Option<PathBuf>,
    format: Option<OutFormat>,
    lmax: Option<usize>,
    dmax: Option<i64>,
    radius: Option<usize>,
}

impl Config {
    fn from_cli(cli: &Cli) -> Result<Config> {
        if cli.threads == Some(0) {
            bail!("--threads must be positive");
        }
        if cli.lmax == Some(0) {
            bail!("--lmax must be positive");
        }
        if cli.radius == Some(0) {
            bail!("--radius must be positive");
        }
        if let Some(d) = cli.dmax {
            if d < -1 {
                bail!("--dmax must be at least -1");
            }
        }
        if let Some(n) = cli.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("thread pool")?;
        }
        if let Some(dir) = &cli.cache_dir {
            std::fs::create_dir_all(dir).with_context(|| format!("cache dir {}", dir.display()))?;
        }
        Ok(Config {
            cache_dir: cli.cache_dir.clone(),
            format: cli.format,
            lmax: cli.lmax,
            dmax: cli.dmax,
            radius: cli.radius,
        })
    }

    fn json(&self) -> bool {
        self.format == Some(OutFormat::Json)
    }
}

/// Command output plus whether it represents a failed check.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, ok: true }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn reflection(word: &str) -> Result<ReflectionWord> {
    let w = parse_word(word)?;
    if !w.in_g() {
        return Err(ppants::Error::OddLength(w.to_reflection_word().ell()).into());
    }
    Ok(w.to_reflection_word())
}

fn class_of(word: &str) -> Result<CurveClass> {
    Ok(canonical_class(&reflection(word)?)?)
}

fn find_run(class: &CurveClass, spec: &str) -> Result<Run> {
    let (ty, rest) = spec.split_once('@').ok_or_else(|| anyhow!("run must look like xy@3, got {spec:?}"))?;
    let run_type: RunType = ty.parse().map_err(|e| anyhow!("{e}"))?;
    let start_text = rest.split('+').next().unwrap_or(rest);
    let start: usize = start_text.parse().with_context(|| format!("run start {start_text:?}"))?;
    runs(class)
        .into_iter()
        .find(|r| r.run_type == run_type && r.start == start)
        .ok_or_else(|| ppants::Error::NotARun(spec.to_string()).into())
}

fn class_or_null(w: &ReflectionWord) -> Value {
    canonical_class(w).map(|c| json!(c.to_string())).unwrap_or(Value::Null)
}

fn motif_row(m: &MotifRecord) -> Value {
    json!({
        "word": m.cls.to_string(),
        "L": m.length_l,
        "intersection": m.intersection,
        "delta": m.defect,
        "rank": m.rank,
        "distinguished": m.distinguished.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    })
}

fn table_text(headers: &[&str], rows: &[Vec<String>], format: Option<OutFormat>) -> String {
    let mut out = String::new();
    match format {
        Some(OutFormat::Markdown) => {
            let _ = writeln!(out, "| {} |", headers.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(headers.len()));
            for r in rows {
                let _ = writeln!(out, "| {} |", r.join(" | "));
            }
        }
        Some(OutFormat::Csv) => {
            let _ = writeln!(out, "{}", headers.join(","));
            for r in rows {
                let _ = writeln!(out, "{}", r.join(","));
            }
        }
        _ => {
            for r in rows {
                let _ = writeln!(out, "{}", r.join(" "));
            }
        }
    }
    out
}

fn run(cli: &Cli, cfg: &Config) -> Result<Output> {
    match &cli.command {
        Command::Intersect { word, oracle } => {
            let w = reflection(word)?;
            let i = self_intersection(&w)?;
            let report = if *oracle {
                let g = w.to_group_word()?;
                let r = intersection_via_cosets(&g, cfg.radius.unwrap_or_else(|| default_radius(&g)))?;
                if r.intersection != i {
                    bail!("oracle gives {} but the word count gives {i}", r.intersection);
                }
                Some(r)
            } else {
                None
            };
            if cfg.json() {
                Ok(Output::ok(pretty(&json!({ "word": w.to_string(), "intersection": i, "oracle": report }))))
            } else {
                Ok(Output::ok(format!("{i}\n")))
            }
        }
        Command::Defect { word } => {
            let d = defect_and_delta(&reflection(word)?)?;
            if cfg.json() {
                Ok(Output::ok(pretty(&json!(d))))
            } else {
                Ok(Output::ok(format!(
                    "I={} L={} delta={} Delta={}\n",
                    d.intersection, d.length, d.delta, d.big_delta
                )))
            }
        }
        Command::Runs { word } => {
            let class = class_of(word)?;
            let dist = distinguished_runs(&class);
            let all = runs(&class);
            if cfg.json() {
                let rows: Vec<Value> = all
                    .iter()
                    .map(|r| json!({ "run": r.to_string(), "type": r.run_type.to_string(), "start": r.start, "length": r.length, "distinguished": dist.contains(r) }))
                    .collect();
                return Ok(Output::ok(pretty(&json!({ "class": class.to_string(), "rank": rank(&class), "runs": rows }))));
            }
            let mut out = format!("{class} rank={}\n", rank(&class));
            for r in &all {
                let mark = if dist.contains(r) { " distinguished" } else { "" };
                let _ = writeln!(out, "{r}{mark}");
            }
            Ok(Output::ok(out))
        }
        Command::Expand { word, run } | Command::Contract { word, run } => {
            let class = class_of(word)?;
            let r = find_run(&class, run)?;
            let result = if matches!(cli.command, Command::Expand { .. }) {
                expand(&class, &r)?
            } else {
                contract(&class, &r)?
            };
            if cfg.json() {
                Ok(Output::ok(pretty(&json!({
                    "class": class.to_string(),
                    "run": r.to_string(),
                    "word": result.to_string(),
                    "result_class": class_or_null(&result),
                    "intersection": self_intersection(&result).ok(),
                }))))
            } else {
                Ok(Output::ok(format!("{result}\n")))
            }
        }
        Command::Motif { word } => {
            let class = class_of(word)?;
            let m = motif_of(&class);
            if cfg.json() {
                Ok(Output::ok(pretty(&json!({ "class": class.to_string(), "motif": motif_row(&m) }))))
            } else {
                Ok(Output::ok(format!(
                    "{} L={} I={} delta={} rank={}\n",
                    m.cls, m.length_l, m.intersection, m.defect, m.rank
                )))
            }
        }
        Command::Motifs { delta, orbits } => {
            let motifs = motifs_cached(cfg.cache_dir.as_deref(), *delta)?;
            if *orbits {
                let classes: Vec<CurveClass> = motifs.iter().map(|m| m.cls.clone()).collect();
                let mut rows: Vec<(usize, usize, usize, String)> = aut_orbit_partition(&classes)
                    .iter()
                    .map(|o| {
                        let m = MotifRecord::of_class(o.representative.clone());
                        (m.rank, m.length_l, o.size(), o.representative.to_string())
                    })
                    .collect();
                rows.sort();
                if cfg.json() {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|(r, l, c, w)| json!({ "rank": r, "L": l, "size": c, "representative": w }))
                        .collect();
                    return Ok(Output::ok(pretty(&json!(v))));
                }
                let rows: Vec<Vec<String>> = rows
                    .into_iter()
                    .map(|(r, l, c, w)| vec![r.to_string(), l.to_string(), c.to_string(), w])
                    .collect();
                return Ok(Output::ok(table_text(&["rank", "L", "size", "representative"], &rows, cfg.format)));
            }
            if cfg.json() {
                return Ok(Output::ok(pretty(&json!(motifs.iter().map(motif_row).collect::<Vec<_>>()))));
            }
            let rows: Vec<Vec<String>> = motifs
                .iter()
                .map(|m| vec![m.cls.to_string(), m.length_l.to_string(), m.intersection.to_string(), m.defect.to_string(), m.rank.to_string()])
                .collect();
            Ok(Output::ok(table_text(&["word", "L", "I", "delta", "rank"], &rows, cfg.format)))
        }
        Command::Census { method, lmin } => {
            let table = match method {
                CensusMethod::Brute => brute_table_cached(cfg.lmax.unwrap_or(10), cfg.dmax.unwrap_or(11), cfg.cache_dir.as_deref())?,
                CensusMethod::Motif => motif_table_cached(cfg.dmax.unwrap_or(5), *lmin, cfg.lmax.unwrap_or(17), cfg.cache_dir.as_deref())?,
            };
            Ok(Output::ok(census::export(&table, cfg.format.unwrap_or(OutFormat::Csv).into())?))
        }
        Command::Polyfit { delta } => {
            let motifs = motifs_cached(cfg.cache_dir.as_deref(), *delta)?;
            let p = poly_from_motifs(*delta, &motifs)?;
            if cfg.json() {
                Ok(Output::ok(pretty(&json!(p))))
            } else {
                Ok(Output::ok(format!("{p}\n")))
            }
        }
        Command::Verify { suite } => verify(*suite, cfg),
        Command::Export { input, out } => {
            let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            let table = CensusTable::from_csv(&text)?;
            let rendered = census::export(&table, cfg.format.unwrap_or(OutFormat::Markdown).into())?;
            match out {
                Some(path) => {
                    std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Output::ok(format!("{}\n", path.display())))
                }
                None => Ok(Output::ok(rendered)),
            }
        }
    }
}

struct SuiteResult {
    name: &'static str,
    checked: usize,
    violations: Vec<String>,
}

fn classes_up_to(lmax: usize) -> Vec<CurveClass> {
    (2..=lmax).flat_map(enumerate_classes).collect()
}

fn run_suite(suite: Suite, cfg: &Config) -> Result<SuiteResult> {
    Ok(match suite {
        Suite::Surgery => {
            let sample = classes_up_to(cfg.lmax.unwrap_or(7));
            let report = verify_surgery(&sample);
            SuiteResult {
                name: "surgery",
                checked: report.classes,
                violations: report.violations.iter().map(|v| format!("{v:?}")).collect(),
            }
        }
        Suite::Oracle => {
            let sample = classes_up_to(cfg.lmax.unwrap_or(6));
            let violations = sample
                .par_iter()
                .filter_map(|c| {
                    let g = c.group_word();
                    let radius = cfg.radius.unwrap_or_else(|| default_radius(&g));
                    match intersection_via_cosets(&g, radius) {
                        Ok(r) if r.intersection == class_intersection(c) => None,
                        Ok(r) => Some(format!("{c}: oracle {} vs {}", r.intersection, class_intersection(c))),
                        Err(e) => Some(format!("{c}: {e}")),
                    }
                })
                .collect();
            SuiteResult {
                name: "oracle",
                checked: sample.len(),
                violations,
            }
        }
        Suite::Motif => {
            let report = verify_motif_bounds(cfg.dmax.unwrap_or(3));
            let mut violations: Vec<String> = report.violations.iter().map(|v| format!("{v:?}")).collect();
            let lmax = cfg.lmax.unwrap_or(7);
            violations.extend(
                partition_mismatches(lmax)
                    .into_iter()
                    .map(|(d, l, b, f)| format!("N_{d}({l}): brute {b}, motifs {f}")),
            );
            SuiteResult {
                name: "motif",
                checked: report.rank_bound_checked + report.short_motifs + report.thin_motifs_6_to_9,
                violations,
            }
        }
        Suite::Form => {
            let form = form_report();
            let mut violations = Vec::new();
            if form.signature != (6, 3, 0) {
                violations.push(format!("signature {:?}", form.signature));
            }
            if !form.kernel_positive_definite() {
                violations.push(format!("kernel min eigenvalue {}", form.kernel_min_eigenvalue));
            }
            let thin: Vec<CurveClass> = classes_up_to(cfg.lmax.unwrap_or(8)).into_iter().filter(is_abc_thin).collect();
            violations.extend(thin.par_iter().filter_map(|c| match quad_bound_report(&c.group_word()) {
                Ok(q) if q.holds() => None,
                Ok(q) => Some(format!("{c}: I={} Q/2={} L^2/6={}", q.intersection, q.half_q, q.length_bound)),
                Err(e) => Some(format!("{c}: {e}")),
            }).collect::<Vec<_>>());
            SuiteResult {
                name: "form",
                checked: thin.len(),
                violations,
            }
        }
        Suite::Defect => {
            let sample = classes_up_to(cfg.lmax.unwrap_or(8));
            let violations = sample
                .par_iter()
                .filter_map(|c| {
                    let d = class_intersection(c) as i64 - c.length_l() as i64;
                    (d < -1).then(|| format!("{c}: delta {d}"))
                })
                .collect();
            SuiteResult {
                name: "defect",
                checked: sample.len(),
                violations,
            }
        }
        Suite::Census => {
            let (lmax, dmax) = (cfg.lmax.unwrap_or(10), cfg.dmax.unwrap_or(5));
            let brute = brute_table_cached(lmax, dmax, cfg.cache_dir.as_deref())?;
            let motif = motif_table_cached(dmax, 2, lmax, cfg.cache_dir.as_deref())?;
            let mut violations = Vec::new();
            for (&(d, l), &b) in &brute.entries {
                let m = motif.get(d, l);
                if m != Some(b) {
                    violations.push(format!("N_{d}({l}): brute {b}, motifs {m:?}"));
                }
            }
            SuiteResult {
                name: "census",
                checked: brute.entries.len(),
                violations,
            }
        }
        Suite::All => unreachable!("expanded by the caller"),
    })
}

fn verify(suite: Suite, cfg: &Config) -> Result<Output> {
    let suites = if suite == Suite::All {
        vec![Suite::Defect, Suite::Surgery, Suite::Motif, Suite::Form, Suite::Oracle, Suite::Census]
    } else {
        vec![suite]
    };
    let mut results = Vec::new();
    for s in suites {
        results.push(run_suite(s, cfg)?);
    }
    let ok = results.iter().all(|r| r.violations.is_empty());
    let text = if cfg.json() {
        let v: Vec<Value> = results
            .iter()
            .map(|r| json!({ "suite": r.name, "checked": r.checked, "violations": r.violations }))
            .collect();
        pretty(&json!({ "ok": ok, "suites": v }))
    } else {
        let mut out = String::new();
        for r in &results {
            let status = if r.violations.is_empty() { "ok" } else { "FAILED" };
            let _ = writeln!(out, "{}: {status} ({} checked, {} violations)", r.name, r.checked, r.violations.len());
            for v in r.violations.iter().take(20) {
                let _ = writeln!(out, "  {v}");
            }
        }
        out
    };
    Ok(Output { text, ok })
}

fn error_kind(e: &anyhow::Error) -> String {
    match e.downcast_ref::<ppants::Error>() {
        Some(inner) => {
            let dbg = format!("{inner:?}");
            dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        }
        None => "Error".to_string(),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail("Usage", e.to_string().trim());
        }
    };
    let result = Config::from_cli(&cli).and_then(|cfg| run(&cli, &cfg));
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&error_kind(&e), &format!("{e:#}")),
    }
}
