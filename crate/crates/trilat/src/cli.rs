//! Command-line front end. Exit codes: 0 success, 1 I/O, 2 invalid input,
//! 3 internal invariant breach (with a JSON breach record on stdout).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use trilat_core::record::invariant_record;
use trilat_core::surface::{enumerate, Orientation, Triangulation};
use trilat_core::thurston::lift_table;

use crate::audit::{compare, Verdict};
use crate::corpus::{self, code_hex};
use crate::format::{self, FormatError};
use crate::json;
use crate::verify::{self, check_lift_table, Level, Outcome, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BREACH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "trilat", version, about = "Lattice invariants of sphere triangulations with vertex degrees at most 6")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrientationArg {
    Preserving,
    Unoriented,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Preserving => Orientation::Preserving,
            OrientationArg::Unoriented => Orientation::Unoriented,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a triangulation file and check topology and curvature.
    Validate { path: PathBuf },
    /// Print the invariant record of a triangulation as canonical JSON.
    Invariants { path: PathBuf },
    /// Compare two triangulations.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List all triangulations with at most `t_max` triangles.
    Enumerate {
        #[arg(long)]
        t_max: usize,
        #[arg(long, value_enum, default_value = "preserving")]
        orientation: OrientationArg,
        /// Also write each triangulation as a `tri v1` file into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite on a file or on the enumerated corpus.
    Verify {
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        corpus: Option<usize>,
        /// Include the eigenchain checks.
        #[arg(long)]
        deep: bool,
        #[arg(long)]
        json: bool,
        /// Test mode: multiply the lift phase of this dart by w before
        /// checking the lift table.
        #[arg(long, hide = true, requires = "path")]
        inject_corrupt_lift: Option<usize>,
    },
}

/// Runs `cli`, printing to stdout and stderr, and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Invariants { path } => cmd_invariants(&path),
        Command::Compare { a, b, json } => cmd_compare(&a, &b, json),
        Command::Enumerate { t_max, orientation, out } => cmd_enumerate(t_max, orientation.into(), out.as_deref()),
        Command::Verify { path, corpus, deep, json, inject_corrupt_lift } => {
            let level = if deep { Level::Deep } else { Level::Basic };
            match (path, corpus) {
                (Some(p), _) => cmd_verify_file(&p, level, json, inject_corrupt_lift),
                (None, Some(n)) => cmd_verify_corpus(n, level, json),
                (None, None) => {
                    eprintln!("error: give a file or --corpus N");
                    EXIT_INVALID
                }
            }
        }
    }
}

/// A file read and parsed, or the exit code with the message printed.
fn load(path: &Path) -> Result<Triangulation, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_IO
    })?;
    format::parse(&text).map_err(|e| {
        let kind = match &e {
            FormatError::Syntax { .. } => "parse error",
            _ if e.is_curvature() => "curvature error",
            _ => "topology error",
        };
        eprintln!("{}: {kind}: {e}", path.display());
        EXIT_INVALID
    })
}

fn print_breach(value: &serde_json::Value) -> i32 {
    print!("{}", json::to_canonical(value));
    EXIT_BREACH
}

fn stage_breach(code: &[u8], err: impl std::fmt::Display) -> i32 {
    print_breach(&serde_json::json!({
        "schema": "trilat-breach/1",
        "code": code_hex(code),
        "breaches": [{ "check": "pipeline", "status": "breach", "detail": err.to_string() }],
    }))
}

pub fn cmd_validate(path: &Path) -> i32 {
    match load(path) {
        Ok(tri) => {
            let mut deg = tri.degrees();
            deg.sort_unstable();
            println!(
                "ok: t={} vertices={} edges={} degrees={:?}",
                tri.num_faces(),
                tri.num_vertices(),
                tri.num_edges(),
                deg
            );
            EXIT_OK
        }
        Err(code) => code,
    }
}

pub fn cmd_invariants(path: &Path) -> i32 {
    let tri = match load(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match invariant_record(&tri) {
        Ok(r) => {
            print!("{}", json::to_canonical(&json::record(&r)));
            EXIT_OK
        }
        Err(e) => stage_breach(&tri.canonical_code(Orientation::Preserving), e),
    }
}

pub fn cmd_compare(a: &Path, b: &Path, as_json: bool) -> i32 {
    let (ta, tb) = match (load(a), load(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(c), _) | (_, Err(c)) => return c,
    };
    let v = match compare(&ta, &tb) {
        Ok(v) => v,
        Err(e) => return stage_breach(&ta.canonical_code(Orientation::Preserving), e),
    };
    let fields: Vec<&str> = match &v {
        Verdict::Distinguished(f) => f.clone(),
        _ => Vec::new(),
    };
    if as_json {
        print!("{}", json::to_canonical(&serde_json::json!({ "verdict": v.label(), "differing_fields": fields })));
    } else if fields.is_empty() {
        println!("{}", v.label());
    } else {
        println!("{} ({})", v.label(), fields.join(", "));
    }
    EXIT_OK
}

pub fn cmd_enumerate(t_max: usize, orient: Orientation, out: Option<&Path>) -> i32 {
    let mut tris = enumerate(t_max, orient);
    tris.sort_by_cached_key(|t| (t.num_faces(), t.canonical_code(orient)));
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_IO;
        }
    }
    for (i, tri) in tris.iter().enumerate() {
        let code = code_hex(&tri.canonical_code(orient));
        println!("{i}\tt={}\t{:?}\t{code}", tri.num_faces(), tri.degree_type().parts);
        if let Some(dir) = out {
            let path = dir.join(format!("t{:02}_{i:04}.tri", tri.num_faces()));
            if let Err(e) = std::fs::write(&path, format::write(tri)) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_IO;
            }
        }
    }
    eprintln!("{} triangulations with t <= {t_max}", tris.len());
    EXIT_OK
}

fn print_report_text(r: &Report) {
    for c in &r.checks {
        match &c.outcome {
            Outcome::Pass => println!("pass   {}", c.name),
            Outcome::Breach(d) => println!("BREACH {}: {d}", c.name),
            Outcome::Limit(d) => println!("limit  {}: {d}", c.name),
        }
    }
}

pub fn cmd_verify_file(path: &Path, level: Level, as_json: bool, corrupt: Option<usize>) -> i32 {
    let tri = match load(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let report = match corrupt {
        Some(x) => {
            if x >= tri.num_darts() {
                eprintln!("error: dart {x} out of range");
                return EXIT_INVALID;
            }
            let mut lt = lift_table(&tri);
            lt.phase[x] = &lt.phase[x] * &trilat_core::eisenstein::EisInt::omega();
            Report {
                code: tri.canonical_code(Orientation::Preserving),
                t: tri.num_faces(),
                checks: vec![check_lift_table(&tri, &lt)],
            }
        }
        None => verify::verify(&tri, level),
    };
    if !report.ok() {
        return print_breach(&verify::breach_record(&report));
    }
    if as_json {
        print!("{}", json::to_canonical(&verify::report_json(&report)));
    } else {
        print_report_text(&report);
    }
    EXIT_OK
}

pub fn cmd_verify_corpus(t_max: usize, level: Level, as_json: bool) -> i32 {
    let tris = corpus::enumerated(t_max);
    let reports = corpus::run(&tris, |t| verify::verify(t, level));
    let checks: usize = reports.iter().map(|(_, r)| r.checks.len()).sum();
    let limits: usize = reports.iter().map(|(_, r)| r.limits().count()).sum();
    let broken: Vec<&Report> = reports.iter().map(|(_, r)| r).filter(|r| !r.ok()).collect();
    if !broken.is_empty() {
        let records: Vec<serde_json::Value> = broken.iter().map(|r| verify::breach_record(r)).collect();
        print!("{}", json::to_canonical(&serde_json::Value::Array(records)));
        eprintln!("{} of {} triangulations breach an invariant", broken.len(), reports.len());
        return EXIT_BREACH;
    }
    if as_json {
        let all: Vec<serde_json::Value> = reports.iter().map(|(_, r)| verify::report_json(r)).collect();
        print!("{}", json::to_canonical(&serde_json::Value::Array(all)));
    } else {
        for (code, r) in &reports {
            for c in r.limits() {
                if let Outcome::Limit(d) = &c.outcome {
                    println!("limit  t={} {} {}: {d}", r.t, code_hex(code), c.name);
                }
            }
        }
        println!(
            "verified {} triangulations with t <= {t_max}: {checks} checks, {limits} of them limits, 0 breaches",
            reports.len()
        );
    }
    EXIT_OK
}
