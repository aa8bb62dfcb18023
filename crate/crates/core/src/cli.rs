//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or data error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dominance::{skyline_with, SkylineAlgorithm, SkylineResult};
use crate::error::Error;
use crate::galois::agree_sets;
use crate::lattice::{build_agree_lattice, build_skyline_lattice, export_dot, Concept, ConceptLattice};
use crate::model::{load_csv, CriterionSet, Relation};
use crate::partition::format_blocks;
use crate::skycube::{build_skycube, materialize_partial, stats, verify_equivalence, PartialSkycube};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SKYLATTICE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "skylattice", version, about = "Skylines, Skycubes and their partial materialization")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// CSV file with a header row.
    input: PathBuf,
    /// Criterion columns, in declaration order.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<String>,
    /// Criterion columns to maximize instead of minimize.
    #[arg(long, value_delimiter = ',')]
    maximize: Vec<String>,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Agree,
    Skyline,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Skyline of the relation on a criterion subset.
    Skyline {
        #[command(flatten)]
        input: Input,
        /// Criterion subset (defaults to every criterion).
        #[arg(long)]
        on: Option<String>,
        /// Presort by a monotone key before filtering.
        #[arg(long)]
        presort: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Every non-empty cuboid.
    Skycube {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Build the partial Skycube store (JSON).
    Materialize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Answer a cuboid query from a materialized store.
    Query {
        /// Store written by `materialize`.
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        on: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Agree-concept or skyline-concept lattice.
    Lattice {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Kind::Skyline)]
        kind: Kind,
        #[command(flatten)]
        output: Output,
    },
    /// Agree sets of every tuple pair.
    AgreeSets {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Check every reconstructed cuboid against the full Skycube.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Storage and comparison counts, partial versus full.
    Stats {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Configures the global worker pool from [`THREADS_ENV`], if set.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Results go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(Rendered { text, out, code }) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &text).map_err(|e| {
                    usage(format!("cannot write {}: {e}", path.display()))
                }),
                None => stdout.write_all(text.as_bytes()).map_err(|e| usage(e.to_string())),
            };
            match written {
                Ok(()) => code,
                Err(f) => {
                    let _ = writeln!(stderr, "error: {}", f.message);
                    f.code
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

struct Rendered {
    text: String,
    out: Option<PathBuf>,
    code: i32,
}

impl Rendered {
    fn ok(text: String, output: Output) -> Result<Rendered, Failure> {
        Ok(Rendered {
            text,
            out: output.out,
            code: EXIT_OK,
        })
    }
}

fn load(input: &Input, allow_no_criteria: bool) -> Result<Relation, Failure> {
    if input.criteria.is_empty() && !allow_no_criteria {
        return Err(usage("--criteria must name at least one column"));
    }
    for m in &input.maximize {
        if !input.criteria.contains(m) {
            return Err(usage(format!("--maximize column `{m}` is not in --criteria")));
        }
    }
    Ok(load_csv(&input.input, &input.criteria, &input.maximize)?)
}

fn subset(r: &Relation, on: Option<&str>) -> Result<CriterionSet, Failure> {
    match on {
        None => Ok(r.all_criteria()),
        Some(text) => Ok(r.parse_set(text)?),
    }
}

fn reject_dot(format: Format) -> Result<(), Failure> {
    if format == Format::Dot {
        Err(usage("--format dot is only available for `lattice`"))
    } else {
        Ok(())
    }
}

fn rows_line(res: &SkylineResult) -> String {
    let ids: Vec<String> = res.rows.iter().map(|id| id.to_string()).collect();
    format!("{}\n", ids.join(" "))
}

fn render_skyline(res: &SkylineResult, r: &Relation, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", res.to_json(r)),
        _ => rows_line(res),
    }
}

fn render_lattice<C: Concept>(l: &ConceptLattice<C>, r: &Relation, format: Format, name: &str) -> String {
    match format {
        Format::Dot => export_dot(l, r, name),
        Format::Json => format!("{}\n", l.to_json(r)),
        Format::Table => {
            let wide = r.len() >= 10;
            let mut s = String::new();
            for c in l.concepts() {
                let int = if c.intension().is_empty() {
                    "∅".to_string()
                } else {
                    r.format_set(c.intension())
                };
                s.push_str(&format!("({int}, {})\n", format_blocks(c.blocks(), wide)));
            }
            s
        }
    }
}

fn read_store(path: &Path) -> Result<PartialSkycube, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        usage(format!(
            "cannot read store {} ({e}); run `materialize` first",
            path.display()
        ))
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    Ok(PartialSkycube::from_json(&value)?)
}

fn execute(command: Command) -> Result<Rendered, Failure> {
    match command {
        Command::Skyline {
            input,
            on,
            presort,
            output,
        } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let c = subset(&r, on.as_deref())?;
            let algorithm = if presort {
                SkylineAlgorithm::SortFilter
            } else {
                SkylineAlgorithm::Pairwise
            };
            let res = skyline_with(&r, c, algorithm);
            Rendered::ok(render_skyline(&res, &r, output.format), output)
        }
        Command::Skycube { input, output } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let cube = build_skycube(&r)?;
            let text = match output.format {
                Format::Json => format!("{}\n", cube.to_json(&r)),
                _ => cube
                    .cuboids()
                    .into_iter()
                    .map(|s| format!("{}: {}", r.format_set(s.criteria), rows_line(s)))
                    .collect(),
            };
            Rendered::ok(text, output)
        }
        Command::Materialize { input, output } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let p = materialize_partial(&r);
            let text = match output.format {
                Format::Json => format!("{}\n", p.to_json()),
                _ if output.out.is_some() => format!("{}\n", p.to_json()),
                _ => render_lattice(p.lattice(), &r, Format::Table, "skyline"),
            };
            Rendered::ok(text, output)
        }
        Command::Query { store, on, output } => {
            reject_dot(output.format)?;
            let p = read_store(&store)?;
            let r = p.relation();
            let c = subset(r, on.as_deref())?;
            let res = p.reconstruct_cuboid(c)?;
            Rendered::ok(render_skyline(&res, r, output.format), output)
        }
        Command::Lattice {
            input,
            kind,
            output,
        } => {
            let r = load(&input, kind == Kind::Agree)?;
            let text = match kind {
                Kind::Agree => render_lattice(&build_agree_lattice(&r), &r, output.format, "agree"),
                Kind::Skyline => {
                    render_lattice(&build_skyline_lattice(&r), &r, output.format, "skyline")
                }
            };
            Rendered::ok(text, output)
        }
        Command::AgreeSets { input, output } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let family = agree_sets(&r);
            let text = match output.format {
                Format::Json => format!("{}\n", family.to_json(&r)),
                _ => family
                    .to_json(&r)
                    .as_array()
                    .expect("array")
                    .iter()
                    .map(|v| {
                        let s = v.as_str().unwrap_or_default();
                        format!("{}\n", if s.is_empty() { "∅" } else { s })
                    })
                    .collect(),
            };
            Rendered::ok(text, output)
        }
        Command::Verify { input, output } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let report = verify_equivalence(&materialize_partial(&r), &build_skycube(&r)?)?;
            let show = |rows: &[crate::model::RowId]| {
                rows.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
            };
            let text = match output.format {
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "checked": report.checked,
                        "equal": report.checked - report.mismatches.len(),
                        "mismatches": report.mismatches.iter().map(|m| json!({
                            "criteria": r.format_set(m.criteria),
                            "expected": m.expected.iter().map(|id| id.0).collect::<Vec<_>>(),
                            "actual": m.actual.iter().map(|id| id.0).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                    })
                ),
                _ => {
                    let mut s = format!("{report}\n");
                    for m in &report.mismatches {
                        s.push_str(&format!(
                            "{}: expected [{}] got [{}]\n",
                            r.format_set(m.criteria),
                            show(&m.expected),
                            show(&m.actual)
                        ));
                    }
                    s
                }
            };
            Ok(Rendered {
                text,
                out: output.out,
                code: if report.is_ok() { EXIT_OK } else { EXIT_VERIFY_FAILED },
            })
        }
        Command::Stats { input, output } => {
            reject_dot(output.format)?;
            let r = load(&input, false)?;
            let report = stats(&materialize_partial(&r), &build_skycube(&r)?)?;
            let text = match output.format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_value(&report).map_err(Error::from)?
                ),
                _ => format!("{report}\n"),
            };
            Rendered::ok(text, output)
        }
    }
}
