use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tempfile::NamedTempFile;

use debilandia::embedding::compile_direct;
use debilandia::engine::run_traced;
use debilandia::grid::{recognize, state_hash};
use debilandia::instance::{build_list, enumerate_tuples, InstanceFile, Verdict};
use debilandia::solver::{construct_certificate, growth_csv, growth_probe, SolveOutcome, SolverConfig, DEFAULT_CAP};
use debilandia::tile::{atlas_default, Point, TileAtlas};
use debilandia::tm::TmSpec;
use debilandia::verifier::verify_traced;
use debilandia::Instance;

const ATLAS_ENV: &str = "DEBILANDIA_ATLAS";

#[derive(Parser)]
#[command(
    name = "debilandia",
    version,
    about = "Debilandia tile automaton, certificate verifier and solver"
)]
struct Cli {
    /// Tile atlas JSON. Falls back to $DEBILANDIA_ATLAS, then the built-in atlas.
    #[arg(long, global = true)]
    atlas: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize a point set and run the engine.
    Simulate {
        /// JSON list of [x, y] pairs, or {"points": [...]}.
        #[arg(long, required_unless_present = "machine", conflicts_with = "machine")]
        points: Option<PathBuf>,
        /// Turing machine JSON, compiled in place of a point set.
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        max_gens: usize,
        /// One JSON object per generation.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Final state as JSON.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Check a certificate. Exit 0 accept, 1 reject.
    Verify {
        /// {"A": [...], "L": [...]}
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write an instance file with the canonical tuple skeleton.
    Encode {
        #[arg(long)]
        set_a: String,
        #[arg(long, value_enum, default_value_t = TupleMode::Auto)]
        tuples: TupleMode,
        #[arg(long)]
        e: usize,
        /// 25 (stops) or 43 (does not stop).
        #[arg(long)]
        marker: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a certificate for a set. Exit 1 when none exists.
    Solve {
        #[arg(long)]
        set_a: String,
        #[arg(long, default_value_t = 1000)]
        max_gens: usize,
        #[arg(long)]
        out: PathBuf,
        /// Largest |A| attempted.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Measure solver work on random sets of the given sizes.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0xDEB1)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_gens: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TupleMode {
    /// All of A×A in canonical order.
    Auto,
}

/// Outcome of a subcommand that ran to completion.
enum Done {
    Success,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Done::Success) => ExitCode::SUCCESS,
        Ok(Done::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<Done> {
    let atlas = load_atlas(cli.atlas.as_deref())?;
    match cli.command {
        Command::Simulate {
            points,
            machine,
            max_gens,
            trace,
            snapshot,
        } => simulate(&atlas, points, machine, max_gens, trace, snapshot),
        Command::Verify {
            instance,
            report,
            trace,
        } => verify(&atlas, &instance, report, trace),
        Command::Encode {
            set_a,
            tuples: TupleMode::Auto,
            e,
            marker,
            out,
        } => encode(&set_a, e, marker, &out),
        Command::Solve {
            set_a,
            max_gens,
            out,
            cap,
        } => solve(&atlas, &set_a, max_gens, &out, cap),
        Command::Bench {
            sizes,
            trials,
            seed,
            csv,
            max_gens,
            cap,
        } => bench(&atlas, &sizes, trials, seed, &csv, max_gens, cap),
    }
}

fn load_atlas(flag: Option<&Path>) -> Result<TileAtlas> {
    let env = std::env::var_os(ATLAS_ENV).map(PathBuf::from);
    match flag.map(Path::to_path_buf).or(env) {
        Some(path) => TileAtlas::load(&path).with_context(|| format!("atlas {}", path.display())),
        None => Ok(atlas_default()),
    }
}

/// Writes through a sibling temp file so readers never see a partial file.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<[i64; 2]>),
    Wrapped { points: Vec<[i64; 2]> },
}

fn load_points(path: &Path) -> Result<Vec<Point>> {
    let text = fs::read_to_string(path).with_context(|| format!("points {}", path.display()))?;
    let file: PointsFile = serde_json::from_str(&text).with_context(|| format!("points {}", path.display()))?;
    let pairs = match file {
        PointsFile::Bare(p) | PointsFile::Wrapped { points: p } => p,
    };
    Ok(pairs.into_iter().map(|[x, y]| Point::new(x, y)).collect())
}

fn simulate(
    atlas: &TileAtlas,
    points: Option<PathBuf>,
    machine: Option<PathBuf>,
    max_gens: usize,
    trace: Option<PathBuf>,
    snapshot: Option<PathBuf>,
) -> Result<Done> {
    let state = match (points, machine) {
        (Some(p), _) => recognize(&load_points(&p)?, atlas),
        (None, Some(m)) => {
            let spec = TmSpec::load(&m).with_context(|| format!("machine {}", m.display()))?;
            recognize(&compile_direct(&spec, atlas)?, atlas)
        }
        (None, None) => bail!("one of --points or --machine is required"),
    };

    let mut lines = Vec::new();
    let result = run_traced(&state, max_gens, |rec| {
        lines.push(serde_json::to_string(&rec).expect("serializable"));
    });
    if let Some(path) = trace {
        write_atomic(&path, |w| {
            for l in &lines {
                writeln!(w, "{l}")?;
            }
            Ok(())
        })?;
    }
    if let Some(path) = snapshot {
        let snap = result.final_state.to_snapshot();
        write_text(&path, &(serde_json::to_string_pretty(&snap)? + "\n"))?;
    }
    let summary = serde_json::json!({
        "status": result.status,
        "stopped": result.status.stopped(),
        "generations_run": result.generations_run,
        "initial_tiles": state.len(),
        "junk_cells": state.junk_cells(),
        "final_hash": format!("{:016x}", state_hash(&result.final_state)),
    });
    println!("{summary}");
    Ok(Done::Success)
}

fn verify(atlas: &TileAtlas, instance: &Path, report: Option<PathBuf>, trace: Option<PathBuf>) -> Result<Done> {
    let (inst, list) = InstanceFile::load(instance).with_context(|| format!("{}", instance.display()))?;
    let mut lines = Vec::new();
    let rep = verify_traced(&inst, &list, atlas, |rec| {
        lines.push(serde_json::to_string(&rec).expect("serializable"));
    });
    if let Some(path) = trace {
        write_atomic(&path, |w| {
            for l in &lines {
                writeln!(w, "{l}")?;
            }
            Ok(())
        })?;
    }
    if let Some(path) = report {
        write_text(&path, &rep.to_json())?;
    }
    match &rep.reason {
        None => println!("accept total_counted={} bound={}", rep.total_counted, rep.bound),
        Some(r) => println!("reject {r} (step {})", rep.decision.step()),
    }
    Ok(if rep.accepted() { Done::Success } else { Done::Negative })
}

fn encode(set_a: &str, e: usize, marker: u64, out: &Path) -> Result<Done> {
    let inst: Instance = set_a.parse().map_err(|m| anyhow::anyhow!("--set-a: {m}"))?;
    let Some(verdict) = Verdict::from_marker(marker) else {
        bail!("--marker must be 25 or 43, got {marker}");
    };
    let list = build_list(&enumerate_tuples(&inst), e, verdict);
    write_text(out, &InstanceFile::new(&inst, &list).to_json())?;
    Ok(Done::Success)
}

fn solve(atlas: &TileAtlas, set_a: &str, max_gens: usize, out: &Path, cap: usize) -> Result<Done> {
    let inst: Instance = set_a.parse().map_err(|m| anyhow::anyhow!("--set-a: {m}"))?;
    let report = construct_certificate(&inst, max_gens, atlas, SolverConfig { cap })?;
    println!("{}", serde_json::to_string(&report)?);
    match &report.outcome {
        SolveOutcome::Found { list, .. } => {
            write_text(out, &InstanceFile::new(&inst, list).to_json())?;
            Ok(Done::Success)
        }
        SolveOutcome::NoneFound { why } => {
            eprintln!("no certificate: {why}");
            Ok(Done::Negative)
        }
    }
}

fn bench(
    atlas: &TileAtlas,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    csv: &Path,
    max_gens: usize,
    cap: usize,
) -> Result<Done> {
    let rows = growth_probe(sizes, trials, seed, max_gens, atlas, SolverConfig { cap })?;
    let text = growth_csv(&rows);
    write_text(csv, &text)?;
    print!("{text}");
    Ok(Done::Success)
}
