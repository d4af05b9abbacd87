//! `maxcover` — simulate, plan, verify, and render MaxCover sensor spreads.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid flags or input
//! content, 3 I/O failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use maxcover::analysis::{self, fmt_fixed, FinalEntry, RenderOptions};
use maxcover::engine::{self, SimulationConfig};
use maxcover::lattice::LatticeCoord;
use maxcover::planner;

const FINAL_HEADER: &str = "id,a,b,x,y,stable_round";
const PLAN_HEADER: &str = "id,a,b,x,y";
const DEPLOY_HEADER: &str = "id,start_x,start_y,x,y,distance";
const REPORT_HEADER: &str = "round,newly_stable,double_groups,unstable";

#[derive(Parser)]
#[command(name = "maxcover", version, about = "MaxCover mobile-sensor spreading toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Population {
    /// Number of sensor nodes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    nodes: u64,
    /// Sensing radius r; lattice spacing is √3·r.
    #[arg(long, default_value_t = 1.0, value_parser = parse_radius)]
    radius: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the spreading protocol and write the final configuration.
    Run {
        #[command(flatten)]
        population: Population,
        /// Final-configuration CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-round census CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-round per-node JSONL state log.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        /// Feed the raw residue id mod 6 (0 for multiples of 6) into the turn
        /// test and thresholds. Demonstrates the coverage defect that the
        /// effective-sextant rule repairs; `verify` fails on such output.
        #[arg(long = "literal-j0")]
        literal_j0: bool,
    },
    /// Compute final destinations without simulating motion.
    Plan {
        #[command(flatten)]
        population: Population,
        /// Use the O(1) closed-form destination oracle (default).
        #[arg(long, conflicts_with = "iterative")]
        closed_form: bool,
        /// Iterate the per-node transitions instead of the closed form.
        #[arg(long)]
        iterative: bool,
        /// Plan one-shot moves from random start positions.
        #[arg(long)]
        random_deploy: bool,
        /// Seed for generated start positions.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Side of the centered square the starts are drawn from.
        #[arg(long, default_value_t = 10.0, value_parser = parse_radius)]
        spread: f64,
        /// Read start positions (x,y per line) instead of generating them.
        #[arg(long, conflicts_with_all = ["seed", "spread"])]
        starts: Option<PathBuf>,
        /// Target CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a final-configuration CSV against the protocol's guarantees.
    Verify {
        /// Final-configuration CSV produced by `run`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0, value_parser = parse_radius)]
        radius: f64,
        /// Disk-coverage sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Draw the sensing disks of a final configuration as SVG.
    Render {
        /// Final-configuration CSV produced by `run`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0, value_parser = parse_radius)]
        radius: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare per-node walked path length against the straight-line optimum.
    Energy {
        #[command(flatten)]
        population: Population,
        /// Also print the termination-round bounds.
        #[arg(long)]
        verbose: bool,
    },
}

fn parse_radius(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("radius must be positive and finite, got {v}"))
    }
}

enum CliError {
    /// Bad flag combinations or malformed input content — exit 2.
    Usage(String),
    /// Filesystem failure — exit 3.
    Io(String),
}

impl CliError {
    fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Run {
            population,
            out,
            report,
            trajectories,
            literal_j0,
        } => cmd_run(population, out, report, trajectories, literal_j0),
        Command::Plan {
            population,
            closed_form: _,
            iterative,
            random_deploy,
            seed,
            spread,
            starts,
            out,
        } => cmd_plan(population, iterative, random_deploy, seed, spread, starts, out),
        Command::Verify {
            input,
            radius,
            samples,
            seed,
        } => cmd_verify(&input, radius, samples, seed),
        Command::Render { input, radius, out } => cmd_render(&input, radius, &out),
        Command::Energy { population, verbose } => cmd_energy(population, verbose),
    }
}

/// One JSONL trajectory row; the state of one node after one round.
#[derive(Serialize)]
struct TrajectoryRow {
    round: u64,
    id: u64,
    a: i64,
    b: i64,
    status: maxcover::Status,
    #[serde(rename = "type")]
    node_type: maxcover::NodeType,
    m_id: u64,
    heading: u8,
    x: String,
    y: String,
}

fn cmd_run(
    population: Population,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
    trajectories: Option<PathBuf>,
    literal_j0: bool,
) -> CliResult<ExitCode> {
    let Population { nodes, radius } = population;
    let config = SimulationConfig::new(nodes, radius)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_literal_j0(literal_j0)
        .with_trajectories(trajectories.is_some());
    let result = engine::run(&config);
    let rounds = result.stable_rounds();

    let mut csv = String::with_capacity(32 * nodes as usize);
    csv.push_str(FINAL_HEADER);
    csv.push('\n');
    for s in &result.final_states {
        let (x, y) = s.pos.to_cartesian(radius);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.id,
            s.pos.a,
            s.pos.b,
            fmt_fixed(x),
            fmt_fixed(y),
            rounds[s.id as usize]
        );
    }
    write_output(out.as_deref(), &csv)?;

    if let Some(path) = report {
        let mut csv = String::new();
        csv.push_str(REPORT_HEADER);
        csv.push('\n');
        for r in &result.reports {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                r.k,
                r.newly_stable.len(),
                r.double_group_positions.len(),
                r.unstable_remaining
            );
        }
        write_file(&path, &csv)?;
    }

    if let Some(path) = trajectories {
        let snapshots = result.trajectories.as_ref().expect("recording was enabled");
        let mut jsonl = String::new();
        for (round, snapshot) in snapshots.iter().enumerate() {
            for s in snapshot {
                let (x, y) = s.pos.to_cartesian(radius);
                let row = TrajectoryRow {
                    round: round as u64,
                    id: s.id,
                    a: s.pos.a,
                    b: s.pos.b,
                    status: s.status,
                    node_type: s.node_type,
                    m_id: s.m_id,
                    heading: s.heading.index(),
                    x: fmt_fixed(x),
                    y: fmt_fixed(y),
                };
                jsonl.push_str(&serde_json::to_string(&row).expect("row serialization"));
                jsonl.push('\n');
            }
        }
        write_file(&path, &jsonl)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_plan(
    population: Population,
    iterative: bool,
    random_deploy: bool,
    seed: u64,
    spread: f64,
    starts: Option<PathBuf>,
    out: Option<PathBuf>,
) -> CliResult<ExitCode> {
    let Population { nodes, radius } = population;

    if random_deploy || starts.is_some() {
        let start_points = match &starts {
            Some(path) => {
                let points = read_starts(path)?;
                if points.len() as u64 != nodes {
                    return Err(CliError::Usage(format!(
                        "--nodes {} does not match {} start positions in {}",
                        nodes,
                        points.len(),
                        path.display()
                    )));
                }
                points
            }
            None => planner::uniform_starts(nodes, spread, seed),
        };
        let plan = planner::random_deployment_plan(&start_points, radius)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let mut csv = String::new();
        csv.push_str(DEPLOY_HEADER);
        csv.push('\n');
        for t in &plan.targets {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                t.id,
                fmt_fixed(t.start.0),
                fmt_fixed(t.start.1),
                fmt_fixed(t.target.0),
                fmt_fixed(t.target.1),
                fmt_fixed(t.distance)
            );
        }
        let summary = format!(
            "total_distance={} broadcasts={} one_shot={}\n",
            fmt_fixed(plan.total_distance),
            plan.broadcast_count,
            plan.one_shot
        );
        match out.as_deref() {
            Some(path) => {
                write_file(path, &csv)?;
                print!("{summary}");
            }
            None => {
                print!("{csv}");
                eprint!("{summary}");
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let targets = if iterative {
        planner::plan_all_iterative(nodes)
    } else {
        planner::plan_all(nodes)
    };
    let mut csv = String::with_capacity(24 * nodes as usize);
    csv.push_str(PLAN_HEADER);
    csv.push('\n');
    for (id, c) in targets.iter().enumerate() {
        let (x, y) = c.to_cartesian(radius);
        let _ = writeln!(csv, "{},{},{},{},{}", id, c.a, c.b, fmt_fixed(x), fmt_fixed(y));
    }
    write_output(out.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(input: &Path, radius: f64, samples: u64, seed: u64) -> CliResult<ExitCode> {
    let entries = read_final_csv(input)?;
    let report = analysis::verify_entries(&entries, radius, samples, seed);
    print!("{}", report.to_json());
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_render(input: &Path, radius: f64, out: &Path) -> CliResult<ExitCode> {
    let entries = read_final_csv(input)?;
    let positions: Vec<(u64, LatticeCoord)> = entries.iter().map(|e| (e.id, e.coord)).collect();
    let svg = analysis::render_svg(&positions, radius, &RenderOptions::default());
    write_file(out, &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_energy(population: Population, verbose: bool) -> CliResult<ExitCode> {
    let Population { nodes, radius } = population;
    let config = SimulationConfig::new(nodes, radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = engine::run(&config);
    let report = engine::energy_report(&result, radius);

    let mut table = String::new();
    table.push_str("id,path,straight,ratio\n");
    for e in &report.entries {
        let _ = writeln!(
            table,
            "{},{},{},{}",
            e.id,
            fmt_fixed(e.path_length),
            fmt_fixed(e.straight_line),
            fmt_fixed(e.ratio)
        );
    }
    let _ = writeln!(
        table,
        "total,{},{},{}",
        fmt_fixed(report.total_path),
        fmt_fixed(report.total_straight),
        fmt_fixed(report.ratio)
    );
    if verbose {
        let m = engine::expected_termination_round(nodes);
        let quoted = engine::quoted_round_bound(nodes);
        let _ = writeln!(table, "termination_round={}", result.termination_round);
        let _ = writeln!(
            table,
            "schedule_bound={m} quoted_closed_form={quoted}{}",
            if quoted == m {
                ""
            } else {
                " (closed form disagrees; the schedule bound is authoritative)"
            }
        );
    }
    print!("{table}");
    Ok(ExitCode::SUCCESS)
}

fn write_output(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| CliError::io(path, e))
}

fn read_final_csv(path: &Path) -> CliResult<Vec<FinalEntry>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == FINAL_HEADER => {}
        _ => {
            return Err(CliError::Usage(format!(
                "{}: expected header `{FINAL_HEADER}`",
                path.display()
            )))
        }
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad_row(path, lineno, "expected 6 fields"));
        }
        let id = fields[0].parse().map_err(|_| bad_row(path, lineno, "bad id"))?;
        let a = fields[1].parse().map_err(|_| bad_row(path, lineno, "bad a"))?;
        let b = fields[2].parse().map_err(|_| bad_row(path, lineno, "bad b"))?;
        let stable_round = fields[5]
            .parse()
            .map_err(|_| bad_row(path, lineno, "bad stable_round"))?;
        entries.push(FinalEntry {
            id,
            coord: LatticeCoord::new(a, b),
            stable_round,
        });
    }
    if entries.is_empty() {
        return Err(CliError::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(entries)
}

fn read_starts(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == "x,y" {
            continue;
        }
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| bad_row(path, lineno, "expected `x,y`"))?;
        let x: f64 = x.trim().parse().map_err(|_| bad_row(path, lineno, "bad x"))?;
        let y: f64 = y.trim().parse().map_err(|_| bad_row(path, lineno, "bad y"))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(bad_row(path, lineno, "coordinates must be finite"));
        }
        points.push((x, y));
    }
    Ok(points)
}

fn bad_row(path: &Path, lineno: usize, what: &str) -> CliError {
    CliError::Usage(format!("{} row {}: {what}", path.display(), lineno + 1))
}
