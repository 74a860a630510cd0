//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 invariant violated while constructing, 4 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::accessor::{
    baseline_expansion, construct_expansion_with, regular_start, ExpansionTrace, Limits,
};
use crate::error::Error;
use crate::exactnum::{QuadNum, Rat};
use crate::lattice_geom::{
    all_angles_gt, enumerate_lines, line_meets_triangle, min_angle_cos2, AngleThreshold, Point2,
    RatTriangle, RegularCone,
};
use crate::metrics::{convergence_report, ConvergenceReport};
use crate::render::{render_svg, RenderOptions};
use crate::starring::StarringRun;
use crate::trace::{parse_jsonl, to_jsonl, BaselineRecord, RawCone, StageRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "farey2d",
    version,
    about = "Nested regular cones with angles above a threshold"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct an expansion and write it as JSONL.
    Expand {
        /// Seed triangle as "x,y x,y x,y" with rational coordinates.
        #[arg(long, default_value = "0/1,0/1 1/1,0/1 0/1,1/1")]
        triangle: String,
        /// cos² of the angle threshold, strictly between 1/4 and 1/2.
        #[arg(long, default_value = "13/36")]
        theta_cos2: String,
        #[arg(long)]
        stages: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a trace from scratch and write its convergence report.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "0/1,0/1 1/1,0/1 0/1,1/1")]
        triangle: String,
        #[arg(long, default_value = "13/36")]
        theta_cos2: String,
        /// Stage whose triangle encloses the limit point; must exceed the trace length.
        #[arg(long)]
        enclosure_depth: usize,
        /// CSV report path.
        #[arg(long)]
        report: PathBuf,
        /// Optional JSON report path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Draw the seed and the stage triangles of a trace as SVG.
    Render {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "0/1,0/1 1/1,0/1 0/1,1/1")]
        triangle: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        size: u32,
    },
    /// Longest-edge starring toward a target, for contrast.
    Baseline {
        #[arg(long, default_value = "0/1,0/1 1/1,0/1 0/1,1/1")]
        triangle: String,
        /// Target coordinates as two Q(√5) literals, e.g. "-1/4+1/4√5" "2/7-1/50√5".
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_hyphen_values = true)]
        target: Vec<String>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Per-step min-angle CSV.
        #[arg(long)]
        csv: PathBuf,
        /// Optional JSONL trace of the chain.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed command: exit code plus message.
#[derive(Debug)]
struct Fail(i32, String);

type CmdResult = std::result::Result<(), Fail>;

fn config(e: impl std::fmt::Display) -> Fail {
    Fail(EXIT_CONFIG, format!("invalid configuration: {e}"))
}

fn io_err(path: &Path, e: std::io::Error) -> Fail {
    Fail(EXIT_IO, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn parse_theta(s: &str) -> std::result::Result<AngleThreshold, Fail> {
    let cos2: Rat = s.parse().map_err(config)?;
    let theta = AngleThreshold::from_cos2(cos2).map_err(config)?;
    if !theta.in_construction_range() {
        return Err(config(Error::InvalidTheta));
    }
    Ok(theta)
}

fn parse_triangle(s: &str) -> std::result::Result<RatTriangle, Fail> {
    s.parse().map_err(config)
}

/// Maps construction errors onto exit codes.
fn construction(e: Error) -> Fail {
    match e {
        Error::InvalidTheta | Error::Parse { .. } | Error::Degenerate => config(e),
        other => Fail(EXIT_INVARIANT, format!("invariant violated: {other}")),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Expand {
            triangle,
            theta_cos2,
            stages,
            out: path,
        } => cmd_expand(&triangle, &theta_cos2, stages, &path, out),
        Command::Verify {
            trace,
            triangle,
            theta_cos2,
            enclosure_depth,
            report,
            json,
        } => cmd_verify(
            &trace,
            &triangle,
            &theta_cos2,
            enclosure_depth,
            &report,
            json.as_deref(),
            out,
        ),
        Command::Render {
            trace,
            triangle,
            out: path,
            size,
        } => cmd_render(&trace, &triangle, &path, size),
        Command::Baseline {
            triangle,
            target,
            steps,
            csv,
            out: path,
        } => cmd_baseline(&triangle, &target, steps, &csv, path.as_deref(), out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn cmd_expand(
    triangle: &str,
    theta: &str,
    stages: usize,
    path: &Path,
    out: &mut dyn Write,
) -> CmdResult {
    let seed = parse_triangle(triangle)?;
    let theta = parse_theta(theta)?;
    let trace = construct_expansion_with(&seed, &theta, stages, &Limits::from_env())
        .map_err(construction)?;
    write(path, &to_jsonl(&trace))?;
    let mut table = String::from("k    rounds  runs  starrings  max_denominator\n");
    for s in &trace.stages {
        let starrings: u64 = s.steps.iter().map(|r| r.count).sum();
        let _ = writeln!(
            table,
            "{:<4} {:<7} {:<5} {:<10} {}",
            s.k,
            s.rounds.len(),
            s.steps.len(),
            starrings,
            s.cone.max_denominator()
        );
    }
    let _ = write!(out, "{table}");
    Ok(())
}

/// Applies `runs` from `start`, letting each run pick the labeling it was
/// recorded under. `None` when some run fits no labeling.
fn replay(start: &RegularCone, runs: &[StarringRun]) -> Option<RegularCone> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    runs.iter().try_fold(start.clone(), |cur, run| {
        PERMS
            .iter()
            .map(|&p| cur.permuted(p))
            .find(|c| run.consistent_with(c))
            .map(|c| run.apply(&c))
    })
}

/// Re-checks parsed records against the seed and θ, extends the cones to
/// `depth` stages and builds the report for the recorded stages.
pub fn verify_records(
    records: &[StageRecord],
    seed: &RatTriangle,
    theta: &AngleThreshold,
    depth: usize,
) -> std::result::Result<ConvergenceReport, (usize, String)> {
    let mut stages = Vec::with_capacity(records.len());
    let mut outer = seed.clone();
    let mut prev = regular_start(seed).map_err(|e| (0, format!("seed: {e}")))?;
    for (i, r) in records.iter().enumerate() {
        if r.k != i {
            return Err((i, format!("stage index {} out of sequence", r.k)));
        }
        let cone = match r.cone() {
            Ok(c) => c,
            Err(Error::NotRegular { det }) => {
                return Err((i, format!("regularity: determinant {det}")))
            }
            Err(e) => return Err((i, format!("cone: {e}"))),
        };
        if replay(&prev, &r.steps).as_ref() != Some(&cone) {
            return Err((
                i,
                "steps: recorded starrings do not lead to the cone".into(),
            ));
        }
        prev = cone.clone();
        let t = cone.triangle();
        let line = r
            .avoided_line()
            .map_err(|e| (i, format!("avoided line: {e}")))?;
        if line != enumerate_lines(i) {
            return Err((
                i,
                format!("avoided line {:?} is not line {i} of the enumeration", line),
            ));
        }
        if !all_angles_gt(&t, theta) {
            return Err((i, "angles: some angle is not above theta".into()));
        }
        if let Some(j) = (0..=i).find(|&j| line_meets_triangle(&enumerate_lines(j), &t)) {
            return Err((i, format!("line avoidance: triangle meets line {j}")));
        }
        if !outer.strictly_contains_triangle(&t) {
            return Err((
                i,
                "nesting: triangle not strictly inside its predecessor".into(),
            ));
        }
        if !(r.zeta_cos2 > Rat::new(1, 4) && &r.zeta_cos2 < theta.cos2()) {
            return Err((i, "zeta outside (theta, pi/3)".into()));
        }
        outer = t;
        stages.push(r.to_stage().map_err(|e| (i, e.to_string()))?);
    }
    let n = stages.len();
    let start = regular_start(seed).map_err(|e| (0, format!("seed: {e}")))?;
    let mut trace = ExpansionTrace {
        theta: theta.clone(),
        seed: seed.clone(),
        start,
        stages,
    };
    if n == 0 {
        return Ok(ConvergenceReport {
            enclosure_depth: depth,
            enclosure: seed.bounding_box(),
            stages: Vec::new(),
        });
    }
    trace
        .extend_to(depth, &Limits::from_env())
        .map_err(|e| (n, format!("extension: {e}")))?;
    let mut report = convergence_report(&trace, depth).map_err(|e| (n, e.to_string()))?;
    report.stages.truncate(n);
    if let Some(bad) = report.stages.iter().find(|s| !(s.chain_ok && s.bound_ok)) {
        return Err((bad.k, "convergence bound".into()));
    }
    Ok(report)
}

fn cmd_verify(
    trace_path: &Path,
    triangle: &str,
    theta: &str,
    depth: usize,
    report_path: &Path,
    json_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let seed = parse_triangle(triangle)?;
    let theta = parse_theta(theta)?;
    let text = read(trace_path)?;
    let records = parse_jsonl(&text).map_err(|e| Fail(EXIT_VERIFY, format!("parse error: {e}")))?;
    if depth <= records.len() {
        return Err(config(format!(
            "enclosure depth {depth} must exceed the {} trace stages",
            records.len()
        )));
    }
    let report = verify_records(&records, &seed, &theta, depth)
        .map_err(|(k, what)| Fail(EXIT_VERIFY, format!("stage {k}: {what}")))?;
    write(report_path, &report.to_csv())?;
    if let Some(p) = json_path {
        write(p, &report.to_json())?;
    }
    let _ = writeln!(
        out,
        "verified {} stages against enclosure depth {depth}",
        report.stages.len()
    );
    Ok(())
}

fn cmd_render(trace_path: &Path, triangle: &str, svg: &Path, size: u32) -> CmdResult {
    let seed = parse_triangle(triangle)?;
    let text = read(trace_path)?;
    let records = parse_jsonl(&text).map_err(|e| Fail(EXIT_VERIFY, format!("parse error: {e}")))?;
    let tris = records
        .iter()
        .map(|r| r.cone().map(|c| c.triangle()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail(EXIT_VERIFY, e.to_string()))?;
    let doc = render_svg(&seed, &tris, &RenderOptions { size })
        .map_err(|e| Fail(EXIT_VERIFY, e.to_string()))?;
    write(svg, &doc)
}

fn cmd_baseline(
    triangle: &str,
    target: &[String],
    steps: usize,
    csv: &Path,
    trace_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let seed = parse_triangle(triangle)?;
    let [x, y] = target else {
        return Err(config("--target takes two values"));
    };
    let x: QuadNum = x.parse().map_err(config)?;
    let y: QuadNum = y.parse().map_err(config)?;
    let chain = baseline_expansion(&seed, &Point2::new(x, y), steps).map_err(construction)?;
    let mut table = String::from("step,min_angle_cos2,max_denominator\n");
    let mut jsonl = String::new();
    for (i, (c, step)) in chain.iter().enumerate() {
        let m = min_angle_cos2(&c.triangle());
        let _ = writeln!(table, "{},{},{}", i + 1, m, c.max_denominator());
        let rec = BaselineRecord {
            k: i + 1,
            cone: RawCone::from_cone(c),
            step: step.clone(),
            min_angle_cos2: m,
        };
        jsonl.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        jsonl.push('\n');
    }
    write(csv, &table)?;
    if let Some(p) = trace_path {
        write(p, &jsonl)?;
    }
    let _ = writeln!(out, "{} baseline steps written", chain.len());
    Ok(())
}
