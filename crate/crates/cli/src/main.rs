use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use reach_avoid::barrier::{build_barrier, Coalition};
use reach_avoid::geometry::Point;
use reach_avoid::margin::{maximize_margin, DEFAULT_TOL_X};
use reach_avoid::matching::AssignmentSolution;
use reach_avoid::region::{classify_against, oracle_classify, region_grid, DEFAULT_TOL_BAND};
use reach_avoid::report::{emit_report, solve, to_canonical_json, SolveOptions, ORACLE_MARGIN_FLOOR};
use reach_avoid::scenario::{parse_scenario, Scenario};
use reach_avoid::simulate::{run_engagement, run_engagement_traced, trace_csv, EngagementConfig};
use reach_avoid::svg::render_svg;
use reach_avoid::verify::{check_scenario, CheckKind};

const EXIT_INPUT: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Barriers, winning regions and pursuer assignment for reach-avoid games.
#[derive(Parser)]
#[command(name = "reach-avoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build barriers, the capture table and an optimal assignment.
    Solve(SolveArgs),
    /// Classify one point against one coalition.
    Classify(ClassifyArgs),
    /// Play out straight-line engagements.
    Simulate(SimulateArgs),
    /// Run the invariant and oracle checks on a scenario.
    Check(CheckArgs),
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: ScenarioArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG figure.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Cross-check barrier labels against the margin oracle.
    #[arg(long)]
    oracle: bool,
    /// Region grid resolution for the SVG figure.
    #[arg(long, default_value_t = 120)]
    grid: usize,
    /// Seed for the oracle's random sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: ScenarioArg,
    /// Coalition bitmask; bit i selects pursuer i + 1. Defaults to everyone.
    #[arg(long)]
    coalition: Option<u64>,
    /// One-based evader index.
    #[arg(long, conflicts_with = "point", required_unless_present = "point")]
    evader: Option<usize>,
    /// A point "x,y" in the scenario file's coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL_BAND)]
    tol_band: f64,
    /// Cross-check against the margin oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: ScenarioArg,
    /// One-based evader index; all evaders when omitted.
    #[arg(long)]
    evader: Option<usize>,
    #[arg(long, default_value_t = 5e-4)]
    dt: f64,
    #[arg(long, default_value_t = 1e-3)]
    capture_radius: f64,
    #[arg(long, default_value_t = 100.0)]
    max_time: f64,
    /// Write a "t,id,x,y" trace; needs a single evader.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: ScenarioArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| fail(EXIT_INTERNAL, format!("cannot write {}: {e}", path.display())))
}

fn coalition_arg(code: Option<u64>, n_p: usize) -> Result<Coalition, Failure> {
    let everyone = if n_p >= 64 { u64::MAX } else { (1u64 << n_p) - 1 };
    let code = code.unwrap_or(everyone);
    Coalition::from_code(code, n_p).map_err(|e| fail(EXIT_INPUT, e))
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let scenario = load(&args.input.scenario)?;
    let options = SolveOptions {
        oracle: args.oracle,
        seed: args.seed,
        ..SolveOptions::default()
    };
    let report = solve(&scenario, &options).map_err(|e| fail(EXIT_INTERNAL, e))?;
    let text = emit_report(&report);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.svg {
        let mut barriers = Vec::new();
        for summary in &report.barriers {
            let c = coalition_arg(Some(summary.code), scenario.n_p())?;
            barriers.push(build_barrier(&c, &scenario).map_err(|e| fail(EXIT_INTERNAL, e))?);
        }
        let grand = coalition_arg(None, scenario.n_p())?;
        let grid = region_grid(&grand, &scenario, args.grid).map_err(|e| fail(EXIT_INTERNAL, e))?;
        let a = &report.assignment;
        let assignment = AssignmentSolution {
            q: a.q,
            z_star: a.z_star.clone(),
            pairs_one: a.pairs_one.iter().map(|&[i, j]| (i, j)).collect(),
            pairs_two: a.pairs_two.iter().map(|&[i1, i2, j]| (i1, i2, j)).collect(),
        };
        write(path, &render_svg(&scenario, &barriers, Some(&grid), Some(&assignment)))?;
    }
    if !report.is_consistent() {
        return Err(fail(EXIT_INTERNAL, "assignment does not match its pair lists"));
    }
    if let Some(oracle) = &report.oracle {
        if !oracle.disagreements.is_empty() {
            return Err(fail(
                EXIT_ORACLE,
                format!("{} barrier/oracle disagreements", oracle.disagreements.len()),
            ));
        }
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<Point, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let coords: Result<Vec<f64>, _> = parts.iter().map(|s| s.parse::<f64>()).collect();
    match coords {
        Ok(v) if v.len() == 2 => Ok(Point::new(v[0], v[1])),
        _ => Err(fail(EXIT_INPUT, format!("expected \"x,y\", got {text:?}"))),
    }
}

fn run_classify(args: ClassifyArgs) -> Result<(), Failure> {
    let scenario = load(&args.input.scenario)?;
    let coalition = coalition_arg(args.coalition, scenario.n_p())?;
    let point = match (args.evader, &args.point) {
        (Some(j), _) => *scenario
            .evaders()
            .get(j.wrapping_sub(1))
            .ok_or_else(|| fail(EXIT_INPUT, format!("no evader E{j}")))?,
        (None, Some(text)) => scenario.transform().apply(parse_point(text)?),
        (None, None) => unreachable!("clap requires --evader or --point"),
    };
    if !scenario.domain().contains(point, reach_avoid::geometry::Side::Play) {
        return Err(fail(EXIT_INPUT, format!("({}, {}) is not in the play region", point.x, point.y)));
    }
    let curve = build_barrier(&coalition, &scenario).map_err(|e| fail(EXIT_INTERNAL, e))?;
    let label = classify_against(&curve, point, args.tol_band);
    let positions: Vec<Point> = coalition.members().iter().map(|&i| scenario.pursuers()[i]).collect();
    let (alpha, l) = (scenario.alpha(), scenario.target_length());
    let mut out = json!({
        "coalition": coalition.code(),
        "members": coalition.members().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "point": point,
        "barrier_y": curve.y_at(point.x),
        "label": label,
    });
    let mut disagree = false;
    if args.oracle {
        let margin = maximize_margin(point, &positions, alpha, l, DEFAULT_TOL_X)
            .map_err(|e| fail(EXIT_INTERNAL, e))?
            .value;
        let oracle = oracle_classify(point, &positions, alpha, l, args.tol_band)
            .map_err(|e| fail(EXIT_INTERNAL, e))?;
        disagree = margin.abs() > ORACLE_MARGIN_FLOOR && oracle != label;
        out["oracle"] = json!({ "label": oracle, "margin": margin });
    }
    print!("{}", to_canonical_json(&out));
    if disagree {
        return Err(fail(EXIT_ORACLE, "barrier and oracle disagree"));
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let scenario = load(&args.input.scenario)?;
    let config = EngagementConfig {
        dt: args.dt,
        capture_radius: args.capture_radius,
        max_time: args.max_time,
    };
    config
        .validate(scenario.alpha())
        .map_err(|e| fail(EXIT_INPUT, e))?;
    let indices: Vec<usize> = match args.evader {
        Some(j) if j >= 1 && j <= scenario.n_e() => vec![j - 1],
        Some(j) => return Err(fail(EXIT_INPUT, format!("no evader E{j}"))),
        None => (0..scenario.n_e()).collect(),
    };
    if args.trace.is_some() && indices.len() != 1 {
        return Err(fail(EXIT_INPUT, "--trace needs a single evader; pass --evader"));
    }
    let mut outcomes = Vec::new();
    for &j in &indices {
        let e = scenario.evaders()[j];
        let outcome = match &args.trace {
            Some(path) => {
                let (o, rows) = run_engagement_traced(scenario.pursuers(), e, &scenario, &config)
                    .map_err(|e| fail(EXIT_INTERNAL, e))?;
                write(path, &trace_csv(&rows))?;
                o
            }
            None => run_engagement(scenario.pursuers(), e, &scenario, &config)
                .map_err(|e| fail(EXIT_INTERNAL, e))?,
        };
        outcomes.push(json!({ "evader": j + 1, "outcome": outcome }));
    }
    print!("{}", to_canonical_json(&json!({ "config": config, "engagements": outcomes })));
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<(), Failure> {
    let scenario = load(&args.input.scenario)?;
    let results = check_scenario(&scenario, args.seed).map_err(|e| fail(EXIT_INTERNAL, e))?;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = |kind| results.iter().any(|r| !r.passed && r.kind == kind);
    if failed(CheckKind::Oracle) {
        Err(fail(EXIT_ORACLE, "oracle cross-check failed"))
    } else if failed(CheckKind::Invariant) {
        Err(fail(EXIT_INTERNAL, "invariant check failed"))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Classify(a) => run_classify(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
