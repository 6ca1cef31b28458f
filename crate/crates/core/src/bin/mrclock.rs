use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use mrclock::enumerate::SparseOrder;
use mrclock::ir::extract_dependencies;
use mrclock::schedule::sequential_schedule_with_order;
use mrclock::verify::{check_coverage, check_dependencies};
use mrclock::{
    analyze, check_legality, emit, enumerate, enumerate_sparse, from_json, make_clock, parse_spec, to_json, transform, verify,
    Clock, ComputationSpec, GradMapping, Notation, ParallelismProfile, ScheduleTree, SparseGraph, TransformOptions, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "mrclock", version, about = "Clock scheduling of map-reduce formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a spec and report legality and dependencies.
    Parse { spec: PathBuf },
    /// Build a schedule and write it as JSON.
    Transform {
        spec: PathBuf,
        /// `KxR` (k graduations of rate R) or a graduation list such as `16,4,1`.
        /// Without a clock the lexicographic schedule is built.
        #[arg(long)]
        clock: Option<String>,
        /// Rate of a listed clock; inferred from the first two graduations.
        #[arg(long)]
        rate: Option<u64>,
        /// Graduation per index, e.g. `K=8,I=4,J=2` or `S=16:I,I=8`.
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = 0)]
        convolutions: usize,
        /// `VAR=COPIES`
        #[arg(long)]
        unfold: Option<String>,
        #[arg(long)]
        temp_budget: Option<u32>,
        /// Loop order of the lexicographic schedule, e.g. `K,I,J`.
        #[arg(long)]
        order: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a schedule JSON in one of the loop notations.
    Emit {
        schedule: PathBuf,
        #[arg(long, default_value = "for")]
        notation: Notation,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a schedule against its spec; exit status 0 iff every check passes.
    Verify {
        spec: PathBuf,
        schedule: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Parallelism profile of a schedule, as JSON.
    Analyze {
        schedule: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Map a DAG given as an edge list onto a unit clock.
    Sparse {
        edges: PathBuf,
        /// Graduation list of the unit clock, e.g. `2,1`.
        #[arg(long, default_value = "2,1")]
        unit: String,
        #[arg(long)]
        rate: Option<u64>,
        /// Breadth-first discovery instead of depth-first.
        #[arg(long)]
        bfs: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> Result<ComputationSpec> {
    let text = read(path)?;
    parse_spec(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

fn load_tree(path: &Path) -> Result<ScheduleTree> {
    from_json(&read(path)?).with_context(|| format!("{} is not a schedule document", path.display()))
}

fn parse_clock(text: &str, rate: Option<u64>) -> Result<Clock> {
    if let Some((k, r)) = text.split_once(['x', 'X']) {
        let k: usize = k.trim().parse().context("clock dimension")?;
        let r: u64 = r.trim().parse().context("clock rate")?;
        return Ok(make_clock(k, r)?);
    }
    let grads: Vec<u64> = text
        .split(',')
        .map(|g| g.trim().parse::<u64>().with_context(|| format!("bad graduation `{g}`")))
        .collect::<Result<_>>()?;
    let rate = rate.unwrap_or(match grads.as_slice() {
        [a, b, ..] if b > &0 && a / b > 1 => a / b,
        _ => 2,
    });
    Ok(Clock::new(grads, rate)?)
}

fn profile_json(profile: &ParallelismProfile) -> serde_json::Value {
    let measure: serde_json::Map<String, serde_json::Value> =
        profile.measure.iter().map(|(c, r)| (c.to_string(), json!(r.to_string()))).collect();
    let colors: serde_json::Map<String, serde_json::Value> =
        profile.colors.iter().map(|(c, n)| (c.to_string(), json!(n))).collect();
    json!({
        "widths": profile.widths,
        "colors": colors,
        "locality": profile.locality,
        "measure": measure,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse { spec } => {
            let spec = load_spec(&spec)?;
            print!("{spec}");
            let report = check_legality(&spec);
            if !report.is_legal() {
                eprint!("{}", report.render(&spec));
                return Ok(ExitCode::FAILURE);
            }
            let deps = extract_dependencies(&spec);
            println!("# legal; {} dependency edges", deps.edges.len());
            for e in &deps.edges {
                println!(
                    "#   {} : formula {} -> formula {} displacement {:?}",
                    e.array,
                    e.def + 1,
                    e.use_formula + 1,
                    e.displacement
                );
            }
            for c in &deps.cycles {
                println!("#   index cycle {}", c.indexes.join(" -> "));
            }
        }
        Command::Transform { spec, clock, rate, map, convolutions, unfold, temp_budget, order, output } => {
            let spec = load_spec(&spec)?;
            let tree = match clock {
                None => {
                    if map.is_some() || unfold.is_some() {
                        bail!("--map and --unfold need --clock");
                    }
                    let order: Vec<String> = match order {
                        Some(o) => o.split(',').map(|s| s.trim().to_string()).collect(),
                        None => spec.index_names(),
                    };
                    let tree = sequential_schedule_with_order(&spec, &order)?;
                    if let Some(b) = temp_budget {
                        if tree.temp_plan.locations > b {
                            bail!("temporary budget {b} is below the minimal {} cells", tree.temp_plan.locations);
                        }
                    }
                    tree
                }
                Some(clock) => {
                    let mapping: GradMapping = map
                        .as_deref()
                        .context("--clock needs --map")?
                        .parse()
                        .map_err(|e: String| anyhow::anyhow!("--map: {e}"))?;
                    let mut clock = parse_clock(&clock, rate)?;
                    // `KxR` clocks end at 1; shift them onto the mapping's finest graduation
                    let finest = *clock.graduations().last().unwrap();
                    let fits = |c: &Clock| mapping.assignments.iter().all(|(_, g)| c.contains(*g));
                    if let Some(want) = mapping.finest().filter(|&w| w > finest && w % finest == 0) {
                        let scaled = clock.scaled(want / finest)?;
                        if !fits(&clock) && fits(&scaled) {
                            clock = scaled;
                        }
                    }
                    let unfold = match unfold {
                        Some(u) => {
                            let (v, c) = u.split_once('=').context("--unfold expects VAR=COPIES")?;
                            Some((v.trim().to_string(), c.trim().parse().context("--unfold copies")?))
                        }
                        None => None,
                    };
                    transform(&spec, &TransformOptions { clock, mapping, convolutions, unfold, temp_budget })?
                }
            };
            write_out(output.as_deref(), &to_json(&tree))?;
        }
        Command::Emit { schedule, notation, output } => {
            let tree = load_tree(&schedule)?;
            write_out(output.as_deref(), &emit(&tree, notation).text)?;
        }
        Command::Verify { spec, schedule, trials, seed, json } => {
            let spec = load_spec(&spec)?;
            let tree = load_tree(&schedule)?;
            if tree.spec.indexes != spec.indexes || tree.spec.formulas.len() != spec.formulas.len() {
                bail!("schedule was built for a different spec");
            }
            let report = verify(&tree, trials, seed)?;
            if json {
                let v = json!({
                    "pass": report.pass(),
                    "coverage": report.coverage,
                    "violations": report.dependencies.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "commutes": report.dependencies.commutes,
                    "equivalence": report.equivalence,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                let c = &report.coverage;
                println!(
                    "coverage: {} ({}/{} points, {} missing, {} duplicated)",
                    if c.pass() { "pass" } else { "FAIL" },
                    c.visited,
                    c.expected,
                    c.missing.len(),
                    c.duplicated.len()
                );
                let d = &report.dependencies;
                println!(
                    "dependencies: {}{}",
                    if d.pass() { "pass" } else { "FAIL" },
                    if d.commutes { " (accumulations reordered; they commute)" } else { "" }
                );
                for v in d.violations.iter().take(5) {
                    println!("  {v}");
                }
                let e = &report.equivalence;
                match &e.counterexample {
                    None => println!("equivalence: pass ({} trials, seed {seed})", e.trials),
                    Some(cx) => {
                        println!("equivalence: FAIL at trial {} (seed {seed})", cx.trial);
                        for d in cx.diff.iter().take(5) {
                            println!("  {d}");
                        }
                    }
                }
            }
            if !report.pass() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Analyze { schedule, output } => {
            let tree = load_tree(&schedule)?;
            let trace = enumerate(&tree)?;
            let coverage = check_coverage(&trace, &tree.spec);
            let deps = check_dependencies(&trace, &mrclock::ExecContext::of(&tree));
            let mut v = profile_json(&analyze(&trace));
            v["coverage"] = serde_json::to_value(&coverage)?;
            v["violations"] = json!(deps.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
            write_out(output.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&v)?))?;
        }
        Command::Sparse { edges, unit, rate, bfs, output } => {
            let graph: SparseGraph = read(&edges)?.parse()?;
            let unit = parse_clock(&unit, rate)?;
            let order = if bfs { SparseOrder::BreadthFirst } else { SparseOrder::DepthFirst };
            let trace = enumerate_sparse(&graph, &unit, order)?;
            let visits: Vec<_> = trace
                .records
                .iter()
                .map(|r| json!({"vertex": r.lattice_point[0], "unit": r.time_point[0], "slot": r.time_point[1], "level": r.level, "color": r.color.0}))
                .collect();
            let v = json!({"visits": visits, "profile": profile_json(&analyze(&trace))});
            write_out(output.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&v)?))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
