//! Command-line interface of the `semirandom` binary.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use semirandom_core::lower_bound::{
    delta_grid, delta_star, eps1, eps_final, integrate_destroy_problematic,
    integrate_min_degree_system, integrate_problematic_system, min_degree_baseline, tau,
    x111_closed_form, xi, OdeState, DEFAULT_STEP,
};
use semirandom_core::property_p::{OptimizerConfig, EPS0};
use semirandom_core::rng::RNG_NAME;
use semirandom_core::strategy::FourPhaseConfig;
use serde::Serialize;
use serde_json::json;

use crate::edgelist::parse_edge_list;
use crate::experiments::{
    graph_oracles, load_point, oracle_batch, simulate_lower_many, simulate_upper_many, Artifacts,
    UpperRow,
};
use crate::output::{write_csv, write_json, Destination};
use crate::seeds::SeedList;

pub const OUT_DIR_ENV: &str = "SEMIRANDOM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "semirandom",
    version,
    about = "Simulations, optimizer and ODE checks for the semi-random graph process"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent). Relative paths are taken relative
    /// to the output directory.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Directory for outputs, traces and cycle files.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OdeSystem {
    /// Problematic-vertex densities under greedy play.
    Problematic,
    /// Degree-0/degree-1 densities under F_delta.
    MinDegree,
    /// Decay of the remaining problematic vertices.
    Destroy,
}

const UPPER_COLUMNS: &str = "CSV columns (one row per seed):
  seed, n, yellow_budget        run parameters
  tau1 .. tau4                  last round of each construction phase
  tau4_over_n                   tau4 / n
  v0_over_n, v1_over_n          |V0| / n and |V1| / n at tau1
  green_count                   green edges at the end of phase 1
  edges_total, edges_discarded  rounds played, loops and repeated pairs
  matching_components           components of the initial 2-matching
  completion_rounds             rounds played after tau4
  min_end_set                   smallest End set seen while waiting
  hamilton_verified, success    cycle verified; goal reached within the cap";

const LOWER_COLUMNS: &str = "CSV columns (one row per seed):
  seed, n, delta                run parameters
  phase1_rounds                 floor(n ln 2)
  x111_over_n                   problematic vertices / n at the end of phase 1
  xi                            limiting density of problematic vertices
  completion_round              round at which the minimum degree reaches 2
  completion_over_n             completion_round / n
  predicted_completion_over_n   ln 2 + ln(1 + ln 2) + eps1(delta)
  non_greedy_moves, forced_moves";

const ODE_COLUMNS: &str = "CSV columns:
  problematic: x, x0, x00, x000, x1, x10, x100, x11, x110, x111, y, x111_closed_form
  min-degree:  mv, start, end, y, z (one row per leg; trailer holds the completion time)
  destroy:     tau0, time, closed_form";

const LOWERBOUND_COLUMNS: &str = "CSV columns:
  delta, eps1, tau, eps2, total (= eps1 + eps2); tau is empty where undefined.
  A trailing comment line holds eps_final.";

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the four-phase strategy and complete it to a Hamilton cycle.
    #[command(after_help = UPPER_COLUMNS)]
    SimulateUpper {
        #[arg(long)]
        n: usize,
        /// Seeds, e.g. `1..20` or `1,4,9` (ranges inclusive).
        #[arg(long, default_value = "1")]
        seeds: SeedList,
        #[arg(long, default_value_t = 0.07)]
        yellow_budget: f64,
        /// Write `trace_seed<S>.jsonl` per seed into the output directory.
        #[arg(long)]
        trace: bool,
        /// Write `cycle_seed<S>.txt` (1-based vertex list) per seed.
        #[arg(long)]
        cycles: bool,
    },
    /// Play the greedy / F_delta strategy while tracking problematic vertices.
    #[command(after_help = LOWER_COLUMNS)]
    SimulateLower {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        seeds: SeedList,
        /// Fraction of the first phase played non-greedily (0 = greedy).
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Trajectory sampling period in rounds (JSON output only).
        #[arg(long)]
        sample_every: Option<u64>,
    },
    /// Multi-start search for the maximum of the rate function.
    VerifyP {
        #[arg(long, default_value_t = 0.07)]
        budget: f64,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
        #[arg(long, default_value_t = EPS0)]
        eps0: f64,
        /// Confine all variables to [m, 1 - m].
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        /// Extra start loaded from a point file (JSON or 53 numbers).
        #[arg(long)]
        warm_start: Option<PathBuf>,
        /// Write the best point as JSON.
        #[arg(long)]
        save_best: Option<PathBuf>,
    },
    /// Integrate one of the lower-bound ODE systems.
    #[command(after_help = ODE_COLUMNS)]
    Ode {
        #[arg(long, value_enum)]
        system: OdeSystem,
        /// Sample points for the problematic system; `ln2` is accepted.
        #[arg(long, value_delimiter = ',', default_value = "ln2")]
        at: Vec<String>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Initial density for the destroy system; defaults to tau(0).
        #[arg(long)]
        tau0: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Exact matching and cycle oracles on small graphs.
    Oracle {
        /// Graph as a 1-based edge list.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        graph: Option<PathBuf>,
        /// Vertex count for `--graph` when isolated vertices trail the list.
        #[arg(long, requires = "graph")]
        n: Option<usize>,
        /// Compare kappa with the Tutte-Berge minimum on this many random graphs.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        #[arg(long, default_value_t = 18)]
        max_edges: usize,
        /// Longest cycle counted by the census and the cyclic proxy.
        #[arg(long)]
        cycle_cap: Option<usize>,
    },
    /// Tabulate eps1, tau, eps2 over a grid of delta.
    #[command(after_help = LOWERBOUND_COLUMNS)]
    Lowerbound {
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        /// Upper end of the grid; defaults to xi / (2 ln 2).
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn unit(name: &str, x: f64) -> anyhow::Result<()> {
    if !(0.0..=1.0).contains(&x) {
        bail!("--{name} must lie in [0, 1], got {x}");
    }
    Ok(())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SimulateUpper { .. } => "simulate-upper",
            Command::SimulateLower { .. } => "simulate-lower",
            Command::VerifyP { .. } => "verify-p",
            Command::Ode { .. } => "ode",
            Command::Oracle { .. } => "oracle",
            Command::Lowerbound { .. } => "lowerbound",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::VerifyP { .. } | Command::Oracle { .. } => Format::Json,
            _ => Format::Csv,
        }
    }

    /// Checks command-specific arguments before any work starts.
    pub fn validate(&self) -> anyhow::Result<()> {
        match self {
            Command::SimulateUpper {
                n,
                seeds,
                yellow_budget,
                ..
            } => {
                if *n < 3 {
                    bail!("--n must be at least 3");
                }
                if seeds.as_slice().is_empty() {
                    bail!("no seeds given");
                }
                if !(*yellow_budget > 0.0 && *yellow_budget < 1.0) {
                    bail!("--yellow-budget must lie in (0, 1)");
                }
            }
            Command::SimulateLower {
                n,
                delta,
                sample_every,
                ..
            } => {
                if *n < 3 {
                    bail!("--n must be at least 3");
                }
                unit("delta", *delta)?;
                if *sample_every == Some(0) {
                    bail!("--sample-every must be positive");
                }
            }
            Command::VerifyP { .. } => {}
            Command::Ode {
                delta,
                tau0,
                step,
                at,
                ..
            } => {
                unit("delta", *delta)?;
                if !(*step > 0.0 && *step <= 1e-4) {
                    bail!("--step must lie in (0, 1e-4]");
                }
                if tau0.is_some_and(|t| !(t >= 0.0)) {
                    bail!("--tau0 must be nonnegative");
                }
                parse_points(at)?;
            }
            Command::Oracle { .. } => {}
            Command::Lowerbound { lo, hi, points } => {
                unit("lo", *lo)?;
                unit("hi", hi.unwrap_or(delta_star()))?;
                if hi.unwrap_or(delta_star()) < *lo || *points == 0 {
                    bail!("need lo <= hi and at least one point");
                }
            }
        }
        Ok(())
    }
}

fn parse_points(at: &[String]) -> anyhow::Result<Vec<f64>> {
    let mut v: Vec<f64> = at
        .iter()
        .map(|s| match s.trim() {
            "ln2" => Ok(std::f64::consts::LN_2),
            t => t
                .parse::<f64>()
                .with_context(|| format!("bad sample point {t:?}")),
        })
        .collect::<anyhow::Result<_>>()?;
    if v.iter().any(|x| !(*x >= 0.0)) {
        bail!("sample points must be nonnegative");
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[derive(Serialize)]
struct ProblematicRow {
    x: f64,
    x0: f64,
    x00: f64,
    x000: f64,
    x1: f64,
    x10: f64,
    x100: f64,
    x11: f64,
    x110: f64,
    x111: f64,
    y: f64,
    x111_closed_form: f64,
}

impl ProblematicRow {
    fn new(x: f64, s: OdeState) -> Self {
        ProblematicRow {
            x,
            x0: s.x0,
            x00: s.x00,
            x000: s.x000,
            x1: s.x1,
            x10: s.x10,
            x100: s.x100,
            x11: s.x11,
            x110: s.x110,
            x111: s.x111,
            y: s.y,
            x111_closed_form: x111_closed_form(x),
        }
    }
}

/// Runs the command. Returns `Ok(false)` when an acceptance gate fails.
pub fn dispatch(cli: &Cli) -> anyhow::Result<bool> {
    let cmd = &cli.command;
    cmd.validate()?;
    let fmt = cli.common.format.unwrap_or(cmd.default_format());
    let dir = cli.common.out_dir.as_path();
    let dest = Destination::resolve(cli.common.output.as_deref(), dir);
    let base = json!({
        "command": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_NAME,
        "format": fmt,
    });
    let config = |extra: serde_json::Value| {
        let mut c = base.clone();
        c.as_object_mut()
            .expect("object")
            .extend(extra.as_object().expect("object").clone());
        c
    };

    match cmd {
        Command::SimulateUpper {
            n,
            seeds,
            yellow_budget,
            trace,
            cycles,
        } => {
            let cfg = config(json!({
                "n": n, "seeds": seeds, "yellow_budget": yellow_budget,
                "trace": trace, "cycles": cycles,
            }));
            if *trace || *cycles {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            let art = Artifacts {
                dir: Some(dir),
                trace: *trace,
                cycle: *cycles,
            };
            let fp = FourPhaseConfig {
                yellow_budget: *yellow_budget,
            };
            let runs = simulate_upper_many(*n, fp, seeds.as_slice(), art)?;
            let rows: Vec<UpperRow> = runs.iter().map(|r| r.row(*yellow_budget)).collect();
            let ok = rows.iter().all(|r| r.success && r.hamilton_verified);
            match fmt {
                Format::Csv => write_csv(dest.open()?, &cfg, &rows, &[])?,
                Format::Json => write_json(dest.open()?, &cfg, "replicates", &runs)?,
            }
            Ok(ok)
        }
        Command::SimulateLower {
            n,
            seeds,
            delta,
            sample_every,
        } => {
            let cfg = config(json!({
                "n": n, "seeds": seeds, "delta": delta, "sample_every": sample_every,
            }));
            let runs = simulate_lower_many(*n, *delta, seeds.as_slice(), *sample_every)?;
            match fmt {
                Format::Csv => {
                    let rows: Vec<_> = runs.iter().map(|r| r.row.clone()).collect();
                    write_csv(dest.open()?, &cfg, &rows, &[])?
                }
                Format::Json => write_json(dest.open()?, &cfg, "replicates", &runs)?,
            }
            Ok(true)
        }
        Command::VerifyP {
            budget,
            starts,
            seed,
            eps0,
            margin,
            warm_start,
            save_best,
        } => {
            let oc = OptimizerConfig {
                budget: *budget,
                eps0: *eps0,
                n_starts: *starts,
                seed: *seed,
                interior_margin: *margin,
                ..OptimizerConfig::default()
            };
            oc.validate()?;
            let warm = warm_start
                .as_ref()
                .map(|p| {
                    let text = std::fs::read_to_string(p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    load_point(&text).with_context(|| format!("parsing {}", p.display()))
                })
                .transpose()?;
            let cfg = config(json!({
                "optimizer": oc,
                "warm_start": warm,
            }));
            let report = crate::experiments::verify_p(&oc, warm.as_ref())?;
            if let Some(p) = save_best {
                let path = if p.is_absolute() {
                    p.clone()
                } else {
                    dir.join(p)
                };
                std::fs::write(&path, serde_json::to_string_pretty(&report.best_point)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match fmt {
                Format::Json => write_json(dest.open()?, &cfg, "report", &report)?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct StartRow {
                        start: usize,
                        value: f64,
                        relaxed_value: f64,
                        max_violation: f64,
                        feasible: bool,
                        iterations: usize,
                        outer_iterations: usize,
                    }
                    let rows: Vec<StartRow> = report
                        .starts
                        .iter()
                        .map(|s| StartRow {
                            start: s.start,
                            value: s.value,
                            relaxed_value: s.relaxed_value,
                            max_violation: s.max_violation,
                            feasible: s.feasible,
                            iterations: s.iterations,
                            outer_iterations: s.outer_iterations,
                        })
                        .collect();
                    let trailer = [format!(
                        "best_value={}",
                        report
                            .best_value
                            .map_or("none".into(), |v| format!("{v:e}"))
                    )];
                    write_csv(dest.open()?, &cfg, &rows, &trailer)?
                }
            }
            Ok(!report.nonnegative_found)
        }
        Command::Ode {
            system,
            at,
            delta,
            tau0,
            step,
        } => {
            let cfg = config(json!({
                "system": system, "at": at, "delta": delta, "tau0": tau0, "step": step,
            }));
            match system {
                OdeSystem::Problematic => {
                    let pts = parse_points(at)?;
                    let rows: Vec<ProblematicRow> = integrate_problematic_system(&pts, *step)?
                        .into_iter()
                        .map(|(x, s)| ProblematicRow::new(x, s))
                        .collect();
                    match fmt {
                        Format::Csv => write_csv(dest.open()?, &cfg, &rows, &[])?,
                        Format::Json => write_json(dest.open()?, &cfg, "trajectory", &rows)?,
                    }
                }
                OdeSystem::MinDegree => {
                    let r = integrate_min_degree_system(*delta, *step)?;
                    let predicted = min_degree_baseline() + eps1(*delta)?;
                    match fmt {
                        Format::Csv => write_csv(
                            dest.open()?,
                            &cfg,
                            &r.legs,
                            &[
                                format!("completion={}", r.completion),
                                format!("predicted={predicted}"),
                            ],
                        )?,
                        Format::Json => write_json(
                            dest.open()?,
                            &cfg,
                            "result",
                            &json!({"legs": r.legs, "completion": r.completion, "predicted": predicted}),
                        )?,
                    }
                }
                OdeSystem::Destroy => {
                    let t0 = match tau0 {
                        Some(t) => *t,
                        None => tau(0.0)?,
                    };
                    let time = integrate_destroy_problematic(t0, *step)?;
                    #[derive(Serialize)]
                    struct DestroyRow {
                        tau0: f64,
                        time: f64,
                        closed_form: f64,
                    }
                    let row = DestroyRow {
                        tau0: t0,
                        time,
                        closed_form: (3.0 * t0).ln_1p() / 3.0,
                    };
                    match fmt {
                        Format::Csv => write_csv(dest.open()?, &cfg, &[row], &[])?,
                        Format::Json => write_json(dest.open()?, &cfg, "result", &row)?,
                    }
                }
            }
            Ok(true)
        }
        Command::Oracle {
            graph,
            n,
            random,
            seed,
            max_n,
            max_edges,
            cycle_cap,
        } => {
            if let Some(count) = random {
                let cfg = config(json!({
                    "random": count, "seed": seed, "max_n": max_n, "max_edges": max_edges,
                }));
                let rep = oracle_batch(*count, *seed, *max_n, *max_edges)?;
                let ok = rep.mismatches.is_empty();
                match fmt {
                    Format::Json => write_json(dest.open()?, &cfg, "report", &rep)?,
                    Format::Csv => write_csv(
                        dest.open()?,
                        &cfg,
                        &rep.mismatches,
                        &[format!("checked={}", rep.checked)],
                    )?,
                }
                return Ok(ok);
            }
            let path = graph.as_ref().context("--graph or --random is required")?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let g = parse_edge_list(&text, *n)?;
            let cfg = config(json!({
                "graph": path_label(path), "n": n, "cycle_cap": cycle_cap,
            }));
            let rep = graph_oracles(&g, *cycle_cap)?;
            let ok = rep.kappa_equals_tutte_berge != Some(false);
            match fmt {
                Format::Json => write_json(dest.open()?, &cfg, "report", &rep)?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        edges: usize,
                        kappa: Option<usize>,
                        tutte_berge: Option<usize>,
                        short_cycles: Option<u64>,
                        cycle_cap: usize,
                        cyclic_subsets: Option<u64>,
                    }
                    let row = Row {
                        n: rep.n,
                        edges: rep.edges,
                        kappa: rep.kappa,
                        tutte_berge: rep.tutte_berge.as_ref().map(|c| c.value),
                        short_cycles: rep.short_cycles,
                        cycle_cap: rep.cycle_cap,
                        cyclic_subsets: rep.cyclic_subsets,
                    };
                    write_csv(dest.open()?, &cfg, &[row], &[])?
                }
            }
            Ok(ok)
        }
        Command::Lowerbound { lo, hi, points } => {
            let hi = hi.unwrap_or(delta_star());
            let cfg = config(json!({"lo": lo, "hi": hi, "points": points}));
            let rows = delta_grid(*lo, hi, *points)?;
            let eps = eps_final();
            match fmt {
                Format::Csv => write_csv(
                    dest.open()?,
                    &cfg,
                    &rows,
                    &[format!("eps_final={eps:e}"), format!("xi={}", xi())],
                )?,
                Format::Json => write_json(
                    dest.open()?,
                    &cfg,
                    "result",
                    &json!({"rows": rows, "eps_final": eps, "xi": xi(), "delta_star": delta_star()}),
                )?,
            }
            Ok(true)
        }
    }
}

/// File name only, so the embedded config does not depend on where the
/// input lives.
fn path_label(p: &Path) -> String {
    p.file_name().map_or_else(
        || p.display().to_string(),
        |f| f.to_string_lossy().into_owned(),
    )
}

/// Parses arguments, runs the command in a pool of the requested size and
/// maps the outcome to an exit code: 0 success, 2 failed gate, 1 error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.common.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return 1;
        }
        pool = pool.num_threads(w);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("{}: acceptance gate failed", cli.command.name());
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
