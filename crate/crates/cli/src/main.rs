//! `spreadlab` command-line front end.

mod output;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spreadlab::bounds::BoundsRow;
use spreadlab::oracle::DEFAULT_BUDGET;
use spreadlab::sim::{FailureModel, SimConfig};
use spreadlab::*;

use output::{Format, Sink};

#[derive(Parser)]
#[command(
    name = "spreadlab",
    version,
    about = "Low-spread index assignments for multiple-description quantizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed for commands that draw random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an arrangement and write it as JSON.
    Build(Source),
    /// Largest l-slice spread of an arrangement.
    Spread {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// Include every slice's spread.
        #[arg(long)]
        per_slice: bool,
    },
    /// Lower and upper bounds for a cube.
    Bounds {
        #[arg(long)]
        shape: Shape,
    },
    /// Exact optimum by exhaustive search.
    Oracle {
        #[arg(long)]
        shape: Shape,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        /// Only accept arrangements with spread at most this.
        #[arg(long)]
        prune_bound: Option<u64>,
        #[arg(long, env = "SPREADLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Monte Carlo run of the channel system.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Per-channel failure probability.
        #[arg(long, conflicts_with_all = ["fail", "single"])]
        p: Option<f64>,
        /// Fixed failure mask; bit i fails channel i+1.
        #[arg(long, conflicts_with = "single")]
        fail: Option<u32>,
        /// Fail exactly one channel per trial, chosen uniformly.
        #[arg(long)]
        single: bool,
    },
    /// Print a 2-D arrangement as a grid.
    Render {
        #[command(flatten)]
        source: Source,
        /// Also write x,y,value rows here.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Bound comparison over a grid of cubes.
    Table {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 9)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Fill `oracle_opt` where the monotone search fits the budget.
        #[arg(long)]
        oracle: bool,
        #[arg(long, env = "SPREADLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

/// An arrangement read from a file or built from flags.
#[derive(Args)]
struct Source {
    /// JSON arrangement file, `-` for stdin.
    #[arg(long, conflicts_with_all = ["shape", "method", "m"])]
    arrangement: Option<PathBuf>,
    #[arg(long)]
    shape: Option<Shape>,
    #[arg(long, value_enum, default_value_t = Method::Herringbone)]
    method: Method,
    /// Number of values; defaults to every cell.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Herringbone,
    Merge,
    Diagonal,
    Blocked,
    Rowmajor,
    Replicate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Monotone,
}

enum Failure {
    Validation(String),
    Budget { estimate: u128, budget: u64 },
    Internal(String),
}

impl From<spreadlab::Error> for Failure {
    fn from(e: spreadlab::Error) -> Self {
        use spreadlab::Error::*;
        match e {
            BudgetExceeded { estimate, budget } => Failure::Budget { estimate, budget },
            InvariantViolation(_) => Failure::Internal(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("I/O: {e}"))
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn invalid<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Validation(msg.into()))
}

impl Source {
    fn load(&self) -> Outcome<Arrangement> {
        if let Some(path) = &self.arrangement {
            let mut text = String::new();
            if path.as_os_str() == "-" {
                std::io::stdin().read_to_string(&mut text)?;
            } else {
                text = fs::read_to_string(path)?;
            }
            return Ok(Arrangement::from_json(&text)?);
        }
        let Some(shape) = self.shape.clone() else {
            return invalid("give --arrangement or --shape");
        };
        let cells = shape.cell_count();
        let m = self.m.unwrap_or(cells);
        let side = || match shape.cube_side() {
            Some(n) => Ok((n, shape.k())),
            None => invalid(format!("this method needs a cube, got {shape}")),
        };
        let full_only = |a: Arrangement| {
            if m == cells {
                Ok(a)
            } else {
                invalid("--m applies only to the diagonal and blocked methods")
            }
        };
        match self.method {
            Method::Herringbone => full_only(herringbone_recursive(&HerringboneSpec::minima(
                shape.clone(),
            ))?),
            Method::Merge => {
                let (n, k) = side()?;
                full_only(herringbone_merge(n, k)?)
            }
            Method::Rowmajor => full_only(Arrangement::row_major(shape.clone())),
            Method::Replicate => {
                let (n, k) = side()?;
                if self.m.is_some_and(|m| m != n) {
                    return invalid(format!("replication places exactly {n} values"));
                }
                Ok(Arrangement::replicate(n, k)?)
            }
            Method::Diagonal => {
                let (n, k) = side()?;
                Ok(diagonal_in_cube(n, k, m)?)
            }
            Method::Blocked => {
                let (n, k) = side()?;
                Ok(blocked_diagonal(n, k, m)?)
            }
        }
    }
}

#[derive(Serialize)]
struct OracleOutput {
    optimal_spread: u64,
    nodes: u64,
    estimate: String,
    witness: serde_json::Value,
}

fn run(cli: Cli) -> Outcome {
    let sink = Sink::new(cli.out.clone());
    match cli.command {
        Command::Build(source) => {
            let a = source.load()?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => sink.write(&a.to_json_pretty()),
                Format::Csv => sink.write(&output::cells_csv(&a)?),
                Format::Text => sink.write(&output::grid(&a)?),
            }
        }
        Command::Spread {
            source,
            l,
            per_slice,
        } => {
            let a = source.load()?;
            let format = cli.format.unwrap_or(Format::Json);
            let want_slices = per_slice || format == Format::Csv;
            let r = max_spread_with(&a, l, Exec::default(), want_slices)?;
            match format {
                Format::Json => sink.json(&r),
                Format::Csv => {
                    let rows = r.per_slice.unwrap_or_default();
                    let rows: Vec<(String, u64)> = rows
                        .into_iter()
                        .map(|s| (s.slice.to_string(), s.spread))
                        .collect();
                    sink.csv(&["slice", "spread"], rows)
                }
                Format::Text => {
                    let witness = r.witness.map_or("none".into(), |w| w.to_string());
                    let mut text = format!(
                        "max spread {} over {l}-slices, witness {witness}\n",
                        r.max_spread
                    );
                    for s in r.per_slice.unwrap_or_default() {
                        text.push_str(&format!("{} {}\n", s.slice, s.spread));
                    }
                    sink.write(&text)
                }
            }
        }
        Command::Bounds { shape } => {
            let Some(n) = shape.cube_side() else {
                return invalid(format!("bounds need a cube, got {shape}"));
            };
            let report = BoundsReport::compute(n, shape.k())?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => sink.json(&report),
                Format::Csv => sink.bounds_csv(&report.rows()),
                Format::Text => sink.write(&output::bounds_text(&report.rows())),
            }
        }
        Command::Oracle {
            shape,
            m,
            l,
            mode,
            prune_bound,
            budget,
        } => {
            let mut cfg = SearchConfig::new(shape)
                .l(l)
                .budget(budget)
                .mode(match mode {
                    Mode::Full => SearchMode::Full,
                    Mode::Monotone => SearchMode::Monotone,
                });
            if let Some(m) = m {
                cfg = cfg.m(m);
            }
            if let Some(b) = prune_bound {
                cfg = cfg.prune_bound(b);
            }
            let r = brute_force_optimal(&cfg)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let witness = serde_json::from_str(&r.witness.to_json())
                        .map_err(|e| Failure::Internal(e.to_string()))?;
                    sink.json(&OracleOutput {
                        optimal_spread: r.optimal_spread,
                        nodes: r.nodes,
                        estimate: r.estimate.to_string(),
                        witness,
                    })
                }
                Format::Text => {
                    let mut text =
                        format!("optimal spread {} ({} nodes)\n", r.optimal_spread, r.nodes);
                    if r.witness.shape().k() == 2 {
                        text.push_str(&output::grid(&r.witness)?);
                    }
                    sink.write(&text)
                }
                Format::Csv => invalid("oracle output is json or text"),
            }
        }
        Command::Simulate {
            source,
            trials,
            p,
            fail,
            single,
        } => {
            let sys = ChannelSystem::new(source.load()?)?;
            let model = match (p, fail, single) {
                (Some(p), _, _) => FailureModel::Bernoulli { p },
                (_, Some(mask), _) => FailureModel::Forced { mask },
                (_, _, true) => FailureModel::ForcedSingle,
                _ => return invalid("give one of --p, --fail, --single"),
            };
            let report = simulate(&sys, &SimConfig::new(model, trials, cli.seed))?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => sink.json(&report),
                Format::Csv => {
                    let rows: Vec<_> = report
                        .empirical
                        .per_pattern
                        .iter()
                        .map(|s| {
                            (
                                s.pattern,
                                report.d[s.pattern as usize],
                                s.trials,
                                s.mean,
                                s.max,
                                s.max_width,
                            )
                        })
                        .collect();
                    sink.csv(
                        &[
                            "pattern",
                            "D",
                            "trials",
                            "mean_error",
                            "max_error",
                            "max_width",
                        ],
                        rows,
                    )
                }
                Format::Text => sink.write(&output::sim_text(&report)),
            }
        }
        Command::Render { source, plot_data } => {
            let a = source.load()?;
            if !matches!(cli.format, None | Some(Format::Text)) {
                return invalid("render prints text; use --plot-data for numbers");
            }
            if a.shape().k() != 2 {
                return invalid(format!("render needs a 2-D arrangement, got {}", a.shape()));
            }
            if let Some(path) = plot_data {
                Sink::new(Some(path)).csv(&["x", "y", "value"], output::plot_rows(&a))?;
            }
            if output::fits_grid(&a) {
                sink.write(&output::grid(&a)?)
            } else {
                eprintln!("{} exceeds the 40x40 grid limit; plot data only", a.shape());
                if cli.out.is_some() {
                    sink.csv(&["x", "y", "value"], output::plot_rows(&a))
                } else {
                    Ok(())
                }
            }
        }
        Command::Table {
            n_min,
            n_max,
            k_min,
            k_max,
            oracle,
            budget,
        } => {
            if n_min == 0 || k_min == 0 || n_min > n_max || k_min > k_max {
                return invalid("empty or invalid n/k range");
            }
            let mut rows: Vec<BoundsRow> = Vec::new();
            for n in n_min..=n_max {
                for k in k_min..=k_max {
                    for mut row in BoundsReport::compute(n, k)?.rows() {
                        if oracle {
                            row.oracle_opt = oracle_opt(n, k, row.l, budget)?;
                        }
                        rows.push(row);
                    }
                }
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => sink.bounds_csv(&rows),
                Format::Json => sink.json(&rows),
                Format::Text => sink.write(&output::bounds_text(&rows)),
            }
        }
    }
}

/// Monotone optimum when it fits the budget, else `None`.
fn oracle_opt(n: usize, k: usize, l: usize, budget: u64) -> Outcome<Option<u64>> {
    let cfg = SearchConfig::new(Shape::cube(n, k)?)
        .l(l)
        .mode(SearchMode::Monotone)
        .budget(budget);
    match brute_force_optimal(&cfg) {
        Ok(r) => Ok(Some(r.optimal_spread)),
        Err(spreadlab::Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.kind().to_string();
            let detail = e.to_string();
            let detail = detail
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!(
                "{}",
                serde_json::json!({"error": "validation", "message": message, "detail": detail})
            );
            return ExitCode::from(2);
        }
    };
    let Err(failure) = run(cli) else {
        return ExitCode::SUCCESS;
    };
    let (code, body) = match failure {
        Failure::Validation(message) => (
            2,
            serde_json::json!({"error": "validation", "message": message}),
        ),
        Failure::Budget { estimate, budget } => (
            3,
            serde_json::json!({
                "error": "budget",
                "message": format!("estimated {estimate} search nodes exceeds the budget of {budget}"),
                "estimate": estimate.to_string(),
                "budget": budget,
            }),
        ),
        Failure::Internal(message) => (
            1,
            serde_json::json!({"error": "internal", "message": message}),
        ),
    };
    eprintln!("{body}");
    ExitCode::from(code)
}
