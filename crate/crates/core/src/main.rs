//! Command-line front end: tabulates stopping values, cutoffs and limit
//! curves, runs seeded simulations, and exposes the verification suite.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stoplab::discrete::{finite_cutoff_rule, value_matrix};
use stoplab::error::{Error, Result};
use stoplab::limit::{
    cutoffs, h, inverse_time_change, prophet_continuous, prophet_discrete, u, v, w, CutoffTable,
};
use stoplab::lindley::{delta_rank_rule, evaluate_rank_rule, lindley_values};
use stoplab::moser::{moser_bounds, moser_values};
use stoplab::report::format_sig;
use stoplab::sim::{
    simulate_beta_stop_time, simulate_beta_value, simulate_cutoff, simulate_lindley,
    simulate_moser_discrete, SimEstimate,
};

#[derive(Parser)]
#[command(name = "stoplab", about = "Optimal stopping of uniform draws", version)]
struct Cli {
    /// Master seed for all simulation commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Significant digits in formatted numbers.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Stopping values V_n with their harmonic bounds.
    Values {
        /// Largest horizon to tabulate.
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Matrix of discrete stopping values, one row per support size.
    Matrix {
        /// Support sizes, e.g. "2..10".
        #[arg(long, default_value = "2..10", value_parser = parse_range)]
        support: (usize, usize),
        /// Horizons, e.g. "1..10".
        #[arg(long, default_value = "1..10", value_parser = parse_range)]
        n: (usize, usize),
    },
    /// Cutoff sequence delta_1..delta_k.
    Cutoffs {
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Certified absolute error per entry.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Limit curves on a grid of horizons.
    Curve {
        /// Comma-separated curves: u, v, w, h, prophet-continuous,
        /// prophet-discrete, w-lower, w-upper.
        #[arg(long, default_value = "u,v", value_delimiter = ',')]
        which: Vec<Curve>,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Seeded Monte Carlo estimate of a stopping strategy.
    Simulate(SimulateArgs),
    /// Expected-rank problem: optimal value and rule thresholds.
    Lindley {
        #[arg(long)]
        n: usize,
        /// Evaluate the cutoff discretisation instead of the optimal rule.
        #[arg(long)]
        delta_rule: bool,
    },
    /// Run the cross-validation suite (exit code 1 on any failure).
    Verify {
        /// Suite name: all, quick, or a single check group
        /// (moser, matrix, cutoffs, limits, ode, beta, cutoff-sim,
        /// lindley, sandwich, ks).
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Curve {
    U,
    V,
    W,
    H,
    ProphetContinuous,
    ProphetDiscrete,
    WLower,
    WUpper,
}

impl Curve {
    fn name(self) -> &'static str {
        match self {
            Curve::U => "u",
            Curve::V => "v",
            Curve::W => "w",
            Curve::H => "h",
            Curve::ProphetContinuous => "prophet_continuous",
            Curve::ProphetDiscrete => "prophet_discrete",
            Curve::WLower => "w_lower",
            Curve::WUpper => "w_upper",
        }
    }

    fn eval(self, t_horizon: f64, table: &CutoffTable) -> Result<f64> {
        match self {
            Curve::U => u(t_horizon, table),
            Curve::V => v(t_horizon),
            Curve::W => w(t_horizon, table),
            // Upper-bound value in forward time t = e^{-T}.
            Curve::H => h(inverse_time_change(t_horizon)?),
            Curve::ProphetContinuous => prophet_continuous(t_horizon),
            Curve::ProphetDiscrete => prophet_discrete(t_horizon),
            Curve::WLower => Ok(2.0 / (-(-t_horizon).exp_m1())),
            Curve::WUpper => {
                let half = (std::f64::consts::PI - t_horizon) / 2.0;
                if t_horizon >= std::f64::consts::PI {
                    return Err(Error::Domain(format!(
                        "tangent upper bound needs T < pi, got {t_horizon}"
                    )));
                }
                Ok(t_horizon.exp() * half.tan())
            }
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    strategy: Strategy,
    /// Horizon for the beta and cutoff strategies.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Threshold parameter of the beta strategy.
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Number of trials for the discrete and lindley strategies.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Support size for the discrete strategy.
    #[arg(long, default_value_t = 100)]
    support: usize,
    /// Charge the expected-rank loss instead of the box index.
    #[arg(long)]
    penalised: bool,
    /// Report the mean stopping time instead of the mean loss (beta only).
    #[arg(long)]
    stop_time: bool,
    #[arg(long, default_value_t = 1_000_000)]
    reps: u64,
}

#[derive(Copy, Clone, ValueEnum)]
enum Strategy {
    Beta,
    Cutoff,
    Discrete,
    Lindley,
}

/// Table of formatted values with a header, rendered as CSV or JSON.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let objects: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        self.header
                            .iter()
                            .zip(row)
                            .map(|(&k, cell)| {
                                let value = if let Ok(n) = cell.parse::<u64>() {
                                    serde_json::Value::Number(n.into())
                                } else {
                                    cell.parse::<f64>()
                                        .ok()
                                        .and_then(serde_json::Number::from_f64)
                                        .map(serde_json::Value::Number)
                                        .unwrap_or_else(|| serde_json::Value::String(cell.clone()))
                                };
                                (k.to_string(), value)
                            })
                            .collect::<serde_json::Map<_, _>>()
                            .into()
                    })
                    .collect();
                let mut out = serde_json::to_string_pretty(&objects).expect("serialise table");
                out.push('\n');
                out
            }
        }
    }
}

fn parse_range(text: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 2..10, got '{text}'"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn estimate_row(est: &SimEstimate, digits: usize) -> Vec<String> {
    vec![
        est.label.clone(),
        format_sig(est.mean, digits),
        format_sig(est.stderr, digits),
        est.n_samples.to_string(),
        est.seed.to_string(),
    ]
}

fn run(cli: &Cli) -> Result<Option<Table>> {
    let sig = |x: f64| format_sig(x, cli.digits);
    let table = match &cli.command {
        Command::Values { n_max } => {
            let seq = moser_values(*n_max)?;
            let rows = (1..=*n_max)
                .map(|n| {
                    let b = moser_bounds(n)?;
                    Ok(vec![
                        n.to_string(),
                        sig(seq.value(n)),
                        sig(b.lower),
                        sig(b.upper),
                    ])
                })
                .collect::<Result<_>>()?;
            Table {
                header: vec!["n", "value", "lower", "upper"],
                rows,
            }
        }
        Command::Matrix { support, n } => {
            let matrix = value_matrix(support.0..=support.1, n.0..=n.1)?;
            let rows = matrix
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().enumerate().map(move |(j, &value)| {
                        vec![
                            (support.0 + i).to_string(),
                            (n.0 + j).to_string(),
                            sig(value),
                        ]
                    })
                })
                .collect();
            Table {
                header: vec!["support", "n", "value"],
                rows,
            }
        }
        Command::Cutoffs { k, tol } => {
            let t = cutoffs(*k, *tol)?;
            let rows = (1..=*k)
                .map(|i| vec![i.to_string(), sig(t.delta(i))])
                .collect();
            Table {
                header: vec!["k", "delta"],
                rows,
            }
        }
        Command::Curve {
            which,
            t_min,
            t_max,
            step,
        } => {
            if !(*step > 0.0) || !(*t_min > 0.0) || t_max < t_min {
                return Err(Error::Domain(
                    "curve needs 0 < t-min <= t-max and step > 0".into(),
                ));
            }
            // Deep enough for every u/w evaluation down to t_min.
            let depth = (4.0 / t_min).ceil() as usize + 8;
            let table = cutoffs(depth, 1e-10)?;
            let mut rows = Vec::new();
            let steps = ((t_max - t_min) / step).round() as usize;
            for i in 0..=steps {
                let t_horizon = t_min + i as f64 * step;
                if t_horizon > t_max + 1e-12 {
                    break;
                }
                let mut row = vec![sig(t_horizon)];
                for curve in which {
                    row.push(sig(curve.eval(t_horizon, &table)?));
                }
                rows.push(row);
            }
            let mut header = vec!["T"];
            header.extend(which.iter().map(|c| c.name()));
            Table { header, rows }
        }
        Command::Simulate(args) => {
            let est = match args.strategy {
                Strategy::Beta => {
                    if args.stop_time {
                        simulate_beta_stop_time(args.b, args.t, args.reps, cli.seed)?
                    } else {
                        simulate_beta_value(args.b, args.t, args.reps, cli.seed)?
                    }
                }
                Strategy::Cutoff => {
                    let depth = (4.0 / args.t).ceil() as usize + 8;
                    let table = cutoffs(depth.max(64), 1e-10)?;
                    simulate_cutoff(&table, args.t, args.penalised, args.reps, cli.seed)?
                }
                Strategy::Discrete => {
                    let rule = finite_cutoff_rule(args.n, args.support)?;
                    simulate_moser_discrete(&rule, args.reps, cli.seed)
                }
                Strategy::Lindley => {
                    let rule = lindley_values(args.n)?.optimal_rule();
                    simulate_lindley(&rule, args.reps, cli.seed)
                }
            };
            Table {
                header: vec!["label", "mean", "stderr", "n_samples", "seed"],
                rows: vec![estimate_row(&est, cli.digits)],
            }
        }
        Command::Lindley { n, delta_rule } => {
            let dp = lindley_values(*n)?;
            let (rule, value) = if *delta_rule {
                let table = cutoffs((4 * n).max(64), 1e-10)?;
                let rule = delta_rank_rule(*n, &table)?;
                let value = evaluate_rank_rule(&rule);
                (rule, value)
            } else {
                (dp.optimal_rule(), dp.optimal)
            };
            let rows = rule
                .accept_from
                .iter()
                .enumerate()
                .map(|(r, &step)| {
                    vec![
                        (r + 1).to_string(),
                        step.to_string(),
                        sig(value),
                        sig(dp.optimal),
                    ]
                })
                .collect();
            Table {
                header: vec!["rank", "accept_from_step", "rule_value", "optimal_value"],
                rows,
            }
        }
        Command::Verify { suite } => {
            let checks = stoplab::verify::run_suite(suite, cli.seed)?;
            for check in &checks {
                println!("{}", check.line());
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(Error::Domain(format!("{failed} check(s) failed")));
            }
            println!("all {} checks passed", checks.len());
            return Ok(None);
        }
    };
    Ok(Some(table))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(table)) => {
            let rendered = table.render(cli.format);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::FAILURE;
                    }
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    if stdout.write_all(rendered.as_bytes()).is_err() {
                        return ExitCode::FAILURE;
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
