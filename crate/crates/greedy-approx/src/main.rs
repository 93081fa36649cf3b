//! Command-line front end: run the greedy algorithm on one vector, estimate
//! the constant catalog, execute the property suites, or plot the
//! democracy-ratio growth curve. All outputs embed the invocation and seed,
//! and identical flags produce byte-identical files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use greedy_approx::constants::estimate_catalog;
use greedy_approx::error::{Error, Result};
use greedy_approx::exec::default_parallelism;
use greedy_approx::oracles::{
    sigma_bar_omega, sigma_m, sigma_omega, sigma_tilde_m, sigma_tilde_omega, OracleResult,
};
use greedy_approx::report::{csv_document, fmt_float, json_document, svg_chart, Series};
use greedy_approx::spaces::NormSpace;
use greedy_approx::sparse::{Index, IndexSet, SparseVector};
use greedy_approx::tga::{chebyshev_sum, greedy_sets, ChebyshevResult, TieMode};
use greedy_approx::theorems::{run_all, run_suite, SuiteConfig, SuiteReport, SuiteStatus};
use greedy_approx::weights::SetWeight;

#[derive(Parser)]
#[command(
    name = "greedy-approx",
    version,
    about = "Weighted thresholding-greedy approximation laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run greedy and Chebyshev-greedy approximation on one vector and
    /// report every error functional with its witness.
    TgaRun {
        /// Space name: l1, l2, linf, lp:<p>, m3, summing.
        #[arg(long)]
        space: String,
        /// Weight selector: card, seq:geom:<r>, seq:const:<c>,
        /// seq:list:<file>, norm:<space>.
        #[arg(long, default_value = "card")]
        weight: String,
        /// Vector JSON: {"entries": [["index", coefficient], ...]}.
        #[arg(long)]
        input: PathBuf,
        /// Approximation rank.
        #[arg(long)]
        m: usize,
        /// Enumerate every greedy set at rank m instead of one canonical one.
        #[arg(long)]
        all_greedy_sets: bool,
        /// Directory for report files; stdout always gets the JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the constant catalog on a seeded family.
    Constants {
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "card")]
        weight: String,
        /// Pool size for the dense family and exponent range for the
        /// power-block pairs.
        #[arg(long, default_value_t = 8)]
        dim: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        family_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one property suite, or all of them.
    Check {
        /// Suite id or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "card")]
        weight: String,
        #[arg(long, default_value_t = 8)]
        dim: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot the two-class norm's democracy ratio r(N) against the
    /// √N/ln N reference curve.
    PlotDemocracy {
        #[arg(long)]
        n_max: u32,
        /// SVG output path; a CSV table lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
}

fn invocation() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("greedy-approx {}", args.join(" "))
}

fn write_out(dir: &Path, name: &str, bytes: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), bytes)?;
    Ok(())
}

#[derive(Serialize)]
struct TgaBranch {
    greedy_set: IndexSet,
    greedy_sum: SparseVector,
    greedy_residual_norm: f64,
    chebyshev: ChebyshevResult,
    sigma_m: OracleResult,
    sigma_tilde_m: OracleResult,
    sigma_omega: OracleResult,
    sigma_tilde_omega: OracleResult,
    sigma_bar_omega: OracleResult,
}

#[derive(Serialize)]
struct TgaReport {
    space: String,
    weight: String,
    m: usize,
    norm: f64,
    branches: Vec<TgaBranch>,
}

fn cmd_tga_run(
    space: &str,
    weight: &str,
    input: &Path,
    m: usize,
    all_greedy_sets: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let space = NormSpace::by_name(space)?;
    let weight = SetWeight::by_selector(weight)?;
    let raw = std::fs::read_to_string(input)?;
    let x: SparseVector = serde_json::from_str(&raw)?;
    if m > x.support_len() {
        return Err(Error::RankExceedsUniverse {
            m,
            universe: x.support_len(),
        });
    }
    let par = default_parallelism();
    let mode = if all_greedy_sets {
        TieMode::All
    } else {
        TieMode::OneDeterministic
    };
    let k_max = x
        .max_support_index()
        .and_then(Index::to_u64)
        .unwrap_or(0)
        .max(1);
    let mut branches = Vec::new();
    for sel in greedy_sets(&x, m, mode, None)? {
        let projected = x.project(&sel.set);
        let residual = space.evaluate(&x.sub(&projected));
        branches.push(TgaBranch {
            greedy_sum: projected,
            greedy_residual_norm: residual,
            chebyshev: chebyshev_sum(&space, &x, &sel.set, 1e-9)?,
            sigma_m: sigma_m(&space, &x, m, None, par)?,
            sigma_tilde_m: sigma_tilde_m(&space, &x, m, None, par)?,
            sigma_omega: sigma_omega(&space, &weight, &x, &sel.set, None, par)?,
            sigma_tilde_omega: sigma_tilde_omega(&space, &weight, &x, &sel.set, None, par)?,
            sigma_bar_omega: sigma_bar_omega(&space, &weight, &x, &sel.set, k_max)?,
            greedy_set: sel.set,
        });
    }
    let report = TgaReport {
        space: space.name().to_string(),
        weight: weight.describe(),
        m,
        norm: space.evaluate(&x),
        branches,
    };
    let doc = json_document(&invocation(), 0, &report)?;
    print!("{doc}");
    if let Some(dir) = out {
        write_out(dir, "tga-run.json", &doc)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_constants(
    space: &str,
    weight: &str,
    dim: u64,
    seed: u64,
    family_size: usize,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let space = NormSpace::by_name(space)?;
    let weight = SetWeight::by_selector(weight)?;
    let estimates = estimate_catalog(
        &space,
        &weight,
        dim,
        family_size,
        seed,
        default_parallelism(),
    )?;
    let doc = json_document(&invocation(), seed, &estimates)?;
    print!("{doc}");
    if let Some(dir) = out {
        write_out(dir, "constants.json", &doc)?;
        let rows: Vec<Vec<String>> = estimates
            .iter()
            .map(|e| {
                vec![
                    e.name.clone(),
                    fmt_float(e.lower_bound),
                    e.certified.map(fmt_float).unwrap_or_default(),
                    e.family.clone(),
                ]
            })
            .collect();
        let csv = csv_document(
            &invocation(),
            seed,
            &["constant", "lower_bound", "certified", "family"],
            &rows,
        );
        write_out(dir, "constants.csv", &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// The r(N) table a counterexample report carries, as chartable points.
fn growth_points(report: &SuiteReport) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for (name, value) in &report.constants_used {
        if let Some(raw) = name.strip_prefix("r(").and_then(|s| s.strip_suffix(')')) {
            if let Ok(n) = raw.parse::<f64>() {
                pts.push((n, *value));
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

fn cmd_check(
    suite: &str,
    space: &str,
    weight: &str,
    dim: u64,
    seed: u64,
    tol: f64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let space = NormSpace::by_name(space)?;
    let weight = SetWeight::by_selector(weight)?;
    let mut cfg = SuiteConfig::new(space, weight);
    cfg.dim = dim;
    cfg.seed = seed;
    cfg.tol = tol;
    let reports = if suite == "all" {
        run_all(&cfg)?
    } else {
        vec![run_suite(suite, &cfg)?]
    };
    for r in &reports {
        let verdict = match r.status {
            SuiteStatus::Passed => "pass",
            SuiteStatus::Skipped => "skip",
            SuiteStatus::ViolationsFound => "FAIL",
        };
        eprintln!(
            "{verdict} {} ({} instances, {} violations, control fired: {})",
            r.theorem,
            r.instances,
            r.violations.len(),
            r.negative_control_fired
        );
    }
    let doc = json_document(&invocation(), seed, &reports)?;
    print!("{doc}");
    if let Some(dir) = out {
        write_out(dir, "check.json", &doc)?;
        for r in &reports {
            let pts = growth_points(r);
            if r.theorem == "m3-counterexample" && !pts.is_empty() {
                let rows: Vec<Vec<String>> = pts
                    .iter()
                    .map(|(n, v)| vec![fmt_float(*n), fmt_float(*v)])
                    .collect();
                let csv = csv_document(&invocation(), seed, &["n", "ratio"], &rows);
                write_out(dir, "counterexample-growth.csv", &csv)?;
                let series = Series {
                    label: "r(N)",
                    points: &pts,
                    color: "#1f77b4",
                    dashed: false,
                };
                let svg = svg_chart(
                    &invocation(),
                    seed,
                    "democracy ratio growth",
                    "N",
                    "ratio",
                    &[series],
                );
                write_out(dir, "counterexample-growth.svg", &svg)?;
            }
        }
    }
    if reports.iter().all(SuiteReport::passed) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_plot_democracy(n_max: u32, out: &Path) -> Result<ExitCode> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "n-max must be at least 2, got {n_max}"
        )));
    }
    let space = NormSpace::split_lorentz();
    let mut points = Vec::new();
    let mut reference = Vec::new();
    for n in 2..=n_max {
        let dyadic: IndexSet = (1..=n).map(Index::pow2).collect();
        let triadic: IndexSet = (1..=n).map(Index::pow3).collect();
        let r = space.evaluate(&SparseVector::indicator(&dyadic))
            / space.evaluate(&SparseVector::indicator(&triadic));
        points.push((n as f64, r));
        reference.push((n as f64, (n as f64).sqrt() / (n as f64).ln()));
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&reference)
        .map(|((n, r), (_, f))| vec![format!("{n}"), fmt_float(*r), fmt_float(*f)])
        .collect();
    let csv = csv_document(&invocation(), 0, &["n", "ratio", "sqrt_over_log"], &rows);
    let chart = svg_chart(
        &invocation(),
        0,
        "democracy ratio growth",
        "N",
        "ratio",
        &[
            Series {
                label: "r(N)",
                points: &points,
                color: "#1f77b4",
                dashed: false,
            },
            Series {
                label: "sqrt(N)/ln(N)",
                points: &reference,
                color: "#d62728",
                dashed: true,
            },
        ],
    );
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(out, &chart)?;
    std::fs::write(out.with_extension("csv"), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::TgaRun {
            space,
            weight,
            input,
            m,
            all_greedy_sets,
            out,
        } => cmd_tga_run(space, weight, input, *m, *all_greedy_sets, out.as_deref()),
        Cmd::Constants {
            space,
            weight,
            dim,
            seed,
            family_size,
            out,
        } => cmd_constants(space, weight, *dim, *seed, *family_size, out.as_deref()),
        Cmd::Check {
            suite,
            space,
            weight,
            dim,
            seed,
            tol,
            out,
        } => cmd_check(suite, space, weight, *dim, *seed, *tol, out.as_deref()),
        Cmd::PlotDemocracy { n_max, out } => cmd_plot_democracy(*n_max, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
