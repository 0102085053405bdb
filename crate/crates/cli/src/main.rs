use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ghostmg_core::bench::{
    emit_residual_history, render_markdown, run_experiment_with_report, run_smoother_comparison,
    run_table, write_csv, CycleKind, DomainSpec, ExperimentArgs, TableId,
};
use ghostmg_core::smoothers::SmootherKind;

/// Convergence-factor harness for the ghost-point multigrid solver.
#[derive(Parser, Debug)]
#[command(name = "ghostmg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measure the convergence factor of one configuration.
    Run(RunArgs),
    /// Measure every cell of a named table.
    Table {
        /// badrho, rhoC, rhoE, rhoSF3-left, rhoSF3-right or 1d.
        #[arg(long)]
        id: TableId,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the markdown rendering here.
        #[arg(long)]
        markdown: Option<PathBuf>,
    },
    /// Smoothing and convergence factors of the three smoothers on the circle.
    CompareSmoothers {
        #[arg(long = "N", default_value_t = 64)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8")]
        lambdas: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value = "circle")]
    domain: DomainSpec,
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
    #[arg(long = "Nc", default_value_t = 8)]
    n_c: usize,
    #[arg(long, default_value_t = 1)]
    nu1: usize,
    #[arg(long, default_value_t = 1)]
    nu2: usize,
    #[arg(long, default_value_t = 5)]
    lambda: usize,
    /// Band half-width in units of h.
    #[arg(long, default_value_t = 3.0)]
    delta: f64,
    #[arg(long, default_value = "w")]
    cycle: CycleKind,
    #[arg(long, default_value = "gslex")]
    smoother: SmootherKind,
    /// Left end of the interval domain.
    #[arg(long, default_value_t = -0.743, allow_hyphen_values = true)]
    a: f64,
    /// Right end of the interval domain.
    #[arg(long, default_value_t = 0.843, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-cycle defect norms here.
    #[arg(long)]
    history: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(r) => {
            let args = ExperimentArgs {
                domain: r.domain,
                n: r.n,
                n_c: r.n_c,
                nu1: r.nu1,
                nu2: r.nu2,
                lambda: r.lambda,
                delta: r.delta,
                cycle: r.cycle,
                smoother: r.smoother,
                interval: (r.a, r.b),
                max_iters: r.max_iters,
                ..ExperimentArgs::default()
            };
            let (row, report) = run_experiment_with_report(&args);
            write_csv(&[row], sink(r.out.as_deref())?)?;
            if let (Some(path), Some(rep)) = (r.history, report) {
                emit_residual_history(&rep, sink(Some(&path))?)?;
            }
        }
        Command::Table { id, out, markdown } => {
            let rows = run_table(id);
            write_csv(&rows, sink(out.as_deref())?)?;
            if let Some(path) = markdown {
                sink(Some(&path))?.write_all(render_markdown(&rows).as_bytes())?;
            }
        }
        Command::CompareSmoothers { n, lambdas, out } => {
            let cmp = run_smoother_comparison(n, &lambdas)?;
            write_csv(&cmp.rows(), sink(out.as_deref())?)?;
        }
    }
    Ok(())
}
