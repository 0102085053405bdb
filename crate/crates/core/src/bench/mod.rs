//! Experiment harness: named domains, single measurements, the convergence
//! tables, the smoother comparison and CSV output.

pub mod domains;
pub mod reference;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cycles::{
    build_hierarchy, default_initial_guess, solve_homogeneous, CycleConfig, CycleMode, Hierarchy,
    SolveReport,
};
use crate::discretization::ProblemData;
use crate::error::{Error, Result};
use crate::geometry::BoundarySplit;
use crate::smoothers::{smoothing_factor_series, LevelSmoother, SmootherConfig, SmootherKind};
use crate::solver1d::{default_guess_1d, solve_1d, Hierarchy1D, BENCH_INTERVAL};
use crate::transfer::ExtensionConfig;

pub use domains::DomainSpec;
use reference::ReferenceCell;

/// Absolute deviation from the reference value above which a cell is flagged.
pub const FLAG_THRESHOLD: f64 = 0.05;

/// Cycle family as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Tgcs,
    V,
    W,
}

impl CycleKind {
    pub fn mode(self) -> CycleMode {
        match self {
            CycleKind::Tgcs => CycleMode::Tgcs,
            CycleKind::V => CycleMode::V,
            CycleKind::W => CycleMode::W,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CycleKind::Tgcs => "tgcs",
            CycleKind::V => "v",
            CycleKind::W => "w",
        }
    }
}

impl fmt::Display for CycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tgcs" => Ok(CycleKind::Tgcs),
            "v" => Ok(CycleKind::V),
            "w" => Ok(CycleKind::W),
            other => Err(Error::InvalidArgument(format!("unknown cycle '{other}'"))),
        }
    }
}

/// Parameters of one convergence-factor measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentArgs {
    pub domain: DomainSpec,
    pub n: usize,
    pub n_c: usize,
    pub nu1: usize,
    pub nu2: usize,
    pub lambda: usize,
    /// Band half-width in units of `h`.
    pub delta: f64,
    pub cycle: CycleKind,
    pub smoother: SmootherKind,
    /// End points for the interval domain.
    pub interval: (f64, f64),
    /// Relative tolerance of the stopping rule on successive factors.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ExperimentArgs {
    fn default() -> Self {
        Self {
            domain: DomainSpec::Circle,
            n: 64,
            n_c: 8,
            nu1: 1,
            nu2: 1,
            lambda: 5,
            delta: 3.0,
            cycle: CycleKind::W,
            smoother: SmootherKind::GsLex,
            interval: BENCH_INTERVAL,
            tol: 1e-3,
            max_iters: 100,
        }
    }
}

impl ExperimentArgs {
    /// A W-cycle run with `lambda = 5`, `delta = 3h` and the total `nu` split
    /// as `(ceil(nu/2), floor(nu/2))`.
    pub fn standard(domain: DomainSpec, n: usize, n_c: usize, nu: usize) -> Self {
        Self {
            domain,
            n,
            n_c,
            ..Self::default()
        }
        .with_nu(nu)
    }

    pub fn with_nu(mut self, nu: usize) -> Self {
        self.nu1 = nu.div_ceil(2);
        self.nu2 = nu / 2;
        self
    }

    pub fn cycle_config(&self) -> Result<CycleConfig> {
        CycleConfig::new(self.nu1, self.nu2, self.cycle.mode())
    }

    pub fn smoother_config(&self) -> SmootherConfig {
        SmootherConfig::default()
            .with_kind(self.smoother)
            .with_lambda(self.lambda)
            .with_delta(self.delta)
    }

    /// Builds the 2D hierarchy for this run.
    pub fn hierarchy(&self) -> Result<Hierarchy> {
        let phi = self.domain.level_set_for(self.n, self.n_c)?;
        build_hierarchy(
            &phi,
            BoundarySplit::DirichletLeft,
            self.n_c,
            self.smoother_config(),
            ExtensionConfig::default(),
        )
    }
}

/// One measured row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub domain: DomainSpec,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_c")]
    pub n_c: usize,
    pub nu1: usize,
    pub nu2: usize,
    pub lambda: usize,
    pub delta_over_h: f64,
    pub cycle: CycleKind,
    pub smoother: SmootherKind,
    pub rho: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub wall_ms: f64,
    /// Error message when the run could not be carried out.
    pub note: String,
}

impl ExperimentRow {
    fn new(args: &ExperimentArgs, outcome: &Result<SolveReport>) -> Self {
        let mut row = Self {
            domain: args.domain,
            n: args.n,
            n_c: args.n_c,
            nu1: args.nu1,
            nu2: args.nu2,
            lambda: args.lambda,
            delta_over_h: args.delta,
            cycle: args.cycle,
            smoother: args.smoother,
            rho: None,
            converged: false,
            iterations: 0,
            wall_ms: 0.0,
            note: String::new(),
        };
        match outcome {
            Ok(rep) => {
                row.rho = (!rep.rho_series.is_empty()).then_some(rep.rho);
                row.converged = rep.converged;
                row.iterations = rep.iterations;
                row.wall_ms = rep.wall_ms;
            }
            Err(e) => row.note = e.to_string(),
        }
        row
    }
}

/// Runs one measurement and keeps the full report.
pub fn measure(args: &ExperimentArgs) -> Result<SolveReport> {
    let cfg = args.cycle_config()?;
    if args.domain == DomainSpec::Interval {
        let (a, b) = args.interval;
        let hier = Hierarchy1D::new(a, b, args.n, args.n_c)?;
        let u0 = default_guess_1d(&hier.levels()[0]);
        return solve_1d(&hier, &cfg, &u0, args.tol, args.max_iters);
    }
    let hier = args.hierarchy()?;
    let u0 = default_initial_guess(hier.finest());
    solve_homogeneous(&hier, &cfg, &u0, args.tol, args.max_iters)
}

/// Runs one measurement. Failures become a non-converged row with a note.
pub fn run_experiment(args: &ExperimentArgs) -> ExperimentRow {
    ExperimentRow::new(args, &measure(args))
}

/// Like [`run_experiment`], also returning the report when there is one.
pub fn run_experiment_with_report(args: &ExperimentArgs) -> (ExperimentRow, Option<SolveReport>) {
    let outcome = measure(args);
    (ExperimentRow::new(args, &outcome), outcome.ok())
}

/// The reproducible tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableId {
    BadRho,
    RhoC,
    RhoE,
    RhoSf3Left,
    RhoSf3Right,
    OneD,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::BadRho,
        TableId::RhoC,
        TableId::RhoE,
        TableId::RhoSf3Left,
        TableId::RhoSf3Right,
        TableId::OneD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::BadRho => "badrho",
            TableId::RhoC => "rhoC",
            TableId::RhoE => "rhoE",
            TableId::RhoSf3Left => "rhoSF3-left",
            TableId::RhoSf3Right => "rhoSF3-right",
            TableId::OneD => "1d",
        }
    }

    /// Every cell of the table with its reference value.
    pub fn cells(self) -> Vec<TableCell> {
        let grid = |domain, nu, refs: &[ReferenceCell]| {
            refs.iter()
                .map(move |c| TableCell {
                    args: ExperimentArgs::standard(domain, c.n, c.n_c, nu),
                    reference: c.rho,
                })
                .collect::<Vec<_>>()
        };
        match self {
            TableId::BadRho => {
                let mut out = Vec::new();
                for ((nu1, nu2), table) in [
                    ((1, 1), reference::BADRHO_11),
                    ((2, 1), reference::BADRHO_21),
                ] {
                    for (n, values) in table {
                        for (cycle, value) in [CycleKind::Tgcs, CycleKind::V, CycleKind::W]
                            .into_iter()
                            .zip(values)
                        {
                            let n_c = if cycle == CycleKind::Tgcs { n / 2 } else { 8 };
                            out.push(TableCell {
                                args: ExperimentArgs {
                                    n,
                                    n_c,
                                    nu1,
                                    nu2,
                                    lambda: 0,
                                    cycle,
                                    ..ExperimentArgs::default()
                                },
                                reference: Some(value),
                            });
                        }
                    }
                }
                out
            }
            TableId::RhoC => [
                grid(DomainSpec::Circle, 2, reference::CIRCLE_NU2),
                grid(DomainSpec::Circle, 3, reference::CIRCLE_NU3),
            ]
            .concat(),
            TableId::RhoE => [
                grid(DomainSpec::Ellipse, 2, reference::ELLIPSE_NU2),
                grid(DomainSpec::Ellipse, 3, reference::ELLIPSE_NU3),
            ]
            .concat(),
            TableId::RhoSf3Left => grid(DomainSpec::Saddle, 3, reference::SADDLE_NU3),
            TableId::RhoSf3Right => grid(DomainSpec::Flower, 3, reference::FLOWER_NU3),
            TableId::OneD => reference::ONE_D
                .into_iter()
                .map(|(nu, value)| TableCell {
                    args: ExperimentArgs {
                        domain: DomainSpec::Interval,
                        n: 64,
                        n_c: 8,
                        nu1: nu,
                        nu2: 0,
                        cycle: CycleKind::V,
                        max_iters: 200,
                        ..ExperimentArgs::default()
                    },
                    reference: Some(value),
                })
                .collect(),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown table '{s}'")))
    }
}

/// An addressable table cell: the run and its reference factor, `None` when
/// the reference reports no convergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableCell {
    pub args: ExperimentArgs,
    pub reference: Option<f64>,
}

/// A measured table cell next to its reference value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub table: String,
    pub domain: DomainSpec,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_c")]
    pub n_c: usize,
    pub nu1: usize,
    pub nu2: usize,
    pub lambda: usize,
    pub delta_over_h: f64,
    pub cycle: CycleKind,
    pub smoother: SmootherKind,
    pub rho: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub wall_ms: f64,
    pub note: String,
    /// Published factor; empty when published as non-convergent.
    pub reference_rho: Option<f64>,
    pub reference_converged: bool,
    pub abs_diff: Option<f64>,
    /// Deviation above [`FLAG_THRESHOLD`] or disagreement on convergence.
    pub flagged: bool,
}

impl TableRow {
    fn new(table: TableId, cell: &TableCell, row: ExperimentRow) -> Self {
        let measured = row.rho.filter(|_| row.converged);
        let abs_diff = measured.zip(cell.reference).map(|(m, r)| (m - r).abs());
        let flagged = match abs_diff {
            Some(d) => d > FLAG_THRESHOLD,
            None => row.converged != cell.reference.is_some(),
        };
        Self {
            table: table.name().to_string(),
            domain: row.domain,
            n: row.n,
            n_c: row.n_c,
            nu1: row.nu1,
            nu2: row.nu2,
            lambda: row.lambda,
            delta_over_h: row.delta_over_h,
            cycle: row.cycle,
            smoother: row.smoother,
            rho: row.rho,
            converged: row.converged,
            iterations: row.iterations,
            wall_ms: row.wall_ms,
            note: row.note,
            reference_rho: cell.reference,
            reference_converged: cell.reference.is_some(),
            abs_diff,
            flagged,
        }
    }
}

/// Measures every cell of a table. Cells run in parallel; a failing cell is
/// recorded and the others continue.
pub fn run_table(id: TableId) -> Vec<TableRow> {
    id.cells()
        .par_iter()
        .map(|cell| TableRow::new(id, cell, run_experiment(&cell.args)))
        .collect()
}

/// Markdown rendering of table rows.
pub fn render_markdown(rows: &[TableRow]) -> String {
    let fmt_rho = |rho: Option<f64>, ok: bool| match (rho, ok) {
        (Some(r), true) => format!("{r:.3}"),
        _ => "n.c.".to_string(),
    };
    let mut out = String::from(
        "| table | domain | N | N_c | cycle | nu1 | nu2 | lambda | rho | reference | abs diff | flag |\n\
         |---|---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.table,
            r.domain,
            r.n,
            r.n_c,
            r.cycle,
            r.nu1,
            r.nu2,
            r.lambda,
            fmt_rho(r.rho, r.converged),
            fmt_rho(r.reference_rho, r.reference_converged),
            r.abs_diff
                .map_or_else(|| "-".to_string(), |d| format!("{d:.3}")),
            if r.flagged { "*" } else { "" },
        ));
    }
    out
}

/// Data behind the smoother comparison.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SmootherComparison {
    /// Two-grid factor against the number of extra relaxations.
    pub rho: Vec<ComparisonRow>,
    /// Smoothing factor against the number of smoother applications.
    pub mu: Vec<ComparisonRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Series {
    Rho,
    Mu,
}

/// One point of either comparison series. `step` is `lambda` for the
/// `rho` series and the iteration count `m` for the `mu` series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub series: Series,
    pub smoother: SmootherKind,
    pub step: usize,
    pub value: Option<f64>,
    pub converged: bool,
}

impl SmootherComparison {
    pub fn rows(&self) -> Vec<ComparisonRow> {
        self.rho.iter().chain(&self.mu).cloned().collect()
    }

    /// The `rho` values of one smoother, in the order of the requested lambdas.
    pub fn rho_of(&self, kind: SmootherKind) -> Vec<(usize, Option<f64>)> {
        self.rho
            .iter()
            .filter(|r| r.smoother == kind)
            .map(|r| (r.step, r.value.filter(|_| r.converged)))
            .collect()
    }
}

/// Iterations of the smoothing-factor series.
pub const MU_ITERATIONS: usize = 20;

/// Two-grid runs on the circle at `n` (coarse grid `n/2`, `nu1 = nu2 = 1`)
/// for each smoother and extra-relaxation count, plus the smoothing-factor
/// series of each smoother at `lambda = 5`. The block smoother does not
/// depend on `lambda`: it is measured once and repeated for every lambda.
pub fn run_smoother_comparison(n: usize, lambdas: &[usize]) -> Result<SmootherComparison> {
    let base = ExperimentArgs {
        n,
        n_c: n / 2,
        cycle: CycleKind::Tgcs,
        ..ExperimentArgs::default()
    };
    let point = |kind, lambda| {
        let row = run_experiment(&ExperimentArgs {
            smoother: kind,
            lambda,
            ..base
        });
        ComparisonRow {
            series: Series::Rho,
            smoother: kind,
            step: lambda,
            value: row.rho,
            converged: row.converged,
        }
    };
    let mut rho: Vec<ComparisonRow> = [SmootherKind::GsLex, SmootherKind::Kaczmarz]
        .into_iter()
        .flat_map(|k| lambdas.iter().map(move |&l| (k, l)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, l)| point(k, l))
        .collect();
    let block = point(SmootherKind::Block, 0);
    rho.extend(lambdas.iter().map(|&l| ComparisonRow {
        step: l,
        ..block.clone()
    }));

    let phi = DomainSpec::Circle.level_set(n)?;
    let disc = crate::discretization::Discretization::new(phi, BoundarySplit::DirichletLeft)?;
    let prob = ProblemData::homogeneous(&disc);
    let u0 = default_initial_guess(&disc);
    let mut mu = Vec::new();
    for kind in SmootherKind::ALL {
        let smoother = LevelSmoother::new(&disc, SmootherConfig::default().with_kind(kind))?;
        let series = smoothing_factor_series(&smoother, &prob, &disc, &u0, MU_ITERATIONS);
        mu.extend(series.into_iter().enumerate().map(|(m, v)| ComparisonRow {
            series: Series::Mu,
            smoother: kind,
            step: m + 1,
            value: Some(v),
            converged: v < 1.0,
        }));
    }
    Ok(SmootherComparison { rho, mu })
}

/// Writes `(iteration, residual, rho)` rows, one per recorded defect norm.
/// The initial defect has an empty `rho`.
pub fn emit_residual_history<W: Write>(report: &SolveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "residual", "rho"])?;
    for (m, r) in report.history.iter().enumerate() {
        let rho = m
            .checked_sub(1)
            .and_then(|k| report.rho_series.get(k))
            .map_or_else(String::new, |v| v.to_string());
        w.write_record([m.to_string(), r.to_string(), rho])?;
    }
    w.flush()?;
    Ok(())
}

/// Serializes rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses rows written by [`write_csv`].
pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
