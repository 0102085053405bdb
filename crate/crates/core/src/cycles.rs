//! Multigrid hierarchy, two-grid and recursive cycles, and convergence-factor
//! measurement.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretization::{
    compute_defect, DirectSolver, Discretization, GridFunction, ProblemData,
};
use crate::error::{Error, Result};
use crate::geometry::{BoundarySplit, LevelSetField};
use crate::smoothers::{LevelSmoother, SmootherConfig};
use crate::transfer::{prolongate, restrict_defect, ExtensionConfig, ExtensionPlan};

/// One grid level with everything a cycle needs there.
#[derive(Clone, Debug)]
pub struct Level {
    pub disc: Discretization,
    pub smoother: LevelSmoother,
    pub extension: ExtensionPlan,
}

/// Levels from finest to coarsest; the coarsest carries a factorized system.
pub struct Hierarchy {
    levels: Vec<Level>,
    coarse_solver: DirectSolver,
}

impl std::fmt::Debug for Hierarchy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hierarchy")
            .field("sizes", &self.sizes())
            .finish()
    }
}

/// Rediscretizes the problem on `N, N/2, ..., n_c`, injecting the level set
/// downward, and factorizes the coarsest system.
pub fn build_hierarchy(
    phi: &LevelSetField,
    split: BoundarySplit,
    n_c: usize,
    smoother: SmootherConfig,
    extension: ExtensionConfig,
) -> Result<Hierarchy> {
    let n = phi.grid().n();
    if n_c < 8 || n_c >= n || !n_c.is_power_of_two() || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "need powers of two with N > N_c >= 8, got N = {n}, N_c = {n_c}"
        )));
    }
    let mut levels = Vec::new();
    let mut field = phi.clone();
    loop {
        let disc = Discretization::new(field.clone(), split)?;
        let smoother = LevelSmoother::new(&disc, smoother)?;
        let extension = ExtensionPlan::new(&disc, extension)?;
        let size = disc.grid().n();
        levels.push(Level {
            disc,
            smoother,
            extension,
        });
        if size == n_c {
            break;
        }
        field = field.inject()?;
    }
    let coarse_solver = DirectSolver::new(&levels.last().expect("levels").disc)?;
    Ok(Hierarchy {
        levels,
        coarse_solver,
    })
}

impl Hierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn finest(&self) -> &Discretization {
        &self.levels[0].disc
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.disc.grid().n()).collect()
    }

    pub fn coarse_solver(&self) -> &DirectSolver {
        &self.coarse_solver
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CycleMode {
    /// Two grids with an exact coarse solve.
    Tgcs,
    /// Recursion down to the coarsest level, `gamma` times per level.
    Recursive { gamma: usize },
}

impl CycleMode {
    pub const V: CycleMode = CycleMode::Recursive { gamma: 1 };
    pub const W: CycleMode = CycleMode::Recursive { gamma: 2 };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleConfig {
    pub nu1: usize,
    pub nu2: usize,
    pub mode: CycleMode,
}

impl CycleConfig {
    pub fn new(nu1: usize, nu2: usize, mode: CycleMode) -> Result<Self> {
        if nu1 + nu2 == 0 {
            return Err(Error::InvalidArgument(
                "nu1 + nu2 must be at least 1".into(),
            ));
        }
        if let CycleMode::Recursive { gamma } = mode {
            if gamma == 0 {
                return Err(Error::InvalidArgument("gamma must be at least 1".into()));
            }
        }
        Ok(Self { nu1, nu2, mode })
    }

    /// Splits a total smoothing count with the extra sweep, if any, placed
    /// before the coarse-grid correction.
    pub fn split(nu: usize, mode: CycleMode) -> Result<Self> {
        Self::new(nu.div_ceil(2), nu / 2, mode)
    }
}

/// Coarse-grid data built from a restricted defect.
fn coarse_problem(rc: GridFunction, disc: &Discretization) -> ProblemData {
    let grid = disc.grid();
    let g = disc
        .ghosts()
        .iter()
        .map(|m| rc[grid.index(m.node.0, m.node.1)])
        .collect();
    ProblemData { f: rc, g }
}

/// One multigrid cycle at `level`, updating `u` in place.
pub fn mg_cycle(
    u: &mut GridFunction,
    prob: &ProblemData,
    hier: &Hierarchy,
    cfg: &CycleConfig,
    level: usize,
) -> Result<()> {
    let lv = &hier.levels[level];
    let disc = &lv.disc;
    if level + 1 == hier.levels.len() {
        *u = hier.coarse_solver.solve(prob, disc)?;
        return Ok(());
    }
    for _ in 0..cfg.nu1 {
        lv.smoother.smooth(u, prob, disc);
    }
    let mut r = compute_defect(u, prob, disc);
    lv.extension.apply(&mut r);
    let next = &hier.levels[level + 1];
    let rc = restrict_defect(&r, disc, &lv.extension, &next.disc)?;
    let coarse_prob = coarse_problem(rc, &next.disc);
    let direct = match cfg.mode {
        CycleMode::Tgcs => true,
        CycleMode::Recursive { .. } => level + 2 == hier.levels.len(),
    };
    let ec = if direct {
        if level + 2 != hier.levels.len() {
            return Err(Error::InvalidArgument(
                "two-grid cycle needs a hierarchy of exactly two levels".into(),
            ));
        }
        hier.coarse_solver.solve(&coarse_prob, &next.disc)?
    } else {
        let gamma = match cfg.mode {
            CycleMode::Recursive { gamma } => gamma,
            CycleMode::Tgcs => 1,
        };
        let mut ec = GridFunction::zeros(next.disc.grid());
        for _ in 0..gamma {
            mg_cycle(&mut ec, &coarse_prob, hier, cfg, level + 1)?;
        }
        ec
    };
    // The coarse error is continuous across the boundary: carry it into the
    // exterior band so fine ghosts interpolate from defined values.
    let mut ec = ec;
    next.extension.apply(&mut ec);
    let e = prolongate(&ec);
    let uv = u.values_mut();
    for &idx in disc.active_order() {
        uv[idx] += e[idx];
    }
    for _ in 0..cfg.nu2 {
        lv.smoother.smooth(u, prob, disc);
    }
    Ok(())
}

/// Outcome of an iterated solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    /// `||r^(m)||_inf` for `m = 0..=iterations`.
    pub history: Vec<f64>,
    /// `rho^(m) = ||r^(m)|| / ||r^(m-1)||`.
    pub rho_series: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_ms: f64,
}

/// Consecutive factors `>= 1` that count as divergence.
pub const DIVERGENCE_RUN: usize = 5;
/// Cycles performed before the stopping rule on `rho` may fire.
pub const MIN_MEASURE_ITERS: usize = 2;
/// Trailing factors averaged when the stopping rule never fires.
pub const TAIL_WINDOW: usize = 10;

/// The last factor when the measurement settled, else the geometric mean of
/// the trailing [`TAIL_WINDOW`] factors.
pub(crate) fn reported_factor(series: &[f64], settled: bool) -> f64 {
    match series.last() {
        None => 0.0,
        Some(&last) if settled => last,
        Some(_) => {
            let tail = &series[series.len().saturating_sub(TAIL_WINDOW)..];
            (tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp()
        }
    }
}

/// The oscillatory guess `sin(40 pi x) sin(50 pi y)` on interior and ghost
/// nodes. On grids where it samples to zero a seeded uniform random guess
/// takes its place.
pub fn default_initial_guess(disc: &Discretization) -> GridFunction {
    use std::f64::consts::PI;
    let grid = disc.grid();
    let mut u = GridFunction::zeros(grid);
    for &idx in disc.active_order() {
        let [x, y] = grid.coords_of(idx);
        u[idx] = (40.0 * PI * x).sin() * (50.0 * PI * y).sin();
    }
    if u.max_abs() < 1e-8 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + grid.n() as u64);
        for &idx in disc.active_order() {
            u[idx] = rng.gen_range(-1.0..1.0);
        }
    }
    u
}

/// Cycles on the homogeneous problem from `u0`, recording defect ratios until
/// `|rho^(m) - rho^(m-1)| / rho^(m) < tol` or `max_iters`.
pub fn solve_homogeneous(
    hier: &Hierarchy,
    cfg: &CycleConfig,
    u0: &GridFunction,
    tol: f64,
    max_iters: usize,
) -> Result<SolveReport> {
    let start = Instant::now();
    let disc = hier.finest();
    let prob = ProblemData::homogeneous(disc);
    let mut u = u0.clone();
    let mut prev = compute_defect(&u, &prob, disc).max_abs();
    if prev == 0.0 {
        return Err(Error::ZeroInitialGuess);
    }
    let mut history = vec![prev];
    let mut rho_series: Vec<f64> = Vec::new();
    let mut above_one = 0;
    let mut converged = false;
    let mut settled = true;
    for m in 1..=max_iters {
        mg_cycle(&mut u, &prob, hier, cfg, 0)?;
        let norm = compute_defect(&u, &prob, disc).max_abs();
        history.push(norm);
        if norm == 0.0 {
            converged = true;
            break;
        }
        let rho = norm / prev;
        prev = norm;
        if !rho.is_finite() {
            rho_series.push(rho);
            break;
        }
        above_one = if rho >= 1.0 { above_one + 1 } else { 0 };
        let last = rho_series.last().copied();
        rho_series.push(rho);
        if above_one >= DIVERGENCE_RUN {
            break;
        }
        if m >= MIN_MEASURE_ITERS {
            if let Some(p) = last {
                if ((rho - p) / rho).abs() < tol {
                    converged = rho < 1.0;
                    break;
                }
            }
        }
        if m == max_iters {
            settled = false;
        }
    }
    let iterations = history.len() - 1;
    let rho = reported_factor(&rho_series, settled);
    if !settled {
        converged = rho < 1.0;
    }
    Ok(SolveReport {
        rho,
        history,
        rho_series,
        iterations,
        converged,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Cycles on `prob` from `u0` (zero if absent) until
/// `||r||_inf <= tol_abs * max(||f||, ||g||, 1)`.
pub fn solve_general(
    hier: &Hierarchy,
    cfg: &CycleConfig,
    prob: &ProblemData,
    u0: Option<&GridFunction>,
    tol_abs: f64,
    max_iters: usize,
) -> Result<(GridFunction, SolveReport)> {
    let start = Instant::now();
    let disc = hier.finest();
    let mut u = u0
        .cloned()
        .unwrap_or_else(|| GridFunction::zeros(disc.grid()));
    let target = tol_abs * prob.scale().max(1.0);
    let mut norm = compute_defect(&u, prob, disc).max_abs();
    let mut history = vec![norm];
    let mut rho_series = Vec::new();
    while norm > target && history.len() <= max_iters {
        mg_cycle(&mut u, prob, hier, cfg, 0)?;
        let next = compute_defect(&u, prob, disc).max_abs();
        rho_series.push(next / norm);
        history.push(next);
        norm = next;
        if !norm.is_finite() {
            break;
        }
    }
    let iterations = history.len() - 1;
    Ok((
        u,
        SolveReport {
            rho: rho_series.last().copied().unwrap_or(0.0),
            history,
            rho_series,
            iterations,
            converged: norm <= target,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, sample_level_set};

    fn circle(n: usize) -> LevelSetField {
        let cx = 2f64.sqrt() / 20.0;
        let cy = 3f64.sqrt() / 30.0;
        sample_level_set(build_grid(n).unwrap(), |x, y| {
            ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - 0.563
        })
        .unwrap()
        .assume_signed_distance()
    }

    fn hier(n: usize, n_c: usize, lambda: usize) -> Hierarchy {
        let sm = SmootherConfig::default().with_lambda(lambda);
        build_hierarchy(
            &circle(n),
            BoundarySplit::DirichletLeft,
            n_c,
            sm,
            ExtensionConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn level_count() {
        assert_eq!(hier(64, 8, 0).sizes(), vec![64, 32, 16, 8]);
        let sm = SmootherConfig::default();
        let err = build_hierarchy(
            &circle(16),
            BoundarySplit::DirichletLeft,
            16,
            sm,
            ExtensionConfig::default(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let h = hier(32, 8, 2);
        let prob = ProblemData::homogeneous(h.finest());
        for mode in [CycleMode::V, CycleMode::W] {
            let mut u = GridFunction::zeros(h.finest().grid());
            mg_cycle(&mut u, &prob, &h, &CycleConfig::new(1, 1, mode).unwrap(), 0).unwrap();
            assert_eq!(u.max_abs(), 0.0);
        }
    }

    #[test]
    fn rejects_zero_guess() {
        let h = hier(32, 16, 0);
        let cfg = CycleConfig::new(1, 1, CycleMode::Tgcs).unwrap();
        let u0 = GridFunction::zeros(h.finest().grid());
        assert!(matches!(
            solve_homogeneous(&h, &cfg, &u0, 1e-3, 10),
            Err(Error::ZeroInitialGuess)
        ));
    }

    #[test]
    fn sine_guess_vanishes_on_small_grids() {
        for n in [8, 16] {
            let d = hier(n * 2, n, 0);
            let coarse = &d.levels()[1].disc;
            assert!(default_initial_guess(coarse).max_abs() > 0.1);
        }
    }
}
