//! The one-dimensional model: `-u'' = f` on `[a, b]` inside `[-1, 1]`, with
//! a Dirichlet condition at `a` and a Neumann condition at `b`, both imposed
//! through ghost nodes.

use std::time::Instant;

use crate::cycles::{
    reported_factor, CycleConfig, CycleMode, SolveReport, DIVERGENCE_RUN, MIN_MEASURE_ITERS,
};
use crate::dense::DenseLu;
use crate::error::{Error, Result};

/// Interval `[a, b]` on the grid `x_i = -1 + i h`, `h = 2/N`.
///
/// `l` and `r` are the ghost indices: `x_l <= a < x_{l+1}` and
/// `x_{r-1} < b <= x_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval1D {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
    pub l: usize,
    pub r: usize,
    pub theta_l: f64,
    pub theta_r: f64,
}

impl Interval1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(-1.0 < a && a < b && b < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need -1 < a < b < 1, got [{a}, {b}]"
            )));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("N = {n} must be even")));
        }
        let h = 2.0 / n as f64;
        let x = |i: usize| -1.0 + i as f64 * h;
        let l = (0..n)
            .rev()
            .find(|&i| x(i) <= a)
            .expect("a inside the grid");
        let r = (1..=n).find(|&i| x(i) >= b).expect("b inside the grid");
        if r < l + 3 {
            return Err(Error::UnderResolvedGeometry { i: 0, j: l, n });
        }
        Ok(Self {
            a,
            b,
            n,
            h,
            l,
            r,
            theta_l: (x(l + 1) - a) / h,
            theta_r: (b - x(r - 1)) / h,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_interior(&self, i: usize) -> bool {
        i > self.l && i < self.r
    }

    pub fn coarse(&self) -> Result<Self> {
        Self::new(self.a, self.b, self.n / 2)
    }

    /// Weights of the quadratic Dirichlet operator on `u_l, u_{l+1}, u_{l+2}`.
    pub fn dirichlet_weights(&self) -> [f64; 3] {
        let t = self.theta_l;
        [
            (1.0 + t) * t / 2.0,
            (1.0 + t) * (1.0 - t),
            -(1.0 - t) * t / 2.0,
        ]
    }

    /// Weights of the Neumann operator on `u_{r-2}, u_{r-1}, u_r`: the
    /// derivative at `b` of the quadratic through those nodes.
    pub fn neumann_weights(&self) -> [f64; 3] {
        let c = 0.5 + self.theta_r;
        let h = self.h;
        [(c - 1.0) / h, (1.0 - 2.0 * c) / h, c / h]
    }

    pub fn dirichlet_apply(&self, u: &[f64]) -> f64 {
        let w = self.dirichlet_weights();
        w[0] * u[self.l] + w[1] * u[self.l + 1] + w[2] * u[self.l + 2]
    }

    pub fn neumann_apply(&self, u: &[f64]) -> f64 {
        let w = self.neumann_weights();
        w[0] * u[self.r - 2] + w[1] * u[self.r - 1] + w[2] * u[self.r]
    }
}

/// Pseudo-time constants: `dt = h^2/2`, `mu_D = 1.8/h^2`, `mu_N = 1.2/h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants1D {
    pub dt: f64,
    pub mu_d: f64,
    pub mu_n: f64,
}

impl Constants1D {
    pub fn new(h: f64) -> Self {
        Self {
            dt: h * h / 2.0,
            mu_d: 1.8 / (h * h),
            mu_n: 1.2 / h,
        }
    }
}

/// Source on interior nodes and the two boundary values.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem1D {
    pub f: Vec<f64>,
    pub g_a: f64,
    pub g_b: f64,
}

impl Problem1D {
    pub fn homogeneous(grid: &Interval1D) -> Self {
        Self {
            f: vec![0.0; grid.len()],
            g_a: 0.0,
            g_b: 0.0,
        }
    }
}

/// One Gauss-Seidel pass: left ghost, interior left to right, right ghost.
pub fn relax_1d(u: &mut [f64], prob: &Problem1D, grid: &Interval1D) {
    let c = Constants1D::new(grid.h);
    u[grid.l] -= c.mu_d * c.dt * (grid.dirichlet_apply(u) - prob.g_a);
    let h2 = grid.h * grid.h;
    for i in grid.l + 1..grid.r {
        u[i] = 0.5 * (u[i - 1] + u[i + 1] + h2 * prob.f[i]);
    }
    u[grid.r] += c.mu_n * c.dt * (prob.g_b - grid.neumann_apply(u));
}

/// `f + u''` on interior nodes, boundary residuals at the ghosts, zero elsewhere.
pub fn defect_1d(u: &[f64], prob: &Problem1D, grid: &Interval1D) -> Vec<f64> {
    let mut r = vec![0.0; grid.len()];
    let h2 = grid.h * grid.h;
    for i in grid.l + 1..grid.r {
        r[i] = prob.f[i] + (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2;
    }
    r[grid.l] = prob.g_a - grid.dirichlet_apply(u);
    r[grid.r] = prob.g_b - grid.neumann_apply(u);
    r
}

/// Full weighting of interior defects, one-sided next to the ends; ghost
/// defects are carried over unchanged.
pub fn restrict_1d(r: &[f64], fine: &Interval1D, coarse: &Interval1D) -> Problem1D {
    let mut f = vec![0.0; coarse.len()];
    for (ic, fc) in f.iter_mut().enumerate() {
        if !coarse.is_interior(ic) {
            continue;
        }
        let i = 2 * ic;
        let left = fine.is_interior(i - 1);
        let right = fine.is_interior(i + 1);
        *fc = match (left, right) {
            (true, true) => 0.25 * r[i - 1] + 0.5 * r[i] + 0.25 * r[i + 1],
            (false, true) => 0.5 * (r[i] + r[i + 1]),
            (true, false) => 0.5 * (r[i - 1] + r[i]),
            (false, false) => r[i],
        };
    }
    Problem1D {
        f,
        g_a: r[fine.l],
        g_b: r[fine.r],
    }
}

/// Linear interpolation: copies at coincident nodes, averages in between.
pub fn interpolate_1d(e: &[f64]) -> Vec<f64> {
    let n = 2 * (e.len() - 1);
    (0..=n)
        .map(|i| {
            if i % 2 == 0 {
                e[i / 2]
            } else {
                0.5 * (e[i / 2] + e[i / 2 + 1])
            }
        })
        .collect()
}

/// Dense factorization of the coarsest 1D system over `l..=r`.
#[derive(Clone, Debug)]
struct Direct1D {
    lu: DenseLu,
    grid: Interval1D,
}

impl Direct1D {
    fn new(grid: Interval1D) -> Result<Self> {
        let m = grid.r - grid.l + 1;
        let mut a = vec![0.0; m * m];
        let dw = grid.dirichlet_weights();
        for k in 0..3 {
            a[k] = dw[k];
        }
        let h2 = grid.h * grid.h;
        for row in 1..m - 1 {
            a[row * m + row - 1] = -1.0 / h2;
            a[row * m + row] = 2.0 / h2;
            a[row * m + row + 1] = -1.0 / h2;
        }
        let nw = grid.neumann_weights();
        for k in 0..3 {
            a[(m - 1) * m + m - 3 + k] = nw[k];
        }
        let lu = DenseLu::factor(a, m)
            .ok_or_else(|| Error::SingularSystem("1D coarse system".into()))?;
        Ok(Self { lu, grid })
    }

    fn solve(&self, prob: &Problem1D) -> Vec<f64> {
        let g = &self.grid;
        let m = g.r - g.l + 1;
        let mut b = vec![0.0; m];
        b[0] = prob.g_a;
        b[m - 1] = prob.g_b;
        b[1..m - 1].copy_from_slice(&prob.f[g.l + 1..g.r]);
        let mut x = vec![0.0; m];
        self.lu.solve(&b, &mut x);
        let mut u = vec![0.0; g.len()];
        u[g.l..=g.r].copy_from_slice(&x);
        u
    }
}

/// Grids `N, N/2, ..., N_c` for one interval with the coarsest factorized.
#[derive(Clone, Debug)]
pub struct Hierarchy1D {
    levels: Vec<Interval1D>,
    direct: Direct1D,
}

impl Hierarchy1D {
    pub fn new(a: f64, b: f64, n: usize, n_c: usize) -> Result<Self> {
        if n_c < 4 || n_c >= n || !n.is_power_of_two() || !n_c.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "need powers of two with N > N_c >= 4, got N = {n}, N_c = {n_c}"
            )));
        }
        let mut levels = vec![Interval1D::new(a, b, n)?];
        while levels.last().expect("levels").n > n_c {
            let next = levels.last().expect("levels").coarse()?;
            levels.push(next);
        }
        let direct = Direct1D::new(*levels.last().expect("levels"))?;
        Ok(Self { levels, direct })
    }

    pub fn levels(&self) -> &[Interval1D] {
        &self.levels
    }

    /// Exact solution of the discrete problem on the finest grid.
    pub fn solve_direct(&self, prob: &Problem1D) -> Result<Vec<f64>> {
        Direct1D::new(self.levels[0]).map(|d| d.solve(prob))
    }
}

/// One cycle at `level`.
pub fn cycle_1d(
    u: &mut [f64],
    prob: &Problem1D,
    hier: &Hierarchy1D,
    cfg: &CycleConfig,
    level: usize,
) -> Result<()> {
    let grid = &hier.levels[level];
    if level + 1 == hier.levels.len() {
        u.copy_from_slice(&hier.direct.solve(prob));
        return Ok(());
    }
    for _ in 0..cfg.nu1 {
        relax_1d(u, prob, grid);
    }
    let r = defect_1d(u, prob, grid);
    let coarse = &hier.levels[level + 1];
    let cp = restrict_1d(&r, grid, coarse);
    let mut ec = vec![0.0; coarse.len()];
    match cfg.mode {
        CycleMode::Tgcs => {
            if level + 2 != hier.levels.len() {
                return Err(Error::InvalidArgument(
                    "two-grid cycle needs a hierarchy of exactly two levels".into(),
                ));
            }
            cycle_1d(&mut ec, &cp, hier, cfg, level + 1)?;
        }
        CycleMode::Recursive { gamma } => {
            let times = if level + 2 == hier.levels.len() {
                1
            } else {
                gamma
            };
            for _ in 0..times {
                cycle_1d(&mut ec, &cp, hier, cfg, level + 1)?;
            }
        }
    }
    let e = interpolate_1d(&ec);
    for i in grid.l..=grid.r {
        u[i] += e[i];
    }
    for _ in 0..cfg.nu2 {
        relax_1d(u, prob, grid);
    }
    Ok(())
}

/// The oscillatory guess `sin(40 pi x)` on ghosts and interior nodes.
pub fn default_guess_1d(grid: &Interval1D) -> Vec<f64> {
    let mut u = vec![0.0; grid.len()];
    for (i, v) in u.iter_mut().enumerate().take(grid.r + 1).skip(grid.l) {
        *v = (40.0 * std::f64::consts::PI * grid.x(i)).sin();
    }
    u
}

/// Convergence factor of the homogeneous problem from `u0`, with the same
/// stopping rule as the 2D measurement.
pub fn solve_1d(
    hier: &Hierarchy1D,
    cfg: &CycleConfig,
    u0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<SolveReport> {
    let start = Instant::now();
    let grid = &hier.levels[0];
    let prob = Problem1D::homogeneous(grid);
    let norm = |u: &[f64]| {
        defect_1d(u, &prob, grid)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let mut u = u0.to_vec();
    let mut prev = norm(&u);
    if prev == 0.0 {
        return Err(Error::ZeroInitialGuess);
    }
    let mut history = vec![prev];
    let mut rho_series: Vec<f64> = Vec::new();
    let mut above_one = 0;
    let mut converged = false;
    let mut settled = true;
    for m in 1..=max_iters {
        cycle_1d(&mut u, &prob, hier, cfg, 0)?;
        let next = norm(&u);
        history.push(next);
        if next == 0.0 {
            converged = true;
            break;
        }
        let rho = next / prev;
        prev = next;
        let last = rho_series.last().copied();
        rho_series.push(rho);
        above_one = if rho >= 1.0 { above_one + 1 } else { 0 };
        if !rho.is_finite() || above_one >= DIVERGENCE_RUN {
            break;
        }
        if m >= MIN_MEASURE_ITERS && last.is_some_and(|p| ((rho - p) / rho).abs() < tol) {
            converged = rho < 1.0;
            break;
        }
        if m == max_iters {
            settled = false;
        }
    }
    let rho = reported_factor(&rho_series, settled);
    if !settled {
        converged = rho < 1.0;
    }
    Ok(SolveReport {
        rho,
        iterations: history.len() - 1,
        history,
        rho_series,
        converged,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Interval of the 1D benchmark.
pub const BENCH_INTERVAL: (f64, f64) = (-0.743, 0.843);

/// The 1D benchmark cycle: a V-cycle with all `nu` sweeps before the
/// coarse-grid correction.
pub fn bench_cycle_1d(nu: usize) -> Result<CycleConfig> {
    CycleConfig::new(nu, 0, CycleMode::V)
}

/// Measured convergence factor of the 1D benchmark.
pub fn run_benchmark_1d(n: usize, n_c: usize, cfg: &CycleConfig) -> Result<SolveReport> {
    let (a, b) = BENCH_INTERVAL;
    let hier = Hierarchy1D::new(a, b, n, n_c)?;
    let u0 = default_guess_1d(&hier.levels()[0]);
    solve_1d(&hier, cfg, &u0, 1e-3, 200)
}
