//! Relaxation operators: lexicographic Gauss-Seidel over interior and ghost
//! equations, extra relaxations on a band around the boundary, and the
//! Kaczmarz and block alternatives used for comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::DenseLu;
use crate::discretization::{compute_defect, Discretization, GridFunction, ProblemData};
use crate::error::{Error, Result};
use crate::geometry::{BcKind, NodeClass};

/// Upper bound of `mu_N dt / h` for a stable Neumann ghost update in 2D.
pub const NEUMANN_CFL_PER_H: f64 = 2.0 / (3.0 * std::f64::consts::SQRT_2);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmootherKind {
    GsLex,
    Kaczmarz,
    Block,
}

impl SmootherKind {
    pub const ALL: [SmootherKind; 3] = [
        SmootherKind::GsLex,
        SmootherKind::Kaczmarz,
        SmootherKind::Block,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SmootherKind::GsLex => "gslex",
            SmootherKind::Kaczmarz => "kaczmarz",
            SmootherKind::Block => "block",
        }
    }
}

impl fmt::Display for SmootherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmootherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown smoother '{s}'")))
    }
}

/// Pseudo-time constants and boundary-band parameters of a smoother.
///
/// The Neumann factor is stored per unit `h` so one configuration serves
/// every grid level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// Extra boundary relaxations after each sweep.
    pub lambda: usize,
    /// Half-width of the boundary band, in units of `h`.
    pub delta: f64,
    mu_d_dt: f64,
    mu_n_dt_per_h: f64,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        Self {
            kind: SmootherKind::GsLex,
            lambda: 5,
            delta: 3.0,
            mu_d_dt: 0.9,
            mu_n_dt_per_h: 0.9 * NEUMANN_CFL_PER_H,
        }
    }
}

impl SmootherConfig {
    pub fn new(
        kind: SmootherKind,
        lambda: usize,
        delta: f64,
        mu_d_dt: f64,
        mu_n_dt_per_h: f64,
    ) -> Result<Self> {
        if !(mu_d_dt > 0.0 && mu_d_dt < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mu_D dt = {mu_d_dt} violates 0 < mu_D dt < 1"
            )));
        }
        if !(mu_n_dt_per_h > 0.0 && mu_n_dt_per_h < NEUMANN_CFL_PER_H) {
            return Err(Error::InvalidArgument(format!(
                "mu_N dt / h = {mu_n_dt_per_h} violates 0 < mu_N dt < 2h/(3 sqrt 2)"
            )));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative band width {delta}"
            )));
        }
        Ok(Self {
            kind,
            lambda,
            delta,
            mu_d_dt,
            mu_n_dt_per_h,
        })
    }

    /// Same as [`SmootherConfig::new`] with the Neumann constant given as an
    /// absolute `mu_N dt` on a grid of spacing `h`.
    pub fn with_neumann_step(
        kind: SmootherKind,
        lambda: usize,
        delta: f64,
        mu_d_dt: f64,
        mu_n_dt: f64,
        h: f64,
    ) -> Result<Self> {
        Self::new(kind, lambda, delta, mu_d_dt, mu_n_dt / h)
    }

    pub fn with_kind(mut self, kind: SmootherKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_lambda(mut self, lambda: usize) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn mu_d_dt(&self) -> f64 {
        self.mu_d_dt
    }

    pub fn mu_n_dt(&self, h: f64) -> f64 {
        self.mu_n_dt_per_h * h
    }
}

/// Ghosts plus interior nodes with `|phi| <= delta`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct BoundaryBand {
    nodes: Vec<usize>,
}

impl BoundaryBand {
    /// `delta` is absolute (not in units of `h`).
    pub fn new(disc: &Discretization, delta: f64) -> Self {
        let phi = disc.phi().values();
        let nodes = disc
            .active_order()
            .iter()
            .copied()
            .filter(|&idx| disc.ghost_index(idx).is_some() || phi[idx].abs() <= delta)
            .collect();
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[inline]
fn relax_node(u: &mut [f64], prob: &ProblemData, disc: &Discretization, idx: usize, mu: [f64; 2]) {
    match disc.ghost_index(idx) {
        Some(g) => {
            let step = match disc.ghosts()[g].bc {
                BcKind::Dirichlet => mu[0],
                BcKind::Neumann => mu[1],
            };
            let r = prob.g[g] - disc.ghost_rows()[g].apply(u);
            u[idx] += step * r;
        }
        None => {
            let side = disc.grid().side();
            let h = disc.grid().h();
            u[idx] = 0.25
                * (h * h * prob.f[idx] + u[idx - 1] + u[idx + 1] + u[idx - side] + u[idx + side]);
        }
    }
}

fn steps(disc: &Discretization, cfg: &SmootherConfig) -> [f64; 2] {
    [cfg.mu_d_dt(), cfg.mu_n_dt(disc.grid().h())]
}

/// One in-place Gauss-Seidel pass over all interior and ghost nodes in
/// lexicographic order. Interior nodes take the five-point update, ghosts a
/// pseudo-time step on their boundary equation.
pub fn gs_lex_sweep(
    u: &mut GridFunction,
    prob: &ProblemData,
    disc: &Discretization,
    cfg: &SmootherConfig,
) {
    let mu = steps(disc, cfg);
    let uv = u.values_mut();
    for &idx in disc.active_order() {
        relax_node(uv, prob, disc, idx, mu);
    }
}

/// `cfg.lambda` further Gauss-Seidel passes restricted to the band.
pub fn boundary_extra_sweeps(
    u: &mut GridFunction,
    prob: &ProblemData,
    disc: &Discretization,
    band: &BoundaryBand,
    cfg: &SmootherConfig,
) {
    let mu = steps(disc, cfg);
    let uv = u.values_mut();
    for _ in 0..cfg.lambda {
        for &idx in band.nodes() {
            relax_node(uv, prob, disc, idx, mu);
        }
    }
}

/// Sparse row of the equation carried by `idx`, as `(node, coefficient)` pairs.
fn equation_row(disc: &Discretization, idx: usize) -> Vec<(usize, f64)> {
    match disc.ghost_index(idx) {
        Some(g) => disc.ghost_rows()[g].iter().collect(),
        None => {
            let side = disc.grid().side();
            let h2 = disc.grid().h().powi(2);
            vec![
                (idx, 4.0 / h2),
                (idx - 1, -1.0 / h2),
                (idx + 1, -1.0 / h2),
                (idx - side, -1.0 / h2),
                (idx + side, -1.0 / h2),
            ]
        }
    }
}

/// Row norms for the Kaczmarz projections over an index set.
#[derive(Clone, Debug)]
pub struct KaczmarzRows {
    rows: Vec<(usize, Vec<(usize, f64)>, f64)>,
}

impl KaczmarzRows {
    pub fn new(disc: &Discretization, nodes: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(nodes.len());
        for (k, &idx) in nodes.iter().enumerate() {
            let row = equation_row(disc, idx);
            let norm2: f64 = row.iter().map(|(_, w)| w * w).sum();
            if !(norm2 > 0.0) {
                return Err(Error::ZeroRow(k));
            }
            rows.push((idx, row, norm2));
        }
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One Kaczmarz pass: project `u` onto the hyperplane of each row in turn.
pub fn kaczmarz_sweep(
    u: &mut GridFunction,
    prob: &ProblemData,
    disc: &Discretization,
    rows: &KaczmarzRows,
) {
    let uv = u.values_mut();
    for (idx, row, norm2) in &rows.rows {
        let r = disc.defect_at(uv, prob, *idx);
        let scale = r / norm2;
        for &(node, w) in row {
            uv[node] += scale * w;
        }
    }
}

fn one_norm(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|c| (0..n).map(|r| a[r * n + c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Local block around one band node: its unknowns and the factorized
/// coupling matrix of their own equations.
#[derive(Clone, Debug)]
struct Block {
    members: Vec<usize>,
    lu: DenseLu,
}

/// Precomputed blocks for [`block_sweep`].
#[derive(Clone, Debug)]
pub struct BlockSystem {
    far_interior: Vec<usize>,
    blocks: Vec<Block>,
}

const BLOCK_CONDITION_LIMIT: f64 = 1e12;

impl BlockSystem {
    /// Blocks are the 3x3 neighborhood of interior band nodes and the
    /// interpolation stencil of ghosts.
    pub fn new(disc: &Discretization, band: &BoundaryBand) -> Result<Self> {
        let grid = disc.grid();
        let in_band: std::collections::HashSet<usize> = band.nodes().iter().copied().collect();
        let far_interior = disc
            .active_order()
            .iter()
            .copied()
            .filter(|idx| disc.is_interior(*idx) && !in_band.contains(idx))
            .collect();
        let mut blocks = Vec::with_capacity(band.len());
        for &p in band.nodes() {
            let (i, j) = grid.ij(p);
            let members: Vec<usize> = match disc.ghost_index(p) {
                Some(g) => disc.ghosts()[g]
                    .stencil
                    .members
                    .iter()
                    .map(|&(a, b)| grid.index(a, b))
                    .collect(),
                None => grid
                    .lexicographic_neighborhood(i, j)
                    .filter(|&(a, b)| disc.mask().is_active(a, b))
                    .map(|(a, b)| grid.index(a, b))
                    .collect(),
            };
            let n = members.len();
            let mut a = vec![0.0; n * n];
            for (r, &node) in members.iter().enumerate() {
                for (col, w) in equation_row(disc, node) {
                    if let Some(c) = members.iter().position(|&m| m == col) {
                        a[r * n + c] += w;
                    }
                }
            }
            let singular = || Error::SingularBlock {
                i,
                j,
                condition: f64::INFINITY,
            };
            let lu = DenseLu::factor(a.clone(), n).ok_or_else(singular)?;
            let mut inv = vec![0.0; n * n];
            let mut e = vec![0.0; n];
            let mut col = vec![0.0; n];
            for c in 0..n {
                e.fill(0.0);
                e[c] = 1.0;
                lu.solve(&e, &mut col);
                for r in 0..n {
                    inv[r * n + c] = col[r];
                }
            }
            let condition = one_norm(&a, n) * one_norm(&inv, n);
            if !(condition <= BLOCK_CONDITION_LIMIT) {
                return Err(Error::SingularBlock { i, j, condition });
            }
            blocks.push(Block { members, lu });
        }
        Ok(Self {
            far_interior,
            blocks,
        })
    }
}

/// Gauss-Seidel on interior nodes outside the band, then an exact solve of
/// each band node's block with all other unknowns frozen.
pub fn block_sweep(
    u: &mut GridFunction,
    prob: &ProblemData,
    disc: &Discretization,
    blocks: &BlockSystem,
) {
    let uv = u.values_mut();
    let no_steps = [0.0, 0.0];
    for &idx in &blocks.far_interior {
        relax_node(uv, prob, disc, idx, no_steps);
    }
    let mut r = [0.0; 9];
    let mut du = [0.0; 9];
    for block in &blocks.blocks {
        let n = block.members.len();
        for (k, &node) in block.members.iter().enumerate() {
            r[k] = disc.defect_at(uv, prob, node);
        }
        block.lu.solve(&r[..n], &mut du[..n]);
        for (k, &node) in block.members.iter().enumerate() {
            uv[node] += du[k];
        }
    }
}

/// One configured smoothing step on a level, with all precomputed data.
#[derive(Clone, Debug)]
pub struct LevelSmoother {
    cfg: SmootherConfig,
    band: BoundaryBand,
    interior: Vec<usize>,
    kaczmarz: Option<KaczmarzRows>,
    blocks: Option<BlockSystem>,
}

impl LevelSmoother {
    pub fn new(disc: &Discretization, cfg: SmootherConfig) -> Result<Self> {
        let band = BoundaryBand::new(disc, cfg.delta * disc.grid().h());
        let interior = disc
            .active_order()
            .iter()
            .copied()
            .filter(|&idx| disc.mask().class_at(idx) == NodeClass::Interior)
            .collect();
        let kaczmarz = match cfg.kind {
            SmootherKind::Kaczmarz => Some(KaczmarzRows::new(disc, band.nodes())?),
            _ => None,
        };
        let blocks = match cfg.kind {
            SmootherKind::Block => Some(BlockSystem::new(disc, &band)?),
            _ => None,
        };
        Ok(Self {
            cfg,
            band,
            interior,
            kaczmarz,
            blocks,
        })
    }

    pub fn config(&self) -> &SmootherConfig {
        &self.cfg
    }

    pub fn band(&self) -> &BoundaryBand {
        &self.band
    }

    /// One relaxation including its boundary extras.
    pub fn smooth(&self, u: &mut GridFunction, prob: &ProblemData, disc: &Discretization) {
        match self.cfg.kind {
            SmootherKind::GsLex => {
                gs_lex_sweep(u, prob, disc, &self.cfg);
                boundary_extra_sweeps(u, prob, disc, &self.band, &self.cfg);
            }
            SmootherKind::Kaczmarz => {
                let uv = u.values_mut();
                for &idx in &self.interior {
                    relax_node(uv, prob, disc, idx, [0.0, 0.0]);
                }
                let rows = self.kaczmarz.as_ref().expect("kaczmarz rows");
                for _ in 0..self.cfg.lambda {
                    kaczmarz_sweep(u, prob, disc, rows);
                }
            }
            SmootherKind::Block => {
                block_sweep(u, prob, disc, self.blocks.as_ref().expect("block system"));
            }
        }
    }
}

/// Ratios `||r^(m)|| / ||r^(m-1)||` of the defect under repeated smoothing
/// alone. Stops early if a defect vanishes exactly.
pub fn smoothing_factor_series(
    smoother: &LevelSmoother,
    prob: &ProblemData,
    disc: &Discretization,
    u0: &GridFunction,
    m_max: usize,
) -> Vec<f64> {
    let mut u = u0.clone();
    let mut prev = compute_defect(&u, prob, disc).max_abs();
    let mut out = Vec::with_capacity(m_max);
    for _ in 0..m_max {
        if prev == 0.0 {
            break;
        }
        smoother.smooth(&mut u, prob, disc);
        let next = compute_defect(&u, prob, disc).max_abs();
        out.push(next / prev);
        prev = next;
    }
    out
}
