use super::interp::stencil_weights;
use super::GridFunction;
use crate::error::{Error, Result};
use crate::geometry::{
    build_ghosts, classify_nodes, BcKind, BoundarySplit, GhostMeta, GridSpec, LevelSetField,
    NodeClass, NodeClassMask,
};

const NO_GHOST: usize = usize::MAX;

/// Linear form of one ghost equation, `L_h u (G) = sum_k weights[k] u[nodes[k]]`.
#[derive(Clone, Copy, Debug)]
pub struct GhostRow {
    pub len: usize,
    pub nodes: [usize; 9],
    pub weights: [f64; 9],
}

impl GhostRow {
    #[inline]
    pub fn apply(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.len {
            s += self.weights[k] * u[self.nodes[k]];
        }
        s
    }

    #[inline]
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |k| (self.nodes[k], self.weights[k]))
    }
}

/// Geometry plus precomputed boundary rows for one grid level.
#[derive(Clone, Debug)]
pub struct Discretization {
    phi: LevelSetField,
    mask: NodeClassMask,
    ghosts: Vec<GhostMeta>,
    rows: Vec<GhostRow>,
    ghost_of: Vec<usize>,
    order: Vec<usize>,
    split: BoundarySplit,
}

impl Discretization {
    pub fn new(phi: LevelSetField, split: BoundarySplit) -> Result<Self> {
        let mask = classify_nodes(&phi)?;
        let ghosts = build_ghosts(&phi, &mask, split)?;
        let grid = phi.grid();
        let mut ghost_of = vec![NO_GHOST; grid.len()];
        let mut rows = Vec::with_capacity(ghosts.len());
        for (g, meta) in ghosts.iter().enumerate() {
            ghost_of[grid.index(meta.node.0, meta.node.1)] = g;
            rows.push(ghost_row(meta, &phi)?);
        }
        let order = grid
            .lexicographic()
            .filter(|&(i, j)| mask.is_active(i, j))
            .map(|(i, j)| grid.index(i, j))
            .collect();
        Ok(Self {
            phi,
            mask,
            ghosts,
            rows,
            ghost_of,
            order,
            split,
        })
    }

    pub fn split(&self) -> BoundarySplit {
        self.split
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.phi.grid()
    }

    pub fn phi(&self) -> &LevelSetField {
        &self.phi
    }

    pub fn mask(&self) -> &NodeClassMask {
        &self.mask
    }

    pub fn ghosts(&self) -> &[GhostMeta] {
        &self.ghosts
    }

    pub fn ghost_rows(&self) -> &[GhostRow] {
        &self.rows
    }

    /// Ghost number of a flat node index, if that node is a ghost.
    #[inline]
    pub fn ghost_index(&self, idx: usize) -> Option<usize> {
        let g = self.ghost_of[idx];
        (g != NO_GHOST).then_some(g)
    }

    /// Interior and ghost nodes (flat indices) in lexicographic order.
    pub fn active_order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.mask.class_at(idx) != NodeClass::Exterior
    }

    #[inline]
    pub fn is_interior(&self, idx: usize) -> bool {
        self.mask.class_at(idx) == NodeClass::Interior
    }

    pub fn interior_count(&self) -> usize {
        self.order.len() - self.ghosts.len()
    }

    /// `-Delta_h u` at an interior node.
    #[inline]
    pub fn neg_laplacian_at(&self, u: &[f64], idx: usize) -> f64 {
        let side = self.grid().side();
        let h = self.grid().h();
        (4.0 * u[idx] - u[idx - 1] - u[idx + 1] - u[idx - side] - u[idx + side]) / (h * h)
    }

    /// Defect of the equation carried by an active node.
    #[inline]
    pub fn defect_at(&self, u: &[f64], prob: &ProblemData, idx: usize) -> f64 {
        match self.ghost_index(idx) {
            Some(g) => prob.g[g] - self.rows[g].apply(u),
            None => prob.f[idx] - self.neg_laplacian_at(u, idx),
        }
    }
}

fn ghost_row(meta: &GhostMeta, phi: &LevelSetField) -> Result<GhostRow> {
    let w = stencil_weights(&meta.stencil, phi.grid(), meta.projection);
    let mut row = GhostRow {
        len: w.len,
        nodes: w.nodes,
        weights: [0.0; 9],
    };
    match meta.bc {
        BcKind::Dirichlet => row.weights = w.value,
        BcKind::Neumann => {
            let n = unit_normal(w.grad(phi.values()), meta.projection)?;
            for k in 0..w.len {
                row.weights[k] = w.dx[k] * n[0] + w.dy[k] * n[1];
            }
        }
    }
    Ok(row)
}

fn unit_normal(g: [f64; 2], at: [f64; 2]) -> Result<[f64; 2]> {
    let norm = g[0].hypot(g[1]);
    if norm < 1e-12 {
        return Err(Error::DegenerateGradient { x: at[0], y: at[1] });
    }
    Ok([g[0] / norm, g[1] / norm])
}

/// Source term on interior nodes and boundary data per ghost.
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub f: GridFunction,
    /// Boundary values, one per ghost in [`Discretization::ghosts`] order.
    pub g: Vec<f64>,
}

impl ProblemData {
    pub fn homogeneous(disc: &Discretization) -> Self {
        Self {
            f: GridFunction::zeros(disc.grid()),
            g: vec![0.0; disc.ghosts().len()],
        }
    }

    /// Samples `f` on interior nodes and the Dirichlet value or the normal
    /// derivative at each ghost's boundary point.
    pub fn from_functions<F, D, N>(disc: &Discretization, f: F, dirichlet: D, neumann: N) -> Self
    where
        F: Fn(f64, f64) -> f64,
        D: Fn(f64, f64) -> f64,
        N: Fn(f64, f64) -> f64,
    {
        let grid = disc.grid();
        let mut fv = GridFunction::zeros(grid);
        for &idx in disc.active_order() {
            if disc.is_interior(idx) {
                let [x, y] = grid.coords_of(idx);
                fv[idx] = f(x, y);
            }
        }
        let g = disc
            .ghosts()
            .iter()
            .map(|m| {
                let [x, y] = m.projection;
                match m.bc {
                    BcKind::Dirichlet => dirichlet(x, y),
                    BcKind::Neumann => neumann(x, y),
                }
            })
            .collect();
        Self { f: fv, g }
    }

    pub fn scale(&self) -> f64 {
        self.g.iter().fold(self.f.max_abs(), |m, v| m.max(v.abs()))
    }
}

/// Five-point Laplacian on interior nodes; zero elsewhere.
pub fn apply_laplacian(u: &GridFunction, disc: &Discretization) -> Result<GridFunction> {
    let grid = disc.grid();
    let mut out = GridFunction::zeros(grid);
    for &idx in disc.active_order() {
        if !disc.is_interior(idx) {
            continue;
        }
        let (i, j) = grid.ij(idx);
        for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let ok = grid
                .offset(i, j, di, dj)
                .map(|(a, b)| disc.mask().is_active(a, b))
                .unwrap_or(false);
            if !ok {
                return Err(Error::InconsistentClassification { i, j });
            }
        }
        out[idx] = -disc.neg_laplacian_at(u.values(), idx);
    }
    Ok(out)
}

/// Boundary operator evaluated directly from the interpolant of `u` and `phi`
/// on the ghost's stencil.
pub fn bc_apply(u: &GridFunction, ghost: &GhostMeta, phi: &LevelSetField) -> Result<f64> {
    let w = stencil_weights(&ghost.stencil, u.grid(), ghost.projection);
    match ghost.bc {
        BcKind::Dirichlet => Ok(w.eval(u.values())),
        BcKind::Neumann => {
            let n = unit_normal(w.grad(phi.values()), ghost.projection)?;
            let g = w.grad(u.values());
            Ok(g[0] * n[0] + g[1] * n[1])
        }
    }
}

/// `r = f + Delta_h u` on interior nodes, `r = g - L_h u` on ghosts, zero elsewhere.
pub fn compute_defect(u: &GridFunction, prob: &ProblemData, disc: &Discretization) -> GridFunction {
    let mut r = GridFunction::zeros(disc.grid());
    compute_defect_into(u, prob, disc, &mut r);
    r
}

pub(crate) fn compute_defect_into(
    u: &GridFunction,
    prob: &ProblemData,
    disc: &Discretization,
    r: &mut GridFunction,
) {
    r.fill(0.0);
    let uv = u.values();
    for &idx in disc.active_order() {
        r[idx] = disc.defect_at(uv, prob, idx);
    }
}
