//! Grid transfers: defect extension along normals, boundary-aware
//! full-weighting restriction and bilinear prolongation.

use crate::discretization::{Discretization, GridFunction};
use crate::error::{Error, Result};
use crate::geometry::{level_set_gradient, BcKind, GridSpec, NodeClass};

/// Restriction stencil chosen at one coarse node.
///
/// Half and quarter stencils are described by the fine offsets their
/// rectangle covers along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestrictionStencil {
    Full,
    /// Three nodes along one axis, two along the other.
    Half {
        di: (isize, isize),
        dj: (isize, isize),
    },
    Quarter {
        di: (isize, isize),
        dj: (isize, isize),
    },
    Injection,
}

impl RestrictionStencil {
    /// `(di, dj, weight)` triples of the stencil.
    pub fn weights(&self) -> Vec<(isize, isize, f64)> {
        let axis = |range: (isize, isize)| -> Vec<(isize, f64)> {
            match range.1 - range.0 {
                2 => vec![(range.0, 0.25), (range.0 + 1, 0.5), (range.1, 0.25)],
                1 => vec![(range.0, 0.5), (range.1, 0.5)],
                _ => vec![(range.0, 1.0)],
            }
        };
        let (ri, rj) = match *self {
            RestrictionStencil::Full => ((-1, 1), (-1, 1)),
            RestrictionStencil::Half { di, dj } | RestrictionStencil::Quarter { di, dj } => {
                (di, dj)
            }
            RestrictionStencil::Injection => ((0, 0), (0, 0)),
        };
        let mut out = Vec::with_capacity(9);
        for (dj, wj) in axis(rj) {
            for (di, wi) in axis(ri) {
                out.push((di, dj, wi * wj));
            }
        }
        out
    }
}

/// Candidate rectangles in order of preference; ties resolve to the first.
const HALF_CANDIDATES: [((isize, isize), (isize, isize)); 4] = [
    ((-1, 1), (-1, 0)),
    ((-1, 1), (0, 1)),
    ((-1, 0), (-1, 1)),
    ((0, 1), (-1, 1)),
];

const QUARTER_CANDIDATES: [((isize, isize), (isize, isize)); 4] = [
    ((-1, 0), (-1, 0)),
    ((0, 1), (-1, 0)),
    ((-1, 0), (0, 1)),
    ((0, 1), (0, 1)),
];

/// Largest rectangle around fine node `(i, j)` whose nodes all satisfy `inside`.
pub fn choose_stencil<F: Fn(usize, usize) -> bool>(
    fine: GridSpec,
    i: usize,
    j: usize,
    inside: F,
) -> RestrictionStencil {
    let fits = |ri: (isize, isize), rj: (isize, isize)| {
        (rj.0..=rj.1).all(|dj| {
            (ri.0..=ri.1).all(|di| fine.offset(i, j, di, dj).is_some_and(|(a, b)| inside(a, b)))
        })
    };
    if fits((-1, 1), (-1, 1)) {
        return RestrictionStencil::Full;
    }
    if let Some(&(di, dj)) = HALF_CANDIDATES.iter().find(|(ri, rj)| fits(*ri, *rj)) {
        return RestrictionStencil::Half { di, dj };
    }
    if let Some(&(di, dj)) = QUARTER_CANDIDATES.iter().find(|(ri, rj)| fits(*ri, *rj)) {
        return RestrictionStencil::Quarter { di, dj };
    }
    RestrictionStencil::Injection
}

/// Partial transfer: every coarse node whose fine counterpart lies in the
/// transfer set receives a weighted average over the largest admissible
/// rectangle; all other coarse nodes keep `base`.
pub fn restrict_partial<F: Fn(usize, usize) -> bool>(
    w: &GridFunction,
    inside: F,
    base: &GridFunction,
) -> GridFunction {
    let fine = w.grid();
    let coarse = base.grid();
    debug_assert_eq!(coarse.n() * 2, fine.n());
    let mut out = base.clone();
    for ci in 0..coarse.side() {
        for cj in 0..coarse.side() {
            let (i, j) = (2 * ci, 2 * cj);
            if !inside(i, j) {
                continue;
            }
            let st = choose_stencil(fine, i, j, &inside);
            let v = st
                .weights()
                .into_iter()
                .map(|(di, dj, wt)| {
                    let (a, b) = fine.offset(i, j, di, dj).expect("stencil on grid");
                    wt * w.at(a, b)
                })
                .sum();
            out.set(ci, cj, v);
        }
    }
    out
}

/// Pseudo-time transport parameters for the defect extension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionConfig {
    /// Pseudo-time step in units of `h`.
    pub dtau: f64,
    /// Band half-width in units of `h`.
    pub band: f64,
    /// Upper bound on Gauss-Seidel sweeps.
    pub sweeps: usize,
    /// Sweeps stop once the largest update falls below `tol` times the
    /// largest ghost defect.
    pub tol: f64,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        Self {
            dtau: 0.5,
            band: 3.0,
            sweeps: 100,
            tol: 1e-10,
        }
    }
}

impl ExtensionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > 0.0 && self.dtau <= std::f64::consts::FRAC_1_SQRT_2) {
            return Err(Error::InvalidArgument(format!(
                "extension step {} h exceeds the transport limit h/sqrt(2)",
                self.dtau
            )));
        }
        if !(self.band > 0.0) || self.sweeps == 0 {
            return Err(Error::InvalidArgument("empty extension band".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct BandNode {
    idx: usize,
    qx: Option<usize>,
    qy: Option<usize>,
    ax: f64,
    ay: f64,
}

/// Exterior band nodes with their upwind neighbors, sorted by distance.
#[derive(Clone, Debug)]
pub struct ExtensionPlan {
    cfg: ExtensionConfig,
    nodes: Vec<BandNode>,
    ghosts: Vec<usize>,
    filled: Vec<bool>,
    /// Boundary condition of the closest boundary point, for filled nodes.
    kinds: Vec<Option<BcKind>>,
}

impl ExtensionPlan {
    pub fn new(disc: &Discretization, cfg: ExtensionConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = disc.grid();
        let phi = disc.phi();
        let limit = cfg.band * grid.h();
        let mut order: Vec<(f64, usize)> = (0..grid.len())
            .filter(|&idx| disc.mask().class_at(idx) == NodeClass::Exterior)
            .map(|idx| (phi.values()[idx], idx))
            .filter(|&(v, _)| v <= limit)
            .collect();
        order.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(a.1.cmp(&b.1)));
        let mut nodes = Vec::with_capacity(order.len());
        let mut kinds = vec![None; grid.len()];
        for (v, idx) in order {
            let (i, j) = grid.ij(idx);
            let [gx, gy] = level_set_gradient(phi, i, j);
            let norm = gx.hypot(gy);
            if !(norm > 0.0) {
                continue;
            }
            let (nx, ny) = (gx / norm, gy / norm);
            let [x, y] = grid.coords(i, j);
            kinds[idx] = Some(disc.split().kind_at([x - nx * v, y - ny * v]));
            let step = |n: f64| if n >= 0.0 { -1 } else { 1 };
            let qx = grid
                .offset(i, j, 0, step(nx))
                .map(|(a, b)| grid.index(a, b));
            let qy = grid
                .offset(i, j, step(ny), 0)
                .map(|(a, b)| grid.index(a, b));
            nodes.push(BandNode {
                idx,
                qx,
                qy,
                ax: nx.abs(),
                ay: ny.abs(),
            });
        }
        let ghosts: Vec<usize> = disc
            .ghosts()
            .iter()
            .map(|m| grid.index(m.node.0, m.node.1))
            .collect();
        let mut filled = vec![false; grid.len()];
        for (m, &g) in disc.ghosts().iter().zip(&ghosts) {
            filled[g] = true;
            kinds[g] = Some(m.bc);
        }
        // Transport does not mix Dirichlet and Neumann defects unless a node
        // has no upwind neighbor carrying its own condition.
        for n in &mut nodes {
            filled[n.idx] = true;
            let k = kinds[n.idx];
            let keep = |q: &usize| kinds[*q] == k;
            let (qx, qy) = (n.qx.filter(keep), n.qy.filter(keep));
            if qx.is_some() || qy.is_some() {
                n.qx = qx;
                n.qy = qy;
            }
        }
        Ok(Self {
            cfg,
            nodes,
            ghosts,
            filled,
            kinds,
        })
    }

    /// Number of exterior nodes the extension writes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ghosts and extended band nodes: where the extended defect is defined.
    pub fn is_filled(&self, idx: usize) -> bool {
        self.filled[idx]
    }

    /// Boundary condition whose defect a filled node carries.
    pub fn kind(&self, idx: usize) -> Option<BcKind> {
        self.kinds[idx]
    }

    /// Transport ghost defects outward, holding them constant along normals.
    /// Returns the number of sweeps performed.
    pub fn apply(&self, r: &mut GridFunction) -> usize {
        let rv = r.values_mut();
        let scale = self.ghosts.iter().map(|&g| rv[g].abs()).fold(0.0, f64::max);
        let c = self.cfg.dtau;
        for sweep in 1..=self.cfg.sweeps {
            let mut change: f64 = 0.0;
            for n in &self.nodes {
                let p = rv[n.idx];
                let mut delta = 0.0;
                if let Some(q) = n.qx {
                    delta += (p - rv[q]) * n.ax;
                }
                if let Some(q) = n.qy {
                    delta += (p - rv[q]) * n.ay;
                }
                let next = p - c * delta;
                change = change.max((next - p).abs());
                rv[n.idx] = next;
            }
            if change <= self.cfg.tol * scale {
                return sweep;
            }
        }
        self.cfg.sweeps
    }
}

/// Fill the exterior band of `r` by upwind transport of the ghost values.
pub fn extend_defect(
    r: &mut GridFunction,
    disc: &Discretization,
    cfg: ExtensionConfig,
) -> Result<usize> {
    Ok(ExtensionPlan::new(disc, cfg)?.apply(r))
}

/// Two-pass restriction: interior defects averaged over interior nodes only,
/// then ghost and exterior values averaged over the extended exterior.
pub fn restrict_defect(
    r: &GridFunction,
    fine: &Discretization,
    plan: &ExtensionPlan,
    coarse: &Discretization,
) -> Result<GridFunction> {
    let fg = fine.grid();
    let cg = coarse.grid();
    let zero = GridFunction::zeros(cg);
    let interior = |i: usize, j: usize| fine.mask().class(i, j) == NodeClass::Interior;
    let pass1 = restrict_partial(r, interior, &zero);
    let mut set = vec![false; cg.len()];
    for ci in 0..cg.side() {
        for cj in 0..cg.side() {
            set[cg.index(ci, cj)] = interior(2 * ci, 2 * cj);
        }
    }
    let outside = |i: usize, j: usize| {
        fine.mask().class(i, j) != NodeClass::Interior && plan.is_filled(fg.index(i, j))
    };
    let mut out = pass1;
    for ci in 0..cg.side() {
        for cj in 0..cg.side() {
            let k = cg.index(ci, cj);
            let (i, j) = (2 * ci, 2 * cj);
            if outside(i, j) {
                // Dirichlet and Neumann defects carry different powers of h:
                // average only over nodes carrying the target's condition.
                let target = coarse
                    .ghost_index(k)
                    .map(|g| coarse.ghosts()[g].bc)
                    .or_else(|| plan.kind(fg.index(i, j)));
                let same =
                    |a: usize, b: usize| outside(a, b) && plan.kind(fg.index(a, b)) == target;
                let st = if same(i, j) {
                    choose_stencil(fg, i, j, same)
                } else {
                    choose_stencil(fg, i, j, outside)
                };
                out[k] = st
                    .weights()
                    .into_iter()
                    .map(|(di, dj, wt)| {
                        let (a, b) = fg.offset(i, j, di, dj).expect("stencil on grid");
                        wt * r.at(a, b)
                    })
                    .sum();
                set[k] = true;
            }
            match coarse.mask().class_at(k) {
                NodeClass::Exterior => out[k] = 0.0,
                NodeClass::Ghost if !set[k] => {
                    return Err(Error::UnsetCoarseGhost { i: ci, j: cj })
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Bilinear interpolation from the coarse grid to every node of the fine grid.
pub fn prolongate(e: &GridFunction) -> GridFunction {
    let cg = e.grid();
    let fg = GridSpec::new(cg.n() * 2).expect("fine grid");
    let mut out = GridFunction::zeros(fg);
    for i in 0..fg.side() {
        let (i0, i1) = (i / 2, i.div_ceil(2));
        for j in 0..fg.side() {
            let (j0, j1) = (j / 2, j.div_ceil(2));
            let v = 0.25 * (e.at(i0, j0) + e.at(i0, j1) + e.at(i1, j0) + e.at(i1, j1));
            out.set(i, j, v);
        }
    }
    out
}
