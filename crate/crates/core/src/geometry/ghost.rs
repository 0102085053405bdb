use super::classify::{NodeClass, NodeClassMask};
use super::grid::GridSpec;
use super::level_set::LevelSetField;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Assignment of boundary points to Dirichlet or Neumann conditions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundarySplit {
    /// Dirichlet where `x <= 0`, Neumann where `x > 0`.
    #[default]
    DirichletLeft,
    AllDirichlet,
    AllNeumann,
}

impl BoundarySplit {
    pub fn kind_at(&self, b: [f64; 2]) -> BcKind {
        match self {
            BoundarySplit::DirichletLeft if b[0] <= 0.0 => BcKind::Dirichlet,
            BoundarySplit::DirichletLeft => BcKind::Neumann,
            BoundarySplit::AllDirichlet => BcKind::Dirichlet,
            BoundarySplit::AllNeumann => BcKind::Neumann,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilExtent {
    Full3x3,
    Reduced2x2,
    Reduced3Point,
    /// Three collinear nodes along `x`.
    LineX,
    /// Three collinear nodes along `y`.
    LineY,
}

/// Upwind interpolation stencil anchored at a ghost node.
///
/// Members are `(i + s_y k2, j + s_x k1)`; for the square extents they are
/// listed with `k1` major, and the three-point stencil lists the origin, its
/// `x` neighbor and its `y` neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilSpec {
    pub origin: (usize, usize),
    /// `(s_x, s_y)`, each `-1` or `+1`.
    pub signs: (isize, isize),
    pub extent: StencilExtent,
    pub members: Vec<(usize, usize)>,
}

impl StencilSpec {
    fn try_build(
        origin: (usize, usize),
        signs: (isize, isize),
        extent: StencilExtent,
        mask: &NodeClassMask,
    ) -> Option<Self> {
        let grid = mask.grid();
        let (i, j) = origin;
        let (sx, sy) = signs;
        let offsets: Vec<(isize, isize)> = match extent {
            StencilExtent::Full3x3 => (0..3)
                .flat_map(|k1| (0..3).map(move |k2| (k1, k2)))
                .collect(),
            StencilExtent::Reduced2x2 => (0..2)
                .flat_map(|k1| (0..2).map(move |k2| (k1, k2)))
                .collect(),
            StencilExtent::Reduced3Point => vec![(0, 0), (1, 0), (0, 1)],
            StencilExtent::LineX => vec![(0, 0), (1, 0), (2, 0)],
            StencilExtent::LineY => vec![(0, 0), (0, 1), (0, 2)],
        };
        let mut members = Vec::with_capacity(offsets.len());
        for (k1, k2) in offsets {
            let (a, b) = grid.offset(i, j, sy * k2, sx * k1)?;
            if !mask.is_active(a, b) {
                return None;
            }
            members.push((a, b));
        }
        Some(Self {
            origin,
            signs,
            extent,
            members,
        })
    }
}

/// Everything needed to write the boundary equation carried by one ghost node.
#[derive(Clone, Debug)]
pub struct GhostMeta {
    pub node: (usize, usize),
    /// Boundary point `B` closest to the ghost.
    pub projection: [f64; 2],
    /// Unit normal of the level set at the ghost.
    pub normal: [f64; 2],
    pub bc: BcKind,
    pub stencil: StencilSpec,
}

/// Gradient of the level set at a node: central differences, or second-order
/// one-sided differences where a neighbor is off the grid.
pub fn level_set_gradient(phi: &LevelSetField, i: usize, j: usize) -> [f64; 2] {
    let grid = phi.grid();
    let h = grid.h();
    let n = grid.n();
    let diff = |along_x: bool| -> f64 {
        let idx = if along_x { j } else { i };
        let at = |k: usize| if along_x { phi.at(i, k) } else { phi.at(k, j) };
        if idx == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if idx == n {
            (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h)
        } else {
            (at(idx + 1) - at(idx - 1)) / (2.0 * h)
        }
    };
    [diff(true), diff(false)]
}

/// `B = G - phi(G) grad(phi)/|grad(phi)|` with the gradient taken at `G`.
pub fn closest_boundary_point(node: (usize, usize), phi: &LevelSetField) -> Result<[f64; 2]> {
    let (i, j) = node;
    let grid = phi.grid();
    let [x, y] = grid.coords(i, j);
    let g = level_set_gradient(phi, i, j);
    let norm = g[0].hypot(g[1]);
    if norm < 1e-12 {
        return Err(Error::DegenerateGradient { x, y });
    }
    let d = phi.at(i, j);
    Ok([x - g[0] / norm * d, y - g[1] / norm * d])
}

#[inline]
fn upwind_sign(delta: f64) -> isize {
    if delta < 0.0 {
        -1
    } else {
        1
    }
}

/// Nine-point stencil pointing from `G` towards `B`, reduced to 2x2, then to
/// three points, then to a line of three nodes along the axis closest to the
/// normal, when members fall outside the active set.
pub fn upwind_stencil(
    node: (usize, usize),
    b: [f64; 2],
    mask: &NodeClassMask,
) -> Result<StencilSpec> {
    let grid = mask.grid();
    let (i, j) = node;
    let [x, y] = grid.coords(i, j);
    let signs = (upwind_sign(b[0] - x), upwind_sign(b[1] - y));
    let lines = if (b[0] - x).abs() >= (b[1] - y).abs() {
        [StencilExtent::LineX, StencilExtent::LineY]
    } else {
        [StencilExtent::LineY, StencilExtent::LineX]
    };
    [
        StencilExtent::Full3x3,
        StencilExtent::Reduced2x2,
        StencilExtent::Reduced3Point,
        lines[0],
        lines[1],
    ]
    .into_iter()
    .find_map(|extent| StencilSpec::try_build(node, signs, extent, mask))
    .ok_or(Error::UnderResolvedGeometry { i, j, n: grid.n() })
}

/// Boundary metadata for every ghost node, in flat index order.
pub fn build_ghosts(
    phi: &LevelSetField,
    mask: &NodeClassMask,
    split: BoundarySplit,
) -> Result<Vec<GhostMeta>> {
    let grid: GridSpec = phi.grid();
    let mut ghosts = Vec::new();
    for i in 0..grid.side() {
        for j in 0..grid.side() {
            if mask.class(i, j) != NodeClass::Ghost {
                continue;
            }
            let projection = closest_boundary_point((i, j), phi)?;
            let g = level_set_gradient(phi, i, j);
            let norm = g[0].hypot(g[1]);
            let stencil = upwind_stencil((i, j), projection, mask)?;
            debug_assert!(stencil.members.iter().all(|&(a, b)| mask.is_active(a, b)));
            ghosts.push(GhostMeta {
                node: (i, j),
                projection,
                normal: [g[0] / norm, g[1] / norm],
                bc: split.kind_at(projection),
                stencil,
            });
        }
    }
    Ok(ghosts)
}
