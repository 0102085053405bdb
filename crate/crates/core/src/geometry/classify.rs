use super::grid::GridSpec;
use super::level_set::LevelSetField;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeClass {
    Interior,
    Ghost,
    Exterior,
}

/// Per-node classification of a grid against a level set.
#[derive(Clone, Debug)]
pub struct NodeClassMask {
    grid: GridSpec,
    tags: Vec<NodeClass>,
}

const AXIS_NEIGHBORS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Interior is `phi < 0`; a ghost is a node with `phi >= 0` and at least one
/// interior axis neighbor.
pub fn classify_nodes(phi: &LevelSetField) -> Result<NodeClassMask> {
    let grid = phi.grid();
    let mut tags = vec![NodeClass::Exterior; grid.len()];
    for i in 0..grid.side() {
        for j in 0..grid.side() {
            if phi.at(i, j) < 0.0 {
                if grid.is_on_edge(i, j) {
                    return Err(Error::DomainTouchesBoundary { i, j });
                }
                tags[grid.index(i, j)] = NodeClass::Interior;
            }
        }
    }
    for i in 0..grid.side() {
        for j in 0..grid.side() {
            let k = grid.index(i, j);
            if tags[k] != NodeClass::Interior {
                continue;
            }
            for (di, dj) in AXIS_NEIGHBORS {
                // Interior nodes are never on the edge, so neighbors exist.
                let (a, b) = grid
                    .offset(i, j, di, dj)
                    .expect("interior node off the edge");
                let kk = grid.index(a, b);
                if tags[kk] == NodeClass::Exterior {
                    tags[kk] = NodeClass::Ghost;
                }
            }
        }
    }
    Ok(NodeClassMask { grid, tags })
}

impl NodeClassMask {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn class(&self, i: usize, j: usize) -> NodeClass {
        self.tags[self.grid.index(i, j)]
    }

    #[inline]
    pub fn class_at(&self, idx: usize) -> NodeClass {
        self.tags[idx]
    }

    /// `true` for nodes carrying an unknown (interior or ghost).
    #[inline]
    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.class(i, j) != NodeClass::Exterior
    }

    pub fn tags(&self) -> &[NodeClass] {
        &self.tags
    }

    pub fn count(&self, class: NodeClass) -> usize {
        self.tags.iter().filter(|&&t| t == class).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, sample_level_set};

    #[test]
    fn constant_negative_touches_boundary() {
        let g = build_grid(8).unwrap();
        let phi = sample_level_set(g, |_, _| -1.0).unwrap();
        assert!(matches!(
            classify_nodes(&phi),
            Err(Error::DomainTouchesBoundary { .. })
        ));
    }

    #[test]
    fn constant_negative_inside_box_is_interior() {
        // Negative everywhere except the outer ring.
        let g = build_grid(8).unwrap();
        let phi = sample_level_set(g, |x, y| x.abs().max(y.abs()) - 0.9).unwrap();
        let mask = classify_nodes(&phi).unwrap();
        assert_eq!(mask.count(NodeClass::Interior), 49);
        // The ring minus its four corners.
        assert_eq!(mask.count(NodeClass::Ghost), 28);
    }

    #[test]
    fn zero_is_not_interior() {
        let g = build_grid(8).unwrap();
        let phi = sample_level_set(g, |x, y| x.abs().max(y.abs()) - 0.5).unwrap();
        let mask = classify_nodes(&phi).unwrap();
        // |x| = 0.5 sits exactly on the zero level set.
        assert_eq!(mask.class(4, 2), NodeClass::Ghost);
        assert_eq!(mask.class(4, 3), NodeClass::Interior);
    }
}
