use super::GridFunction;
use crate::geometry::{GridSpec, StencilExtent, StencilSpec};

/// Linear functionals of the stencil interpolant at a fixed point: its value
/// and its two partial derivatives, as weights on the member nodes.
#[derive(Clone, Copy, Debug)]
pub struct InterpWeights {
    pub len: usize,
    /// Flat node indices.
    pub nodes: [usize; 9],
    pub value: [f64; 9],
    pub dx: [f64; 9],
    pub dy: [f64; 9],
}

impl InterpWeights {
    pub fn eval(&self, u: &[f64]) -> f64 {
        (0..self.len)
            .map(|k| self.value[k] * u[self.nodes[k]])
            .sum()
    }

    pub fn grad(&self, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..self.len {
            let v = u[self.nodes[k]];
            g[0] += self.dx[k] * v;
            g[1] += self.dy[k] * v;
        }
        g
    }
}

fn quadratic(t: f64) -> ([f64; 3], [f64; 3]) {
    (
        [
            0.5 * (t - 1.0) * (t - 2.0),
            -t * (t - 2.0),
            0.5 * t * (t - 1.0),
        ],
        [t - 1.5, 2.0 - 2.0 * t, t - 0.5],
    )
}

/// Interpolation weights of the stencil's tensor-product Lagrange interpolant
/// at `p`: biquadratic for 3x3, bilinear for 2x2, the plane through the
/// three nodes for the three-point stencil, and a quadratic in one variable
/// for the line stencils.
pub fn stencil_weights(stencil: &StencilSpec, grid: GridSpec, p: [f64; 2]) -> InterpWeights {
    let h = grid.h();
    let (i, j) = stencil.origin;
    let [xg, yg] = grid.coords(i, j);
    let (sx, sy) = (stencil.signs.0 as f64, stencil.signs.1 as f64);
    let tx = (p[0] - xg) / (sx * h);
    let ty = (p[1] - yg) / (sy * h);
    let (cx, cy) = (sx / h, sy / h);
    let mut w = InterpWeights {
        len: stencil.members.len(),
        nodes: [0; 9],
        value: [0.0; 9],
        dx: [0.0; 9],
        dy: [0.0; 9],
    };
    for (k, &(a, b)) in stencil.members.iter().enumerate() {
        w.nodes[k] = grid.index(a, b);
    }
    match stencil.extent {
        StencilExtent::Full3x3 => {
            let (lx, dlx) = quadratic(tx);
            let (ly, dly) = quadratic(ty);
            for k1 in 0..3 {
                for k2 in 0..3 {
                    let k = 3 * k1 + k2;
                    w.value[k] = lx[k1] * ly[k2];
                    w.dx[k] = dlx[k1] * ly[k2] * cx;
                    w.dy[k] = lx[k1] * dly[k2] * cy;
                }
            }
        }
        StencilExtent::Reduced2x2 => {
            let lx = [1.0 - tx, tx];
            let ly = [1.0 - ty, ty];
            let d = [-1.0, 1.0];
            for k1 in 0..2 {
                for k2 in 0..2 {
                    let k = 2 * k1 + k2;
                    w.value[k] = lx[k1] * ly[k2];
                    w.dx[k] = d[k1] * ly[k2] * cx;
                    w.dy[k] = lx[k1] * d[k2] * cy;
                }
            }
        }
        StencilExtent::Reduced3Point => {
            w.value[..3].copy_from_slice(&[1.0 - tx - ty, tx, ty]);
            w.dx[..3].copy_from_slice(&[-cx, cx, 0.0]);
            w.dy[..3].copy_from_slice(&[-cy, 0.0, cy]);
        }
        StencilExtent::LineX => {
            let (l, dl) = quadratic(tx);
            w.value[..3].copy_from_slice(&l);
            w.dx[..3].copy_from_slice(&dl.map(|d| d * cx));
        }
        StencilExtent::LineY => {
            let (l, dl) = quadratic(ty);
            w.value[..3].copy_from_slice(&l);
            w.dy[..3].copy_from_slice(&dl.map(|d| d * cy));
        }
    }
    w
}

pub fn biquadratic_eval(u: &GridFunction, stencil: &StencilSpec, p: [f64; 2]) -> f64 {
    stencil_weights(stencil, u.grid(), p).eval(u.values())
}

pub fn biquadratic_grad(u: &GridFunction, stencil: &StencilSpec, p: [f64; 2]) -> [f64; 2] {
    stencil_weights(stencil, u.grid(), p).grad(u.values())
}
