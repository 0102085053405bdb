use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Level-set samples at every node of a grid; the domain is `{phi < 0}`.
#[derive(Clone, Debug)]
pub struct LevelSetField {
    grid: GridSpec,
    values: Vec<f64>,
    signed_distance: bool,
}

/// Evaluates `formula` at every node of `grid`.
pub fn sample_level_set<F>(grid: GridSpec, formula: F) -> Result<LevelSetField>
where
    F: Fn(f64, f64) -> f64,
{
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.side() {
        for j in 0..grid.side() {
            let [x, y] = grid.coords(i, j);
            let v = formula(x, y);
            if !v.is_finite() {
                return Err(Error::NonFiniteLevelSet { i, j });
            }
            values.push(v);
        }
    }
    Ok(LevelSetField {
        grid,
        values,
        signed_distance: false,
    })
}

impl LevelSetField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} level-set samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = grid.ij(k);
            return Err(Error::NonFiniteLevelSet { i, j });
        }
        Ok(Self {
            grid,
            values,
            signed_distance: false,
        })
    }

    /// Marks the samples as an (approximate) signed distance function.
    pub fn assume_signed_distance(mut self) -> Self {
        self.signed_distance = true;
        self
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_signed_distance(&self) -> bool {
        self.signed_distance
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Samples on the grid with spacing `2h` (coarse nodes coincide with even fine nodes).
    pub fn inject(&self) -> Result<LevelSetField> {
        let coarse = self.grid.coarse()?;
        let mut values = Vec::with_capacity(coarse.len());
        for i in 0..coarse.side() {
            for j in 0..coarse.side() {
                values.push(self.at(2 * i, 2 * j));
            }
        }
        Ok(LevelSetField {
            grid: coarse,
            values,
            signed_distance: self.signed_distance,
        })
    }

    /// Bilinear interpolation of the samples at an arbitrary point of the square.
    pub fn interpolate(&self, p: [f64; 2]) -> f64 {
        let h = self.grid.h();
        let n = self.grid.n();
        let fx = ((p[0] + 1.0) / h).clamp(0.0, n as f64);
        let fy = ((p[1] + 1.0) / h).clamp(0.0, n as f64);
        let j = (fx.floor() as usize).min(n - 1);
        let i = (fy.floor() as usize).min(n - 1);
        let tx = fx - j as f64;
        let ty = fy - i as f64;
        (1.0 - ty) * ((1.0 - tx) * self.at(i, j) + tx * self.at(i, j + 1))
            + ty * ((1.0 - tx) * self.at(i + 1, j) + tx * self.at(i + 1, j + 1))
    }

    /// Central-difference gradient magnitude at an interior grid node.
    pub fn central_gradient_norm(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.grid.n();
        if i == 0 || j == 0 || i == n || j == n {
            return None;
        }
        let h2 = 2.0 * self.grid.h();
        let gx = (self.at(i, j + 1) - self.at(i, j - 1)) / h2;
        let gy = (self.at(i + 1, j) - self.at(i - 1, j)) / h2;
        Some(gx.hypot(gy))
    }
}

/// Outcome of [`reinitialize`].
#[derive(Clone, Debug)]
pub struct ReinitReport {
    pub steps: usize,
    pub last_band_update: f64,
}

/// Pseudo-time solution of `phi_t = sgn(phi0) (1 - |grad phi|)`.
///
/// Second-order ENO Godunov fluxes with Heun time stepping at `dtau = h/2`.
/// Nodes adjacent to the zero level set use the subcell distance estimate
/// `phi0 / |grad phi0|`, which pins the interface and never flips a sign.
/// Iterates until the largest update inside `|phi| <= band_width` is below
/// `1e-3 h`, or `steps` time steps.
pub fn reinitialize(
    field: &LevelSetField,
    band_width: f64,
    steps: usize,
) -> Result<(LevelSetField, ReinitReport)> {
    let grid = field.grid;
    let h = grid.h();
    if band_width < 3.0 * h * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "reinitialization band {band_width} is narrower than 3h = {}",
            3.0 * h
        )));
    }
    let phi0 = &field.values;
    let ctx = ReinitContext::new(grid, phi0);
    let dtau = 0.5 * h;

    let mut phi = phi0.clone();
    let mut stage = vec![0.0; grid.len()];
    let mut rate = vec![0.0; grid.len()];
    let mut report = ReinitReport {
        steps: 0,
        last_band_update: f64::INFINITY,
    };
    for step in 0..steps {
        ctx.rate(&phi, &mut rate);
        for k in 0..phi.len() {
            stage[k] = phi[k] + dtau * rate[k];
        }
        ctx.rate(&stage, &mut rate);
        let mut band_update: f64 = 0.0;
        for k in 0..phi.len() {
            let next = 0.5 * (phi[k] + stage[k] + dtau * rate[k]);
            if next.abs() <= band_width || phi[k].abs() <= band_width {
                band_update = band_update.max((next - phi[k]).abs());
            }
            phi[k] = next;
        }
        report.steps = step + 1;
        report.last_band_update = band_update;
        if band_update < 1e-3 * h {
            break;
        }
    }
    if let Some(k) = phi.iter().position(|v| !v.is_finite()) {
        let (i, j) = grid.ij(k);
        return Err(Error::NonFiniteLevelSet { i, j });
    }
    Ok((
        LevelSetField {
            grid,
            values: phi,
            signed_distance: true,
        },
        report,
    ))
}

struct ReinitContext<'a> {
    grid: GridSpec,
    phi0: &'a [f64],
    /// Smoothed sign of the initial level set.
    sign: Vec<f64>,
    /// Subcell distance for nodes next to the interface.
    anchor: Vec<Option<f64>>,
}

impl<'a> ReinitContext<'a> {
    fn new(grid: GridSpec, phi0: &'a [f64]) -> Self {
        let h = grid.h();
        let side = grid.side();
        let sign = phi0.iter().map(|&p| p / (p * p + h * h).sqrt()).collect();
        let mut anchor = vec![None; grid.len()];
        let at = |i: usize, j: usize| phi0[i * side + j];
        for i in 0..side {
            for j in 0..side {
                let p = at(i, j);
                let mut crosses = p == 0.0;
                let mut scale: f64 = 0.0;
                let mut central = [0.0f64; 2];
                for (axis, (di, dj)) in [(0isize, 1isize), (1, 0)].into_iter().enumerate() {
                    let fwd = grid.offset(i, j, di, dj).map(|(a, b)| at(a, b));
                    let bwd = grid.offset(i, j, -di, -dj).map(|(a, b)| at(a, b));
                    for q in [fwd, bwd].into_iter().flatten() {
                        crosses |= q * p < 0.0;
                        scale = scale.max((q - p).abs());
                    }
                    central[axis] = match (fwd, bwd) {
                        (Some(f), Some(b)) => 0.5 * (f - b),
                        (Some(f), None) => f - p,
                        (None, Some(b)) => p - b,
                        (None, None) => 0.0,
                    };
                }
                if crosses {
                    let scale = scale.max(central[0].hypot(central[1])).max(1e-300);
                    anchor[i * side + j] = Some(h * p / scale);
                }
            }
        }
        Self {
            grid,
            phi0,
            sign,
            anchor,
        }
    }

    fn rate(&self, phi: &[f64], out: &mut [f64]) {
        let grid = self.grid;
        let h = grid.h();
        let side = grid.side();
        let n = grid.n();
        let at = |i: usize, j: usize| phi[i * side + j];
        // Second difference along an axis, zero at the grid edge.
        let dxx = |i: usize, j: usize| -> f64 {
            if j == 0 || j == n {
                0.0
            } else {
                (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h * h)
            }
        };
        let dyy = |i: usize, j: usize| -> f64 {
            if i == 0 || i == n {
                0.0
            } else {
                (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h)
            }
        };
        for i in 0..side {
            for j in 0..side {
                let k = i * side + j;
                let p = at(i, j);
                if let Some(d) = self.anchor[k] {
                    let s = if self.phi0[k] >= 0.0 { 1.0 } else { -1.0 };
                    out[k] = -(s * p.abs() - d) / h;
                    continue;
                }
                let (xm, xp) = one_sided(
                    p,
                    (j > 0).then(|| at(i, j - 1)),
                    (j < n).then(|| at(i, j + 1)),
                    dxx(i, j),
                    (j > 0).then(|| dxx(i, j - 1)),
                    (j < n).then(|| dxx(i, j + 1)),
                    h,
                );
                let (ym, yp) = one_sided(
                    p,
                    (i > 0).then(|| at(i - 1, j)),
                    (i < n).then(|| at(i + 1, j)),
                    dyy(i, j),
                    (i > 0).then(|| dyy(i - 1, j)),
                    (i < n).then(|| dyy(i + 1, j)),
                    h,
                );
                let s = self.sign[k];
                let norm = if self.phi0[k] > 0.0 {
                    (xm.max(0.0).powi(2).max(xp.min(0.0).powi(2))
                        + ym.max(0.0).powi(2).max(yp.min(0.0).powi(2)))
                    .sqrt()
                } else {
                    (xm.min(0.0).powi(2).max(xp.max(0.0).powi(2))
                        + ym.min(0.0).powi(2).max(yp.max(0.0).powi(2)))
                    .sqrt()
                };
                out[k] = s * (1.0 - norm);
            }
        }
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// ENO2 backward and forward differences. Off the grid the field is
/// continued as a constant, so no information enters through the edge.
fn one_sided(
    p: f64,
    lo: Option<f64>,
    hi: Option<f64>,
    d2: f64,
    d2_lo: Option<f64>,
    d2_hi: Option<f64>,
    h: f64,
) -> (f64, f64) {
    let back = lo.map(|q| (p - q) / h + 0.5 * h * minmod(d2, d2_lo.unwrap_or(0.0)));
    let fwd = hi.map(|q| (q - p) / h - 0.5 * h * minmod(d2, d2_hi.unwrap_or(0.0)));
    (back.unwrap_or(0.0), fwd.unwrap_or(0.0))
}
