use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::{Discretization, GridFunction, ProblemData};
use crate::error::{Error, Result};
use crate::geometry::GridSpec;

const NOT_UNKNOWN: usize = usize::MAX;

/// Assembled non-eliminated system in CSR form; one row per interior or
/// ghost node, ordered lexicographically.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    grid: GridSpec,
    /// Flat node index of each unknown.
    pub unknowns: Vec<usize>,
    /// Unknown number of each flat node index (`usize::MAX` when exterior).
    pub position: Vec<usize>,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Interior rows `-Delta_h u = f` (diagonal `4/h^2`), ghost rows `L_h u = g`.
pub fn assemble_system(prob: &ProblemData, disc: &Discretization) -> SparseSystem {
    let grid = disc.grid();
    let unknowns = disc.active_order().to_vec();
    let mut position = vec![NOT_UNKNOWN; grid.len()];
    for (r, &idx) in unknowns.iter().enumerate() {
        position[idx] = r;
    }
    let h2 = grid.h() * grid.h();
    let side = grid.side();
    let mut row_ptr = Vec::with_capacity(unknowns.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = Vec::with_capacity(unknowns.len());
    row_ptr.push(0);
    for &idx in &unknowns {
        match disc.ghost_index(idx) {
            Some(g) => {
                let row = &disc.ghost_rows()[g];
                // Merge duplicate columns so each row is a proper sparse row.
                let mut entries: Vec<(usize, f64)> =
                    row.iter().map(|(node, w)| (position[node], w)).collect();
                entries.sort_by_key(|e| e.0);
                let mut last = NOT_UNKNOWN;
                for (c, w) in entries {
                    if c == last {
                        *vals.last_mut().unwrap() += w;
                    } else {
                        cols.push(c);
                        vals.push(w);
                        last = c;
                    }
                }
                rhs.push(prob.g[g]);
            }
            None => {
                let mut entries = [
                    (position[idx - side], -1.0 / h2),
                    (position[idx - 1], -1.0 / h2),
                    (position[idx], 4.0 / h2),
                    (position[idx + 1], -1.0 / h2),
                    (position[idx + side], -1.0 / h2),
                ];
                entries.sort_by_key(|e| e.0);
                for (c, w) in entries {
                    cols.push(c);
                    vals.push(w);
                }
                rhs.push(prob.f[idx]);
            }
        }
        row_ptr.push(cols.len());
    }
    SparseSystem {
        grid,
        unknowns,
        position,
        row_ptr,
        cols,
        vals,
        rhs,
    }
}

impl SparseSystem {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|r| {
                let (c, v) = self.row(r);
                c.iter().zip(v).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn gather(&self, u: &GridFunction) -> Vec<f64> {
        self.unknowns.iter().map(|&idx| u[idx]).collect()
    }

    pub fn scatter(&self, x: &[f64]) -> GridFunction {
        let mut u = GridFunction::zeros(self.grid);
        for (&idx, &v) in self.unknowns.iter().zip(x) {
            u[idx] = v;
        }
        u
    }

    /// `rhs - A u` in unknown order.
    pub fn residual(&self, u: &GridFunction) -> Vec<f64> {
        let x = self.gather(u);
        self.matvec(&x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, b)| b - ax)
            .collect()
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut triplets = Vec::with_capacity(self.vals.len());
        for r in 0..self.len() {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                triplets.push(Triplet::new(r, c, v));
            }
        }
        SparseColMat::try_new_from_triplets(self.len(), self.len(), &triplets)
            .map_err(|e| Error::SingularSystem(format!("{e:?}")))
    }
}

/// Sparse LU factorization of a level's system, reused for every right-hand side.
pub struct DirectSolver {
    system: SparseSystem,
    lu: Lu<usize, f64>,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectSolver")
            .field("unknowns", &self.system.len())
            .finish()
    }
}

impl DirectSolver {
    pub fn new(disc: &Discretization) -> Result<Self> {
        let system = assemble_system(&ProblemData::homogeneous(disc), disc);
        if system.is_empty() {
            return Err(Error::SingularSystem("no unknowns".into()));
        }
        let lu = system
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::SingularSystem(format!("{e:?}")))?;
        let solver = Self { system, lu };
        // Reject numerically singular factorizations.
        let ones = vec![1.0; solver.system.len()];
        let b = solver.system.matvec(&ones);
        let x = solver.solve_vec(&b)?;
        let err = x.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
        if !(err < 1e-6) {
            return Err(Error::SingularSystem(format!(
                "factorization reproduces a unit solution only to {err:e}"
            )));
        }
        Ok(solver)
    }

    pub fn system(&self) -> &SparseSystem {
        &self.system
    }

    fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        let x: Vec<f64> = (0..b.len()).map(|i| rhs[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok(x)
    }

    /// Exact solution of the discrete system for the given data.
    pub fn solve(&self, prob: &ProblemData, disc: &Discretization) -> Result<GridFunction> {
        let b: Vec<f64> = self
            .system
            .unknowns
            .iter()
            .map(|&idx| match disc.ghost_index(idx) {
                Some(g) => prob.g[g],
                None => prob.f[idx],
            })
            .collect();
        Ok(self.system.scatter(&self.solve_vec(&b)?))
    }

    /// Solve with right-hand side read from a defect-like field: interior
    /// entries are the source, ghost entries the boundary data.
    pub fn solve_field(&self, rhs: &GridFunction) -> Result<GridFunction> {
        let b: Vec<f64> = self.system.unknowns.iter().map(|&idx| rhs[idx]).collect();
        Ok(self.system.scatter(&self.solve_vec(&b)?))
    }
}
