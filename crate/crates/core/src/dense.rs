//! Small dense linear algebra shared by block smoothing and the 1D solver.

/// A small dense LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub(crate) struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl DenseLu {
    pub(crate) fn factor(mut a: Vec<f64>, n: usize) -> Option<Self> {
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))?;
            if a[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            for r in k + 1..n {
                let m = a[r * n + k] / a[k * n + k];
                a[r * n + k] = m;
                for c in k + 1..n {
                    a[r * n + c] -= m * a[k * n + c];
                }
            }
        }
        Some(Self { n, lu: a, piv })
    }

    pub(crate) fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        for r in 0..n {
            x[r] = b[self.piv[r]];
        }
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
    }
}
