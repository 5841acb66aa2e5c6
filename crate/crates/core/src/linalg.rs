//! Small dense linear algebra on row-major buffers: Cholesky factorization
//! (strict and semidefinite-tolerant) and triangular solves.

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor of `a + jitter * I`. Returns `None` when a pivot is
/// not strictly positive.
pub fn cholesky(a: &SquareMatrix, jitter: f64) -> Option<SquareMatrix> {
    factor(a, jitter, None)
}

/// Cholesky that tolerates positive semidefinite input: a pivot within
/// `tol` of zero zeroes its column instead of failing. Pivots below `-tol`
/// still fail.
pub fn cholesky_semidefinite(a: &SquareMatrix, jitter: f64, tol: f64) -> Option<SquareMatrix> {
    factor(a, jitter, Some(tol))
}

fn factor(a: &SquareMatrix, jitter: f64, tol: Option<f64>) -> Option<SquareMatrix> {
    let n = a.n;
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let (done, rest) = l.data.split_at_mut(j * n);
        let row_j = &mut rest[..n];
        for k in 0..j {
            let row_k = &done[k * n..k * n + n];
            let lkk = row_k[k];
            let s = a.data[j * n + k] - dot(&row_j[..k], &row_k[..k]);
            row_j[k] = if lkk > 0.0 { s / lkk } else { 0.0 };
        }
        let d = a.data[j * n + j] + jitter - dot(&row_j[..j], &row_j[..j]);
        match tol {
            _ if d > 0.0 && d.is_finite() && tol.is_none_or(|t| d > t) => row_j[j] = d.sqrt(),
            Some(t) if d.abs() <= t => row_j[j] = 0.0,
            _ => return None,
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`. Zero pivots yield zero entries.
pub fn forward_solve(l: &SquareMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = vec![0.0; n];
    for i in 0..n {
        let row = l.row(i);
        let s = b[i] - dot(&row[..i], &x[..i]);
        x[i] = if row[i] > 0.0 { s / row[i] } else { 0.0 };
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub fn backward_solve_transposed(l: &SquareMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let lii = l.get(i, i);
        x[i] = if lii > 0.0 { x[i] / lii } else { 0.0 };
        let xi = x[i];
        for k in 0..i {
            x[k] -= l.get(i, k) * xi;
        }
    }
    x
}

/// `L y` for lower-triangular `L`.
pub fn lower_mul(l: &SquareMatrix, v: &[f64]) -> Vec<f64> {
    (0..l.n).map(|i| dot(&l.row(i)[..=i], &v[..=i])).collect()
}
