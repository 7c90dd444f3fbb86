//! Dense linear algebra at the sizes this crate needs (tens of rows).

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat::from_rows(self.rows, self.cols, data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))?;
        if m[(pivot, col)].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
            }
            x.swap(pivot, col);
        }
        let diag = m[(col, col)];
        for row in col + 1..n {
            let factor = m[(row, col)] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[(row, j)] -= factor * m[(col, j)];
            }
            x[row] -= factor * x[col];
        }
    }
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| m[(row, j)] * x[j]).sum();
        x[row] = (x[row] - tail) / m[(row, row)];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &Mat) -> Option<Mat> {
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            if i == j {
                let d = a[(i, i)] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[(i, i)] = d.sqrt();
            } else {
                l[(i, j)] = (a[(i, j)] - s) / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive-definite matrix.
pub fn invert_spd(a: &Mat) -> Option<Mat> {
    let n = a.rows;
    let l = cholesky(a)?;
    let mut inv = Mat::zeros(n, n);
    for col in 0..n {
        // forward then backward substitution against e_col
        let mut y = vec![0.0; n];
        for i in 0..n {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
            y[i] = (rhs - s) / l[(i, i)];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
            x[i] = (y[i] - s) / l[(i, i)];
        }
        for i in 0..n {
            inv[(i, col)] = x[i];
        }
    }
    Some(inv)
}

/// Ordinary least squares result.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residual variance with `n - k` degrees of freedom.
    pub sigma2: f64,
    /// Standard errors of the coefficients.
    pub std_errors: Vec<f64>,
}

/// OLS via Householder QR. Returns `None` for rank-deficient designs.
pub fn least_squares(design: &Mat, y: &[f64]) -> Option<LeastSquares> {
    let (n, k) = (design.rows, design.cols);
    assert_eq!(y.len(), n);
    if n <= k {
        return None;
    }
    let mut r = design.clone();
    let mut qty = y.to_vec();
    let col_scale: Vec<f64> = (0..k)
        .map(|j| (0..n).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt())
        .collect();
    for j in 0..k {
        let norm: f64 = (j..n).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt();
        if norm <= 1e-10 * col_scale[j].max(f64::MIN_POSITIVE) {
            return None;
        }
        let alpha = if r[(j, j)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| r[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in j..k {
                let dot: f64 = (j..n).map(|i| v[i - j] * r[(i, c)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..n {
                    r[(i, c)] -= f * v[i - j];
                }
            }
            let dot: f64 = (j..n).map(|i| v[i - j] * qty[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                qty[i] -= f * v[i - j];
            }
        }
        if r[(j, j)].abs() <= 1e-10 * col_scale[j] {
            return None;
        }
    }
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[(i, j)] * beta[j]).sum();
        beta[i] = (qty[i] - s) / r[(i, i)];
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..k).map(|j| design[(i, j)] * beta[j]).sum::<f64>())
        .collect();
    let sigma2 = residuals.iter().map(|e| e * e).sum::<f64>() / (n - k) as f64;
    // diag((R'R)^-1) = squared row norms of R^-1
    let mut rinv = Mat::zeros(k, k);
    for col in 0..k {
        for i in (0..=col).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=col).map(|j| r[(i, j)] * rinv[(j, col)]).sum();
            rinv[(i, col)] = (rhs - s) / r[(i, i)];
        }
    }
    let std_errors = (0..k)
        .map(|i| (sigma2 * (i..k).map(|j| rinv[(i, j)] * rinv[(i, j)]).sum::<f64>()).sqrt())
        .collect();
    Some(LeastSquares {
        coefficients: beta,
        residuals,
        sigma2,
        std_errors,
    })
}
