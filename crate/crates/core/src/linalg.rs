//! Dense and tridiagonal symmetric eigen-machinery.
//!
//! Everything here is dependency-free: Sturm-sequence bisection and inverse
//! iteration for symmetric tridiagonal systems, Householder reduction plus
//! implicit-shift QL for dense symmetric matrices, and Cholesky utilities
//! for the generalized pencils used by the observability module.

use crate::error::{GrlbError, Result};

/// Symmetric matrix stored densely, row-major, n x n.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below `x`, by counting negative Sturm-sequence pivots.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..n {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if d != 0.0 { e2 / d } else { e2 / 1e-300 };
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix by bisection.
pub fn tridiag_lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert!(k <= n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i == 0 { 0.0 } else { off[i - 1].abs() }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(k);
    for idx in 1..=k {
        let (mut a, mut b) = (lo, hi);
        // Eigenvalue #idx is the smallest x with sturm_count(x) >= idx.
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) >= idx {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-14 * b.abs().max(1.0) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Eigenvector of a symmetric tridiagonal matrix for an isolated eigenvalue,
/// by inverse iteration with a shifted LU (Thomas) solve.
pub fn tridiag_eigenvector(diag: &[f64], off: &[f64], eigenvalue: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    let shift = eigenvalue + 1e-10 * eigenvalue.abs().max(1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i as f64 * 0.7391 + 0.361).sin()).abs() + 0.01)
        .collect();
    normalize(&mut v);
    let mut residual = f64::INFINITY;
    for _ in 0..50 {
        let w = solve_shifted_tridiag(diag, off, shift, &v)?;
        v = w;
        normalize(&mut v);
        residual = tridiag_residual(diag, off, eigenvalue, &v);
        if residual < 1e-11 {
            break;
        }
    }
    if residual > 1e-6 {
        return Err(GrlbError::EigenNonConvergence { residual });
    }
    // Sign convention: first nonzero entry positive.
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(v)
}

fn tridiag_residual(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut r = (diag[i] - lambda) * v[i];
        if i > 0 {
            r += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += off[i] * v[i + 1];
        }
        worst = worst.max(r.abs());
    }
    worst
}

fn solve_shifted_tridiag(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0] - shift;
    if denom.abs() < 1e-300 {
        denom = 1e-300;
    }
    c[0] = if n > 1 { off[0] / denom } else { 0.0 };
    d[0] = rhs[0] / denom;
    for i in 1..n {
        let mut m = diag[i] - shift - off[i - 1] * c[i - 1];
        if m.abs() < 1e-300 {
            m = 1e-300;
        }
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(GrlbError::LinearSolveFailure(
            "shifted tridiagonal solve produced non-finite values".into(),
        ));
    }
    Ok(x)
}

/// Thomas solve of a general (not necessarily symmetric) tridiagonal system.
pub fn solve_tridiag(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom.abs() < 1e-300 {
        return Err(GrlbError::LinearSolveFailure("zero pivot".into()));
    }
    c[0] = if n > 1 { upper[0] / denom } else { 0.0 };
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom.abs() < 1e-300 {
            return Err(GrlbError::LinearSolveFailure("zero pivot".into()));
        }
        if i + 1 < n {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form,
/// followed by implicit-shift QL. Returns (eigenvalues ascending, eigenvectors
/// as columns of the returned matrix).
pub fn sym_eigen(a: &SymMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.n;
    let mut z: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut z, &mut d, &mut e)?;
    // Sort ascending, carrying columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| z[row][col]).collect())
        .collect();
    Ok((eigenvalues, eigenvectors))
}

// Householder tridiagonalization, Numerical-Recipes style (accumulates the
// transformation in z so eigenvectors come back in the original basis).
fn tred2(z: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = z.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = z[i][..=l].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = z[i][l];
            } else {
                for v in z[i][..=l].iter_mut() {
                    *v /= scale;
                }
                h = z[i][..=l].iter().map(|v| v * v).sum();
                let f = z[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[i][l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z[j][i] = z[i][j] / h;
                    let mut g2 = 0.0;
                    for k in 0..=j {
                        g2 += z[j][k] * z[i][k];
                    }
                    for k in (j + 1)..=l {
                        g2 += z[k][j] * z[i][k];
                    }
                    e[j] = g2 / h;
                    f_acc += e[j] * z[i][j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i][j];
                    let g2 = e[j] - hh * f;
                    e[j] = g2;
                    for k in 0..=j {
                        z[j][k] -= f * e[k] + g2 * z[i][k];
                    }
                }
            }
        } else {
            e[i] = z[i][l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[i][k] * z[k][j];
                }
                for k in 0..i {
                    z[k][j] -= g * z[k][i];
                }
            }
        }
        d[i] = z[i][i];
        z[i][i] = 1.0;
        for j in 0..i {
            z[j][i] = 0.0;
            z[i][j] = 0.0;
        }
    }
}

// Implicit-shift QL on the tridiagonal produced by tred2.
fn tql2(z: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = z.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(GrlbError::EigenNonConvergence { residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if r == 0.0 && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Cholesky factorization A = L Lᵀ. Fails on non-positive pivots.
pub fn cholesky(a: &SymMatrix) -> Result<Vec<Vec<f64>>> {
    let n = a.n;
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(GrlbError::LinearSolveFailure(format!(
                        "Cholesky breakdown at pivot {i} (value {sum:e})"
                    )));
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Solve L x = b with L lower triangular.
pub fn forward_substitute(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Solve Lᵀ x = b with L lower triangular.
pub fn back_substitute_transposed(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// Solve A x = b through an existing Cholesky factor.
pub fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let y = forward_substitute(l, b);
    back_substitute_transposed(l, &y)
}

/// Largest generalized eigenvalue (and eigenvector) of the pencil
/// E v = λ G v with G symmetric positive definite and E symmetric:
/// Cholesky G = L Lᵀ, then a dense symmetric eigensolve of L⁻¹ E L⁻ᵀ.
pub fn pencil_largest(e: &SymMatrix, g: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let n = g.n;
    // Diagonal equilibration of G keeps the Cholesky well-scaled.
    let scales: Vec<f64> = (0..n).map(|i| g.get(i, i).max(1e-300).sqrt()).collect();
    let mut gs = SymMatrix::zeros(n);
    let mut es = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            gs.set(i, j, g.get(i, j) / (scales[i] * scales[j]));
            es.set(i, j, e.get(i, j) / (scales[i] * scales[j]));
        }
    }
    let l = cholesky(&gs)?;
    // M = L^{-1} E_s L^{-T}.
    let mut m = SymMatrix::zeros(n);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| es.get(i, j)).collect();
        cols.push(forward_substitute(&l, &col));
    }
    // cols[j] = L^{-1} E_s e_j ; now m = (L^{-1} E_s) L^{-T} via rows.
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| cols[j][i]).collect();
        let solved = forward_substitute(&l, &row);
        for j in 0..n {
            m.data[i * n + j] = solved[j];
        }
    }
    // Re-symmetrize against roundoff.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
            m.data[i * n + j] = avg;
            m.data[j * n + i] = avg;
        }
    }
    let (vals, vecs) = sym_eigen(&m)?;
    let lambda = *vals.last().unwrap();
    let u = vecs.last().unwrap();
    // Back-transform: v = D^{-1} L^{-T} u with D the equilibration scaling.
    let mut v = back_substitute_transposed(&l, u);
    for i in 0..n {
        v[i] /= scales[i];
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok((lambda, v))
}
