//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL iterations (the classical tred2/tql2 pair).

use std::hash::{Hash, Hasher};

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// Relative symmetry tolerance accepted by [`eig_sym`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Residual tolerance relative to `max(1, ||A||_inf)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<f64>,
    /// Largest measured `||A h - lambda h||_2` over all pairs.
    pub residual_bound: f64,
    id: u64,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(k)
    }

    /// Fingerprint of the decomposition, used to tie derived kernels to
    /// their source.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// `sum_k f(lambda_k) h_k h_k^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.columns_mut().into_iter().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        scaled.dot(&self.eigenvectors.t())
    }

    /// Eigenvalues grouped into runs whose consecutive gaps are within
    /// `tol`; returns `(start, len)` index ranges.
    pub fn groups(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            if k == self.eigenvalues.len() || self.eigenvalues[k] - self.eigenvalues[k - 1] > tol {
                out.push((start, k - start));
                start = k;
            }
        }
        out
    }
}

/// Grouping tolerance for treating two eigenvalues as equal.
pub fn grouping_tolerance(decomp: &EigenDecomposition) -> f64 {
    let max = decomp.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    1e-8 * max.max(1.0)
}

fn inf_norm(a: &Array2<f64>) -> f64 {
    a.rows().into_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are ascending; each eigenvector is oriented so that its
/// largest-magnitude coordinate is positive, ties going to the lowest index.
pub fn eig_sym(a: &Array2<f64>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in i + 1..n {
            let diff = (a[[i, j]] - a[[j, i]]).abs();
            if diff > SYMMETRY_TOL * scale {
                return Err(Error::Asymmetric { row: i, col: j, diff });
            }
        }
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: Array2::zeros((0, 0)),
            residual_bound: 0.0,
            id: 0,
        });
    }

    // row-major working copy of the (symmetrized) input
    let mut v: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            v.push(0.5 * (a[[i, j]] + a[[j, i]]));
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e);

    // tql2 rotates pairs of columns; work on the transpose so each
    // rotation touches two contiguous rows.
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            vt[j * n + i] = v[i * n + j];
        }
    }
    drop(v);
    ql_implicit(n, &mut d, &mut e, &mut vt)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]).then(x.cmp(&y)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        let src = &vt[k * n..(k + 1) * n];
        let max = src.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let pivot = src.iter().position(|x| x.abs() >= max * (1.0 - 1e-9)).unwrap_or(0);
        let sign = if src[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[[i, col]] = sign * src[i];
        }
    }

    let residual = a.dot(&vectors);
    let mut residual_bound = 0.0f64;
    for k in 0..n {
        let r: f64 = (0..n)
            .map(|i| {
                let x = residual[[i, k]] - eigenvalues[k] * vectors[[i, k]];
                x * x
            })
            .sum::<f64>()
            .sqrt();
        residual_bound = residual_bound.max(r);
    }
    let tolerance = RESIDUAL_TOL * inf_norm(a).max(1.0);
    if residual_bound > tolerance {
        return Err(Error::ResidualTooLarge { residual: residual_bound, tolerance });
    }

    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    for x in eigenvalues.iter().chain(vectors.iter()) {
        x.to_bits().hash(&mut hasher);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors, residual_bound, id: hasher.finish() })
}

/// Householder reduction of the row-major symmetric matrix `v` to
/// tridiagonal form. On return `d` holds the diagonal, `e[1..]` the
/// subdiagonal and `v` the accumulated orthogonal transformation.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; `vt` holds eigenvectors as rows.
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64], vt: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let budget = 100 * n * n;
    let mut iterations = 0usize;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > budget {
                    return Err(Error::NotConverged { iterations: budget });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_next = &mut hi[..n];
                    for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
