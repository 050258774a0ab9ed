//! Dense real symmetric kernels for the interior-point solver: matmul,
//! Cholesky, Jacobi eigendecomposition and the complex-to-real embedding.

use num_complex::Complex64;

use crate::operators::ComplexMatrix;

/// Dense real square matrix, row-major.
#[derive(Debug, Clone)]
pub struct RMat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl RMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_assign_scaled(&mut self, other: &RMat, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * *b;
        }
    }

    pub fn scale(&self, s: f64) -> RMat {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= s;
        }
        m
    }

    pub fn sub(&self, other: &RMat) -> RMat {
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        m
    }

    pub fn add(&self, other: &RMat) -> RMat {
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        m
    }

    pub fn transpose(&self) -> RMat {
        let n = self.n;
        let mut m = RMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j];
            }
        }
        m
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = RMat::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn dot(&self, other: &RMat) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Lower Cholesky factor; fails on loss of positivity.
    pub fn cholesky(&self) -> Option<RMat> {
        let n = self.n;
        let mut l = RMat::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.at(i, j);
                for k in 0..j {
                    sum -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if sum <= 0.0 {
                        return None;
                    }
                    l.set(i, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.at(j, j));
                }
            }
        }
        Some(l)
    }

    /// Solves L x = b for lower-triangular self.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.at(i, k) * x[k];
            }
            x[i] /= self.at(i, i);
        }
        x
    }

    /// Solves L^T x = b for lower-triangular self.
    pub fn solve_lower_t(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.at(k, i) * x[k];
            }
            x[i] /= self.at(i, i);
        }
        x
    }

    /// X with L X = B (matrix right-hand side).
    pub fn solve_lower_mat(&self, b: &RMat) -> RMat {
        let n = self.n;
        let mut x = b.clone();
        for i in 0..n {
            for k in 0..i {
                let lik = self.at(i, k);
                if lik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    x.data[i * n + j] -= lik * x.data[k * n + j];
                }
            }
            let d = self.at(i, i);
            for j in 0..n {
                x.data[i * n + j] /= d;
            }
        }
        x
    }

    /// Eigendecomposition of a symmetric matrix via Householder
    /// tridiagonalization and implicit QL with shifts. Returns eigenvalues
    /// ascending and the orthogonal matrix of column eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, RMat) {
        let n = self.n;
        if n == 0 {
            return (vec![], RMat::zeros(0));
        }
        let mut a = self.clone();
        a.symmetrize();
        let mut d = vec![0.0f64; n];
        let mut e = vec![0.0f64; n];
        tred2(&mut a, &mut d, &mut e);
        if !tqli(&mut d, &mut e, &mut a) {
            // extremely rare non-convergence: fall back to Jacobi
            return self.eigh_jacobi();
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
        let evals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
        let mut vecs = RMat::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vecs.set(i, newj, a.at(i, oldj));
            }
        }
        (evals, vecs)
    }

    /// Cyclic Jacobi fallback; slower but unconditionally robust.
    pub fn eigh_jacobi(&self) -> (Vec<f64>, RMat) {
        let n = self.n;
        let mut a = self.clone();
        a.symmetrize();
        let mut v = RMat::identity(n);
        if n == 0 {
            return (vec![], v);
        }
        let tol = 1e-15 * a.frob_norm().max(1e-300);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.at(p, q) * a.at(p, q);
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.at(p, q);
                    if apq.abs() <= 1e-300 {
                        a.set(p, q, 0.0);
                        a.set(q, p, 0.0);
                        continue;
                    }
                    let tau = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for i in 0..n {
                        let aip = a.at(i, p);
                        let aiq = a.at(i, q);
                        a.set(i, p, c * aip - s * aiq);
                        a.set(i, q, s * aip + c * aiq);
                    }
                    for j in 0..n {
                        let apj = a.at(p, j);
                        let aqj = a.at(q, j);
                        a.set(p, j, c * apj - s * aqj);
                        a.set(q, j, s * apj + c * aqj);
                    }
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    for i in 0..n {
                        let vip = v.at(i, p);
                        let viq = v.at(i, q);
                        v.set(i, p, c * vip - s * viq);
                        v.set(i, q, s * vip + c * viq);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.at(i, i).partial_cmp(&a.at(j, j)).unwrap());
        let evals: Vec<f64> = order.iter().map(|&i| a.at(i, i)).collect();
        let mut vecs = RMat::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vecs.set(i, newj, v.at(i, oldj));
            }
        }
        (evals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().0.first().copied().unwrap_or(0.0)
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form with
/// accumulated transformations, after Martin, Reinsch and Wilkinson.
fn tred2(a: &mut RMat, d: &mut [f64], e: &mut [f64]) {
    let n = a.n;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a.at(i, k).abs()).sum();
            if scale == 0.0 {
                e[i] = a.at(i, l);
            } else {
                for k in 0..=l {
                    let v = a.at(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.at(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = 0.0f64;
                for j in 0..=l {
                    a.set(j, i, a.at(i, j) / h);
                    let mut g2 = 0.0f64;
                    for k in 0..=j {
                        g2 += a.at(j, k) * a.at(i, k);
                    }
                    for k in (j + 1)..=l {
                        g2 += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = g2 / h;
                    f_acc += e[j] * a.at(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f2 = a.at(i, j);
                    let g2 = e[j] - hh * f2;
                    e[j] = g2;
                    for k in 0..=j {
                        let v = a.at(j, k) - f2 * e[k] - g2 * a.at(i, k);
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.at(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0f64;
                for k in 0..i {
                    g += a.at(i, k) * a.at(k, j);
                }
                for k in 0..i {
                    let v = a.at(k, j) - g * a.at(k, i);
                    a.set(k, j, v);
                }
            }
        }
        d[i] = a.at(i, i);
        a.set(i, i, 1.0);
        for j in 0..i {
            a.set(j, i, 0.0);
            a.set(i, j, 0.0);
        }
    }
}

/// Implicit QL with Wilkinson shifts on a tridiagonal matrix, rotations
/// accumulated into `z`. Returns false on non-convergence.
fn tqli(d: &mut [f64], e: &mut [f64], z: &mut RMat) -> bool {
    let n = d.len();
    if n == 0 {
        return true;
    }
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
            if iter > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z.at(k, i + 1);
                    z.set(k, i + 1, s * z.at(k, i) + c * f);
                    z.set(k, i, c * z.at(k, i) - s * f);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Embeds a complex Hermitian matrix as the real symmetric block matrix
/// [[Re, -Im], [Im, Re]].
pub fn embed(m: &ComplexMatrix) -> RMat {
    let d = m.rows();
    let n = 2 * d;
    let mut out = RMat::zeros(n);
    for i in 0..d {
        for j in 0..d {
            let v = m[(i, j)];
            out.set(i, j, v.re);
            out.set(i + d, j + d, v.re);
            out.set(i + d, j, v.im);
            out.set(i, j + d, -v.im);
        }
    }
    out
}

/// Inverse of `embed`, averaging the redundant blocks back to an exactly
/// Hermitian complex matrix.
pub fn unembed(m: &RMat) -> ComplexMatrix {
    let d = m.n / 2;
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re = 0.5 * (m.at(i, j) + m.at(i + d, j + d));
            let im = 0.5 * (m.at(i + d, j) - m.at(i, j + d));
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    out.symmetrize()
}
