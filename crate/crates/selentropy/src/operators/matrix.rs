//! Dense complex matrices and the spectral kernels everything else builds on.
//!
//! Storage is row-major `Vec<Complex64>`, i.e. interleaved re/im pairs in
//! memory. All systems stay below dimension ~64 so there is no sparse path.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Rank tolerance: eigenvalues below `1e-10 * max(1, |m|_inf)` are kernel.
pub fn rank_tolerance(op_norm: f64) -> f64 {
    1e-10 * op_norm.max(1.0)
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C_ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C_ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// Column vector from complex amplitudes.
    pub fn col_vec(v: &[Complex64]) -> Self {
        let mut m = Self::zeros(v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            m[(i, 0)] = *x;
        }
        m
    }

    /// Rank-1 projector |v><v| / nothing normalized here.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= s;
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v += *w;
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v -= *w;
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dims {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C_ZERO {
                    continue;
                }
                let lhs = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(lhs) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product tr(A^dag B).
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Kronecker product with `self`'s indices outermost.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let mut m = Self::zeros(r1 * r2, c1 * c2);
        for i1 in 0..r1 {
            for j1 in 0..c1 {
                let a = self[(i1, j1)];
                if a == C_ZERO {
                    continue;
                }
                for i2 in 0..r2 {
                    for j2 in 0..c2 {
                        m[(i1 * r2 + i2, j1 * c2 + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        m
    }

    /// Max deviation from Hermiticity in the entrywise sup norm.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Entrywise sup norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// (M + M^dag)/2.
    pub fn symmetrize(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
    ///
    /// Returns eigenvalues in descending order with the unitary of column
    /// eigenvectors. Input is symmetrized; callers check Hermiticity first.
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.symmetrize();
        let mut v = Self::identity(n);
        if n == 0 {
            return (vec![], v);
        }
        let scale = a.frob_norm().max(1e-300);
        let tol = 1e-15 * scale;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let g = apq.norm();
                    if g <= 1e-300 {
                        a[(p, q)] = C_ZERO;
                        a[(q, p)] = C_ZERO;
                        continue;
                    }
                    let phase = apq / g;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G restricted to (p,q): [[c*phase, s*phase], [-s, c]].
                    let gpp = phase * c;
                    let gpq = phase * s;
                    let gqp = Complex64::new(-s, 0.0);
                    let gqq = Complex64::new(c, 0.0);
                    // A <- G^dag A G : columns then rows.
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * gpp + aiq * gqp;
                        a[(i, q)] = aip * gpq + aiq * gqq;
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
                        a[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
                    }
                    a[(p, q)] = C_ZERO;
                    a[(q, p)] = C_ZERO;
                    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * gpp + viq * gqp;
                        v[(i, q)] = vip * gpq + viq * gqq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
        let evals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let evecs = Self::from_fn(n, n, |i, j| v[(i, order[j])]);
        (evals, evecs)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> f64 {
        if self.is_square() && self.hermiticity_deviation() <= 1e-12 * self.max_abs().max(1.0) {
            let (evals, _) = self.eigh();
            evals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        } else {
            self.singular_values().first().copied().unwrap_or(0.0)
        }
    }

    /// One-sided Jacobi orthogonalization: returns (W, V) with
    /// `self * V = W`, W having mutually orthogonal columns. Avoids the
    /// precision loss of forming M^dag M.
    fn jacobi_onesided(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (n, m) = (self.rows, self.cols);
        let mut w = self.clone();
        let mut v = Self::identity(m);
        let scale: f64 = w.frob_norm().max(1e-300);
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..m {
                for q in (p + 1)..m {
                    let mut a = 0.0f64;
                    let mut b = 0.0f64;
                    let mut d = C_ZERO;
                    for i in 0..n {
                        let wp = w[(i, p)];
                        let wq = w[(i, q)];
                        a += wp.norm_sqr();
                        b += wq.norm_sqr();
                        d += wp.conj() * wq;
                    }
                    let g = d.norm();
                    if g <= 1e-15 * (a * b).sqrt().max(1e-30 * scale * scale) {
                        continue;
                    }
                    rotated = true;
                    let phase = d / g;
                    let tau = (b - a) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let gpp = phase * c;
                    let gpq = phase * s;
                    let gqp = Complex64::new(-s, 0.0);
                    let gqq = Complex64::new(c, 0.0);
                    for i in 0..n {
                        let wp = w[(i, p)];
                        let wq = w[(i, q)];
                        w[(i, p)] = wp * gpp + wq * gqp;
                        w[(i, q)] = wp * gpq + wq * gqq;
                    }
                    for i in 0..m {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)];
                        v[(i, p)] = vp * gpp + vq * gqp;
                        v[(i, q)] = vp * gpq + vq * gqq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        (w, v)
    }

    /// Singular values in descending order, by one-sided Jacobi.
    pub fn singular_values(&self) -> Vec<f64> {
        let (w, _) = self.jacobi_onesided();
        let mut s: Vec<f64> = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    /// Trace norm |M|_1 = sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Thin SVD `M = U diag(s) V^dag` keeping singular values above
    /// `rank_tolerance` of the largest. Returns (u, s, v) with `u`, `v`
    /// holding the kept columns.
    pub fn svd(&self) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
        let (w, v_full) = self.jacobi_onesided();
        let mut order: Vec<(f64, usize)> = (0..self.cols)
            .map(|j| {
                let norm =
                    (0..self.rows).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                (norm, j)
            })
            .collect();
        order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let smax = order.first().map(|(n, _)| *n).unwrap_or(0.0);
        let tol = rank_tolerance(smax);
        let mut s = Vec::new();
        let mut ucols: Vec<Vec<Complex64>> = Vec::new();
        let mut vcols: Vec<Vec<Complex64>> = Vec::new();
        for (sv, j) in order {
            if sv <= tol {
                break;
            }
            ucols.push((0..self.rows).map(|i| w[(i, j)] / sv).collect());
            vcols.push((0..self.cols).map(|i| v_full[(i, j)]).collect());
            s.push(sv);
        }
        let u = Self::from_fn(self.rows, s.len(), |i, j| ucols[j][i]);
        let v = Self::from_fn(self.cols, s.len(), |i, j| vcols[j][i]);
        (u, s, v)
    }

    /// Polar partial isometry W with `M = W |M|`, supported on supp(|M|).
    pub fn polar_isometry(&self) -> ComplexMatrix {
        let (u, s, v) = self.svd();
        let mut w = Self::zeros(self.rows, self.cols);
        for k in 0..s.len() {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    w[(i, j)] += u[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        w
    }

    pub fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimMismatch(format!("{}x{} not square", self.rows, self.cols)));
        }
        let dev = self.hermiticity_deviation();
        let tol = 1e-10 * self.max_abs().max(1.0);
        if dev > tol {
            return Err(Error::NotHermitian { dev, tol });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix kept Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    matrix: ComplexMatrix,
}

impl HermitianOp {
    /// Validates the Hermiticity deviation, then symmetrizes.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.check_hermitian()?;
        Ok(Self { matrix: matrix.symmetrize() })
    }

    /// Symmetrizes without the deviation check; for internal arithmetic
    /// whose inputs are already Hermitian.
    pub fn from_symmetrized(matrix: ComplexMatrix) -> Self {
        Self { matrix: matrix.symmetrize() }
    }

    pub fn zeros(n: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn diag(entries: &[f64]) -> Self {
        Self { matrix: ComplexMatrix::diag(entries) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.sub(&other.matrix) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: self.matrix.scale_re(s) }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.kron(&other.matrix) }
    }

    /// tr(A B), real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        self.matrix.hs_inner(&other.matrix).re
    }

    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        self.matrix.eigh()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn op_norm(&self) -> f64 {
        let (evals, _) = self.eigh();
        evals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (evals, _) = self.eigh();
        evals.last().copied().unwrap_or(0.0)
    }

    /// Conjugation L . L^dag by an arbitrary matrix.
    pub fn conjugate_by(&self, l: &ComplexMatrix) -> Self {
        Self::from_symmetrized(l.mul(&self.matrix).mul(&l.adjoint()))
    }

    /// Applies `f` to eigenvalues on the support; kernel eigenvalues
    /// (|lambda| below the rank tolerance) stay at zero. Errors when `f`
    /// returns a non-finite value at a support eigenvalue.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (evals, vecs) = self.eigh();
        let tol = rank_tolerance(evals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &l) in evals.iter().enumerate() {
            if l.abs() <= tol {
                continue;
            }
            let fl = f(l);
            if !fl.is_finite() {
                return Err(Error::Domain(l));
            }
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = vecs[(i, k)];
                if vik == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * vecs[(j, k)].conj() * fl;
                }
            }
        }
        Ok(Self::from_symmetrized(out))
    }

    /// Positive part {M}_+ .
    pub fn positive_part(&self) -> Self {
        self.apply_fn(|l| if l > 0.0 { l } else { 0.0 }).expect("positive part is total")
    }

    /// Square root on the support.
    pub fn sqrt(&self) -> Self {
        self.apply_fn(|l| if l > 0.0 { l.sqrt() } else { 0.0 }).expect("sqrt clips negatives")
    }

    /// Generalized inverse (inverse on the support).
    pub fn generalized_inverse(&self) -> Self {
        self.apply_fn(|l| 1.0 / l).expect("kernel excluded")
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> Self {
        self.apply_fn(|_| 1.0).expect("projector is total")
    }

    pub fn rank(&self) -> usize {
        let (evals, _) = self.eigh();
        let tol = rank_tolerance(evals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        evals.iter().filter(|l| l.abs() > tol).count()
    }
}
