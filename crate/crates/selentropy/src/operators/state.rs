//! Labeled tensor factorizations and sub-normalized multipartite states.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{rank_tolerance, ComplexMatrix, HermitianOp, C_ZERO};

/// Eigenvalues in [-PSD_CLIP, 0) are clipped to zero; anything below is an
/// error.
pub const PSD_CLIP: f64 = 1e-9;

/// Trace may exceed 1 by at most this much before rejection.
pub const TRACE_SLACK: f64 = 1e-9;

/// Ordered list of labeled tensor factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    factors: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new(factors: &[(&str, usize)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (label, dim) in factors {
            if *dim == 0 {
                return Err(Error::Argument(format!("factor `{label}` has dimension 0")));
            }
            if !seen.insert(label.to_string()) {
                return Err(Error::Argument(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { factors: factors.iter().map(|(l, d)| (l.to_string(), *d)).collect() })
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::new(&[(label, dim)]).expect("single factor")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::Layout(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label).map(|p| self.factors[p].1)
    }

    /// Product of dimensions of the given labels.
    pub fn dim_of_all(&self, labels: &[&str]) -> Result<usize> {
        let mut d = 1usize;
        for l in labels {
            d *= self.dim_of(l)?;
        }
        Ok(d)
    }

    fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        strides
    }

    pub fn appended(&self, label: &str, dim: usize) -> Result<Self> {
        let mut factors: Vec<(&str, usize)> =
            self.factors.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        factors.push((label, dim));
        Self::new(&factors)
    }
}

/// Positive semi-definite operator with 0 < trace <= 1 and a labeled tensor
/// factorization.
#[derive(Debug, Clone)]
pub struct MultipartiteState {
    op: HermitianOp,
    layout: SystemLayout,
    trace: f64,
}

impl MultipartiteState {
    /// Validates Hermiticity, positivity (clipping eigenvalues in
    /// [-PSD_CLIP, 0)) and the trace bound.
    pub fn new(matrix: ComplexMatrix, layout: SystemLayout) -> Result<Self> {
        if matrix.rows() != layout.total_dim() {
            return Err(Error::DimMismatch(format!(
                "matrix dim {} vs layout dim {}",
                matrix.rows(),
                layout.total_dim()
            )));
        }
        let op = HermitianOp::new(matrix)?;
        let (evals, vecs) = op.eigh();
        let min = evals.last().copied().unwrap_or(0.0);
        if min < -PSD_CLIP {
            return Err(Error::NotPsd(min));
        }
        let op = if min < 0.0 {
            let clipped: Vec<f64> = evals.iter().map(|l| l.max(0.0)).collect();
            let d = ComplexMatrix::diag(&clipped);
            HermitianOp::from_symmetrized(vecs.mul(&d).mul(&vecs.adjoint()))
        } else {
            op
        };
        let trace = op.trace();
        if !(trace > 0.0 && trace <= 1.0 + TRACE_SLACK) {
            return Err(Error::BadTrace(trace));
        }
        Ok(Self { op, layout, trace })
    }

    /// For internal constructions already known PSD within clip tolerance.
    pub(crate) fn from_parts(op: HermitianOp, layout: SystemLayout) -> Result<Self> {
        Self::new(op.into_matrix(), layout)
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace - 1.0).abs() <= 1e-9
    }

    /// Marginal on `keep`, in the original relative order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<MultipartiteState> {
        for l in keep {
            self.layout.position(l)?;
        }
        let kept_positions: Vec<usize> = self
            .layout
            .factors()
            .iter()
            .enumerate()
            .filter(|(_, (l, _))| keep.contains(&l.as_str()))
            .map(|(i, _)| i)
            .collect();
        let traced_positions: Vec<usize> = (0..self.layout.factors().len())
            .filter(|i| !kept_positions.contains(i))
            .collect();
        let dims = self.layout.dims();
        let strides = self.layout.strides();
        let kept_dim: usize = kept_positions.iter().map(|&i| dims[i]).product();
        let traced_dim: usize = traced_positions.iter().map(|&i| dims[i]).product();
        let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
        // decompose a flat kept (or traced) index into a full-space offset
        let offset = |positions: &[usize], mut flat: usize| -> usize {
            let mut off = 0usize;
            for &p in positions.iter().rev() {
                off += (flat % dims[p]) * strides[p];
                flat /= dims[p];
            }
            off
        };
        for r in 0..kept_dim {
            let ro = offset(&kept_positions, r);
            for c in 0..kept_dim {
                let co = offset(&kept_positions, c);
                let mut acc = C_ZERO;
                for t in 0..traced_dim {
                    let to = offset(&traced_positions, t);
                    acc += self.matrix()[(ro + to, co + to)];
                }
                out[(r, c)] = acc;
            }
        }
        let kept_factors: Vec<(&str, usize)> = kept_positions
            .iter()
            .map(|&i| (self.layout.factors()[i].0.as_str(), dims[i]))
            .collect();
        MultipartiteState::new(out, SystemLayout::new(&kept_factors)?)
    }

    /// Same state with subsystems permuted to the given label order.
    pub fn reorder(&self, order: &[&str]) -> Result<MultipartiteState> {
        if order.len() != self.layout.factors().len() {
            return Err(Error::Argument("reorder must list every label".into()));
        }
        let positions: Vec<usize> =
            order.iter().map(|l| self.layout.position(l)).collect::<Result<_>>()?;
        let dims = self.layout.dims();
        let strides = self.layout.strides();
        let n = self.dim();
        let mut map = vec![0usize; n];
        for (new_idx, slot) in map.iter_mut().enumerate() {
            let mut flat = new_idx;
            let mut off = 0usize;
            for &p in positions.iter().rev() {
                off += (flat % dims[p]) * strides[p];
                flat /= dims[p];
            }
            *slot = off;
        }
        let out = ComplexMatrix::from_fn(n, n, |i, j| self.matrix()[(map[i], map[j])]);
        let factors: Vec<(&str, usize)> =
            positions.iter().map(|&p| (self.layout.factors()[p].0.as_str(), dims[p])).collect();
        MultipartiteState::new(out, SystemLayout::new(&factors)?)
    }

    /// Embeds one subsystem into a larger space by zero-padding.
    pub fn embed_system(&self, label: &str, new_dim: usize) -> Result<MultipartiteState> {
        let pos = self.layout.position(label)?;
        let dims = self.layout.dims();
        if new_dim < dims[pos] {
            return Err(Error::Argument("embedding cannot shrink a system".into()));
        }
        let mut new_dims = dims.clone();
        new_dims[pos] = new_dim;
        let strides = self.layout.strides();
        let new_total: usize = new_dims.iter().product();
        let mut new_strides = vec![1usize; new_dims.len()];
        for i in (0..new_dims.len().saturating_sub(1)).rev() {
            new_strides[i] = new_strides[i + 1] * new_dims[i + 1];
        }
        // map a new flat index back to the old one, or None if padded
        let back = |mut idx: usize| -> Option<usize> {
            let mut off = 0usize;
            for k in 0..new_dims.len() {
                let c = idx / new_strides[k];
                idx %= new_strides[k];
                if c >= dims[k] {
                    return None;
                }
                off += c * strides[k];
            }
            Some(off)
        };
        let out = ComplexMatrix::from_fn(new_total, new_total, |i, j| match (back(i), back(j)) {
            (Some(a), Some(b)) => self.matrix()[(a, b)],
            _ => C_ZERO,
        });
        let factors: Vec<(&str, usize)> = self
            .layout
            .factors()
            .iter()
            .enumerate()
            .map(|(k, (l, _))| (l.as_str(), new_dims[k]))
            .collect();
        MultipartiteState::new(out, SystemLayout::new(&factors)?)
    }

    /// Extracts the state vector of a rank-1 state. The global phase is
    /// fixed so the first entry above the rank tolerance is real positive.
    pub fn pure_vector(&self) -> Result<Vec<Complex64>> {
        let (evals, vecs) = self.op.eigh();
        let tol = rank_tolerance(evals[0].abs());
        if evals.len() > 1 && evals[1].abs() > tol {
            return Err(Error::Rank(evals[1]));
        }
        let n = self.dim();
        let scale = evals[0].max(0.0).sqrt();
        let mut v: Vec<Complex64> = (0..n).map(|i| vecs[(i, 0)] * scale).collect();
        fix_phase(&mut v);
        Ok(v)
    }

    /// Canonical purification on an auxiliary factor "P" with
    /// dim(P) = rank(rho). Sub-normalized input is first extended to
    /// rho + (1 - tr rho) on one extra dimension, collapsing the layout to a
    /// single factor of dimension d+1.
    pub fn purification(&self) -> Result<MultipartiteState> {
        if self.is_normalized() {
            let (vec, rank) = self.purification_vector()?;
            let layout = self.layout.appended("P", rank)?;
            pure_state_from_vec(&vec, layout)
        } else {
            let d = self.dim();
            let mut ext = ComplexMatrix::zeros(d + 1, d + 1);
            for i in 0..d {
                for j in 0..d {
                    ext[(i, j)] = self.matrix()[(i, j)];
                }
            }
            ext[(d, d)] = Complex64::new(1.0 - self.trace, 0.0);
            let label = format!("{}^", self.layout.labels().join(""));
            let hat = MultipartiteState::new(ext, SystemLayout::single(&label, d + 1))?;
            hat.purification()
        }
    }

    /// Purification amplitudes `sum_i sqrt(l_i) |e_i> (x) |i>_P` and the
    /// rank, eigenvalues sorted descending, ties broken by lexicographic
    /// eigenvector order, phases canonical.
    fn purification_vector(&self) -> Result<(Vec<Complex64>, usize)> {
        let (evals, vecs) = canonical_eigensystem(&self.op);
        let tol = rank_tolerance(evals.first().copied().unwrap_or(0.0).abs());
        let rank = evals.iter().filter(|l| **l > tol).count().max(1);
        let n = self.dim();
        let mut out = vec![C_ZERO; n * rank];
        for k in 0..rank {
            let w = evals[k].max(0.0).sqrt();
            for i in 0..n {
                out[i * rank + k] = vecs[(i, k)] * w;
            }
        }
        Ok((out, rank))
    }

    /// Schmidt decomposition of a rank-1 state across the cut given by
    /// `left` labels (everything else goes right). Coefficients come out
    /// non-negative and descending with `sum s_i^2 = trace`.
    pub fn schmidt_decompose(
        &self,
        left: &[&str],
    ) -> Result<(Vec<f64>, Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
        let all = self.layout.labels();
        let mut order: Vec<&str> = left.to_vec();
        for l in &all {
            if !left.contains(l) {
                order.push(l);
            }
        }
        let permuted = self.reorder(&order)?;
        let psi = permuted.pure_vector()?;
        let dl = permuted.layout().dim_of_all(left)?;
        let dr = permuted.dim() / dl;
        let mat = ComplexMatrix::from_fn(dl, dr, |i, j| psi[i * dr + j]);
        let (u, s, v) = mat.svd();
        let lefts: Vec<Vec<Complex64>> =
            (0..s.len()).map(|k| (0..dl).map(|i| u[(i, k)]).collect()).collect();
        let rights: Vec<Vec<Complex64>> =
            (0..s.len()).map(|k| (0..dr).map(|j| v[(j, k)].conj()).collect()).collect();
        Ok((s, lefts, rights))
    }
}

/// Builds a rank-1 state from amplitudes.
pub fn pure_state_from_vec(vec: &[Complex64], layout: SystemLayout) -> Result<MultipartiteState> {
    if vec.len() != layout.total_dim() {
        return Err(Error::DimMismatch(format!(
            "vector dim {} vs layout dim {}",
            vec.len(),
            layout.total_dim()
        )));
    }
    let m = ComplexMatrix::outer(vec, vec);
    MultipartiteState::new(m, layout)
}

fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let tol = rank_tolerance(max) as f64;
    if let Some(lead) = v.iter().find(|x| x.norm() > tol).copied() {
        let phase = lead / lead.norm();
        for x in v.iter_mut() {
            *x /= phase;
        }
    }
}

/// Eigensystem sorted by descending eigenvalue, ties broken by
/// lexicographic comparison of the phase-fixed eigenvectors.
pub fn canonical_eigensystem(op: &HermitianOp) -> (Vec<f64>, ComplexMatrix) {
    let (evals, vecs) = op.eigh();
    let n = op.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|k| {
            let mut col: Vec<Complex64> = (0..n).map(|i| vecs[(i, k)]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    let scale = evals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tie = 1e-12 * scale.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        if (evals[a] - evals[b]).abs() > tie {
            return evals[b].partial_cmp(&evals[a]).unwrap();
        }
        for (x, y) in cols[a].iter().zip(cols[b].iter()) {
            match x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    let sorted_evals: Vec<f64> = order.iter().map(|&k| evals[k]).collect();
    let sorted = ComplexMatrix::from_fn(n, n, |i, j| cols[order[j]][i]);
    let _ = &mut cols;
    (sorted_evals, sorted)
}

/// Kronecker product of two Hermitian operators, `a`'s indices outermost.
pub fn tensor_product(a: &HermitianOp, b: &HermitianOp) -> HermitianOp {
    a.kron(b)
}

/// Tensor product of two states, concatenating layouts.
pub fn state_tensor(a: &MultipartiteState, b: &MultipartiteState) -> Result<MultipartiteState> {
    let mut factors: Vec<(&str, usize)> =
        a.layout().factors().iter().map(|(l, d)| (l.as_str(), *d)).collect();
    for (l, d) in b.layout().factors() {
        factors.push((l.as_str(), *d));
    }
    let layout = SystemLayout::new(&factors)?;
    MultipartiteState::new(a.matrix().kron(b.matrix()), layout)
}

/// Maximally entangled state (1/sqrt(d)) sum_i |ii> on labels "A", "A'".
pub fn maximally_entangled(d: usize) -> MultipartiteState {
    let mut v = vec![C_ZERO; d * d];
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    let layout = SystemLayout::new(&[("A", d), ("A'", d)]).expect("layout");
    pure_state_from_vec(&v, layout).expect("entangled state")
}

/// Completely mixed state 1/d on label "A".
pub fn maximally_mixed(d: usize) -> MultipartiteState {
    let m = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
    MultipartiteState::new(m, SystemLayout::single("A", d)).expect("mixed state")
}
