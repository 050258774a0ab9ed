//! POVMs, projective measurements and Kraus-channel application.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, HermitianOp, C_ZERO};
use super::state::{MultipartiteState, SystemLayout};

const POVM_TOL: f64 = 1e-9;

/// Measurement element list on one subsystem.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<HermitianOp>,
    labels: Vec<String>,
}

impl Povm {
    /// Validates positivity of each element and completeness.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Argument("empty POVM".into()));
        }
        let d = elements[0].rows();
        let mut herm = Vec::with_capacity(elements.len());
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in elements {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimMismatch("POVM element dims differ".into()));
            }
            let h = HermitianOp::new(e)?;
            let min = h.min_eigenvalue();
            if min < -POVM_TOL {
                return Err(Error::NotPsd(min));
            }
            sum = sum.add(h.matrix());
            herm.push(h);
        }
        let dev = sum.sub(&ComplexMatrix::identity(d)).max_abs();
        if dev > POVM_TOL {
            return Err(Error::Povm(dev));
        }
        let labels = (0..herm.len()).map(|i| i.to_string()).collect();
        Ok(Self { elements: herm, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.elements.len() {
            return Err(Error::Argument("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Rank-1 projective POVM from an orthonormal basis.
    pub fn from_basis(basis: &[Vec<Complex64>]) -> Result<Self> {
        let mats = basis.iter().map(|v| ComplexMatrix::outer(v, v)).collect();
        Self::new(mats)
    }

    /// Measurement in the computational basis of dimension d.
    pub fn computational(d: usize) -> Self {
        let mats = (0..d)
            .map(|x| {
                let mut v = vec![C_ZERO; d];
                v[x] = Complex64::new(1.0, 0.0);
                ComplexMatrix::outer(&v, &v)
            })
            .collect();
        Self::new(mats).expect("basis POVM")
    }

    /// Qubit measurement in the |+>, |-> basis.
    pub fn hadamard() -> Self {
        let r = 1.0 / 2.0f64.sqrt();
        let plus = vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)];
        let minus = vec![Complex64::new(r, 0.0), Complex64::new(-r, 0.0)];
        Self::from_basis(&[plus, minus]).expect("hadamard POVM")
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Square roots of the elements, for post-measurement states.
    pub fn sqrt_elements(&self) -> Vec<HermitianOp> {
        self.elements.iter().map(|m| m.sqrt()).collect()
    }

    /// n-fold tensor power, outcomes in row-major outcome-string order.
    pub fn tensor_power(&self, n: usize) -> Povm {
        assert!(n >= 1);
        let mut elements: Vec<HermitianOp> = self.elements.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(elements.len() * self.outcomes());
            for a in &elements {
                for b in &self.elements {
                    next.push(a.kron(b));
                }
            }
            elements = next;
        }
        let labels = (0..elements.len()).map(|i| i.to_string()).collect();
        Povm { elements, labels }
    }
}

/// POVM whose elements are mutually orthogonal projectors.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    povm: Povm,
}

impl ProjectiveMeasurement {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let povm = Povm::new(elements)?;
        for (i, p) in povm.elements().iter().enumerate() {
            let dev = p.matrix().mul(p.matrix()).sub(p.matrix()).max_abs();
            if dev > POVM_TOL {
                return Err(Error::Projective(dev));
            }
            for q in povm.elements().iter().skip(i + 1) {
                let dev = p.matrix().mul(q.matrix()).max_abs();
                if dev > POVM_TOL {
                    return Err(Error::Projective(dev));
                }
            }
        }
        Ok(Self { povm })
    }

    /// The trivial measurement {1}.
    pub fn identity(d: usize) -> Self {
        Self { povm: Povm::new(vec![ComplexMatrix::identity(d)]).expect("identity POVM") }
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn elements(&self) -> &[HermitianOp] {
        self.povm.elements()
    }

    pub fn outcomes(&self) -> usize {
        self.povm.outcomes()
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    /// Largest commutator norm against the given POVM.
    pub fn commutation_deviation(&self, other: &Povm) -> f64 {
        let mut dev = 0.0f64;
        for p in self.elements() {
            for m in other.elements() {
                let c = p.matrix().mul(m.matrix()).sub(&m.matrix().mul(p.matrix()));
                dev = dev.max(c.max_abs());
            }
        }
        dev
    }
}

/// Applies a Kraus channel on one subsystem label: rho -> sum (1 (x) E_k (x) 1) rho (..)^dag.
///
/// The channel may change the subsystem dimension to `out_dim` and may be
/// trace non-increasing; Kraus sums above the identity are rejected.
pub fn apply_channel(
    rho: &MultipartiteState,
    kraus: &[ComplexMatrix],
    on: &str,
    out_dim: usize,
) -> Result<MultipartiteState> {
    let pos = rho.layout().position(on)?;
    let d_in = rho.layout().dims()[pos];
    let mut ksum = ComplexMatrix::zeros(d_in, d_in);
    for e in kraus {
        if e.rows() != out_dim || e.cols() != d_in {
            return Err(Error::DimMismatch(format!(
                "Kraus operator {}x{}, expected {}x{}",
                e.rows(),
                e.cols(),
                out_dim,
                d_in
            )));
        }
        ksum = ksum.add(&e.adjoint().mul(e));
    }
    let excess = HermitianOp::new(ksum.sub(&ComplexMatrix::identity(d_in)))?.eigh().0[0];
    if excess > 1e-9 {
        return Err(Error::Channel(excess));
    }

    let dims = rho.layout().dims();
    let pre: usize = dims[..pos].iter().product();
    let post: usize = dims[pos + 1..].iter().product();
    let d_out_total = pre * out_dim * post;
    let mut out = ComplexMatrix::zeros(d_out_total, d_out_total);
    let id_pre = ComplexMatrix::identity(pre);
    let id_post = ComplexMatrix::identity(post);
    for e in kraus {
        let full = id_pre.kron(e).kron(&id_post);
        let term = full.mul(rho.matrix()).mul(&full.adjoint());
        out = out.add(&term);
    }
    let factors: Vec<(&str, usize)> = rho
        .layout()
        .factors()
        .iter()
        .enumerate()
        .map(|(i, (l, d))| (l.as_str(), if i == pos { out_dim } else { *d }))
        .collect();
    MultipartiteState::new(out, SystemLayout::new(&factors)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::random::{random_povm, random_state};
    use crate::operators::state::{maximally_mixed, state_tensor};

    #[test]
    fn identity_channel_is_noop() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let rho = random_state(&layout, 2, 1).unwrap();
        let out = apply_channel(&rho, &[ComplexMatrix::identity(2)], "A", 2).unwrap();
        assert!(out.op().sub(rho.op()).op_norm() < 1e-12);
    }

    #[test]
    fn depolarizing_channel_mixes() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 3)]).unwrap();
        let rho = random_state(&layout, 2, 2).unwrap();
        // fully depolarizing channel via the four normalized Pauli Kraus ops
        let h = 0.5f64;
        let paulis = [
            ComplexMatrix::identity(2),
            ComplexMatrix::from_rows(&[
                vec![C_ZERO, Complex64::new(1.0, 0.0)],
                vec![Complex64::new(1.0, 0.0), C_ZERO],
            ]),
            ComplexMatrix::from_rows(&[
                vec![C_ZERO, Complex64::new(0.0, -1.0)],
                vec![Complex64::new(0.0, 1.0), C_ZERO],
            ]),
            ComplexMatrix::diag(&[1.0, -1.0]),
        ];
        let kraus: Vec<ComplexMatrix> = paulis.iter().map(|p| p.scale_re(h)).collect();
        let out = apply_channel(&rho, &kraus, "A", 2).unwrap();
        let expect = state_tensor(&maximally_mixed(2), &rho.partial_trace(&["B"]).unwrap()).unwrap();
        let expect = expect.reorder(&["A", "B"]).unwrap();
        assert!(out.op().sub(expect.op()).op_norm() < 1e-10);
    }

    #[test]
    fn channel_rejects_excessive_kraus() {
        let layout = SystemLayout::single("A", 2);
        let rho = random_state(&layout, 1, 3).unwrap();
        let bad = vec![ComplexMatrix::identity(2).scale_re(1.1)];
        assert!(matches!(apply_channel(&rho, &bad, "A", 2), Err(Error::Channel(_))));
    }

    #[test]
    fn marginal_bound_under_channels() {
        // tr_out(E[M]) <= |E^dag[1]|_inf tr_in(M) as an operator inequality
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        for seed in 0..20u64 {
            let rho = random_state(&layout, 3, seed).unwrap();
            let povm = random_povm(2, 2, seed + 100).unwrap();
            // trace non-increasing channel keeping only outcome 0
            let kraus = vec![povm.elements()[0].sqrt().into_matrix()];
            let out = apply_channel(&rho, &kraus, "B", 2).unwrap();
            let lhs = out.partial_trace(&["A"]).unwrap();
            let ksum = kraus[0].adjoint().mul(&kraus[0]);
            let bound = HermitianOp::new(ksum).unwrap().op_norm();
            let rhs = rho.partial_trace(&["A"]).unwrap().op().scale(bound);
            let diff = rhs.sub(lhs.op());
            assert!(diff.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn projective_rejects_non_projector() {
        let m0 = ComplexMatrix::diag(&[0.5, 0.0]);
        let m1 = ComplexMatrix::diag(&[0.5, 1.0]);
        assert!(ProjectiveMeasurement::new(vec![m0, m1]).is_err());
    }

    #[test]
    fn computational_vs_hadamard_commutation() {
        let k = ProjectiveMeasurement::identity(2);
        assert!(k.commutation_deviation(&Povm::hadamard()) < 1e-15);
    }
}
