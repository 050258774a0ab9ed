//! Internal block-structured form of a semi-definite program.
//!
//! The primal variable is a direct sum of Hermitian blocks, the constraint
//! map sends it to a direct sum of dual blocks, and each (dual, primal)
//! pair carries a structured linear map. The entropy builders construct
//! this form directly; Choi-form problems are converted after support
//! detection.

use num_complex::Complex64;

use crate::operators::{ComplexMatrix, HermitianOp};

/// Structured Hermiticity-preserving linear map between blocks.
#[derive(Debug, Clone)]
pub enum LinMap {
    /// X -> s X
    Scale(f64),
    /// X -> s (1_{d_left} (x) X)
    TensorLeftId { d_left: usize, s: f64 },
    /// X -> s (X (x) 1_{d_right})
    TensorRightId { d_right: usize, s: f64 },
    /// X on L (x) R -> s tr_L(X)
    TraceOutLeft { d_left: usize, s: f64 },
    /// X on L (x) R -> s tr_R(X)
    TraceOutRight { d_right: usize, s: f64 },
    /// X -> s tr(F X), into a scalar dual block
    InnerProduct { f: HermitianOp, s: f64 },
    /// scalar t -> s t G, from a scalar primal block
    ScalarTimes { g: HermitianOp, s: f64 },
    /// general map given by its Choi matrix on dual (x) primal
    Choi { c: HermitianOp, d_dual: usize, d_primal: usize },
}

impl LinMap {
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            LinMap::Scale(s) => x.scale_re(*s),
            LinMap::TensorLeftId { d_left, s } => {
                ComplexMatrix::identity(*d_left).kron(x).scale_re(*s)
            }
            LinMap::TensorRightId { d_right, s } => {
                x.kron(&ComplexMatrix::identity(*d_right)).scale_re(*s)
            }
            LinMap::TraceOutLeft { d_left, s } => {
                let d = x.rows() / d_left;
                let mut out = ComplexMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..*d_left {
                            acc += x[(a * d + i, a * d + j)];
                        }
                        out[(i, j)] = acc * s;
                    }
                }
                out
            }
            LinMap::TraceOutRight { d_right, s } => {
                let d = x.rows() / d_right;
                let mut out = ComplexMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..*d_right {
                            acc += x[(i * d_right + a, j * d_right + a)];
                        }
                        out[(i, j)] = acc * s;
                    }
                }
                out
            }
            LinMap::InnerProduct { f, s } => {
                let v = f.matrix().hs_inner(x) * s;
                let mut out = ComplexMatrix::zeros(1, 1);
                out[(0, 0)] = v;
                out
            }
            LinMap::ScalarTimes { g, s } => g.matrix().scale(x[(0, 0)] * s),
            LinMap::Choi { c, d_dual, d_primal } => {
                // Psi[X]_{r,r'} = sum_{s,s'} C[(r s),(r' s')] X_{s,s'}
                let (dd, dp) = (*d_dual, *d_primal);
                let mut out = ComplexMatrix::zeros(dd, dd);
                for r in 0..dd {
                    for rp in 0..dd {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for si in 0..dp {
                            for sp in 0..dp {
                                acc += c.matrix()[(r * dp + si, rp * dp + sp)] * x[(si, sp)];
                            }
                        }
                        out[(r, rp)] = acc;
                    }
                }
                out
            }
        }
    }

    pub fn adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        match self {
            LinMap::Scale(s) => y.scale_re(*s),
            LinMap::TensorLeftId { d_left, s } => {
                LinMap::TraceOutLeft { d_left: *d_left, s: *s }.apply(y)
            }
            LinMap::TensorRightId { d_right, s } => {
                LinMap::TraceOutRight { d_right: *d_right, s: *s }.apply(y)
            }
            LinMap::TraceOutLeft { d_left, s } => {
                LinMap::TensorLeftId { d_left: *d_left, s: *s }.apply(y)
            }
            LinMap::TraceOutRight { d_right, s } => {
                LinMap::TensorRightId { d_right: *d_right, s: *s }.apply(y)
            }
            LinMap::InnerProduct { f, s } => f.matrix().scale(y[(0, 0)] * s),
            LinMap::ScalarTimes { g, s } => {
                let v = g.matrix().hs_inner(y) * s;
                let mut out = ComplexMatrix::zeros(1, 1);
                out[(0, 0)] = v;
                out
            }
            LinMap::Choi { c, d_dual, d_primal } => {
                // F[s,s'] = sum_{r,r'} Y[r,r'] C[(r' s'),(r s)]
                let (dd, dp) = (*d_dual, *d_primal);
                let mut out = ComplexMatrix::zeros(dp, dp);
                for si in 0..dp {
                    for sp in 0..dp {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for r in 0..dd {
                            for rp in 0..dd {
                                acc += y[(r, rp)] * c.matrix()[(rp * dp + sp, r * dp + si)];
                            }
                        }
                        out[(si, sp)] = acc;
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrimalBlock {
    pub dim: usize,
    pub objective: HermitianOp,
}

#[derive(Debug, Clone)]
pub struct DualBlock {
    pub dim: usize,
    pub offset: HermitianOp,
}

/// Identifier for a primal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalId(pub usize);

/// Identifier for a dual block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualId(pub usize);

/// Block-structured SDP: minimize sum tr(A_p X_p) subject to
/// Psi[X] >= B blockwise and X >= 0.
#[derive(Debug, Clone, Default)]
pub struct BlockProblem {
    pub primal: Vec<PrimalBlock>,
    pub dual: Vec<DualBlock>,
    pub terms: Vec<(usize, usize, LinMap)>,
}

impl BlockProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn primal_block(&mut self, dim: usize, objective: HermitianOp) -> PrimalId {
        assert_eq!(objective.dim(), dim);
        self.primal.push(PrimalBlock { dim, objective });
        PrimalId(self.primal.len() - 1)
    }

    pub fn dual_block(&mut self, dim: usize, offset: HermitianOp) -> DualId {
        assert_eq!(offset.dim(), dim);
        self.dual.push(DualBlock { dim, offset });
        DualId(self.dual.len() - 1)
    }

    /// Scalar constraint row `... >= offset`.
    pub fn dual_scalar(&mut self, offset: f64) -> DualId {
        self.dual_block(1, HermitianOp::diag(&[offset]))
    }

    pub fn term(&mut self, dual: DualId, primal: PrimalId, map: LinMap) {
        self.terms.push((dual.0, primal.0, map));
    }

    /// Psi[X] restricted to one dual block.
    pub fn apply_block(&self, dual: usize, xs: &[ComplexMatrix]) -> ComplexMatrix {
        let d = self.dual[dual].dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for (db, pb, map) in &self.terms {
            if *db == dual {
                out = out.add(&map.apply(&xs[*pb]));
            }
        }
        out
    }

    /// Psi^dag[Y] restricted to one primal block.
    pub fn adjoint_block(&self, primal: usize, ys: &[ComplexMatrix]) -> ComplexMatrix {
        let d = self.primal[primal].dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for (db, pb, map) in &self.terms {
            if *pb == primal {
                out = out.add(&map.adjoint(&ys[*db]));
            }
        }
        out
    }

    /// Total complex dimension of the primal space.
    pub fn primal_dim(&self) -> usize {
        self.primal.iter().map(|b| b.dim).sum()
    }

    /// Total complex dimension of the dual space.
    pub fn dual_dim(&self) -> usize {
        self.dual.iter().map(|b| b.dim).sum()
    }
}
