//! A small dense primal-dual interior-point solver for Hermitian
//! semi-definite programs `{A, B, Psi}`:
//!
//! ```text
//! primal: minimize <A, X>   s.t. Psi[X] >= B, X >= 0
//! dual:   maximize <B, Y>   s.t. Psi^dag[Y] <= A, Y >= 0
//! ```
//!
//! `Psi` is given by its Choi matrix on the dual (x) primal space. Weak
//! duality holds at every iterate once the iterates are feasible; solves
//! report a certified duality gap.

mod blocks;
mod realsym;
mod solver;

pub(crate) use blocks::{BlockProblem, LinMap};
pub use solver::{
    default_gap_tol, set_default_gap_tol, BlockSolution, FeasibleStart, IterStat, SdpStatus,
    SolveOptions,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, HermitianOp};

pub(crate) use solver::{solve_blocks, solve_blocks_robust};

/// Standard-form problem triple `{A, B, Psi}` with the map in Choi form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    objective: HermitianOp,
    offset: HermitianOp,
    choi: HermitianOp,
}

impl SdpProblem {
    pub fn new(objective: HermitianOp, offset: HermitianOp, choi: ComplexMatrix) -> Result<Self> {
        let d_primal = objective.dim();
        let d_dual = offset.dim();
        if choi.rows() != d_primal * d_dual {
            return Err(Error::DimMismatch(format!(
                "Choi dim {} vs dual*primal {}",
                choi.rows(),
                d_primal * d_dual
            )));
        }
        let dev = choi.hermiticity_deviation();
        if dev > 1e-10 * choi.max_abs().max(1.0) {
            return Err(Error::NotHermitian { dev, tol: 1e-10 * choi.max_abs().max(1.0) });
        }
        Ok(Self { objective, offset, choi: HermitianOp::from_symmetrized(choi) })
    }

    pub fn objective(&self) -> &HermitianOp {
        &self.objective
    }

    pub fn offset(&self) -> &HermitianOp {
        &self.offset
    }

    pub fn choi(&self) -> &HermitianOp {
        &self.choi
    }

    pub fn primal_dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.offset.dim()
    }
}

/// Solution with certified duality gap.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: HermitianOp,
    pub y: HermitianOp,
    pub alpha: f64,
    pub beta: f64,
    pub gap: f64,
    pub status: SdpStatus,
    pub iterates: Vec<IterStat>,
}

/// Psi[X] = tr_primal(choi (1 (x) X^T)) for a Choi matrix on dual (x) primal.
pub fn apply_choi(choi: &HermitianOp, d_dual: usize, x: &HermitianOp) -> Result<HermitianOp> {
    let d_primal = x.dim();
    if choi.dim() != d_dual * d_primal {
        return Err(Error::DimMismatch("Choi vs argument".into()));
    }
    let map = LinMap::Choi { c: choi.clone(), d_dual, d_primal };
    Ok(HermitianOp::from_symmetrized(map.apply(x.matrix())))
}

/// Adjoint map with `<Psi[X], Y> = <X, Psi^dag[Y]>`.
pub fn apply_choi_adjoint(choi: &HermitianOp, d_dual: usize, y: &HermitianOp) -> Result<HermitianOp> {
    if y.dim() != d_dual {
        return Err(Error::DimMismatch("Choi vs dual argument".into()));
    }
    let d_primal = choi.dim() / d_dual;
    let map = LinMap::Choi { c: choi.clone(), d_dual, d_primal };
    Ok(HermitianOp::from_symmetrized(map.adjoint(y.matrix())))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
            r
        } else {
            i
        }
    }
    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        if a != b {
            self.parent[a] = b;
        }
    }
    fn components(&mut self, n: usize) -> Vec<Vec<usize>> {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = self.find(i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

/// Solves a Choi-form problem, detecting direct-sum block structure from
/// the supports of A, B and the Choi matrix first. Restricting all
/// variables to the detected blocks is lossless: both cones are closed
/// under pinching onto them.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    let dp = p.primal_dim();
    let dd = p.dual_dim();
    if 2 * (dp + dd) > 4096 {
        return Err(Error::Argument(format!(
            "embedded dimension {} exceeds the 4096 limit",
            2 * (dp + dd)
        )));
    }
    let tol = 1e-13
        * p.choi
            .max_abs()
            .max(p.objective.max_abs())
            .max(p.offset.max_abs())
            .max(1.0);
    let choi = p.choi.matrix();
    let mut ufp = UnionFind::new(dp);
    let mut ufd = UnionFind::new(dd);
    for i in 0..dp {
        for j in 0..dp {
            if p.objective.matrix()[(i, j)].norm() > tol {
                ufp.union(i, j);
            }
        }
    }
    for r in 0..dd {
        for s in 0..dd {
            if p.offset.matrix()[(r, s)].norm() > tol {
                ufd.union(r, s);
            }
        }
    }
    for r in 0..dd {
        for rp in 0..dd {
            for i in 0..dp {
                for j in 0..dp {
                    if choi[(r * dp + i, rp * dp + j)].norm() > tol {
                        ufd.union(r, rp);
                        ufp.union(i, j);
                    }
                }
            }
        }
    }
    let pgroups = ufp.components(dp);
    let dgroups = ufd.components(dd);

    let mut bp = BlockProblem::new();
    let mut pids = Vec::new();
    for g in &pgroups {
        let a = ComplexMatrix::from_fn(g.len(), g.len(), |i, j| p.objective.matrix()[(g[i], g[j])]);
        pids.push(bp.primal_block(g.len(), HermitianOp::from_symmetrized(a)));
    }
    let mut dids = Vec::new();
    for g in &dgroups {
        let b = ComplexMatrix::from_fn(g.len(), g.len(), |i, j| p.offset.matrix()[(g[i], g[j])]);
        dids.push(bp.dual_block(g.len(), HermitianOp::from_symmetrized(b)));
    }
    for (di, dg) in dgroups.iter().enumerate() {
        for (pi, pg) in pgroups.iter().enumerate() {
            let mut sub =
                ComplexMatrix::zeros(dg.len() * pg.len(), dg.len() * pg.len());
            let mut nonzero = false;
            for (r, &gr) in dg.iter().enumerate() {
                for (rp, &grp) in dg.iter().enumerate() {
                    for (i, &gi) in pg.iter().enumerate() {
                        for (j, &gj) in pg.iter().enumerate() {
                            let v = choi[(gr * dp + gi, grp * dp + gj)];
                            if v.norm() > 0.0 {
                                nonzero = true;
                            }
                            sub[(r * pg.len() + i, rp * pg.len() + j)] = v;
                        }
                    }
                }
            }
            if nonzero {
                bp.term(
                    dids[di],
                    pids[pi],
                    LinMap::Choi {
                        c: HermitianOp::from_symmetrized(sub),
                        d_dual: dg.len(),
                        d_primal: pg.len(),
                    },
                );
            }
        }
    }

    let sol = solve_blocks(&bp, None, opts)?;
    // reassemble block solutions into the original index sets
    let mut x = ComplexMatrix::zeros(dp, dp);
    for (bi, g) in pgroups.iter().enumerate() {
        for (i, &gi) in g.iter().enumerate() {
            for (j, &gj) in g.iter().enumerate() {
                x[(gi, gj)] = sol.x[bi].matrix()[(i, j)];
            }
        }
    }
    let mut y = ComplexMatrix::zeros(dd, dd);
    for (bi, g) in dgroups.iter().enumerate() {
        for (i, &gi) in g.iter().enumerate() {
            for (j, &gj) in g.iter().enumerate() {
                y[(gi, gj)] = sol.y[bi].matrix()[(i, j)];
            }
        }
    }
    Ok(SdpSolution {
        x: HermitianOp::from_symmetrized(x),
        y: HermitianOp::from_symmetrized(y),
        alpha: sol.alpha,
        beta: sol.beta,
        gap: sol.gap,
        status: sol.status,
        iterates: sol.iterates,
    })
}

/// Choi matrix of the identity map on dimension d (the unnormalized
/// maximally entangled projector Gamma).
pub fn identity_choi(d: usize) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            c[(i * d + i, j * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    c
}

/// Choi matrix of the partial trace over the second factor of
/// `d_keep (x) d_traced`, mapped onto `d_keep`.
pub fn partial_trace_choi(d_keep: usize, d_traced: usize) -> ComplexMatrix {
    let dp = d_keep * d_traced;
    let mut c = ComplexMatrix::zeros(d_keep * dp, d_keep * dp);
    for i in 0..d_keep {
        for k in 0..d_keep {
            for j in 0..d_traced {
                let row = i * dp + (i * d_traced + j);
                let col = k * dp + (k * d_traced + j);
                c[(row, col)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    c
}
