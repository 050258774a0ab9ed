//! Primal-dual path-following interior-point method with Mehrotra
//! predictor-corrector steps and Nesterov-Todd scaling.
//!
//! The block problem `min <A,X> s.t. Psi[X] >= B, X >= 0` is lifted with a
//! slack `S = Psi[X] - B` into equality form over the direct sum of all
//! primal and slack blocks. Every complex Hermitian block of dimension n is
//! embedded as the 2n x 2n real symmetric [[Re, -Im], [Im, Re]] matrix and
//! the dense Cholesky of the Schur complement drives the Newton steps.
//! Embedded inner products double, so objective values are halved on exit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, HermitianOp};

use super::blocks::BlockProblem;
use super::realsym::{embed, unembed, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
}

/// One logged iterate: objective pair and residual norms.
#[derive(Debug, Clone, Copy)]
pub struct IterStat {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

static DEFAULT_GAP_TOL: std::sync::atomic::AtomicU64 =
    std::sync::atomic::AtomicU64::new(0x3E45798EE2308C3A); // 1e-8

/// Overrides the default relative gap tolerance process-wide; the CLI maps
/// SEL_GAP_TOL and --gap-tol onto this.
pub fn set_default_gap_tol(tol: f64) {
    DEFAULT_GAP_TOL.store(tol.to_bits(), std::sync::atomic::Ordering::Relaxed);
}

pub fn default_gap_tol() -> f64 {
    f64::from_bits(DEFAULT_GAP_TOL.load(std::sync::atomic::Ordering::Relaxed))
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { gap_tol: default_gap_tol(), feas_tol: 1e-8, max_iter: 200 }
    }
}

/// Strictly feasible initial point, given per block in complex form.
#[derive(Debug, Clone)]
pub struct FeasibleStart {
    pub x: Vec<HermitianOp>,
    pub y: Vec<HermitianOp>,
}

#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub x: Vec<HermitianOp>,
    pub y: Vec<HermitianOp>,
    pub alpha: f64,
    pub beta: f64,
    pub gap: f64,
    pub status: SdpStatus,
    pub iterates: Vec<IterStat>,
}

/// One constraint row: a dual-block coordinate.
struct Row {
    dual_block: usize,
    /// sparse embedded E_k within the dual block: (i, j, value)
    e: Vec<(usize, usize, f64)>,
    /// dense embedded F_k per primal block; None when zero
    f: Vec<Option<RMat>>,
    b: f64,
    /// equilibration factor applied to the whole row
    scale: f64,
}

/// Cone state: primal blocks followed by slack blocks, all embedded.
#[derive(Clone)]
struct Cone {
    mats: Vec<RMat>,
}

impl Cone {
    fn zeros_like(dims: &[usize]) -> Self {
        Self { mats: dims.iter().map(|&d| RMat::zeros(d)).collect() }
    }

    fn dot(&self, other: &Cone) -> f64 {
        self.mats.iter().zip(&other.mats).map(|(a, b)| a.dot(b)).sum()
    }

    fn axpy(&mut self, s: f64, other: &Cone) {
        for (a, b) in self.mats.iter_mut().zip(&other.mats) {
            a.add_assign_scaled(b, s);
        }
    }
}

/// Complex-Hermitian orthonormal basis element k of a dimension-d block,
/// in embedded sparse form scaled by 1/sqrt(2).
fn embedded_basis_element(d: usize, k: usize) -> Vec<(usize, usize, f64)> {
    let r = 1.0 / 2.0f64.sqrt();
    if k < d {
        // diagonal |k><k|
        let i = k;
        return vec![(i, i, r), (i + d, i + d, r)];
    }
    let mut idx = k - d;
    // enumerate pairs (i, j), i < j: first all symmetric, then antisymmetric
    let pairs = d * (d - 1) / 2;
    let anti = idx >= pairs;
    if anti {
        idx -= pairs;
    }
    let mut i = 0;
    let mut row_len = d - 1;
    while idx >= row_len {
        idx -= row_len;
        i += 1;
        row_len -= 1;
    }
    let j = i + 1 + idx;
    let h = 0.5; // (1/sqrt2 normalization) * (1/sqrt2 embed scale)
    if !anti {
        // (|i><j| + |j><i|)/sqrt(2): real part only
        vec![(i, j, h), (j, i, h), (i + d, j + d, h), (j + d, i + d, h)]
    } else {
        // (i|i><j| - i|j><i|)/sqrt(2): imaginary part only
        vec![(i + d, j, h), (j, i + d, h), (j + d, i, -h), (i, j + d, -h)]
    }
}

fn sparse_dot(e: &[(usize, usize, f64)], m: &RMat) -> f64 {
    e.iter().map(|&(i, j, v)| v * m.at(i, j)).sum()
}

/// N E N for sparse E.
fn sandwich_sparse(n: &RMat, e: &[(usize, usize, f64)]) -> RMat {
    let dim = n.n;
    let mut out = RMat::zeros(dim);
    for &(i, j, v) in e {
        // out += v * N[:,i] N[j,:]
        for a in 0..dim {
            let nai = n.at(a, i) * v;
            if nai == 0.0 {
                continue;
            }
            for b in 0..dim {
                let val = out.at(a, b) + nai * n.at(j, b);
                out.set(a, b, val);
            }
        }
    }
    out
}

struct Scaling {
    /// T with N = T T^T, block by block
    t: Vec<RMat>,
    tinv: Vec<RMat>,
    n: Vec<RMat>,
    lambda: Vec<Vec<f64>>,
}

/// `solve_blocks` with one retry from the default infeasible start when a
/// warm start stalls short of the tolerance; distinct trajectories resolve
/// most near-degenerate endgames.
pub fn solve_blocks_robust(
    problem: &BlockProblem,
    start: Option<FeasibleStart>,
    opts: &SolveOptions,
) -> Result<BlockSolution> {
    let first = solve_blocks(problem, start.clone(), opts)?;
    if first.status == SdpStatus::Optimal || start.is_none() {
        return Ok(first);
    }
    let second = solve_blocks(problem, None, opts)?;
    if second.status == SdpStatus::Optimal || second.gap < first.gap {
        Ok(second)
    } else {
        Ok(first)
    }
}

pub fn solve_blocks(
    problem: &BlockProblem,
    start: Option<FeasibleStart>,
    opts: &SolveOptions,
) -> Result<BlockSolution> {
    let np = problem.primal.len();
    let nd = problem.dual.len();
    // cone block dims: primal blocks then slack blocks, embedded
    let mut dims: Vec<usize> = problem.primal.iter().map(|b| 2 * b.dim).collect();
    dims.extend(problem.dual.iter().map(|b| 2 * b.dim));
    let nu: f64 = dims.iter().map(|&d| d as f64).sum();

    // constraint rows
    let mut rows: Vec<Row> = Vec::new();
    for (db, dual) in problem.dual.iter().enumerate() {
        let d = dual.dim;
        for k in 0..d * d {
            let e = embedded_basis_element(d, k);
            let ec = basis_element_complex(d, k);
            let mut f: Vec<Option<RMat>> = vec![None; np];
            for (tdb, tpb, map) in &problem.terms {
                if *tdb != db {
                    continue;
                }
                let contrib = map.adjoint(&ec);
                if contrib.max_abs() < 1e-300 {
                    continue;
                }
                let scaled = embed(&contrib).scale(1.0 / 2.0f64.sqrt());
                match &mut f[*tpb] {
                    Some(existing) => *existing = existing.add(&scaled),
                    slot => *slot = Some(scaled),
                }
            }
            let b = 2.0f64.sqrt() * ec.hs_inner(dual.offset.matrix()).re;
            let mut row = Row { dual_block: db, e, f, b, scale: 1.0 };
            // equilibrate: unit Frobenius norm across the whole row
            let mut norm2 = 1.0f64; // the slack part -E_k has unit norm
            for f in row.f.iter().flatten() {
                norm2 += f.dot(f);
            }
            let s = 1.0 / norm2.sqrt();
            if (s - 1.0).abs() > 1e-12 {
                for f in row.f.iter_mut().flatten() {
                    for v in &mut f.data {
                        *v *= s;
                    }
                }
                for e in &mut row.e {
                    e.2 *= s;
                }
                row.b *= s;
                row.scale = s;
            }
            rows.push(row);
        }
    }
    let m = rows.len();
    if m == 0 {
        return Err(Error::Sdp("problem has no constraints".into()));
    }

    // embedded objective
    let cmats: Vec<RMat> = problem.primal.iter().map(|b| embed(b.objective.matrix())).collect();

    // initial point
    let scale_a = problem.primal.iter().map(|b| b.objective.op_norm()).fold(0.0f64, f64::max);
    let scale_b = problem.dual.iter().map(|b| b.offset.op_norm()).fold(0.0f64, f64::max);
    let mu0 = 1.0 + scale_a + scale_b;
    let mut u = Cone::zeros_like(&dims);
    let mut w = Cone::zeros_like(&dims);
    let mut y = vec![0.0f64; m];
    let mut started_feasible = false;
    if let Some(init) = &start {
        if init.x.len() == np && init.y.len() == nd {
            let xs: Vec<ComplexMatrix> = init.x.iter().map(|h| h.matrix().clone()).collect();
            let ys: Vec<ComplexMatrix> = init.y.iter().map(|h| h.matrix().clone()).collect();
            let mut ok = true;
            let mut cand_u = Cone::zeros_like(&dims);
            let mut cand_w = Cone::zeros_like(&dims);
            for (p, x) in xs.iter().enumerate() {
                cand_u.mats[p] = embed(x);
            }
            for (db, dual) in problem.dual.iter().enumerate() {
                let s = problem.apply_block(db, &xs).sub(dual.offset.matrix());
                cand_u.mats[np + db] = embed(&s);
            }
            for (p, block) in problem.primal.iter().enumerate() {
                let z = block.objective.matrix().sub(&problem.adjoint_block(p, &ys));
                cand_w.mats[p] = embed(&z);
            }
            for (db, yc) in ys.iter().enumerate() {
                cand_w.mats[np + db] = embed(yc);
            }
            // strict feasibility margin check
            for mat in cand_u.mats.iter().chain(cand_w.mats.iter()) {
                if mat.cholesky().is_none() {
                    ok = false;
                    break;
                }
            }
            if ok {
                u = cand_u;
                w = cand_w;
                // y coordinates from the dual blocks, undoing equilibration
                for (k, r) in rows.iter().enumerate() {
                    y[k] = 2.0f64.sqrt()
                        * basis_element_complex(problem.dual[r.dual_block].dim, dual_coord_index(problem, k))
                            .hs_inner(&ys[r.dual_block])
                            .re
                        / r.scale;
                }
                started_feasible = true;
            }
        }
    }
    if !started_feasible {
        for (b, mat) in u.mats.iter_mut().enumerate() {
            *mat = RMat::scaled_identity(dims[b], mu0);
        }
        for (b, mat) in w.mats.iter_mut().enumerate() {
            *mat = RMat::scaled_identity(dims[b], mu0);
        }
        // Y = mu0 * identity on each dual block
        let mut k = 0usize;
        for dual in &problem.dual {
            for kk in 0..dual.dim * dual.dim {
                y[k] = if kk < dual.dim { 2.0f64.sqrt() * mu0 / rows[k].scale } else { 0.0 };
                k += 1;
            }
        }
    }

    let row_block = |k: usize| rows[k].dual_block + np;
    let mut iterates: Vec<IterStat> = Vec::new();
    let mut status = SdpStatus::MaxIterations;

    let b_norm = rows.iter().map(|r| r.b.abs()).fold(0.0f64, f64::max).max(1.0);
    let c_norm = cmats.iter().map(|c| c.max_abs()).fold(0.0f64, f64::max).max(1.0);

    let mut best: Option<(f64, Cone, Cone, Vec<f64>)> = None;
    let mut since_best = 0usize;

    for _iter in 0..opts.max_iter {
        // residuals
        let mut rp = vec![0.0f64; m];
        for (k, row) in rows.iter().enumerate() {
            let mut ax = 0.0;
            for (p, f) in row.f.iter().enumerate() {
                if let Some(f) = f {
                    ax += f.dot(&u.mats[p]);
                }
            }
            ax -= sparse_dot(&row.e, &u.mats[row_block(k)]);
            rp[k] = row.b - ax;
        }
        let mut rd = Cone::zeros_like(&dims);
        for p in 0..np {
            rd.mats[p] = cmats[p].clone();
        }
        for (k, row) in rows.iter().enumerate() {
            if y[k] == 0.0 {
                continue;
            }
            for (p, f) in row.f.iter().enumerate() {
                if let Some(f) = f {
                    rd.mats[p].add_assign_scaled(f, -y[k]);
                }
            }
            for &(i, j, v) in &row.e {
                let cur = rd.mats[row_block(k)].at(i, j);
                rd.mats[row_block(k)].set(i, j, cur + v * y[k]);
            }
        }
        rd.axpy(-1.0, &w);

        let mu = u.dot(&w) / nu;
        let alpha_val = 0.5 * (0..np).map(|p| cmats[p].dot(&u.mats[p])).sum::<f64>();
        let beta_val = 0.5 * rows.iter().enumerate().map(|(k, r)| r.b * y[k]).sum::<f64>();
        let rp_norm = rp.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let rd_norm = rd.mats.iter().map(|m| m.max_abs()).fold(0.0f64, f64::max);
        iterates.push(IterStat {
            alpha: alpha_val,
            beta: beta_val,
            mu,
            primal_residual: rp_norm,
            dual_residual: rd_norm,
        });

        let rel_gap = (alpha_val - beta_val).abs() / (1.0 + alpha_val.abs());
        let comp_gap = u.dot(&w).abs() / (2.0 * (1.0 + alpha_val.abs()));
        let merit = rel_gap
            .max(comp_gap)
            .max(rp_norm / b_norm * 1e-2)
            .max(rd_norm / c_norm * 1e-2);
        if best.as_ref().map(|(b, ..)| merit < *b).unwrap_or(true) {
            best = Some((merit, u.clone(), w.clone(), y.clone()));
            since_best = 0;
        } else {
            since_best += 1;
        }
        if rel_gap.max(comp_gap) <= opts.gap_tol
            && rp_norm <= opts.feas_tol * b_norm
            && rd_norm <= opts.feas_tol * c_norm
        {
            status = SdpStatus::Optimal;
            break;
        }
        if since_best > 40 {
            // stalled; the tracked best iterate is returned below
            break;
        }

        // infeasibility certificates on normalized iterates
        let y_norm = y.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if y_norm > 1.0 {
            let by: f64 = rows.iter().enumerate().map(|(k, r)| r.b * y[k]).sum();
            if by > 1e-3 * y_norm {
                // A^dag y <= 0 up to tolerance?
                let mut max_eig = f64::NEG_INFINITY;
                let mut at_y = Cone::zeros_like(&dims);
                for (k, row) in rows.iter().enumerate() {
                    for (p, f) in row.f.iter().enumerate() {
                        if let Some(f) = f {
                            at_y.mats[p].add_assign_scaled(f, y[k]);
                        }
                    }
                    for &(i, j, v) in &row.e {
                        let cur = at_y.mats[row_block(k)].at(i, j);
                        at_y.mats[row_block(k)].set(i, j, cur - v * y[k]);
                    }
                }
                for mat in &at_y.mats {
                    if mat.n > 0 {
                        max_eig = max_eig.max(mat.eigh().0.last().copied().unwrap_or(0.0));
                    }
                }
                if max_eig <= 1e-9 * y_norm {
                    status = SdpStatus::PrimalInfeasible;
                    break;
                }
            }
        }
        let u_norm = u.mats.iter().map(|m| m.max_abs()).fold(0.0f64, f64::max);
        if u_norm > 1e8 * mu0 {
            let cu: f64 = (0..np).map(|p| cmats[p].dot(&u.mats[p])).sum();
            if cu < -1e-3 * u_norm && rp_norm <= 1e-7 * u_norm {
                status = SdpStatus::DualInfeasible;
                break;
            }
        }

        // Nesterov-Todd scaling per block
        let mut scaling = Scaling { t: vec![], tinv: vec![], n: vec![], lambda: vec![] };
        let mut scaling_ok = true;
        for b in 0..dims.len() {
            let l = match u.mats[b].cholesky() {
                Some(l) => l,
                None => {
                    scaling_ok = false;
                    break;
                }
            };
            let ltwl = l.transpose().mul(&w.mats[b]).mul(&l);
            let (evals, p) = ltwl.eigh();
            if evals[0] <= 0.0 {
                scaling_ok = false;
                break;
            }
            let lam: Vec<f64> = evals.iter().map(|v| v.sqrt()).collect();
            let lp = l.mul(&p);
            let mut t = lp.clone();
            let mut tinv_t = lp.clone();
            let n_dim = dims[b];
            for j in 0..n_dim {
                let q = lam[j].sqrt(); // Lambda^{1/4}
                for i in 0..n_dim {
                    t.set(i, j, t.at(i, j) / q);
                }
            }
            // Tinv = Lambda^{1/4} P^T L^{-1} = (L^{-T} P Lambda^{1/4})^T
            let linv_t_p = l.transpose().cholesky_free_solve(&p);
            for j in 0..n_dim {
                let q = lam[j].sqrt();
                for i in 0..n_dim {
                    tinv_t.set(i, j, linv_t_p.at(i, j) * q);
                }
            }
            let tinv = tinv_t.transpose();
            let nmat = t.mul(&t.transpose());
            scaling.t.push(t);
            scaling.tinv.push(tinv);
            scaling.n.push(nmat);
            scaling.lambda.push(lam);
        }
        if !scaling_ok {
            status = SdpStatus::MaxIterations;
            break;
        }

        // Schur complement M[k][l] = sum_b <A_k,b, N_b A_l,b N_b>
        let mut gmats: Vec<Vec<Option<RMat>>> = Vec::with_capacity(m);
        for row in rows.iter() {
            let mut per_block: Vec<Option<RMat>> = vec![None; dims.len()];
            for (p, f) in row.f.iter().enumerate() {
                if let Some(f) = f {
                    per_block[p] = Some(scaling.n[p].mul(f).mul(&scaling.n[p]));
                }
            }
            let sb = row.dual_block + np;
            let mut neg_e = sandwich_sparse(&scaling.n[sb], &row.e);
            for v in &mut neg_e.data {
                *v = -*v;
            }
            per_block[sb] = Some(neg_e);
            gmats.push(per_block);
        }
        let mut schur = vec![vec![0.0f64; m]; m];
        for k in 0..m {
            for l in k..m {
                let mut acc = 0.0;
                for (p, f) in rows[k].f.iter().enumerate() {
                    if let (Some(f), Some(g)) = (f, &gmats[l][p]) {
                        acc += f.dot(g);
                    }
                }
                let sbk = row_block(k);
                if let Some(g) = &gmats[l][sbk] {
                    acc -= sparse_dot(&rows[k].e, g);
                }
                schur[k][l] = acc;
                schur[l][k] = acc;
            }
        }
        let mut schur_mat = RMat::zeros(m);
        for k in 0..m {
            for l in 0..m {
                let reg = if k == l { 1e-14 * (1.0 + schur[k][k]) } else { 0.0 };
                schur_mat.set(k, l, schur[k][l] + reg);
            }
        }
        let chol = match schur_mat.cholesky() {
            Some(c) => c,
            None => {
                status = SdpStatus::MaxIterations;
                break;
            }
        };
        // one pass of iterative refinement against the unregularized matrix
        let schur_solve = |rhs: &[f64], chol: &RMat| -> Vec<f64> {
            let mut x = chol.solve_lower_t(&chol.solve_lower(rhs));
            for _ in 0..2 {
                let mut resid = rhs.to_vec();
                for k in 0..m {
                    let mut acc = 0.0;
                    for l in 0..m {
                        acc += schur[k][l] * x[l];
                    }
                    resid[k] -= acc;
                }
                let corr = chol.solve_lower_t(&chol.solve_lower(&resid));
                for k in 0..m {
                    x[k] += corr[k];
                }
            }
            x
        };

        // solves: A du = rp', A^dag dy + dw = Rd', du + N dw N = Rc'
        let solve_kkt = |rp_in: &[f64], rd_in: &Cone, rc_in: &Cone, chol: &RMat| -> (Vec<f64>, Cone, Cone) {
            // rhs_k = rp'_k - <A_k, (Rc' - N Rd' N)>
            let mut rhs = rp_in.to_vec();
            let mut q = Cone::zeros_like(&dims);
            for b in 0..dims.len() {
                let nrdn = scaling.n[b].mul(&rd_in.mats[b]).mul(&scaling.n[b]);
                q.mats[b] = rc_in.mats[b].sub(&nrdn);
            }
            for (k, row) in rows.iter().enumerate() {
                let mut acc = 0.0;
                for (p, f) in row.f.iter().enumerate() {
                    if let Some(f) = f {
                        acc += f.dot(&q.mats[p]);
                    }
                }
                acc -= sparse_dot(&row.e, &q.mats[row_block(k)]);
                rhs[k] -= acc;
            }
            let dy = schur_solve(&rhs, chol);
            // dW = Rd' - A^dag dy ; dU = Rc' - N dW N
            let mut dw = rd_in.clone();
            for (k, row) in rows.iter().enumerate() {
                if dy[k] == 0.0 {
                    continue;
                }
                for (p, f) in row.f.iter().enumerate() {
                    if let Some(f) = f {
                        dw.mats[p].add_assign_scaled(f, -dy[k]);
                    }
                }
                for &(i, j, v) in &row.e {
                    let cur = dw.mats[row_block(k)].at(i, j);
                    dw.mats[row_block(k)].set(i, j, cur + v * dy[k]);
                }
            }
            let mut du = Cone::zeros_like(&dims);
            for b in 0..dims.len() {
                let ndwn = scaling.n[b].mul(&dw.mats[b]).mul(&scaling.n[b]);
                du.mats[b] = rc_in.mats[b].sub(&ndwn);
                du.mats[b].symmetrize();
                dw.mats[b].symmetrize();
            }
            (dy, du, dw)
        };

        // direction-level iterative refinement against the exact KKT
        // residuals; keeps the feasibility drift of long steps tiny
        let solve_direction = |rc: &Cone, chol: &RMat| -> (Vec<f64>, Cone, Cone) {
            let (mut dy, mut du, mut dw) = solve_kkt(&rp, &rd, rc, chol);
            for _ in 0..2 {
                // r1 = rp - A du
                let mut r1 = rp.clone();
                for (k, row) in rows.iter().enumerate() {
                    let mut acc = 0.0;
                    for (p, f) in row.f.iter().enumerate() {
                        if let Some(f) = f {
                            acc += f.dot(&du.mats[p]);
                        }
                    }
                    acc -= sparse_dot(&row.e, &du.mats[row_block(k)]);
                    r1[k] -= acc;
                }
                // r2 = Rd - A^dag dy - dw
                let mut r2 = rd.clone();
                r2.axpy(-1.0, &dw);
                for (k, row) in rows.iter().enumerate() {
                    if dy[k] == 0.0 {
                        continue;
                    }
                    for (p, f) in row.f.iter().enumerate() {
                        if let Some(f) = f {
                            r2.mats[p].add_assign_scaled(f, -dy[k]);
                        }
                    }
                    for &(i, j, v) in &row.e {
                        let cur = r2.mats[row_block(k)].at(i, j);
                        r2.mats[row_block(k)].set(i, j, cur + v * dy[k]);
                    }
                }
                // r3 = Rc - du - N dw N
                let mut r3 = Cone::zeros_like(&dims);
                for b in 0..dims.len() {
                    let ndwn = scaling.n[b].mul(&dw.mats[b]).mul(&scaling.n[b]);
                    r3.mats[b] = rc.mats[b].sub(&du.mats[b]).sub(&ndwn);
                }
                let r1_norm = r1.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if r1_norm < 1e-14 * b_norm {
                    break;
                }
                let (ey, eu, ew) = solve_kkt(&r1, &r2, &r3, chol);
                for (k, v) in ey.iter().enumerate() {
                    dy[k] += v;
                }
                du.axpy(1.0, &eu);
                dw.axpy(1.0, &ew);
            }
            (dy, du, dw)
        };

        // affine direction: Rc = -U
        let mut rc_aff = Cone::zeros_like(&dims);
        for b in 0..dims.len() {
            rc_aff.mats[b] = u.mats[b].scale(-1.0);
        }
        let (_dy_aff, du_aff, dw_aff) = solve_direction(&rc_aff, &chol);
        let ap_aff = step_to_boundary(&u, &du_aff);
        let ad_aff = step_to_boundary(&w, &dw_aff);
        let mut u_try = Cone::zeros_like(&dims);
        for b in 0..dims.len() {
            u_try.mats[b] = u.mats[b].clone();
        }
        u_try.axpy(ap_aff.min(1.0), &du_aff);
        let mut w_try = Cone::zeros_like(&dims);
        for b in 0..dims.len() {
            w_try.mats[b] = w.mats[b].clone();
        }
        w_try.axpy(ad_aff.min(1.0), &dw_aff);
        let mu_aff = (u_try.dot(&w_try) / nu).max(0.0);
        let expo = if ap_aff.min(ad_aff) > 0.9 { 3 } else { 2 };
        // complementarity only needs half the gap budget; driving mu
        // further wrecks the Schur conditioning while feasibility lags
        let mu_floor = opts.gap_tol * (1.0 + alpha_val.abs()) / nu;
        let sigma = ((mu_aff / mu).powi(expo)).clamp(1e-10, 1.0).max((mu_floor / mu).min(1.0));

        // corrector: Rc = T Lv^-1[ sigma mu I - V^2 - sym(Du Dw) ] T^T
        let mut rc = Cone::zeros_like(&dims);
        for b in 0..dims.len() {
            let t = &scaling.t[b];
            let tinv = &scaling.tinv[b];
            let duh = tinv.mul(&du_aff.mats[b]).mul(&tinv.transpose());
            let dwh = t.transpose().mul(&dw_aff.mats[b]).mul(t);
            let prod = duh.mul(&dwh);
            let lam = &scaling.lambda[b];
            let n_dim = dims[b];
            let mut rs = RMat::zeros(n_dim);
            for i in 0..n_dim {
                for j in 0..n_dim {
                    let sym = 0.5 * (prod.at(i, j) + prod.at(j, i));
                    let mut v = -sym;
                    if i == j {
                        v += sigma * mu - lam[i] * lam[i];
                    }
                    rs.set(i, j, 2.0 * v / (lam[i] + lam[j]));
                }
            }
            rc.mats[b] = t.mul(&rs).mul(&t.transpose());
            rc.mats[b].symmetrize();
        }
        let (mut dy, mut du, mut dw) = solve_direction(&rc, &chol);
        // centrality-aware steps: back off until the smallest scaled
        // complementarity eigenvalue stays within a wide neighborhood of mu
        let pick_steps = |du: &Cone, dw: &Cone| -> (f64, f64) {
            let mut ap = (0.99 * step_to_boundary(&u, du)).min(1.0);
            let mut ad = (0.99 * step_to_boundary(&w, dw)).min(1.0);
            for _ in 0..10 {
                let mut ut = u.clone();
                ut.axpy(ap, du);
                let mut wt = w.clone();
                wt.axpy(ad, dw);
                let mut lam2_min = f64::INFINITY;
                let mut ok = true;
                let mut tot = 0.0;
                for b in 0..dims.len() {
                    let l = match ut.mats[b].cholesky() {
                        Some(l) => l,
                        None => {
                            ok = false;
                            break;
                        }
                    };
                    let ev = l.transpose().mul(&wt.mats[b]).mul(&l).eigh().0;
                    if ev[0] <= 0.0 {
                        ok = false;
                        break;
                    }
                    lam2_min = lam2_min.min(ev[0]);
                    tot += ev.iter().sum::<f64>();
                }
                if ok && lam2_min >= 1e-4 * (tot / nu) && tot / nu >= 0.2 * mu_floor {
                    return (ap, ad);
                }
                ap *= 0.6;
                ad *= 0.6;
            }
            (ap, ad)
        };
        let (mut ap, mut ad) = pick_steps(&du, &dw);
        if ap.min(ad) < 0.02 {
            // corrector turned out too aggressive; try a centering step
            let mut rc2 = Cone::zeros_like(&dims);
            for b in 0..dims.len() {
                let t = &scaling.t[b];
                let lam = &scaling.lambda[b];
                let n_dim = dims[b];
                let mut rs = RMat::zeros(n_dim);
                for i in 0..n_dim {
                    rs.set(i, i, (0.5 * mu - lam[i] * lam[i]) / lam[i]);
                }
                rc2.mats[b] = t.mul(&rs).mul(&t.transpose());
                rc2.mats[b].symmetrize();
            }
            let (dy2, du2, dw2) = solve_direction(&rc2, &chol);
            let (ap2, ad2) = pick_steps(&du2, &dw2);
            if ap2.min(ad2) > ap.min(ad) {
                dy = dy2;
                du = du2;
                dw = dw2;
                ap = ap2;
                ad = ad2;
            }
        }
        u.axpy(ap, &du);
        w.axpy(ad, &dw);
        for (k, v) in dy.iter().enumerate() {
            y[k] += ad * v;
        }
        project_to_algebra(&mut u);
        project_to_algebra(&mut w);
    }

    // return the best iterate seen
    if let Some((_, bu, _bw, by)) = best {
        u = bu;
        y = by;
    }
    let final_alpha = 0.5 * (0..np).map(|p| cmats[p].dot(&u.mats[p])).sum::<f64>();
    let final_beta = 0.5 * rows.iter().enumerate().map(|(k, r)| r.b * y[k]).sum::<f64>();

    // extract complex solutions
    let xs: Vec<HermitianOp> = (0..np)
        .map(|p| HermitianOp::from_symmetrized(unembed(&u.mats[p])))
        .collect();
    let mut ys: Vec<HermitianOp> = Vec::with_capacity(nd);
    {
        let mut k = 0usize;
        for dual in &problem.dual {
            let d = dual.dim;
            let mut yc = ComplexMatrix::zeros(d, d);
            for kk in 0..d * d {
                if y[k] != 0.0 {
                    let e = basis_element_complex(d, kk);
                    let coeff = y[k] * rows[k].scale / 2.0f64.sqrt();
                    for i in 0..d {
                        for j in 0..d {
                            yc[(i, j)] += e[(i, j)] * coeff;
                        }
                    }
                }
                k += 1;
            }
            ys.push(HermitianOp::from_symmetrized(yc));
        }
    }
    Ok(BlockSolution {
        x: xs,
        y: ys,
        alpha: final_alpha,
        beta: final_beta,
        gap: (final_alpha - final_beta).abs(),
        status,
        iterates,
    })
}

/// y-coordinate index within its dual block.
fn dual_coord_index(problem: &BlockProblem, mut k: usize) -> usize {
    for dual in &problem.dual {
        let n = dual.dim * dual.dim;
        if k < n {
            return k;
        }
        k -= n;
    }
    unreachable!("row index out of range");
}

/// Complex Hermitian orthonormal basis element k of dimension d.
fn basis_element_complex(d: usize, k: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    if k < d {
        m[(k, k)] = Complex64::new(1.0, 0.0);
        return m;
    }
    let mut idx = k - d;
    let pairs = d * (d - 1) / 2;
    let anti = idx >= pairs;
    if anti {
        idx -= pairs;
    }
    let mut i = 0;
    let mut row_len = d - 1;
    while idx >= row_len {
        idx -= row_len;
        i += 1;
        row_len -= 1;
    }
    let j = i + 1 + idx;
    let r = 1.0 / 2.0f64.sqrt();
    if !anti {
        m[(i, j)] = Complex64::new(r, 0.0);
        m[(j, i)] = Complex64::new(r, 0.0);
    } else {
        m[(i, j)] = Complex64::new(0.0, r);
        m[(j, i)] = Complex64::new(0.0, -r);
    }
    m
}

/// Largest step alpha with U + alpha D >= 0 (up to the 1.0 cap applied by
/// the caller).
fn step_to_boundary(u: &Cone, d: &Cone) -> f64 {
    let mut alpha = f64::INFINITY;
    for (ub, db) in u.mats.iter().zip(&d.mats) {
        let l = match ub.cholesky() {
            Some(l) => l,
            None => return 0.0,
        };
        // H = L^-1 D L^-T
        let g = l.solve_lower_mat(db);
        let h = l.solve_lower_mat(&g.transpose());
        let mut hs = h;
        hs.symmetrize();
        let min = hs.min_eigenvalue();
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    alpha
}

/// Projects every block back onto the embedded-Hermitian algebra, the
/// continuous form of averaging solutions back to exact Hermitian shape.
fn project_to_algebra(c: &mut Cone) {
    for mat in c.mats.iter_mut() {
        let back = unembed(mat);
        *mat = embed(&back);
    }
}

impl RMat {
    /// Solves self^T X = B for lower-triangular self (i.e. an upper solve),
    /// used to build L^-T P.
    fn cholesky_free_solve(&self, b: &RMat) -> RMat {
        // self is L^T here (we call it on l.transpose()), so forward solve
        // with an upper-triangular matrix from the bottom.
        let n = self.n;
        let mut x = b.clone();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let uik = self.at(i, k);
                if uik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = x.at(i, j) - uik * x.at(k, j);
                    x.set(i, j, v);
                }
            }
            let d = self.at(i, i);
            for j in 0..n {
                x.set(i, j, x.at(i, j) / d);
            }
        }
        x
    }
}
