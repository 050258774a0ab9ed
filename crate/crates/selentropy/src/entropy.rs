//! Non-smooth entropies: conditional min-/max-entropy via SDP, von
//! Neumann, relative and conditional Renyi entropies, quasi-entropies,
//! classical closed forms, and the guessing-probability interpretation.
//!
//! All logarithms are base 2; entropies are reported in bits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metrics::root_fidelity;
use crate::operators::{
    rank_tolerance, ComplexMatrix, HermitianOp, MultipartiteState, SystemLayout,
};
use crate::sdp::{
    solve_blocks_robust, BlockProblem, BlockSolution, FeasibleStart, LinMap, SdpStatus,
    SolveOptions,
};

/// A real value in bits with a certified absolute tolerance, or a tagged
/// divergence. Arithmetic on divergent values is an error; comparisons are
/// fine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyValue {
    Finite { bits: f64, tol: f64 },
    NegInf,
    PosInf,
}

impl EntropyValue {
    pub fn finite(bits: f64, tol: f64) -> Self {
        EntropyValue::Finite { bits, tol: tol.abs() }
    }

    pub fn bits(&self) -> Result<f64> {
        match self {
            EntropyValue::Finite { bits, .. } => Ok(*bits),
            _ => Err(Error::NonFinite),
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            EntropyValue::Finite { tol, .. } => *tol,
            _ => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, EntropyValue::Finite { .. })
    }

    /// Finite bits, panicking on a divergence flag; test-side convenience.
    pub fn expect_bits(&self) -> f64 {
        self.bits().expect("finite entropy expected")
    }
}

/// Joint classical distribution P_XY (ny columns per row of x).
#[derive(Debug, Clone)]
pub struct ClassicalDist {
    probs: Vec<Vec<f64>>,
}

impl ClassicalDist {
    pub fn joint(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() || probs[0].is_empty() {
            return Err(Error::Argument("empty distribution".into()));
        }
        let ny = probs[0].len();
        let mut total = 0.0;
        for row in &probs {
            if row.len() != ny {
                return Err(Error::Argument("ragged joint distribution".into()));
            }
            for &p in row {
                if p < 0.0 {
                    return Err(Error::Argument(format!("negative probability {p}")));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn marginal(probs: &[f64]) -> Result<Self> {
        Self::joint(probs.iter().map(|&p| vec![p]).collect())
    }

    pub fn nx(&self) -> usize {
        self.probs.len()
    }

    pub fn ny(&self) -> usize {
        self.probs[0].len()
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y]
    }

    /// Diagonal CQ embedding on labels ("X", "Y").
    pub fn embed(&self) -> Result<MultipartiteState> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut diag = Vec::with_capacity(nx * ny);
        for x in 0..nx {
            for y in 0..ny {
                diag.push(self.prob(x, y));
            }
        }
        let layout = SystemLayout::new(&[("X", nx), ("Y", ny)])?;
        MultipartiteState::new(ComplexMatrix::diag(&diag), layout)
    }
}

/// Marginal on `a + b` (in that order) after tracing everything else out.
pub fn conditional_marginal(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
) -> Result<(MultipartiteState, usize, usize)> {
    for l in a {
        if b.contains(l) {
            return Err(Error::Argument(format!("label `{l}` on both sides")));
        }
    }
    let keep: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let marg = rho.partial_trace(&keep)?;
    let reordered = marg.reorder(&keep)?;
    let da = reordered.layout().dim_of_all(a)?;
    let db = reordered.layout().dim_of_all(b)?;
    Ok((reordered, da, db))
}

fn entropy_from_min_sdp(sol: &BlockSolution) -> Result<EntropyValue> {
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!("status {:?}, gap {:.3e}", sol.status, sol.gap)));
    }
    // flipped orientation: alpha = -2^(-H_min)
    let opt = (-sol.alpha).max(1e-300);
    let tol = (1.0 + sol.gap / opt).log2().abs() + 1e-12;
    Ok(EntropyValue::finite(-opt.log2(), tol))
}

/// The min-entropy SDP of a (reordered) bipartite operator, solved in the
/// orientation that keeps the Schur complement on the small B side:
///
/// ```text
/// minimize <-K, X>  s.t.  -tr_A(X) >= -1_B, X >= 0
/// ```
///
/// whose optimum is -2^(-H_min(A|B)) and whose dual variable is the
/// optimal sigma_B of the textbook primal.
pub(crate) fn min_entropy_problem(
    k: &HermitianOp,
    da: usize,
    db: usize,
) -> (BlockProblem, FeasibleStart) {
    let mut bp = BlockProblem::new();
    let x = bp.primal_block(da * db, k.scale(-1.0));
    let cons = bp.dual_block(db, HermitianOp::identity(db).scale(-1.0));
    bp.term(cons, x, LinMap::TraceOutLeft { d_left: da, s: -1.0 });
    let start = FeasibleStart {
        x: vec![HermitianOp::identity(da * db).scale(1.0 / (2.0 * da as f64))],
        y: vec![HermitianOp::identity(db).scale(k.op_norm() + 1.0)],
    };
    (bp, start)
}

/// Conditional min-entropy H_min(A|B), systems outside a+b traced out.
pub fn h_min(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    Ok(h_min_with_log(rho, a, b)?.0)
}

/// As `h_min`, additionally returning the full solver certificate with
/// its iterate log.
pub fn h_min_with_log(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
) -> Result<(EntropyValue, BlockSolution)> {
    let (marg, da, db) = conditional_marginal(rho, a, b)?;
    let (bp, start) = min_entropy_problem(marg.op(), da, db);
    let sol = solve_blocks_robust(&bp, Some(start), &SolveOptions::default())?;
    let value = entropy_from_min_sdp(&sol)?;
    Ok((value, sol))
}

/// Purification of a possibly sub-normalized state as a sub-normalized
/// rank-1 state on layout + "P" with dim(P) = rank. Unlike the public
/// `purification`, no normalizing extension is added, so the marginal on
/// the original labels is exactly the input.
pub(crate) fn purify_keep_trace(rho: &MultipartiteState) -> Result<MultipartiteState> {
    use crate::operators::canonical_eigensystem;
    let (evals, vecs) = canonical_eigensystem(rho.op());
    let tol = rank_tolerance(evals.first().copied().unwrap_or(0.0).abs());
    let rank = evals.iter().filter(|l| **l > tol).count().max(1);
    let n = rho.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * rank];
    for k in 0..rank {
        let w = evals[k].max(0.0).sqrt();
        for i in 0..n {
            amps[i * rank + k] = vecs[(i, k)] * w;
        }
    }
    let layout = rho.layout().appended("P", rank)?;
    crate::operators::pure_state_from_vec(&amps, layout)
}

/// Conditional max-entropy H_max(A|B) computed by duality on the canonical
/// purification: H_max(A|B) = -H_min(A|P).
pub fn h_max(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    let (marg, _, _) = conditional_marginal(rho, a, b)?;
    let pure = purify_keep_trace(&marg)?;
    match h_min(&pure, a, &["P"])? {
        EntropyValue::Finite { bits, tol } => Ok(EntropyValue::finite(-bits, tol)),
        EntropyValue::NegInf => Ok(EntropyValue::PosInf),
        EntropyValue::PosInf => Ok(EntropyValue::NegInf),
    }
}

/// Direct primal SDP for the max-entropy: minimize |tr_A(Z_AB)|_inf over
/// Z_AB (x) 1_C >= rho_ABC on the canonical purification. Cross-check path
/// for `h_max`.
pub fn h_max_direct(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    let (marg, da, db) = conditional_marginal(rho, a, b)?;
    let pure = purify_keep_trace(&marg)?;
    let dc = pure.layout().dim_of("P")?;
    let dab = da * db;
    let mut bp = BlockProblem::new();
    let z = bp.primal_block(dab, HermitianOp::zeros(dab));
    let mu = bp.primal_block(1, HermitianOp::identity(1));
    let d1 = bp.dual_block(db, HermitianOp::zeros(db));
    bp.term(d1, mu, LinMap::ScalarTimes { g: HermitianOp::identity(db), s: 1.0 });
    bp.term(d1, z, LinMap::TraceOutLeft { d_left: da, s: -1.0 });
    let d2 = bp.dual_block(dab * dc, pure.op().clone());
    bp.term(d2, z, LinMap::TensorRightId { d_right: dc, s: 1.0 });
    let z0 = pure.op().op_norm() + 1.0;
    let start = FeasibleStart {
        x: vec![
            HermitianOp::identity(dab).scale(z0),
            HermitianOp::diag(&[z0 * da as f64 + 1.0]),
        ],
        y: vec![
            HermitianOp::identity(db).scale(1.0 / (2.0 * db as f64)),
            HermitianOp::identity(dab * dc).scale(1.0 / (4.0 * db as f64 * dc as f64)),
        ],
    };
    let sol = solve_blocks_robust(&bp, Some(start), &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!("status {:?}", sol.status)));
    }
    let alpha = sol.alpha.max(1e-300);
    let tol = (1.0 + sol.gap / alpha).log2().abs() + 1e-12;
    Ok(EntropyValue::finite(alpha.log2(), tol))
}

/// Shannon entropy of a spectrum, in bits; kernel eigenvalues contribute 0.
fn spectrum_entropy(op: &HermitianOp) -> f64 {
    let (evals, _) = op.eigh();
    evals
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

/// Conditional von Neumann entropy H(A|B) = H(rho_AB) - H(rho_B), bits.
pub fn h_vn(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    let (marg, _, _) = conditional_marginal(rho, a, b)?;
    let hb = if b.is_empty() {
        let t = marg.trace();
        -t * t.log2()
    } else {
        spectrum_entropy(marg.partial_trace(b)?.op())
    };
    Ok(EntropyValue::finite(spectrum_entropy(marg.op()) - hb, 1e-12))
}

/// Classical closed form: H_min(X|Y) = -log2 sum_y max_x P(x, y).
pub fn classical_h_min(p: &ClassicalDist) -> EntropyValue {
    let mut total = 0.0;
    for y in 0..p.ny() {
        let mut best = 0.0f64;
        for x in 0..p.nx() {
            best = best.max(p.prob(x, y));
        }
        total += best;
    }
    EntropyValue::finite(-total.log2(), 1e-14)
}

/// Classical closed form: H_max(X|Y) = log2 sum_y (sum_x sqrt(P(x,y)))^2.
pub fn classical_h_max(p: &ClassicalDist) -> EntropyValue {
    let mut total = 0.0;
    for y in 0..p.ny() {
        let s: f64 = (0..p.nx()).map(|x| p.prob(x, y).sqrt()).sum();
        total += s * s;
    }
    EntropyValue::finite(total.log2(), 1e-14)
}

/// Frobenius-relative deviation of `rho` from block-diagonality in the
/// computational basis of `label`.
pub(crate) fn classicality_deviation(rho: &MultipartiteState, label: &str) -> Result<f64> {
    let all: Vec<&str> = rho.layout().labels();
    let mut order = vec![label];
    for l in &all {
        if *l != label {
            order.push(l);
        }
    }
    let r = rho.reorder(&order)?;
    let dx = r.layout().dim_of(label)?;
    let rest = r.dim() / dx;
    let mut off = 0.0f64;
    for x in 0..dx {
        for xp in 0..dx {
            if x == xp {
                continue;
            }
            for i in 0..rest {
                for j in 0..rest {
                    off += r.matrix()[(x * rest + i, xp * rest + j)].norm_sqr();
                }
            }
        }
    }
    Ok(off.sqrt() / r.matrix().frob_norm().max(1e-300))
}

pub(crate) fn require_classical(rho: &MultipartiteState, label: &str) -> Result<()> {
    let dev = classicality_deviation(rho, label)?;
    if dev > 1e-9 {
        return Err(Error::Classicality(label.to_string(), dev));
    }
    Ok(())
}

/// Optimal guessing probability 2^(-H_min(X|B)) of a CQ state.
pub fn guessing_probability(rho: &MultipartiteState, x: &str, b: &[&str]) -> Result<f64> {
    let keep: Vec<&str> = std::iter::once(x).chain(b.iter().copied()).collect();
    let marg = rho.partial_trace(&keep)?;
    require_classical(&marg, x)?;
    let h = h_min(&marg, &[x], b)?;
    Ok(2.0f64.powf(-h.bits()?))
}

/// f-quasi-entropy of A relative to B by eigen-expansion over support
/// pairs. Kernel-of-B terms take the xi -> 0 limit of xi f(lambda/xi),
/// contributing 0 when it vanishes and a divergence flag otherwise.
pub fn quasi_entropy(
    f: impl Fn(f64) -> f64,
    a: &HermitianOp,
    b: &HermitianOp,
) -> Result<EntropyValue> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch("quasi-entropy arguments".into()));
    }
    let (la, va) = a.eigh();
    let (lb, vb) = b.eigh();
    let tol_a = rank_tolerance(la.first().copied().unwrap_or(0.0).abs());
    let tol_b = rank_tolerance(lb.first().copied().unwrap_or(0.0).abs());
    let n = a.dim();
    let overlap = va.adjoint().mul(&vb);
    let mut total = 0.0f64;
    for i in 0..n {
        let lam = la[i].max(0.0);
        for j in 0..n {
            let mu = lb[j].max(0.0);
            let w = overlap[(i, j)].norm_sqr();
            if w < 1e-28 {
                continue;
            }
            if mu > tol_b {
                total += mu * f(lam / mu) * w;
            } else if lam > tol_a {
                // xi -> 0 limit of xi f(lambda/xi), probed numerically
                let probe1 = 1e-8 * f(lam / 1e-8);
                let probe2 = 1e-12 * f(lam / 1e-12);
                if probe1.abs() < 1e-6 && probe2.abs() < 1e-9 {
                    continue;
                }
                return Ok(if probe2 > 0.0 { EntropyValue::PosInf } else { EntropyValue::NegInf });
            }
        }
    }
    Ok(EntropyValue::finite(total, 1e-12))
}

fn support_contained(a: &HermitianOp, b: &HermitianOp) -> bool {
    let pi = b.support_projector();
    let compl = HermitianOp::identity(b.dim()).sub(&pi);
    let leak = a.conjugate_by(compl.matrix()).op_norm();
    leak <= rank_tolerance(a.op_norm())
}

/// Relative Renyi entropy S_alpha(A||B) = (1/(1-alpha)) log2 tr(A^a B^(1-a))
/// with the continuous extensions at alpha in {0, 1, infinity}. At alpha = 1
/// and tr A = 1 this is the von Neumann relative entropy
/// tr(A (log B - log A)).
pub fn relative_renyi(alpha: f64, a: &HermitianOp, b: &HermitianOp) -> Result<EntropyValue> {
    if alpha < 0.0 {
        return Err(Error::Argument(format!("alpha {alpha} < 0")));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch("relative entropy arguments".into()));
    }
    let (la, va) = a.eigh();
    let (lb, vb) = b.eigh();
    let tol_a = rank_tolerance(la.first().copied().unwrap_or(0.0).abs());
    let tol_b = rank_tolerance(lb.first().copied().unwrap_or(0.0).abs());
    let n = a.dim();
    let overlap = va.adjoint().mul(&vb);
    let contained = support_contained(a, b);
    if alpha > 1.0 && !contained {
        return Ok(EntropyValue::NegInf);
    }
    if alpha.is_infinite() {
        // S_inf = -log2 max_{<e|f> != 0} lambda_i / mu_j
        let mut ratio = 0.0f64;
        for i in 0..n {
            let lam = la[i].max(0.0);
            if lam <= tol_a {
                continue;
            }
            for j in 0..n {
                if overlap[(i, j)].norm_sqr() < 1e-20 {
                    continue;
                }
                let mu = lb[j].max(0.0);
                if mu <= tol_b {
                    return Ok(EntropyValue::NegInf);
                }
                ratio = ratio.max(lam / mu);
            }
        }
        return Ok(EntropyValue::finite(-ratio.log2(), 1e-10));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        // tr(A (log B - log A)), kernel of A contributes nothing
        let mut total = 0.0f64;
        for i in 0..n {
            let lam = la[i].max(0.0);
            if lam <= tol_a {
                continue;
            }
            for j in 0..n {
                let w = overlap[(i, j)].norm_sqr();
                if w < 1e-28 {
                    continue;
                }
                let mu = lb[j].max(0.0);
                if mu <= tol_b {
                    return Ok(EntropyValue::NegInf);
                }
                total += lam * (mu.log2() - lam.log2()) * w;
            }
        }
        return Ok(EntropyValue::finite(total, 1e-11));
    }
    let mut total = 0.0f64;
    for i in 0..n {
        let lam = la[i].max(0.0);
        if lam <= tol_a {
            continue;
        }
        for j in 0..n {
            let w = overlap[(i, j)].norm_sqr();
            if w < 1e-28 {
                continue;
            }
            let mu = lb[j].max(0.0);
            if mu <= tol_b {
                continue; // alpha < 1 here; kernel terms vanish
            }
            total += lam.powf(alpha) * mu.powf(1.0 - alpha) * w;
        }
    }
    if total <= 0.0 {
        return Ok(EntropyValue::NegInf);
    }
    Ok(EntropyValue::finite(total.log2() / (1.0 - alpha), 1e-10))
}

/// Relative min-entropy S_min(A||B) = sup { lambda : A <= 2^-lambda B }.
pub fn relative_min(a: &HermitianOp, b: &HermitianOp) -> Result<EntropyValue> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch("relative entropy arguments".into()));
    }
    if !support_contained(a, b) {
        return Ok(EntropyValue::NegInf);
    }
    let binv = b.generalized_inverse().sqrt();
    let m = a.conjugate_by(binv.matrix());
    let norm = m.op_norm();
    if norm <= 0.0 {
        return Ok(EntropyValue::PosInf);
    }
    Ok(EntropyValue::finite(-norm.log2(), 1e-10))
}

/// Relative max-entropy S_max(A||B) = 2 log2 |sqrt(A) sqrt(B)|_1.
pub fn relative_max(a: &HermitianOp, b: &HermitianOp) -> Result<EntropyValue> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch("relative entropy arguments".into()));
    }
    let f = root_fidelity(a, b);
    if f <= 0.0 {
        return Ok(EntropyValue::NegInf);
    }
    Ok(EntropyValue::finite(2.0 * f.log2(), 1e-10))
}

/// Conditional Renyi entropy H_alpha(A|B) = S_alpha(rho_AB || 1 (x) rho_B).
pub fn conditional_renyi(
    alpha: f64,
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
) -> Result<EntropyValue> {
    let (marg, da, _) = conditional_marginal(rho, a, b)?;
    let sigma = if b.is_empty() {
        HermitianOp::identity(da)
    } else {
        HermitianOp::identity(da).kron(marg.partial_trace(b)?.op())
    };
    relative_renyi(alpha, marg.op(), &sigma)
}

/// Plug-in lower bound on the min-entropy with sigma_B = rho_B.
pub fn hat_h_min(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    let (marg, _, _) = conditional_marginal(rho, a, b)?;
    let rb = if b.is_empty() {
        HermitianOp::diag(&[marg.trace()])
    } else {
        marg.partial_trace(b)?.op().clone()
    };
    let scaled = HermitianOp::identity(marg.dim() / rb.dim())
        .kron(&rb.generalized_inverse().sqrt());
    let m = marg.op().conjugate_by(scaled.matrix());
    Ok(EntropyValue::finite(-m.op_norm().log2(), 1e-10))
}

/// Plug-in upper bound on the max-entropy via the support projector.
pub fn hat_h_max(rho: &MultipartiteState, a: &[&str], b: &[&str]) -> Result<EntropyValue> {
    let (marg, da, db) = conditional_marginal(rho, a, b)?;
    let pi = marg.op().support_projector();
    // max over sigma of tr(Pi (1 (x) sigma)) = |tr_A Pi|_inf
    let tr_a = LinMap::TraceOutLeft { d_left: da, s: 1.0 }.apply(pi.matrix());
    let _ = db;
    Ok(EntropyValue::finite(
        HermitianOp::from_symmetrized(tr_a).op_norm().log2(),
        1e-10,
    ))
}

/// Both sides of the blockwise decomposition for a state with a classical
/// register K: H_min(A|BK), -log2 sum_k p_k 2^(-H_min(A|B) of block k),
/// and the max-entropy analog.
pub struct MixtureDecomposition {
    pub lhs_min: EntropyValue,
    pub rhs_min: EntropyValue,
    pub lhs_max: EntropyValue,
    pub rhs_max: EntropyValue,
}

pub fn mixture_decomposition_check(
    rho: &MultipartiteState,
    k_label: &str,
    a: &[&str],
    b: &[&str],
) -> Result<MixtureDecomposition> {
    require_classical(rho, k_label)?;
    let mut bk: Vec<&str> = b.to_vec();
    bk.push(k_label);
    let lhs_min = h_min(rho, a, &bk)?;
    let lhs_max = h_max(rho, a, &bk)?;
    // extract blocks tau_k with weights p_k
    let mut order: Vec<&str> = vec![k_label];
    for l in a.iter().chain(b.iter()) {
        order.push(l);
    }
    let marg = rho.partial_trace(&order)?.reorder(&order)?;
    let dk = marg.layout().dim_of(k_label)?;
    let rest = marg.dim() / dk;
    let mut sum_min = 0.0f64;
    let mut sum_max = 0.0f64;
    let mut tol = 0.0f64;
    for k in 0..dk {
        let block = ComplexMatrix::from_fn(rest, rest, |i, j| {
            marg.matrix()[(k * rest + i, k * rest + j)]
        });
        let p_k = (0..rest).map(|i| block[(i, i)].re).sum::<f64>();
        if p_k <= 1e-14 {
            continue;
        }
        let rest_factors: Vec<(&str, usize)> = marg.layout().factors()[1..]
            .iter()
            .map(|(l, d)| (l.as_str(), *d))
            .collect();
        let tau = MultipartiteState::new(block, SystemLayout::new(&rest_factors)?)?;
        let hm = h_min(&tau, a, b)?;
        let hx = h_max(&tau, a, b)?;
        sum_min += 2.0f64.powf(-hm.bits()?);
        sum_max += 2.0f64.powf(hx.bits()?);
        tol = tol.max(hm.tol()).max(hx.tol());
    }
    Ok(MixtureDecomposition {
        lhs_min,
        rhs_min: EntropyValue::finite(-sum_min.log2(), tol),
        lhs_max,
        rhs_max: EntropyValue::finite(sum_max.log2(), tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        maximally_entangled, maximally_mixed, pure_state_from_vec, random_state, state_tensor,
    };

    fn bell() -> MultipartiteState {
        maximally_entangled(2)
    }

    fn bernoulli(p: f64) -> ClassicalDist {
        ClassicalDist::marginal(&[1.0 - p, p]).unwrap()
    }

    #[test]
    fn h_min_of_bell_state() {
        let h = h_min(&bell(), &["A"], &["A'"]).unwrap();
        assert!((h.expect_bits() + 1.0).abs() < 1e-7, "{:?}", h);
    }

    #[test]
    fn h_min_of_product_with_mixed_a() {
        let pi = maximally_mixed(2);
        let sigma = random_state(&SystemLayout::single("B", 2), 2, 3).unwrap();
        let rho = state_tensor(&pi, &sigma).unwrap();
        let h = h_min(&rho, &["A"], &["B"]).unwrap();
        assert!((h.expect_bits() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn h_min_classical_bernoulli() {
        let rho = bernoulli(0.2).embed().unwrap();
        let h = h_min(&rho, &["X"], &[]).unwrap();
        assert!((h.expect_bits() - (-0.8f64.log2())).abs() < 1e-7);
    }

    #[test]
    fn h_max_of_pure_product() {
        let zero = pure_state_from_vec(
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            SystemLayout::single("A", 2),
        )
        .unwrap();
        let zero_b = MultipartiteState::new(zero.matrix().clone(), SystemLayout::single("B", 2)).unwrap();
        let rho = state_tensor(&zero, &zero_b).unwrap();
        let h = h_max(&rho, &["A"], &["B"]).unwrap();
        assert!(h.expect_bits().abs() < 1e-6, "{:?}", h);
    }

    #[test]
    fn h_max_of_bell_state() {
        let h = h_max(&bell(), &["A"], &["A'"]).unwrap();
        assert!((h.expect_bits() + 1.0).abs() < 1e-6, "{:?}", h);
    }

    #[test]
    fn h_max_classical_bernoulli() {
        let rho = bernoulli(0.2).embed().unwrap();
        let h = h_max(&rho, &["X"], &[]).unwrap();
        let expect = 1.8f64.log2(); // 2 log2(sqrt(0.8) + sqrt(0.2))
        assert!((h.expect_bits() - expect).abs() < 1e-6, "{:?}", h);
    }

    #[test]
    fn h_max_direct_agrees_with_duality() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        for seed in 0..8u64 {
            let rho = random_state(&layout, 2, seed).unwrap();
            let dual = h_max(&rho, &["A"], &["B"]).unwrap();
            let direct = h_max_direct(&rho, &["A"], &["B"]).unwrap();
            let tol = dual.tol() + direct.tol() + 1e-6;
            assert!(
                (dual.expect_bits() - direct.expect_bits()).abs() <= tol,
                "seed {seed}: {dual:?} vs {direct:?}"
            );
        }
    }

    #[test]
    fn h_vn_basics() {
        let pi = maximally_mixed(2);
        assert!((h_vn(&pi, &["A"], &[]).unwrap().expect_bits() - 1.0).abs() < 1e-12);
        let h = h_vn(&bell(), &["A"], &["A'"]).unwrap();
        assert!((h.expect_bits() + 1.0).abs() < 1e-12);
        let bern = bernoulli(0.2).embed().unwrap();
        let expect = -(0.2f64.log2() * 0.2 + 0.8f64.log2() * 0.8);
        assert!((h_vn(&bern, &["X"], &[]).unwrap().expect_bits() - expect).abs() < 1e-12);
    }

    #[test]
    fn classical_min_max_closed_forms() {
        // deterministic X
        let det = ClassicalDist::joint(vec![vec![1.0], vec![0.0]]).unwrap();
        assert!(classical_h_min(&det).expect_bits().abs() < 1e-12);
        assert!(classical_h_max(&det).expect_bits().abs() < 1e-12);
        // uniform on {(0,0), (1,0), (0,1)}
        let third = 1.0 / 3.0;
        let p = ClassicalDist::joint(vec![vec![third, third], vec![third, 0.0]]).unwrap();
        let h = classical_h_min(&p).expect_bits();
        assert!((h - 1.5f64.log2()).abs() < 1e-12, "{h}");
        // uniform X over d, trivial Y
        let u = ClassicalDist::marginal(&[0.25; 4]).unwrap();
        assert!((classical_h_max(&u).expect_bits() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classical_forms_match_sdp_on_random_joints() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        for _ in 0..12 {
            let nx = rng.gen_range(2..=4);
            let ny = rng.gen_range(2..=4);
            let mut probs = vec![vec![0.0f64; ny]; nx];
            let mut total = 0.0;
            for row in probs.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(0.0..1.0);
                    total += *v;
                }
            }
            for row in probs.iter_mut() {
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
            let dist = ClassicalDist::joint(probs).unwrap();
            let rho = dist.embed().unwrap();
            let sdp_min = h_min(&rho, &["X"], &["Y"]).unwrap();
            let sdp_max = h_max(&rho, &["X"], &["Y"]).unwrap();
            let cmin = classical_h_min(&dist).expect_bits();
            let cmax = classical_h_max(&dist).expect_bits();
            assert!((sdp_min.expect_bits() - cmin).abs() < 5e-6);
            assert!((sdp_max.expect_bits() - cmax).abs() < 5e-6);
        }
    }

    #[test]
    fn guessing_probability_helstrom() {
        // equal priors on |0> and |+>
        let r = 1.0 / 2.0f64.sqrt();
        let mut m = ComplexMatrix::zeros(4, 4);
        // |0><0| (x) |0><0| weighted 1/2 on X=0
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        // X=1 block: |+><+| / 2
        for i in 2..4 {
            for j in 2..4 {
                m[(i, j)] = Complex64::new(0.25, 0.0);
            }
        }
        let layout = SystemLayout::new(&[("X", 2), ("B", 2)]).unwrap();
        let rho = MultipartiteState::new(m, layout).unwrap();
        let p = guessing_probability(&rho, "X", &["B"]).unwrap();
        let expect = 0.5 * (1.0 + r);
        assert!((p - expect).abs() < 1e-6, "{p} vs {expect}");
    }

    #[test]
    fn guessing_probability_classical_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..8 {
            let nx = rng.gen_range(2..=3);
            let ny = rng.gen_range(2..=3);
            let mut probs = vec![vec![0.0f64; ny]; nx];
            let mut total = 0.0;
            for row in probs.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(0.01..1.0);
                    total += *v;
                }
            }
            for row in probs.iter_mut() {
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
            let dist = ClassicalDist::joint(probs.clone()).unwrap();
            let rho = dist.embed().unwrap();
            let g = guessing_probability(&rho, "X", &["Y"]).unwrap();
            let oracle: f64 = (0..ny)
                .map(|y| (0..nx).map(|x| probs[x][y]).fold(0.0f64, f64::max))
                .sum();
            assert!((g - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn guessing_rejects_non_classical() {
        let rho = bell();
        assert!(matches!(
            guessing_probability(&rho, "A", &["A'"]),
            Err(Error::Classicality(..))
        ));
    }

    #[test]
    fn quasi_entropy_recovers_relative_entropy() {
        // commuting full-support pair
        let a = HermitianOp::diag(&[0.6, 0.4]);
        let b = HermitianOp::diag(&[0.5, 0.5]);
        let h = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
        let q = quasi_entropy(h, &a, &b).unwrap();
        let expect = 0.6 * (0.5f64.log2() - 0.6f64.log2()) + 0.4 * (0.5f64.log2() - 0.4f64.log2());
        assert!((q.expect_bits() - expect).abs() < 1e-10);
    }

    #[test]
    fn quasi_entropy_zero_on_equal_normalized() {
        let rho = random_state(&SystemLayout::single("A", 3), 3, 8).unwrap();
        let h = |t: f64| if t > 0.0 { -t * t.log2() } else { 0.0 };
        let q = quasi_entropy(h, rho.op(), rho.op()).unwrap();
        assert!(q.expect_bits().abs() < 1e-9);
    }

    #[test]
    fn quasi_entropy_diagonal_oracle() {
        let a = HermitianOp::diag(&[0.3, 0.5, 0.2]);
        let b = HermitianOp::diag(&[0.2, 0.2, 0.6]);
        let f = |t: f64| t * t; // g_2
        let q = quasi_entropy(f, &a, &b).unwrap();
        let oracle: f64 = [(0.3, 0.2), (0.5, 0.2), (0.2, 0.6)]
            .iter()
            .map(|(l, m): &(f64, f64)| m * (l / m) * (l / m))
            .sum();
        assert!((q.expect_bits() - oracle).abs() < 1e-10);
    }

    #[test]
    fn relative_renyi_zero_on_self() {
        let rho = random_state(&SystemLayout::single("A", 3), 2, 10).unwrap();
        for alpha in [0.5, 0.9, 1.0, 1.5, 2.0] {
            let s = relative_renyi(alpha, rho.op(), rho.op()).unwrap();
            assert!(s.expect_bits().abs() < 1e-9, "alpha {alpha}: {s:?}");
        }
    }

    #[test]
    fn relative_renyi_product_values() {
        // S_{3/2}(pi_4 || 1_2 (x) pi_2) = 1 and S_{1/2} = 1
        let pi4 = HermitianOp::identity(4).scale(0.25);
        let sigma = HermitianOp::identity(4).scale(0.5);
        let s32 = relative_renyi(1.5, &pi4, &sigma).unwrap();
        let s12 = relative_renyi(0.5, &pi4, &sigma).unwrap();
        assert!((s32.expect_bits() - 1.0).abs() < 1e-10);
        assert!((s12.expect_bits() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn relative_renyi_monotone_in_alpha() {
        for seed in 0..10u64 {
            let rho = random_state(&SystemLayout::single("A", 3), 2, seed).unwrap();
            let sigma = random_state(&SystemLayout::single("A", 3), 3, 100 + seed).unwrap();
            let mut prev = f64::INFINITY;
            for alpha in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0] {
                let s = relative_renyi(alpha, rho.op(), sigma.op()).unwrap().expect_bits();
                assert!(s <= prev + 1e-9, "seed {seed} alpha {alpha}: {s} > {prev}");
                prev = s;
            }
        }
    }

    #[test]
    fn relative_min_max_basics() {
        let rho = random_state(&SystemLayout::single("A", 3), 3, 21).unwrap();
        let smin = relative_min(rho.op(), rho.op()).unwrap();
        assert!(smin.expect_bits().abs() < 1e-9);
        let smax = relative_max(rho.op(), rho.op()).unwrap();
        assert!((smax.expect_bits() - 2.0 * rho.trace().log2()).abs() < 1e-9);
        // generalized inverse of diag(2, 0): relative_min against it
        let sub = HermitianOp::diag(&[0.5, 0.0]);
        let b = HermitianOp::diag(&[2.0, 0.0]);
        let s = relative_min(&sub, &b).unwrap();
        assert!((s.expect_bits() - 2.0).abs() < 1e-9); // 0.5 <= 2^-2 * 2
    }

    #[test]
    fn relative_renyi_data_processing() {
        // S_alpha never decreases when the same channel hits both arguments
        use crate::operators::random_povm;
        for seed in 0..8u64 {
            let layout = SystemLayout::single("A", 3);
            let rho = random_state(&layout, 2, seed).unwrap();
            let sigma = random_state(&layout, 3, 300 + seed).unwrap();
            // trace-preserving Kraus set from a random POVM
            let povm = random_povm(3, 3, 600 + seed).unwrap();
            let kraus: Vec<ComplexMatrix> =
                povm.elements().iter().map(|m| m.sqrt().into_matrix()).collect();
            let apply = |op: &HermitianOp| -> HermitianOp {
                let mut out = ComplexMatrix::zeros(3, 3);
                for e in &kraus {
                    out = out.add(&e.mul(op.matrix()).mul(&e.adjoint()));
                }
                HermitianOp::from_symmetrized(out)
            };
            let rho2 = apply(rho.op());
            let sigma2 = apply(sigma.op());
            for alpha in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
                let before = relative_renyi(alpha, rho.op(), sigma.op()).unwrap().expect_bits();
                let after = relative_renyi(alpha, &rho2, &sigma2).unwrap().expect_bits();
                assert!(
                    after >= before - 1e-8,
                    "seed {seed} alpha {alpha}: {after} < {before}"
                );
            }
        }
    }

    #[test]
    fn relative_min_diverges_off_support() {
        let a = HermitianOp::diag(&[0.5, 0.5]);
        let b = HermitianOp::diag(&[1.0, 0.0]);
        assert_eq!(relative_min(&a, &b).unwrap(), EntropyValue::NegInf);
    }

    #[test]
    fn s_half_below_s_max() {
        for seed in 0..20u64 {
            let a = random_state(&SystemLayout::single("A", 3), 2, seed).unwrap();
            let b = random_state(&SystemLayout::single("A", 3), 3, 50 + seed).unwrap();
            let s_half = relative_renyi(0.5, a.op(), b.op()).unwrap().expect_bits();
            let s_max = relative_max(a.op(), b.op()).unwrap().expect_bits();
            assert!(s_half <= s_max + 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn conditional_renyi_duality_pure_tripartite() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2), ("C", 2)]).unwrap();
        for seed in 0..6u64 {
            let rho = random_state(&layout, 1, seed).unwrap();
            for alpha in [0.5, 0.75, 1.25, 1.5] {
                let hab = conditional_renyi(alpha, &rho, &["A"], &["B"]).unwrap().expect_bits();
                let hac =
                    conditional_renyi(2.0 - alpha, &rho, &["A"], &["C"]).unwrap().expect_bits();
                assert!((hab + hac).abs() < 1e-8, "seed {seed} alpha {alpha}: {hab} + {hac}");
            }
        }
    }

    #[test]
    fn conditional_renyi_additivity_and_vn_limit() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let rho = random_state(&layout, 2, 31).unwrap();
        let single = conditional_renyi(1.5, &rho, &["A"], &["B"]).unwrap().expect_bits();
        let double_state = {
            let rho2 = rho.clone();
            let renamed = MultipartiteState::new(
                rho2.matrix().clone(),
                SystemLayout::new(&[("A2", 2), ("B2", 2)]).unwrap(),
            )
            .unwrap();
            state_tensor(&rho, &renamed).unwrap()
        };
        let doubled =
            conditional_renyi(1.5, &double_state, &["A", "A2"], &["B", "B2"]).unwrap().expect_bits();
        assert!((doubled - 2.0 * single).abs() < 1e-8);
        let r1 = conditional_renyi(1.0, &rho, &["A"], &["B"]).unwrap().expect_bits();
        let vn = h_vn(&rho, &["A"], &["B"]).unwrap().expect_bits();
        assert!((r1 - vn).abs() < 1e-8);
    }

    #[test]
    fn entropy_ordering_normalized() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        for seed in 0..10u64 {
            let rho = random_state(&layout, 3, seed).unwrap();
            let hmin = h_min(&rho, &["A"], &["B"]).unwrap();
            let hvn = h_vn(&rho, &["A"], &["B"]).unwrap();
            let hmax = h_max(&rho, &["A"], &["B"]).unwrap();
            let tol = hmin.tol() + hmax.tol() + 1e-9;
            assert!(hmin.expect_bits() <= hvn.expect_bits() + tol);
            assert!(hvn.expect_bits() <= hmax.expect_bits() + tol);
            // dimension bounds
            let d_bound = 1.0; // log2 min(rank A, rank B) <= log2 2
            assert!(hmin.expect_bits() >= -d_bound - tol);
            assert!(hmax.expect_bits() <= d_bound + tol);
            // plug-in bounds
            let hhat_min = hat_h_min(&rho, &["A"], &["B"]).unwrap();
            let hhat_max = hat_h_max(&rho, &["A"], &["B"]).unwrap();
            assert!(hhat_min.expect_bits() <= hmin.expect_bits() + tol);
            assert!(hhat_max.expect_bits() >= hmax.expect_bits() - tol);
        }
    }

    #[test]
    fn min_entropy_continuity() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        for seed in 0..8u64 {
            let rho = random_state(&layout, 3, seed).unwrap();
            let tau = random_state(&layout, 3, 1000 + seed).unwrap();
            // mix slightly toward tau
            let eps = 1e-3;
            let mixed = MultipartiteState::new(
                rho.matrix().scale_re(1.0 - eps).add(&tau.matrix().scale_re(eps)),
                layout.clone(),
            )
            .unwrap();
            let d = crate::metrics::trace_distance(&rho, &mixed).unwrap().value;
            let h1 = h_min(&rho, &["A"], &["B"]).unwrap();
            let h2 = h_min(&mixed, &["A"], &["B"]).unwrap();
            let bound = d * 2.0 * 2.0 / (2.0f64.ln() * 1.0) + h1.tol() + h2.tol();
            assert!((h1.expect_bits() - h2.expect_bits()).abs() <= bound + 1e-9);
        }
    }

    #[test]
    fn min_entropy_tensor_additivity() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2)]).unwrap();
        let rho = random_state(&layout, 2, 17).unwrap();
        let renamed = MultipartiteState::new(
            rho.matrix().clone(),
            SystemLayout::new(&[("A2", 2), ("B2", 2)]).unwrap(),
        )
        .unwrap();
        let prod = state_tensor(&rho, &renamed).unwrap();
        let single = h_min(&rho, &["A"], &["B"]).unwrap();
        let double = h_min(&prod, &["A", "A2"], &["B", "B2"]).unwrap();
        assert!(
            (double.expect_bits() - 2.0 * single.expect_bits()).abs()
                <= 2.0 * single.tol() + double.tol() + 1e-7
        );
    }

    #[test]
    fn duality_min_max_pure_tripartite() {
        let layout = SystemLayout::new(&[("A", 2), ("B", 2), ("C", 2)]).unwrap();
        for seed in 0..6u64 {
            let rho = random_state(&layout, 1, seed).unwrap();
            let hmin = h_min(&rho, &["A"], &["B"]).unwrap();
            let hmax = h_max(&rho, &["A"], &["C"]).unwrap();
            let tol = hmin.tol() + hmax.tol() + 2e-6;
            assert!(
                (hmin.expect_bits() + hmax.expect_bits()).abs() <= tol,
                "seed {seed}: {hmin:?} {hmax:?}"
            );
        }
    }

    #[test]
    fn mixture_decomposition_gamma_and_product() {
        // uniform mixture of gamma and pi (x) pi on a classical flag K
        let gamma = bell();
        let pi2 = maximally_mixed(2);
        let pi_b = MultipartiteState::new(pi2.matrix().clone(), SystemLayout::single("A'", 2)).unwrap();
        let prod = state_tensor(&pi2, &pi_b).unwrap();
        let mut m = ComplexMatrix::zeros(8, 8);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = gamma.matrix()[(i, j)] * 0.5;
                m[(4 + i, 4 + j)] = prod.matrix()[(i, j)] * 0.5;
            }
        }
        let layout = SystemLayout::new(&[("K", 2), ("A", 2), ("A'", 2)]).unwrap();
        let rho = MultipartiteState::new(m, layout).unwrap();
        let mix = mixture_decomposition_check(&rho, "K", &["A"], &["A'"]).unwrap();
        let expect = -(1.25f64.log2());
        assert!((mix.rhs_min.expect_bits() - expect).abs() < 1e-6);
        assert!(
            (mix.lhs_min.expect_bits() - mix.rhs_min.expect_bits()).abs()
                <= mix.lhs_min.tol() + mix.rhs_min.tol() + 1e-6
        );
        assert!(
            (mix.lhs_max.expect_bits() - mix.rhs_max.expect_bits()).abs()
                <= mix.lhs_max.tol() + mix.rhs_max.tol() + 1e-6
        );
    }
}

