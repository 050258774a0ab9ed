//! Epsilon-smoothed entropies: the smooth min-entropy SDP on a canonical
//! purification, smooth max-entropy by duality, smooth relative
//! min-entropy by bisection, the explicit truncation smoothing
//! construction, chain rules and classical-register bounds.
//!
//! Smoothing balls use the purified distance. Inputs to the smooth
//! entropies must be normalized: the SDP linearizes the fidelity with a
//! normalized anchor; normalization-then-smoothing is the caller's
//! responsibility.

use num_complex::Complex64;

use crate::entropy::{conditional_marginal, h_max, h_min, purify_keep_trace, EntropyValue};
use crate::error::{Error, Result};
use crate::metrics::purified_distance;
use crate::operators::{
    apply_channel, ComplexMatrix, HermitianOp, MultipartiteState, SystemLayout,
};
use crate::sdp::{solve_blocks_robust, BlockProblem, FeasibleStart, LinMap, SdpStatus, SolveOptions};

/// Smoothing parameter in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothParam {
    pub epsilon: f64,
}

impl SmoothParam {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Argument(format!("smoothing parameter {epsilon} outside [0, 1)")));
        }
        Ok(Self { epsilon })
    }
}

/// An optimizer from a smoothing ball, with its recomputed distance to the
/// original state.
#[derive(Debug, Clone)]
pub struct SmoothedState {
    pub state: MultipartiteState,
    pub distance_to_original: f64,
}

/// Below this epsilon the ball is numerically a point and smoothing
/// dispatches to the non-smooth entropy.
const EPS_FLOOR: f64 = 1e-7;

/// Materializes an approximate SDP optimizer as a state: eigenvalues are
/// clipped at zero and any feasibility-tolerance trace overshoot above 1
/// is scaled away.
fn state_from_solver(op: &HermitianOp, layout: SystemLayout) -> Result<MultipartiteState> {
    let clipped = op.positive_part();
    let tr = clipped.trace();
    let fixed = if tr > 1.0 { clipped.scale((1.0 - 1e-13) / tr) } else { clipped };
    MultipartiteState::new(fixed.into_matrix(), layout)
}

fn is_diagonal(rho: &MultipartiteState) -> bool {
    let n = rho.dim();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += rho.matrix()[(i, j)].norm_sqr();
            }
        }
    }
    off.sqrt() <= 1e-9 * rho.matrix().frob_norm()
}

fn require_normalized(rho: &MultipartiteState) -> Result<()> {
    if !rho.is_normalized() {
        return Err(Error::Argument(format!(
            "smooth entropies need a normalized state (trace {})",
            rho.trace()
        )));
    }
    Ok(())
}

/// Smooth min-entropy SDP on a pure normalized state psi with systems
/// split as [a | b | rest]; `rest` is traced out of the smoothed variable
/// inside the operator constraint. Returns the entropy and the full-space
/// optimizer.
fn smooth_min_on_pure(
    psi: &MultipartiteState,
    a: &[&str],
    b: &[&str],
    eps: f64,
) -> Result<(EntropyValue, MultipartiteState)> {
    let all: Vec<&str> = psi.layout().labels();
    let mut order: Vec<&str> = a.to_vec();
    order.extend_from_slice(b);
    for l in &all {
        if !order.contains(l) {
            order.push(l);
        }
    }
    let pure = psi.reorder(&order)?;
    let da = pure.layout().dim_of_all(a)?;
    let db = pure.layout().dim_of_all(b)?;
    let dab = da * db;
    let dfull = pure.dim();
    let dc = dfull / dab;

    let mut bp = BlockProblem::new();
    let sigma = bp.primal_block(db, HermitianOp::identity(db));
    let rt = bp.primal_block(dfull, HermitianOp::zeros(dfull));
    let cons = bp.dual_block(dab, HermitianOp::zeros(dab));
    bp.term(cons, sigma, LinMap::TensorLeftId { d_left: da, s: 1.0 });
    bp.term(cons, rt, LinMap::TraceOutRight { d_right: dc, s: -1.0 });
    let tr_row = bp.dual_scalar(-1.0);
    bp.term(tr_row, rt, LinMap::InnerProduct { f: HermitianOp::identity(dfull), s: -1.0 });
    let fid_row = bp.dual_scalar(1.0 - eps * eps);
    bp.term(fid_row, rt, LinMap::InnerProduct { f: pure.op().clone(), s: 1.0 });

    // strictly feasible start
    let margin = eps * eps / 4.0;
    let rt0 = pure
        .op()
        .scale(1.0 - eps * eps / 2.0)
        .add(&HermitianOp::identity(dfull).scale(margin / dfull as f64));
    let marg0 = LinMap::TraceOutRight { d_right: dc, s: 1.0 }.apply(rt0.matrix());
    let sig0 = HermitianOp::identity(db)
        .scale(HermitianOp::from_symmetrized(marg0).op_norm() + 1.0);
    let start = FeasibleStart {
        x: vec![sig0, rt0],
        y: vec![
            HermitianOp::identity(dab).scale(1.0 / (2.0 * da as f64)),
            HermitianOp::diag(&[1.0]),
            HermitianOp::diag(&[0.5]),
        ],
    };
    let sol = solve_blocks_robust(&bp, Some(start), &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!("smooth min SDP: {:?}, gap {:.2e}", sol.status, sol.gap)));
    }
    let alpha = sol.alpha.max(1e-300);
    let tol = (1.0 + sol.gap / alpha).log2().abs() + 1e-12;
    let optimizer = state_from_solver(&sol.x[1], pure.layout().clone())?;
    Ok((EntropyValue::finite(-alpha.log2(), tol), optimizer))
}

/// Coherent-classical restriction of the smooth min-entropy SDP for a
/// diagonal state with trivial side information. The variable is the
/// purified-space block C on span{|ii>}, whose diagonal is the smoothed
/// distribution; lossless by classical smoothing plus Uhlmann.
fn smooth_min_classical_sdp(probs: &[f64], eps: f64) -> Result<(EntropyValue, Vec<f64>)> {
    let d = probs.len();
    let mut bp = BlockProblem::new();
    let c = bp.primal_block(d, HermitianOp::zeros(d));
    let t = bp.primal_block(1, HermitianOp::identity(1));
    for i in 0..d {
        let row = bp.dual_scalar(0.0);
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = Complex64::new(-1.0, 0.0);
        bp.term(row, c, LinMap::InnerProduct { f: HermitianOp::from_symmetrized(e), s: 1.0 });
        bp.term(row, t, LinMap::ScalarTimes { g: HermitianOp::identity(1), s: 1.0 });
    }
    let tr_row = bp.dual_scalar(-1.0);
    bp.term(tr_row, c, LinMap::InnerProduct { f: HermitianOp::identity(d), s: -1.0 });
    let fid_row = bp.dual_scalar(1.0 - eps * eps);
    let sq: Vec<f64> = probs.iter().map(|p| p.max(0.0).sqrt()).collect();
    let g = ComplexMatrix::from_fn(d, d, |i, j| Complex64::new(sq[i] * sq[j], 0.0));
    let g = HermitianOp::from_symmetrized(g);
    bp.term(fid_row, c, LinMap::InnerProduct { f: g.clone(), s: 1.0 });

    let margin = eps * eps / 4.0;
    let c0 = g.scale(1.0 - eps * eps / 2.0).add(&HermitianOp::identity(d).scale(margin / d as f64));
    let t0 = c0.op_norm() + 1.0;
    let delta = 0.5 / d as f64;
    let start = FeasibleStart {
        x: vec![c0, HermitianOp::diag(&[t0])],
        y: {
            let mut ys: Vec<HermitianOp> = (0..d).map(|_| HermitianOp::diag(&[delta])).collect();
            ys.push(HermitianOp::diag(&[1.0]));
            ys.push(HermitianOp::diag(&[delta]));
            ys
        },
    };
    let sol = solve_blocks_robust(&bp, Some(start), &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!(
            "classical smooth min SDP: {:?}, gap {:.2e}",
            sol.status, sol.gap
        )));
    }
    let alpha = sol.alpha.max(1e-300);
    let tol = (1.0 + sol.gap / alpha).log2().abs() + 1e-12;
    let mut q: Vec<f64> = (0..d).map(|i| sol.x[0].matrix()[(i, i)].re.max(0.0)).collect();
    let total: f64 = q.iter().sum();
    if total > 1.0 {
        for v in &mut q {
            *v *= (1.0 - 1e-13) / total;
        }
    }
    Ok((EntropyValue::finite(-alpha.log2(), tol), q))
}

/// Smooth min-entropy with its optimizing smoothed state.
pub fn smooth_h_min(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
    eps: SmoothParam,
) -> Result<(EntropyValue, SmoothedState)> {
    let (marg, _, _) = conditional_marginal(rho, a, b)?;
    require_normalized(&marg)?;
    if eps.epsilon <= EPS_FLOOR {
        let h = h_min(&marg, a, b)?;
        return Ok((h, SmoothedState { state: marg, distance_to_original: 0.0 }));
    }
    if b.is_empty() && is_diagonal(&marg) {
        let probs: Vec<f64> = (0..marg.dim()).map(|i| marg.matrix()[(i, i)].re.max(0.0)).collect();
        let (h, q) = smooth_min_classical_sdp(&probs, eps.epsilon)?;
        let state = MultipartiteState::new(ComplexMatrix::diag(&q), marg.layout().clone())?;
        let dist = purified_distance(&state, &marg)?.value;
        return Ok((h, SmoothedState { state, distance_to_original: dist }));
    }
    let pure = purify_keep_trace(&marg)?;
    let (h, optimizer) = smooth_min_on_pure(&pure, a, b, eps.epsilon)?;
    let keep: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let state = optimizer.partial_trace(&keep)?;
    let dist = purified_distance(&state, &marg)?.value;
    Ok((h, SmoothedState { state, distance_to_original: dist }))
}

/// Smooth max-entropy by duality on the canonical purification:
/// H_max^e(A|B) = -H_min^e(A|P). The returned smoothed state is the
/// min-entropy optimizer traced down to AB.
pub fn smooth_h_max(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
    eps: SmoothParam,
) -> Result<(EntropyValue, SmoothedState)> {
    let (marg, _, _) = conditional_marginal(rho, a, b)?;
    require_normalized(&marg)?;
    if eps.epsilon <= EPS_FLOOR {
        let h = h_max(&marg, a, b)?;
        return Ok((h, SmoothedState { state: marg, distance_to_original: 0.0 }));
    }
    if b.is_empty() && is_diagonal(&marg) && marg.dim() > 8 {
        let probs: Vec<f64> = (0..marg.dim()).map(|i| marg.matrix()[(i, i)].re.max(0.0)).collect();
        let groups: Vec<(f64, f64)> = probs.iter().map(|&p| (p, 1.0)).collect();
        let (bits, q) = smooth_h_max_classical_groups(&groups, eps.epsilon)?;
        let state = MultipartiteState::new(ComplexMatrix::diag(&q), marg.layout().clone())?;
        let dist = purified_distance(&state, &marg)?.value;
        return Ok((
            EntropyValue::finite(bits, 1e-9),
            SmoothedState { state, distance_to_original: dist },
        ));
    }
    let pure = purify_keep_trace(&marg)?;
    let (h, optimizer) = smooth_min_on_pure(&pure, a, &["P"], eps.epsilon)?;
    let keep: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let state = optimizer.partial_trace(&keep)?;
    let dist = purified_distance(&state, &marg)?.value;
    let flipped = match h {
        EntropyValue::Finite { bits, tol } => EntropyValue::finite(-bits, tol),
        EntropyValue::NegInf => EntropyValue::PosInf,
        EntropyValue::PosInf => EntropyValue::NegInf,
    };
    Ok((flipped, SmoothedState { state, distance_to_original: dist }))
}

/// Maximum overlap with the anchor purification subject to the
/// 2^-lambda sigma cap: feasible iff the result reaches 1 - eps^2.
fn relative_feasibility(
    psi: &MultipartiteState,
    sigma: &HermitianOp,
    d_sys: usize,
    lambda: f64,
) -> Result<f64> {
    let dp = psi.dim() / d_sys;
    let cap = sigma.scale(2.0f64.powf(-lambda));
    let mut bp = BlockProblem::new();
    let rt = bp.primal_block(psi.dim(), psi.op().scale(-1.0));
    let d1 = bp.dual_block(d_sys, cap.scale(-1.0));
    bp.term(d1, rt, LinMap::TraceOutRight { d_right: dp, s: -1.0 });
    let tr_row = bp.dual_scalar(-1.0);
    bp.term(tr_row, rt, LinMap::InnerProduct { f: HermitianOp::identity(psi.dim()), s: -1.0 });
    // start: small multiple of the identity inside the cap
    let lam_min = cap
        .eigh()
        .0
        .into_iter()
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let t = (lam_min / (2.0 * dp as f64)).min(0.5 / psi.dim() as f64);
    // the cap may be rank deficient only outside supp(sigma); callers
    // compress onto supp(sigma) first so lam_min is positive here
    if !(t > 0.0) {
        return Err(Error::Sdp("degenerate cap in relative feasibility".into()));
    }
    let start = FeasibleStart {
        x: vec![HermitianOp::identity(psi.dim()).scale(t)],
        y: vec![HermitianOp::identity(d_sys).scale(0.1), HermitianOp::diag(&[1.0])],
    };
    let sol = solve_blocks_robust(&bp, Some(start), &SolveOptions::default())?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!("feasibility SDP: {:?}", sol.status)));
    }
    Ok(-sol.alpha)
}

/// Smooth relative min-entropy S_min^e(rho || sigma) by bisection over
/// lambda with a per-lambda feasibility SDP on the purified space.
/// Requires a normalized rho; the bisection width (1e-4 bits) lands in the
/// reported tolerance.
pub fn smooth_relative_min(
    rho: &MultipartiteState,
    sigma: &HermitianOp,
    eps: SmoothParam,
) -> Result<EntropyValue> {
    require_normalized(rho)?;
    if sigma.dim() != rho.dim() {
        return Err(Error::DimMismatch("rho vs sigma".into()));
    }
    let base = crate::entropy::relative_min(rho.op(), sigma)?;
    let base_bits = match base {
        EntropyValue::Finite { bits, .. } => bits,
        other => return Ok(other),
    };
    if eps.epsilon <= EPS_FLOOR {
        return Ok(base);
    }
    // compress onto supp(sigma); supp(rho) is inside it when S_min is finite
    let (evals, vecs) = sigma.eigh();
    let tol = crate::operators::rank_tolerance(evals.first().copied().unwrap_or(0.0).abs());
    let rank = evals.iter().filter(|l| **l > tol).count();
    let iso = ComplexMatrix::from_fn(sigma.dim(), rank, |i, k| vecs[(i, k)]);
    let sigma_c = HermitianOp::from_symmetrized(iso.adjoint().mul(sigma.matrix()).mul(&iso));
    let rho_c = MultipartiteState::new(
        iso.adjoint().mul(rho.matrix()).mul(&iso),
        SystemLayout::single("S", rank),
    )?;
    let psi = purify_keep_trace(&rho_c)?;
    let target = 1.0 - eps.epsilon * eps.epsilon;
    let mut lo = base_bits;
    let mut hi = (sigma.trace().max(1e-300)).log2() - target.log2() + 1e-3;
    if hi < lo {
        hi = lo + 1.0;
    }
    // widen on demand, though the trace bound already caps the optimum
    for _ in 0..8 {
        if relative_feasibility(&psi, &sigma_c, rank, hi)? < target - 1e-7 {
            break;
        }
        hi += 16.0;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if relative_feasibility(&psi, &sigma_c, rank, mid)? >= target - 1e-7 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EntropyValue::finite(lo, (hi - lo).max(1e-4)))
}

/// Explicit smoothing by truncation: Delta = {rho - 2^-lambda sigma}_+,
/// G = L^(1/2) (L + Delta)^(-1/2) with L = 2^-lambda sigma, and
/// rho~ = G rho G^dag. Returns the smoothed state and the achieved
/// eps = sqrt(2 tr Delta - (tr Delta)^2), with S_min(rho~||sigma) >= lambda.
pub fn lemma61_smooth(
    rho: &MultipartiteState,
    sigma: &HermitianOp,
    lambda: f64,
) -> Result<(SmoothedState, f64)> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimMismatch("rho vs sigma".into()));
    }
    let pi = sigma.support_projector();
    let compl = HermitianOp::identity(sigma.dim()).sub(&pi);
    let leak = rho.op().conjugate_by(compl.matrix()).op_norm();
    if leak > crate::operators::rank_tolerance(rho.op().op_norm()) {
        return Err(Error::Support);
    }
    let cap = sigma.scale(2.0f64.powf(-lambda));
    let delta = rho.op().sub(&cap).positive_part();
    let tr_delta = delta.trace().clamp(0.0, 1.0);
    let eps = (2.0 * tr_delta - tr_delta * tr_delta).max(0.0).sqrt();
    let g = cap.sqrt().matrix().mul(
        cap.add(&delta)
            .apply_fn(|l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 })?
            .matrix(),
    );
    let smoothed = rho.op().conjugate_by(&g);
    let state = MultipartiteState::new(smoothed.into_matrix(), rho.layout().clone())?;
    let dist = purified_distance(&state, rho)?.value;
    Ok((SmoothedState { state, distance_to_original: dist }, eps))
}

/// One chain-rule inequality: when `lower` is set the relation is
/// lhs >= rhs, otherwise lhs <= rhs.
#[derive(Debug, Clone)]
pub struct ChainRulePair {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub lower: bool,
    pub tol: f64,
}

impl ChainRulePair {
    /// Signed slack, non-negative (up to tolerance) when the rule holds.
    pub fn slack(&self) -> f64 {
        if self.lower {
            self.lhs - self.rhs
        } else {
            self.rhs - self.lhs
        }
    }
}

/// Evaluates both sides of the six chain rules for the tripartite split
/// (a, b, c) at smoothing parameters (eps, eps', eps'').
pub fn chain_rule_eval(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    eps: f64,
    eps1: f64,
    eps2: f64,
) -> Result<Vec<ChainRulePair>> {
    if eps <= 0.0 {
        return Err(Error::Argument("chain rules need eps > 0".into()));
    }
    for comp in [
        eps + 2.0 * eps1 + eps2,
        eps + eps1 + 2.0 * eps2,
        eps + 3.0 * eps1 + 2.0 * eps2,
        2.0 * eps + eps1 + 2.0 * eps2,
    ] {
        if comp >= 1.0 {
            return Err(Error::Argument(format!("composite smoothing {comp} >= 1")));
        }
    }
    let ab: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
    let log_term = (2.0 / (eps * eps)).log2();

    let mut memo: std::collections::HashMap<String, (f64, f64)> = Default::default();
    let mut entry = |kind: &str, x: &[&str], y: &[&str], e: f64| -> Result<(f64, f64)> {
        let key = format!("{kind}|{}|{}|{:.12e}", x.join(","), y.join(","), e);
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
        let (val, _) = match kind {
            "min" => smooth_h_min(rho, x, y, SmoothParam::new(e)?)?,
            _ => smooth_h_max(rho, x, y, SmoothParam::new(e)?)?,
        };
        let out = (val.bits()?, val.tol());
        memo.insert(key, out);
        Ok(out)
    };

    let mut rules = Vec::with_capacity(6);
    {
        let (l, lt) = entry("min", &ab, c, eps + 2.0 * eps1 + eps2)?;
        let (r1, t1) = entry("min", a, &bc, eps1)?;
        let (r2, t2) = entry("min", b, c, eps2)?;
        rules.push(ChainRulePair {
            name: "min(AB|C) >= min(A|BC) + min(B|C) - log(2/e^2)",
            lhs: l,
            rhs: r1 + r2 - log_term,
            lower: true,
            tol: lt + t1 + t2,
        });
    }
    {
        let (l, lt) = entry("max", &ab, c, eps + eps1 + 2.0 * eps2)?;
        let (r1, t1) = entry("max", a, &bc, eps1)?;
        let (r2, t2) = entry("max", b, c, eps2)?;
        rules.push(ChainRulePair {
            name: "max(AB|C) <= max(A|BC) + max(B|C) + log(2/e^2)",
            lhs: l,
            rhs: r1 + r2 + log_term,
            lower: false,
            tol: lt + t1 + t2,
        });
    }
    {
        let (l, lt) = entry("min", a, &bc, eps + 3.0 * eps1 + 2.0 * eps2)?;
        let (r1, t1) = entry("min", &ab, c, eps1)?;
        let (r2, t2) = entry("max", b, c, eps2)?;
        rules.push(ChainRulePair {
            name: "min(A|BC) >= min(AB|C) - max(B|C) - 2 log(2/e^2)",
            lhs: l,
            rhs: r1 - r2 - 2.0 * log_term,
            lower: true,
            tol: lt + t1 + t2,
        });
    }
    {
        let (l, lt) = entry("max", a, &bc, 2.0 * eps + eps1 + 2.0 * eps2)?;
        let (r1, t1) = entry("max", &ab, c, eps1)?;
        let (r2, t2) = entry("min", b, c, eps2)?;
        rules.push(ChainRulePair {
            name: "max(A|BC) <= max(AB|C) - min(B|C) + 3 log(2/e^2)",
            lhs: l,
            rhs: r1 - r2 + 3.0 * log_term,
            lower: false,
            tol: lt + t1 + t2,
        });
    }
    {
        let (l, lt) = entry("min", b, c, 2.0 * eps + eps1 + 2.0 * eps2)?;
        let (r1, t1) = entry("min", &ab, c, eps1)?;
        let (r2, t2) = entry("max", a, &bc, eps2)?;
        rules.push(ChainRulePair {
            name: "min(B|C) >= min(AB|C) - max(A|BC) - 3 log(2/e^2)",
            lhs: l,
            rhs: r1 - r2 - 3.0 * log_term,
            lower: true,
            tol: lt + t1 + t2,
        });
    }
    {
        let (l, lt) = entry("max", b, c, eps + 3.0 * eps1 + 2.0 * eps2)?;
        let (r1, t1) = entry("max", &ab, c, eps1)?;
        let (r2, t2) = entry("min", a, &bc, eps2)?;
        rules.push(ChainRulePair {
            name: "max(B|C) <= max(AB|C) - min(A|BC) + 2 log(2/e^2)",
            lhs: l,
            rhs: r1 - r2 + 2.0 * log_term,
            lower: false,
            tol: lt + t1 + t2,
        });
    }
    Ok(rules)
}

/// Entropies before and after a channel on one conditioning subsystem;
/// the min-entropy side allows trace non-increasing channels, the
/// max-entropy side is evaluated only for trace-preserving ones.
pub struct DataProcessing {
    pub min_before: f64,
    pub min_after: f64,
    pub max_pair: Option<(f64, f64)>,
    pub tol: f64,
}

pub fn data_processing_check(
    rho: &MultipartiteState,
    a: &[&str],
    b: &[&str],
    kraus: &[ComplexMatrix],
    on: &str,
    out_dim: usize,
    eps: SmoothParam,
) -> Result<DataProcessing> {
    let mapped = apply_channel(rho, kraus, on, out_dim)?;
    let (min_before, s1) = smooth_h_min(rho, a, b, eps)?;
    let (min_after, s2) = smooth_h_min(&mapped, a, b, eps)?;
    let _ = (s1, s2);
    let d_in = rho.layout().dim_of(on)?;
    let mut ksum = ComplexMatrix::zeros(d_in, d_in);
    for e in kraus {
        ksum = ksum.add(&e.adjoint().mul(e));
    }
    let tp = ksum.sub(&ComplexMatrix::identity(d_in)).max_abs() <= 1e-9;
    let max_pair = if tp && mapped.is_normalized() {
        let (mb, _) = smooth_h_max(rho, a, b, eps)?;
        let (ma, _) = smooth_h_max(&mapped, a, b, eps)?;
        Some((mb.bits()?, ma.bits()?))
    } else {
        None
    };
    Ok(DataProcessing {
        min_before: min_before.bits()?,
        min_after: min_after.bits()?,
        max_pair,
        tol: min_before.tol() + min_after.tol(),
    })
}

/// One inequality of the classical-register bound suites.
#[derive(Debug, Clone)]
pub struct BoundPair {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// expected relation lhs <= rhs
    pub tol: f64,
}

/// Evaluates both sides of the classical-register bounds: adding or
/// removing a classical register X on the A side shifts the smooth
/// entropies by at most log d_X, conditioning on a classical register
/// costs at most log d_X, and functions of a classical register only
/// lower the entropies.
pub fn classical_register_bounds_check(
    rho: &MultipartiteState,
    x: &str,
    a: &[&str],
    b: &[&str],
    f: &[usize],
    eps: SmoothParam,
) -> Result<Vec<BoundPair>> {
    crate::entropy::require_classical(rho, x)?;
    let dx = rho.layout().dim_of(x)? as f64;
    let log_dx = dx.log2();
    let xa: Vec<&str> = std::iter::once(x).chain(a.iter().copied()).collect();
    let bx: Vec<&str> = b.iter().copied().chain(std::iter::once(x)).collect();
    let mut out = Vec::new();

    let (min_ab, _) = smooth_h_min(rho, a, b, eps)?;
    let (min_xab, _) = smooth_h_min(rho, &xa, b, eps)?;
    let (max_ab, _) = smooth_h_max(rho, a, b, eps)?;
    let (max_xab, _) = smooth_h_max(rho, &xa, b, eps)?;
    let t = min_ab.tol() + min_xab.tol() + max_ab.tol() + max_xab.tol();
    out.push(BoundPair { name: "min(A|B) <= min(XA|B)", lhs: min_ab.bits()?, rhs: min_xab.bits()?, tol: t });
    out.push(BoundPair {
        name: "min(XA|B) <= min(A|B) + log dX",
        lhs: min_xab.bits()?,
        rhs: min_ab.bits()? + log_dx,
        tol: t,
    });
    out.push(BoundPair { name: "max(A|B) <= max(XA|B)", lhs: max_ab.bits()?, rhs: max_xab.bits()?, tol: t });
    out.push(BoundPair {
        name: "max(XA|B) <= max(A|B) + log dX",
        lhs: max_xab.bits()?,
        rhs: max_ab.bits()? + log_dx,
        tol: t,
    });

    let (min_cond, _) = smooth_h_min(rho, a, &bx, eps)?;
    let (max_cond, _) = smooth_h_max(rho, a, &bx, eps)?;
    let t2 = min_ab.tol() + min_cond.tol() + max_ab.tol() + max_cond.tol();
    out.push(BoundPair {
        name: "min(A|BX) <= min(A|B)",
        lhs: min_cond.bits()?,
        rhs: min_ab.bits()?,
        tol: t2,
    });
    out.push(BoundPair {
        name: "min(A|B) - log dX <= min(A|BX)",
        lhs: min_ab.bits()? - log_dx,
        rhs: min_cond.bits()?,
        tol: t2,
    });
    out.push(BoundPair {
        name: "max(A|BX) <= max(A|B)",
        lhs: max_cond.bits()?,
        rhs: max_ab.bits()?,
        tol: t2,
    });
    out.push(BoundPair {
        name: "max(A|B) - log dX <= max(A|BX)",
        lhs: max_ab.bits()? - log_dx,
        rhs: max_cond.bits()?,
        tol: t2,
    });

    // function on the register: Z = f(X)
    let dz = f.iter().copied().max().unwrap_or(0) + 1;
    let mapped = apply_function_register(rho, x, f, dz)?;
    let za: Vec<&str> = std::iter::once(x).chain(a.iter().copied()).collect();
    let (min_za, _) = smooth_h_min(&mapped, &za, b, eps)?;
    let (max_za, _) = smooth_h_max(&mapped, &za, b, eps)?;
    let t3 = min_za.tol() + min_xab.tol() + max_za.tol() + max_xab.tol();
    out.push(BoundPair {
        name: "min(ZA|B) <= min(XA|B)",
        lhs: min_za.bits()?,
        rhs: min_xab.bits()?,
        tol: t3,
    });
    out.push(BoundPair {
        name: "max(ZA|B) <= max(XA|B)",
        lhs: max_za.bits()?,
        rhs: max_xab.bits()?,
        tol: t3,
    });
    Ok(out)
}

/// Applies a function to a classical register, keeping the label.
fn apply_function_register(
    rho: &MultipartiteState,
    x: &str,
    f: &[usize],
    dz: usize,
) -> Result<MultipartiteState> {
    let dx = rho.layout().dim_of(x)?;
    if f.len() != dx {
        return Err(Error::Argument("function table size mismatch".into()));
    }
    // Kraus operators |f(i)><i| implement the classical map on a classical
    // register (trace preserving on the diagonal algebra)
    let kraus: Vec<ComplexMatrix> = (0..dx)
        .map(|i| {
            let mut e = ComplexMatrix::zeros(dz, dx);
            e[(f[i], i)] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    apply_channel(rho, &kraus, x, dz)
}

/// Classical smooth min-entropy of a grouped distribution
/// [(probability, multiplicity)], by the proportional-with-ceiling
/// optimum: the smoothed weights are q_i = min(kappa p_i, t) with the cap
/// t as small as the fidelity constraint allows. Returns bits.
pub fn smooth_h_min_classical_groups(groups: &[(f64, f64)], eps: f64) -> Result<f64> {
    let c = (1.0 - eps * eps).max(0.0).sqrt();
    let fidelity_at = |t: f64| -> f64 {
        // largest kappa with sum min(kappa p, t) <= 1
        let total_capped: f64 = groups.iter().map(|(_, m)| m * t).sum();
        let kappa = if total_capped <= 1.0 {
            f64::INFINITY
        } else {
            // bisect kappa
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mass = |k: f64| -> f64 { groups.iter().map(|(p, m)| m * (k * p).min(t)).sum() };
            while mass(hi) < 1.0 {
                hi *= 2.0;
                if hi > 1e18 {
                    break;
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mass(mid) <= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        groups.iter().map(|(p, m)| m * (p * (kappa * p).min(t)).sqrt()).sum()
    };
    let p_max = groups.iter().map(|(p, _)| *p).fold(0.0f64, f64::max);
    let (mut lo, mut hi) = (0.0f64, p_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fidelity_at(mid) >= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(-hi.log2())
}

/// Classical smooth max-entropy of a grouped distribution, with the
/// smoothed weights from the stationarity condition
/// q_i = p_i ((mu - p_i^(-1/2))_+ / (2 nu))^2. Returns (bits, weights per
/// group entry expanded only for ungrouped inputs).
pub fn smooth_h_max_classical_groups(groups: &[(f64, f64)], eps: f64) -> Result<(f64, Vec<f64>)> {
    let c = (1.0 - eps * eps).max(0.0).sqrt();
    let p_max = groups.iter().map(|(p, _)| *p).fold(0.0f64, f64::max);
    if c * c <= p_max {
        // concentrating on the most likely outcome satisfies the ball
        let bits = (c * c / p_max).log2();
        let q: Vec<f64> = groups
            .iter()
            .map(|(p, _)| if (*p - p_max).abs() < 1e-300 { c * c / p_max } else { 0.0 })
            .collect();
        return Ok((bits, q));
    }
    // with both constraints active: u_i = (mu - p_i^(-1/2))_+ / (2 nu)
    let eval = |mu: f64| -> (f64, f64) {
        // nu from sum p u^2 = 1, then fidelity = sum p u
        let s2: f64 = groups
            .iter()
            .map(|(p, m)| {
                let w = mu - 1.0 / p.sqrt();
                if w > 0.0 {
                    m * p * w * w
                } else {
                    0.0
                }
            })
            .sum();
        if s2 <= 0.0 {
            return (0.0, 0.0);
        }
        let nu = 0.5 * s2.sqrt();
        let fid: f64 = groups
            .iter()
            .map(|(p, m)| {
                let w = mu - 1.0 / p.sqrt();
                if w > 0.0 {
                    m * p * w / (2.0 * nu)
                } else {
                    0.0
                }
            })
            .sum();
        (fid, nu)
    };
    let mu_min = 1.0 / p_max.sqrt();
    let mut lo = mu_min * (1.0 + 1e-12);
    let mut hi = mu_min * 2.0 + 10.0;
    while eval(hi).0 < c {
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::Argument("classical smoothing failed to bracket".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid).0 >= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = hi;
    let (_, nu) = eval(mu);
    let mut sqrt_sum = 0.0f64;
    let mut q = Vec::with_capacity(groups.len());
    for (p, m) in groups {
        let w = mu - 1.0 / p.sqrt();
        let u = if w > 0.0 { w / (2.0 * nu) } else { 0.0 };
        let qi = p * u * u;
        q.push(qi);
        sqrt_sum += m * qi.sqrt();
    }
    Ok((2.0 * sqrt_sum.log2(), q))
}

/// Grouped probabilities of n i.i.d. binary trials with success
/// probability p: [(p^k (1-p)^(n-k), C(n, k))].
pub fn iid_binary_groups(p: f64, n: u32) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let mut log_c = 0.0f64;
        for i in 0..k {
            log_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        let prob = p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        out.push((prob, log_c.exp().round()));
    }
    out
}
