//! Closed-form finite-blocklength bound formulas and inequality
//! evaluators: AEP constants, uncertainty-relation overlaps and residuals,
//! and the compression / extraction / key-length arithmetic.

use crate::entropy::{h_vn, relative_renyi, EntropyValue};
use crate::error::{Error, Result};
use crate::operators::{
    ComplexMatrix, HermitianOp, MultipartiteState, Povm, ProjectiveMeasurement, SystemLayout,
};
use crate::smooth::{smooth_h_max, smooth_h_min, SmoothParam};

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// g(eps) = -log2(1 - sqrt(1 - eps^2)) for eps in (0, 1].
pub fn g_of_eps(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Argument(format!("g(eps) needs eps in (0, 1], got {eps}")));
    }
    Ok(-(1.0 - (1.0 - eps * eps).sqrt()).log2())
}

/// AEP convergence correction delta(eps, v) = 4 log2(v) sqrt(g(eps)).
pub fn aep_delta(eps: f64, v: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Argument(format!("delta needs eps in (0, 1), got {eps}")));
    }
    if v <= 1.0 {
        return Err(Error::Argument(format!("delta needs v > 1, got {v}")));
    }
    Ok(4.0 * v.log2() * g_of_eps(eps)?.sqrt())
}

/// Entropy convergence parameter
/// Upsilon = 2^(-S_{3/2}/2) + 2^(S_{1/2}/2) + 1; +infinity on support
/// failure.
pub fn upsilon(rho: &HermitianOp, sigma: &HermitianOp) -> Result<f64> {
    let s32 = relative_renyi(1.5, rho, sigma)?;
    let s12 = relative_renyi(0.5, rho, sigma)?;
    match (s32, s12) {
        (EntropyValue::Finite { bits: a, .. }, EntropyValue::Finite { bits: b, .. }) => {
            Ok(2.0f64.powf(-a / 2.0) + 2.0f64.powf(b / 2.0) + 1.0)
        }
        _ => Ok(f64::INFINITY),
    }
}

/// Parameter point for the finite-blocklength AEP bounds.
#[derive(Debug, Clone, Copy)]
pub struct AepParams {
    pub n: u64,
    pub eps: f64,
    /// per-copy conditional von Neumann entropy, bits
    pub h: f64,
    /// convergence parameter Upsilon
    pub v: f64,
}

impl AepParams {
    pub fn new(n: u64, eps: f64, h: f64, v: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("n must be at least 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Argument(format!("eps {eps} outside (0, 1)")));
        }
        if v < 3.0 {
            return Err(Error::Argument(format!("convergence parameter {v} below 3")));
        }
        Ok(Self { n, eps, h, v })
    }
}

/// Validity threshold n >= (8/5) g(eps) of the direct AEP bound.
pub fn aep_validity_threshold(eps: f64) -> Result<u64> {
    Ok((1.6 * g_of_eps(eps)?).ceil() as u64)
}

/// Direct AEP sandwich: per-copy bounds
/// (h - delta/sqrt(n), h + delta/sqrt(n)) on (1/n) H_min^e and
/// (1/n) H_max^e. Errors below the validity threshold.
pub fn aep_direct(p: &AepParams) -> Result<(f64, f64)> {
    let threshold = aep_validity_threshold(p.eps)?;
    if p.n < threshold {
        return Err(Error::Validity { threshold, n: p.n });
    }
    let d = aep_delta(p.eps, p.v)? / (p.n as f64).sqrt();
    Ok((p.h - d, p.h + d))
}

/// Converse AEP: per-copy upper bound on (1/n) H_min^e and the dual lower
/// bound on (1/n) H_max^e, using a second smoothing parameter eps'.
pub fn aep_converse(p: &AepParams, eps2: f64) -> Result<(f64, f64)> {
    if p.eps + eps2 >= 1.0 {
        return Err(Error::Argument(format!("eps + eps' = {} not below 1", p.eps + eps2)));
    }
    let threshold = aep_validity_threshold(eps2)?;
    if p.n < threshold {
        return Err(Error::Validity { threshold, n: p.n });
    }
    let n = p.n as f64;
    let corr = (1.0 / (1.0 - (p.eps + eps2).powi(2))).log2() / n;
    let d = aep_delta(eps2, p.v)? / n.sqrt();
    Ok((p.h + corr + d, p.h - corr - d))
}

/// Overlap c(X, Y) = max_{x,y} |sqrt(M_x) sqrt(N_y)|_inf^2.
pub fn overlap(x: &Povm, y: &Povm) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch("POVM dims differ".into()));
    }
    let xs = x.sqrt_elements();
    let ys = y.sqrt_elements();
    let mut c = 0.0f64;
    for m in &xs {
        for n in &ys {
            let s = m.matrix().mul(n.matrix()).singular_values();
            let top = s.first().copied().unwrap_or(0.0);
            c = c.max(top * top);
        }
    }
    Ok(c)
}

/// Measurement setup {rho_A, X, Y} with an optional commuting projective
/// coarse-graining.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    pub rho_a: MultipartiteState,
    pub x: Povm,
    pub y: Povm,
    pub k: Option<ProjectiveMeasurement>,
}

impl MeasurementSetup {
    pub fn new(
        rho_a: MultipartiteState,
        x: Povm,
        y: Povm,
        k: Option<ProjectiveMeasurement>,
    ) -> Result<Self> {
        if x.dim() != rho_a.dim() || y.dim() != rho_a.dim() {
            return Err(Error::DimMismatch("setup dims differ".into()));
        }
        if let Some(k) = &k {
            let dev = k.commutation_deviation(&x).max(k.commutation_deviation(&y));
            if dev > 1e-9 {
                return Err(Error::Commutation(dev));
            }
        }
        Ok(Self { rho_a, x, y, k })
    }
}

/// Effective overlap of one fixed coarse-graining, in the form
/// sum_k tr(P^k rho) max_x |P^k sum_y N_y M_x N_y|_inf.
pub fn effective_overlap_fixed(
    rho_a: &MultipartiteState,
    x: &Povm,
    y: &Povm,
    k: &ProjectiveMeasurement,
) -> Result<f64> {
    let dev = k.commutation_deviation(x).max(k.commutation_deviation(y));
    if dev > 1e-9 {
        return Err(Error::Commutation(dev));
    }
    let mut total = 0.0;
    for p in k.elements() {
        let weight = p.inner(rho_a.op());
        if weight <= 1e-15 {
            continue;
        }
        let mut worst = 0.0f64;
        for m in x.elements() {
            let mut s = ComplexMatrix::zeros(x.dim(), x.dim());
            for n in y.elements() {
                s = s.add(&n.matrix().mul(m.matrix()).mul(n.matrix()));
            }
            let pm = p.matrix().mul(&s);
            let top = pm.singular_values().first().copied().unwrap_or(0.0);
            worst = worst.max(top);
        }
        total += weight * worst;
    }
    Ok(total)
}

/// Sandwiched effective overlap of one coarse-graining,
/// sum_k tr(P^k rho) max_x |sum_y P^k N_y P^k M_x P^k N_y P^k|_inf; for
/// commuting coarse-grainings this equals `effective_overlap_fixed`.
pub fn effective_overlap_sandwiched(
    rho_a: &MultipartiteState,
    x: &Povm,
    y: &Povm,
    k: &ProjectiveMeasurement,
) -> Result<f64> {
    let mut total = 0.0;
    for p in k.elements() {
        let weight = p.inner(rho_a.op());
        if weight <= 1e-15 {
            continue;
        }
        let mut worst = 0.0f64;
        for m in x.elements() {
            let mut s = ComplexMatrix::zeros(x.dim(), x.dim());
            for n in y.elements() {
                let pn = p.matrix().mul(n.matrix()).mul(p.matrix());
                s = s.add(&pn.mul(m.matrix()).mul(&pn));
            }
            let top = HermitianOp::from_symmetrized(s).op_norm();
            worst = worst.max(top);
        }
        total += weight * worst;
    }
    Ok(total)
}

/// K-overlap of one coarse-graining, max_{k,x,y} |sqrt(M) P^k sqrt(N)|_inf
/// (unsquared, as used by the coarse-grained uncertainty relation).
pub fn k_overlap(x: &Povm, y: &Povm, k: &ProjectiveMeasurement) -> f64 {
    let xs = x.sqrt_elements();
    let ys = y.sqrt_elements();
    let mut c = 0.0f64;
    for p in k.elements() {
        for m in &xs {
            for n in &ys {
                let s = m.matrix().mul(p.matrix()).mul(n.matrix()).singular_values();
                c = c.max(s.first().copied().unwrap_or(0.0));
            }
        }
    }
    c
}

/// Effective overlap over user-supplied candidates, always including the
/// trivial coarse-graining. Returns the minimum and the chosen candidate.
pub fn effective_overlap(
    setup: &MeasurementSetup,
    candidates: &[ProjectiveMeasurement],
) -> Result<(f64, ProjectiveMeasurement)> {
    let identity = ProjectiveMeasurement::identity(setup.rho_a.dim());
    let mut best = (
        effective_overlap_fixed(&setup.rho_a, &setup.x, &setup.y, &identity)?,
        identity,
    );
    for cand in candidates.iter().chain(setup.k.iter()) {
        let v = effective_overlap_fixed(&setup.rho_a, &setup.x, &setup.y, cand)?;
        if v < best.0 {
            best = (v, cand.clone());
        }
    }
    Ok(best)
}

/// Post-measurement states of Eqs (7.16)/(7.17): X (and K) measured on A
/// with C traced out, and Y (and K) measured on A with B traced out.
/// Omitting K reproduces the plain post-measurement states.
pub fn measured_states(
    rho: &MultipartiteState,
    a: &str,
    b: &[&str],
    c: &[&str],
    x: &Povm,
    y: &Povm,
    k: Option<&ProjectiveMeasurement>,
) -> Result<(MultipartiteState, MultipartiteState)> {
    let da = rho.layout().dim_of(a)?;
    if x.dim() != da || y.dim() != da {
        return Err(Error::DimMismatch("measurement dims differ from A".into()));
    }
    let identity = ProjectiveMeasurement::identity(da);
    let kk = k.unwrap_or(&identity);
    let xkb = measure_one(rho, a, b, x, kk, "X")?;
    let ykc = measure_one(rho, a, c, y, kk, "Y")?;
    Ok((xkb, ykc))
}

fn measure_one(
    rho: &MultipartiteState,
    a: &str,
    keep: &[&str],
    povm: &Povm,
    k: &ProjectiveMeasurement,
    reg: &str,
) -> Result<MultipartiteState> {
    // order A first, then the kept side
    let mut order = vec![a];
    order.extend_from_slice(keep);
    let marg = rho.partial_trace(&order)?.reorder(&order)?;
    let da = povm.dim();
    let dkeep = marg.dim() / da;
    let nx = povm.outcomes();
    let nk = k.outcomes();
    let dim = nx * nk * dkeep;
    let mut out = ComplexMatrix::zeros(dim, dim);
    let sqrts = povm.sqrt_elements();
    for (xi, mx) in sqrts.iter().enumerate() {
        for (ki, pk) in k.elements().iter().enumerate() {
            let op = mx.matrix().mul(pk.matrix());
            let full = op.kron(&ComplexMatrix::identity(dkeep));
            let block = full.mul(marg.matrix()).mul(&full.adjoint());
            // trace out A from the block
            let base = (xi * nk + ki) * dkeep;
            for i in 0..dkeep {
                for j in 0..dkeep {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for ai in 0..da {
                        acc += block[(ai * dkeep + i, ai * dkeep + j)];
                    }
                    out[(base + i, base + j)] = acc;
                }
            }
        }
    }
    let mut factors: Vec<(String, usize)> =
        vec![(reg.to_string(), nx), ("K".to_string(), nk)];
    for l in keep {
        factors.push((l.to_string(), marg.layout().dim_of(l)?));
    }
    let refs: Vec<(&str, usize)> = factors.iter().map(|(l, d)| (l.as_str(), *d)).collect();
    MultipartiteState::new(out, SystemLayout::new(&refs)?)
}

/// Variant selector for the uncertainty-relation residuals.
pub enum UcrVariant<'a> {
    /// Plain overlap: with no coarse-graining the squared overlap of
    /// Def 7.1 is used; with one, the unsquared K-overlap.
    Overlap { k: Option<&'a ProjectiveMeasurement> },
    /// Effective overlap with the extra smoothing parameter.
    Effective { eps_bar: f64, candidates: &'a [ProjectiveMeasurement] },
    /// Von Neumann entropies against the effective overlap.
    VonNeumann { candidates: &'a [ProjectiveMeasurement] },
}

/// lhs - rhs of the selected uncertainty relation on a tripartite state;
/// non-negative (within tolerance) when the relation holds.
pub fn ucr_residual(
    rho: &MultipartiteState,
    a: &str,
    b: &[&str],
    c: &[&str],
    x: &Povm,
    y: &Povm,
    eps: f64,
    variant: UcrVariant<'_>,
) -> Result<f64> {
    let rho_a = rho.partial_trace(&[a])?;
    match variant {
        UcrVariant::Overlap { k } => {
            let (xkb, ykc) = measured_states(rho, a, b, c, x, y, k)?;
            let bk: Vec<&str> = std::iter::once("K").chain(b.iter().copied()).collect();
            let ck: Vec<&str> = std::iter::once("K").chain(c.iter().copied()).collect();
            let (hmin, hmax, rhs);
            if eps <= 0.0 {
                hmin = crate::entropy::h_min(&xkb, &["X"], &bk)?.bits()?;
                hmax = crate::entropy::h_max(&ykc, &["Y"], &ck)?.bits()?;
            } else {
                let e = SmoothParam::new(eps)?;
                hmin = smooth_h_min(&xkb, &["X"], &bk, e)?.0.bits()?;
                hmax = smooth_h_max(&ykc, &["Y"], &ck, e)?.0.bits()?;
            }
            rhs = match k {
                None => -(overlap(x, y)?).log2(),
                Some(k) => -(k_overlap(x, y, k)).log2(),
            };
            Ok(hmin + hmax - rhs)
        }
        UcrVariant::Effective { eps_bar, candidates } => {
            if eps_bar <= 0.0 {
                return Err(Error::Argument("effective variant needs eps_bar > 0".into()));
            }
            let e_min = 2.0 * eps + eps_bar;
            if e_min >= 1.0 {
                return Err(Error::Argument(format!("composite smoothing {e_min} >= 1")));
            }
            let setup = MeasurementSetup::new(rho_a.clone(), x.clone(), y.clone(), None)?;
            let (_, chosen) = effective_overlap(&setup, candidates)?;
            let c_star = effective_overlap_sandwiched(&rho_a, x, y, &chosen)?;
            let (xkb, ykc) = measured_states(rho, a, b, c, x, y, Some(&chosen))?;
            let bk: Vec<&str> = std::iter::once("K").chain(b.iter().copied()).collect();
            let ck: Vec<&str> = std::iter::once("K").chain(c.iter().copied()).collect();
            let hmin = smooth_h_min(&xkb, &["X"], &bk, SmoothParam::new(e_min)?)?.0.bits()?;
            let hmax = if eps <= 0.0 {
                crate::entropy::h_max(&ykc, &["Y"], &ck)?.bits()?
            } else {
                smooth_h_max(&ykc, &["Y"], &ck, SmoothParam::new(eps)?)?.0.bits()?
            };
            let rhs = -(c_star).log2() - (2.0 / (eps_bar * eps_bar)).log2();
            Ok(hmin + hmax - rhs)
        }
        UcrVariant::VonNeumann { candidates } => {
            let setup = MeasurementSetup::new(rho_a.clone(), x.clone(), y.clone(), None)?;
            let (_, chosen) = effective_overlap(&setup, candidates)?;
            let c_star = effective_overlap_sandwiched(&rho_a, x, y, &chosen)?;
            let (xkb, ykc) = measured_states(rho, a, b, c, x, y, Some(&chosen))?;
            let bk: Vec<&str> = std::iter::once("K").chain(b.iter().copied()).collect();
            let ck: Vec<&str> = std::iter::once("K").chain(c.iter().copied()).collect();
            let hx = h_vn(&xkb, &["X"], &bk)?.bits()?;
            let hy = h_vn(&ykc, &["Y"], &ck)?.bits()?;
            Ok(hx + hy + c_star.log2())
        }
    }
}

/// Basis-choice uncertainty relation (explicit Theta register): residual
/// of H_min^e(Z|Theta B) + H_max^e(Z|Theta C) >= log2(1/c_f) for a family
/// of measurements indexed by Theta and a bijection f on the index set.
pub fn ucr_residual_basis(
    rho: &MultipartiteState,
    a: &str,
    b: &[&str],
    c: &[&str],
    family: &[Povm],
    bijection: &[usize],
    eps: f64,
) -> Result<f64> {
    if family.is_empty() || bijection.len() != family.len() {
        return Err(Error::Argument("family and bijection sizes differ".into()));
    }
    let outcomes = family[0].outcomes();
    for m in family {
        if m.outcomes() != outcomes {
            return Err(Error::Argument("family members need a shared outcome set".into()));
        }
    }
    // c_f = max_theta c(Z^theta, Z^{f(theta)})
    let mut c_f = 0.0f64;
    for (t, m) in family.iter().enumerate() {
        c_f = c_f.max(overlap(m, &family[bijection[t]])?);
    }
    // uniform Theta; build rho_{Theta Z rest} for both measurement orders
    let build = |measure_fn: &dyn Fn(usize) -> usize, keep: &[&str]| -> Result<MultipartiteState> {
        let nt = family.len();
        let mut order = vec![a];
        order.extend_from_slice(keep);
        let marg = rho.partial_trace(&order)?.reorder(&order)?;
        let da = family[0].dim();
        let dkeep = marg.dim() / da;
        let dim = nt * outcomes * dkeep;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for t in 0..nt {
            let povm = &family[measure_fn(t)];
            for (zi, mz) in povm.sqrt_elements().iter().enumerate() {
                let full = mz.matrix().kron(&ComplexMatrix::identity(dkeep));
                let block = full.mul(marg.matrix()).mul(&full.adjoint());
                let base = (t * outcomes + zi) * dkeep;
                for i in 0..dkeep {
                    for j in 0..dkeep {
                        let mut acc = num_complex::Complex64::new(0.0, 0.0);
                        for ai in 0..da {
                            acc += block[(ai * dkeep + i, ai * dkeep + j)];
                        }
                        out[(base + i, base + j)] = acc / nt as f64;
                    }
                }
            }
        }
        let mut factors: Vec<(String, usize)> =
            vec![("T".to_string(), nt), ("Z".to_string(), outcomes)];
        for l in keep {
            factors.push((l.to_string(), marg.layout().dim_of(l)?));
        }
        let refs: Vec<(&str, usize)> = factors.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        MultipartiteState::new(out, SystemLayout::new(&refs)?)
    };
    let ztb = build(&|t| t, b)?;
    let ztc = build(&|t| bijection[t], c)?;
    let tb: Vec<&str> = std::iter::once("T").chain(b.iter().copied()).collect();
    let tc: Vec<&str> = std::iter::once("T").chain(c.iter().copied()).collect();
    let (hmin, hmax);
    if eps <= 0.0 {
        hmin = crate::entropy::h_min(&ztb, &["Z"], &tb)?.bits()?;
        hmax = crate::entropy::h_max(&ztc, &["Z"], &tc)?.bits()?;
    } else {
        let e = SmoothParam::new(eps)?;
        hmin = smooth_h_min(&ztb, &["Z"], &tb, e)?.0.bits()?;
        hmax = smooth_h_max(&ztc, &["Z"], &tc, e)?.0.bits()?;
    }
    Ok(hmin + hmax + c_f.log2())
}

/// First decoration of `base` that does not collide with existing labels.
fn fresh_label(existing: &[&str], base: &str) -> String {
    let mut name = base.to_string();
    while existing.contains(&name.as_str()) {
        name.push('*');
    }
    name
}

/// Smoothing parameters of the bipartite uncertainty relation.
#[derive(Debug, Clone, Copy)]
pub struct BipartiteEps {
    pub eps: f64,
    pub eps_bar: f64,
    pub eps_tilde: f64,
    pub eps_tilde_prime: f64,
}

/// lhs - rhs of the bipartite uncertainty relation: with post-measurement
/// states rho_{A'XB} and rho_{A'YB},
/// H_min^ehat(X|B) + H_max^e(Y|B) >= H_min^et(A|B) - H_max^etp(A'|YB)
///   + log2(1/c*) - 4 log2(2/ebar^2),  ehat = 7 ebar + 6 et + 4 etp + 8 e.
pub fn bipartite_ucr_residual(
    rho_ab: &MultipartiteState,
    a: &str,
    b: &[&str],
    x: &Povm,
    y: &Povm,
    eps: BipartiteEps,
) -> Result<f64> {
    let e_hat =
        7.0 * eps.eps_bar + 6.0 * eps.eps_tilde + 4.0 * eps.eps_tilde_prime + 8.0 * eps.eps;
    if e_hat >= 1.0 {
        return Err(Error::Argument(format!("composite smoothing {e_hat} >= 1")));
    }
    let rho_a = rho_ab.partial_trace(&[a])?;
    let setup = MeasurementSetup::new(rho_a.clone(), x.clone(), y.clone(), None)?;
    let (c_star, _) = effective_overlap(&setup, &[])?;
    let labels = rho_ab.layout().labels();
    let post_label = fresh_label(&labels, "A'");

    // post-measurement states with the measured system kept: A' X B
    let post = |povm: &Povm, reg: &str| -> Result<MultipartiteState> {
        let mut order = vec![a];
        order.extend_from_slice(b);
        let marg = rho_ab.reorder(&order)?;
        let da = povm.dim();
        let dkeep = marg.dim() / da;
        let nx = povm.outcomes();
        let dim = da * nx * dkeep;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (xi, mx) in povm.sqrt_elements().iter().enumerate() {
            let full = mx.matrix().kron(&ComplexMatrix::identity(dkeep));
            let block = full.mul(marg.matrix()).mul(&full.adjoint());
            // |x><x| (x) sqrt(M) rho sqrt(M): index order (A', X, keep)
            for ai in 0..da {
                for aj in 0..da {
                    for i in 0..dkeep {
                        for j in 0..dkeep {
                            let r = (ai * nx + xi) * dkeep + i;
                            let cidx = (aj * nx + xi) * dkeep + j;
                            out[(r, cidx)] = block[(ai * dkeep + i, aj * dkeep + j)];
                        }
                    }
                }
            }
        }
        let mut factors: Vec<(String, usize)> =
            vec![(post_label.clone(), da), (reg.to_string(), nx)];
        for l in b {
            factors.push((l.to_string(), marg.layout().dim_of(l)?));
        }
        let refs: Vec<(&str, usize)> = factors.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        MultipartiteState::new(out, SystemLayout::new(&refs)?)
    };
    let axb = post(x, "X")?;
    let ayb = post(y, "Y")?;
    let (hmin_x, _) = smooth_h_min(&axb, &["X"], b, SmoothParam::new(e_hat)?)?;
    let hmax_y = if eps.eps <= 0.0 {
        crate::entropy::h_max(&ayb, &["Y"], b)?.bits()?
    } else {
        smooth_h_max(&ayb, &["Y"], b, SmoothParam::new(eps.eps)?)?.0.bits()?
    };
    let hmin_ab = if eps.eps_tilde <= 0.0 {
        crate::entropy::h_min(rho_ab, &[a], b)?.bits()?
    } else {
        smooth_h_min(rho_ab, &[a], b, SmoothParam::new(eps.eps_tilde)?)?.0.bits()?
    };
    let yb: Vec<&str> = std::iter::once("Y").chain(b.iter().copied()).collect();
    let hmax_apyb = if eps.eps_tilde_prime <= 0.0 {
        crate::entropy::h_max(&ayb, &[post_label.as_str()], &yb)?.bits()?
    } else {
        smooth_h_max(&ayb, &[post_label.as_str()], &yb, SmoothParam::new(eps.eps_tilde_prime)?)?
            .0
            .bits()?
    };
    let log_term = (2.0 / (eps.eps_bar * eps.eps_bar)).log2();
    let lhs = hmin_x.bits()? + hmax_y;
    let rhs = hmin_ab - hmax_apyb - c_star.log2() - 4.0 * log_term;
    Ok(lhs - rhs)
}

/// One-shot compression bounds: lower = the converse smooth max-entropy
/// (at sqrt(2 eps - eps^2)), upper = H_max^{eps1} + 2 log2(1/eps2) + 4.
pub fn compression_bounds(
    h_max_eps1: f64,
    h_max_converse: f64,
    eps1: f64,
    eps2: f64,
) -> Result<(f64, f64)> {
    let eps = eps1 + eps2;
    if !(eps > 0.0 && eps < 1.0 && eps1 >= 0.0 && eps2 > 0.0) {
        return Err(Error::Argument(format!("bad epsilon split ({eps1}, {eps2})")));
    }
    Ok((h_max_converse, h_max_eps1 + 2.0 * (1.0 / eps2).log2() + 4.0))
}

/// Strong-converse success probability bound
/// eps_max <= sqrt(2) 2^(-mu^2 n / (2 (4 log2 v)^2)) for compressing mu
/// bits per round below the entropy rate.
pub fn strong_converse_eps_max(mu: f64, n: u64, v: f64) -> Result<f64> {
    if mu <= 0.0 || v <= 1.0 {
        return Err(Error::Argument("strong converse needs mu > 0, v > 1".into()));
    }
    let denom = 2.0 * (4.0 * v.log2()).powi(2);
    Ok(2.0f64.sqrt() * 2.0f64.powf(-mu * mu * n as f64 / denom))
}

/// Randomness-extraction bounds: lower = H_min^{eps1} - 2 log2(1/eps2) + 1,
/// upper = the converse smooth min-entropy (at sqrt(2 eps - eps^2)).
pub fn extraction_bounds(
    h_min_eps1: f64,
    h_min_converse: f64,
    eps1: f64,
    eps2: f64,
) -> Result<(f64, f64)> {
    let eps = eps1 + eps2;
    if !(eps > 0.0 && eps < 1.0 && eps1 >= 0.0 && eps2 > 0.0) {
        return Err(Error::Argument(format!("bad epsilon split ({eps1}, {eps2})")));
    }
    Ok((h_min_eps1 - 2.0 * (1.0 / eps2).log2() + 1.0, h_min_converse))
}

/// Finite-key length for the prepare-and-measure protocol with symmetric
/// bit error rate Q:
///
/// ```text
/// l = n (1 - 2 h2(Q)) - sqrt(n) (delta(ec/2, v) + delta(es/2, v))
///     - 2 log2(1/ec) - 2 log2(1/es) - 7
/// ```
///
/// with v = sqrt(1-Q) + sqrt(1-Q) + sqrt(Q) + 1 from the closed-form
/// min/max entropies of the error channel. The overlap contributes
/// n log2(1/c) = n at c = 1/2. l is clamped at 0; the rate is l/n.
pub fn qkd_key_length(n: u64, q: f64, eps_c: f64, eps_s: f64) -> Result<(f64, f64)> {
    if !(0.0..0.5).contains(&q) {
        return Err(Error::Argument(format!("QBER {q} outside [0, 0.5)")));
    }
    if !(eps_c > 0.0 && eps_c < 1.0 && eps_s > 0.0 && eps_s < 1.0) {
        return Err(Error::Argument("epsilons must lie in (0, 1)".into()));
    }
    let threshold =
        aep_validity_threshold(eps_c / 2.0)?.max(aep_validity_threshold(eps_s / 2.0)?);
    if n < threshold {
        return Err(Error::Validity { threshold, n });
    }
    let h = binary_entropy(q);
    let v = 2.0 * (1.0 - q).sqrt() + q.sqrt() + 1.0;
    let nf = n as f64;
    let ell = nf * (1.0 - 2.0 * h)
        - nf.sqrt() * (aep_delta(eps_c / 2.0, v)? + aep_delta(eps_s / 2.0, v)?)
        - 2.0 * (1.0 / eps_c).log2()
        - 2.0 * (1.0 / eps_s).log2()
        - 7.0;
    let ell = ell.max(0.0);
    Ok((ell, ell / nf))
}

/// Rows of (parameter point, named bound values) for CSV emission.
#[derive(Debug, Clone)]
pub struct BoundTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl BoundTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Argument("row width differs from schema".into()));
        }
        for v in &row {
            if !v.is_finite() {
                return Err(Error::Argument(format!("non-finite value {v} in table")));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// CSV with an RFC-4180-quoted header row, '.' decimals, LF endings
    /// and 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let quoted: Vec<String> = self.columns.iter().map(|c| csv_quote(c)).collect();
        out.push_str(&quoted.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_sig(*v, 12)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Decimal formatting with the given number of significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
}
