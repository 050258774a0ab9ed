//! Monte-Carlo and exhaustive simulators validating the one-shot bounds:
//! random-binning source compression with classical side information,
//! two-universal Toeplitz extraction, and the key-rate curve producer.
//!
//! Trials are partitioned into fixed shards with seeds derived from
//! (seed, shard index), so results are bitwise identical for any worker
//! count and reproducible per seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bounds::{binary_entropy, qkd_key_length, BoundTable};
use crate::entropy::ClassicalDist;
use crate::error::{Error, Result};

const WORK_LIMIT: u64 = 10_000_000;
const SHARD: u64 = 1024;

fn shard_rng(seed: u64, shard: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ shard.wrapping_mul(0x9e3779b97f4a7c15))
}

/// Random binning compression of n i.i.d. copies of a joint (Z, B) source
/// into m-bit codewords, decoded by maximum posterior within the bin with
/// a lowest-index tie break. Returns the empirical error frequency.
pub fn compress_simulate(
    p_zb: &ClassicalDist,
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let nz = p_zb.nx();
    let nb = p_zb.ny();
    if n == 0 || m > 63 {
        return Err(Error::Argument("need n >= 1 and m <= 63".into()));
    }
    let strings = (nz as u64)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Argument("source space overflows".into()))?;
    if strings > 1 << 22 {
        return Err(Error::Infeasible(strings, 1 << 22));
    }
    // expected decode work: strings / 2^m candidates per trial
    let per_trial = 1 + n as u64 + (strings >> m.min(62));
    let work = strings + trials.saturating_mul(per_trial);
    if work > WORK_LIMIT {
        return Err(Error::Infeasible(work, WORK_LIMIT));
    }

    // binning: one random m-bit codeword per source string
    let mask: u64 = if m == 0 { 0 } else { (1u64 << m) - 1 };
    let mut bin_rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x2545f4914f6cdd1d));
    let bins: Vec<u64> = (0..strings).map(|_| bin_rng.gen::<u64>() & mask).collect();
    let mut members: std::collections::HashMap<u64, Vec<u32>> = Default::default();
    for (z, &b) in bins.iter().enumerate() {
        members.entry(b).or_default().push(z as u32);
    }

    // log-posterior tables; impossible symbols get -inf
    let log_p: Vec<Vec<f64>> = (0..nz)
        .map(|z| {
            (0..nb)
                .map(|b| {
                    let p = p_zb.prob(z, b);
                    if p > 0.0 {
                        p.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        })
        .collect();
    // cumulative joint for sampling
    let mut cdf = Vec::with_capacity(nz * nb);
    let mut acc = 0.0;
    for z in 0..nz {
        for b in 0..nb {
            acc += p_zb.prob(z, b);
            cdf.push(acc);
        }
    }

    let shards: Vec<(u64, u64)> = (0..trials.div_ceil(SHARD))
        .map(|s| (s, SHARD.min(trials - s * SHARD)))
        .collect();
    let errors: u64 = shards
        .par_iter()
        .map(|&(s, count)| {
            let mut rng = shard_rng(seed, s);
            let mut errs = 0u64;
            let mut bsyms = vec![0usize; n];
            for _ in 0..count {
                // sample the block
                let mut zidx: u64 = 0;
                for slot in bsyms.iter_mut() {
                    let u: f64 = rng.gen();
                    let pos = cdf.partition_point(|&c| c < u).min(nz * nb - 1);
                    let z = pos / nb;
                    *slot = pos % nb;
                    zidx = zidx * nz as u64 + z as u64;
                }
                let bin = bins[zidx as usize];
                // MAP decode within the bin
                let mut best = u64::MAX;
                let mut best_score = f64::NEG_INFINITY;
                for &cand in members.get(&bin).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let mut idx = cand as u64;
                    let mut score = 0.0f64;
                    for i in (0..n).rev() {
                        let z = (idx % nz as u64) as usize;
                        idx /= nz as u64;
                        score += log_p[z][bsyms[i]];
                        if score == f64::NEG_INFINITY {
                            break;
                        }
                    }
                    if score > best_score || (score == best_score && (cand as u64) < best) {
                        best_score = score;
                        best = cand as u64;
                    }
                }
                if best != zidx {
                    errs += 1;
                }
            }
            errs
        })
        .sum();
    Ok(errors as f64 / trials as f64)
}

/// Seed enumeration mode for the Toeplitz extractor.
#[derive(Debug, Clone, Copy)]
pub enum ExtractMode {
    /// every Toeplitz seed, feasible up to 2^20 seeds
    Exhaustive,
    /// a sampled subset of seeds
    Sampled { count: u64, seed: u64 },
}

/// Binary Toeplitz two-universal extraction of `ell` bits from a joint
/// (Z, E) source with Z on k = log2 |Z| bits. For each hash seed the exact
/// output joint is computed and the distance to uniform
/// sum_e P(e) (1/2) |P(S|e) - uniform|_1 accumulated; returns the average
/// over seeds.
pub fn extract_simulate(p_ze: &ClassicalDist, ell: usize, mode: ExtractMode) -> Result<f64> {
    let nz = p_ze.nx();
    let ne = p_ze.ny();
    if nz > 1 << 12 || ne > 1 << 6 {
        return Err(Error::Infeasible((nz * ne) as u64, 1 << 18));
    }
    if !nz.is_power_of_two() {
        return Err(Error::Argument("source alphabet must be a power of two".into()));
    }
    let k = nz.trailing_zeros() as usize;
    if ell > k {
        return Err(Error::Argument(format!("cannot extract {ell} bits from {k}")));
    }
    if ell == 0 {
        return Ok(0.0);
    }
    let seed_bits = ell + k - 1;
    let delta_for = |toeplitz: u64| -> f64 {
        // S = T bits(z); T[i][j] = t[i + k - 1 - j]
        let mut out = vec![vec![0.0f64; ne]; 1 << ell];
        for z in 0..nz {
            let mut s = 0usize;
            for i in 0..ell {
                let mut bit = 0u64;
                for j in 0..k {
                    let zj = (z >> (k - 1 - j)) & 1;
                    let tij = (toeplitz >> (i + k - 1 - j)) & 1;
                    bit ^= (zj as u64) & tij;
                }
                s = (s << 1) | bit as usize;
            }
            for e in 0..ne {
                out[s][e] += p_ze.prob(z, e);
            }
        }
        let d_s = (1 << ell) as f64;
        let mut delta = 0.0;
        for e in 0..ne {
            let pe: f64 = (0..1 << ell).map(|s| out[s][e]).sum();
            let mut dist = 0.0;
            for s in 0..1 << ell {
                dist += (out[s][e] - pe / d_s).abs();
            }
            delta += 0.5 * dist;
        }
        delta
    };
    match mode {
        ExtractMode::Exhaustive => {
            if seed_bits > 20 {
                return Err(Error::Infeasible(1 << seed_bits.min(63), 1 << 20));
            }
            let total = 1u64 << seed_bits;
            let sum: f64 = (0..total).into_par_iter().map(delta_for).sum();
            Ok(sum / total as f64)
        }
        ExtractMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::Argument("sample count must be positive".into()));
            }
            let mask = if seed_bits >= 64 { u64::MAX } else { (1u64 << seed_bits) - 1 };
            let seeds: Vec<u64> = {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                (0..count).map(|_| rng.gen::<u64>() & mask).collect()
            };
            let sum: f64 = seeds.into_par_iter().map(delta_for).sum();
            Ok(sum / count as f64)
        }
    }
}

/// Key-rate table over a blocklength grid with the asymptotic rate
/// 1 - 2 h2(Q) appended as a constant column.
pub fn qkd_rate_curve(
    q: f64,
    eps_c: f64,
    eps_s: f64,
    n_grid: &[u64],
) -> Result<BoundTable> {
    let mut table = BoundTable::new(&["n", "ell", "rate", "asymptotic_rate"]);
    let asymptotic = 1.0 - 2.0 * binary_entropy(q);
    for &n in n_grid {
        let (ell, rate) = qkd_key_length(n, q, eps_c, eps_s)?;
        table.push(vec![n as f64, ell, rate, asymptotic])?;
    }
    Ok(table)
}
