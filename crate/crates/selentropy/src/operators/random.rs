//! Seeded random states and measurements.
//!
//! All constructors draw from a ChaCha12 stream keyed by an explicit 64-bit
//! seed, so identical seeds reproduce identical bits on every platform.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C_ZERO};
use super::measure::Povm;
use super::state::{MultipartiteState, SystemLayout};

fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    // Box-Muller; consumes two uniforms per call to keep the stream simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_c(rng: &mut ChaCha12Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Haar-like random state of the given rank: a Gaussian pure state on
/// `layout (x) C^rank` traced down to `layout`.
pub fn random_state(layout: &SystemLayout, rank: usize, seed: u64) -> Result<MultipartiteState> {
    let d = layout.total_dim();
    if rank == 0 {
        return Err(Error::Argument("rank 0 state requested".into()));
    }
    if rank > d {
        return Err(Error::Argument(format!("rank {rank} exceeds dimension {d}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..d * rank).map(|_| gaussian_c(&mut rng)).collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    // rho[i][j] = sum_k amps[i*rank+k] conj(amps[j*rank+k])
    let mut rho = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C_ZERO;
            for k in 0..rank {
                acc += amps[i * rank + k] * amps[j * rank + k].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    MultipartiteState::new(rho, layout.clone())
}

/// Random pure state vector on the layout.
pub fn random_pure(layout: &SystemLayout, seed: u64) -> Result<MultipartiteState> {
    random_state(layout, 1, seed)
}

/// Random POVM with the given outcome count, from a Haar-like isometry
/// V : C^d -> C^outcomes (x) C^d followed by measuring the first factor.
pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<Povm> {
    if outcomes == 0 {
        return Err(Error::Argument("POVM needs at least one outcome".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let rows = outcomes * d;
    let mut g = ComplexMatrix::from_fn(rows, d, |_, _| gaussian_c(&mut rng));
    // modified Gram-Schmidt: columns of g become the isometry
    for j in 0..d {
        for k in 0..j {
            let mut dot = C_ZERO;
            for i in 0..rows {
                dot += g[(i, k)].conj() * g[(i, j)];
            }
            for i in 0..rows {
                let gik = g[(i, k)];
                g[(i, j)] -= dot * gik;
            }
        }
        let norm: f64 = (0..rows).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            g[(i, j)] /= norm;
        }
    }
    // M_x = V^dag (|x><x| (x) 1) V ; block x of V has rows x*d .. x*d+d
    let mut elements = Vec::with_capacity(outcomes);
    for x in 0..outcomes {
        let block = ComplexMatrix::from_fn(d, d, |i, j| g[(x * d + i, j)]);
        elements.push(block.adjoint().mul(&block));
    }
    Povm::new(elements)
}
