//! Complex Hermitian linear algebra and multipartite state bookkeeping.
//!
//! All values are immutable after construction and every operation is a
//! pure function of its inputs.

mod matrix;
mod measure;
mod random;
mod state;

pub use matrix::{rank_tolerance, ComplexMatrix, HermitianOp};

/// Applies a scalar function to a Hermitian operator on its support;
/// kernel eigenvalues stay at zero.
pub fn operator_function(
    m: &HermitianOp,
    f: impl Fn(f64) -> f64,
) -> crate::error::Result<HermitianOp> {
    m.apply_fn(f)
}
pub use measure::{apply_channel, Povm, ProjectiveMeasurement};
pub use random::{random_povm, random_pure, random_state};
pub use state::{
    canonical_eigensystem, maximally_entangled, maximally_mixed, pure_state_from_vec,
    state_tensor, tensor_product, MultipartiteState, SystemLayout, PSD_CLIP, TRACE_SLACK,
};
