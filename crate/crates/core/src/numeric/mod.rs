//! Shared numerical kernels: dense symmetric algebra, chi-squared tails and
//! deterministic random streams.

mod matrix;
mod rng;
mod special;

pub use matrix::{floor_eigenvalues, sym_eigen, sym_eigenvalues, sym_inverse, sym_solve, Matrix, SymSolve};
pub use rng::{InnovationLaw, RngStream};
pub use special::{chi_square_cdf, chi_square_sf, gamma_p, gamma_q};

/// Convenience wrapper around [`RngStream::draw`] on a fresh stream.
pub fn draw(seed: u64, stream_id: u64, law: &InnovationLaw, n: usize) -> crate::Result<alloc::vec::Vec<f64>> {
    RngStream::new(seed, stream_id).draw(law, n)
}
