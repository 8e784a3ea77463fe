//! Fixtures shared by the criterion benches.

use flohaar::analysis::EnsembleSampler;
use flohaar::hurwitz_oracle::haar_orthogonal;
use flohaar::{Circuit, Ensemble, OrthoMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// First `count` circuits of an ensemble at a fixed seed.
pub fn circuits(ensemble: Ensemble, n: usize, count: u64) -> Vec<Circuit> {
    let s = EnsembleSampler::new(ensemble, n, 0).expect("valid ensemble");
    (0..count).map(|i| s.circuit(i)).collect()
}

/// Haar orthogonal matrices of size `d`, seeded by index.
pub fn orthogonal_matrices(d: usize, count: u64) -> Vec<OrthoMatrix> {
    (0..count).map(|i| haar_orthogonal(d, &mut ChaCha8Rng::seed_from_u64(i))).collect()
}
