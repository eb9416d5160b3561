//! Per-round client sampling.

use crate::rng::{stream, StreamKind};
use crate::util::ceil_count;

/// Draws the participating clients for one round: `ceil(fraction · n)`
/// distinct ids, uniformly without replacement, returned in ascending order.
///
/// Deterministic given `(seed, round)`, and independent of every other
/// random decision in the run (the draw has its own seed stream keyed by the
/// round number).
pub fn sample_clients(n_clients: usize, fraction: f64, seed: u64, round: usize) -> Vec<usize> {
    let k = ceil_count(fraction * n_clients as f64).clamp(1, n_clients);
    let mut rng = stream(seed, StreamKind::ClientSampling, &[round as u64]);
    let mut ids: Vec<usize> = rand::seq::index::sample(&mut rng, n_clients, k).into_vec();
    ids.sort_unstable();
    ids
}
