//! Random angle selection for the inner loop.

use rand::seq::index;
use rand::Rng;

/// `p` distinct angle indices in `0..n_angles`, uniformly at random.
pub fn initial_angles<R: Rng + ?Sized>(rng: &mut R, p: usize, n_angles: usize) -> Vec<usize> {
    index::sample(rng, n_angles, p.min(n_angles)).into_vec()
}

/// `min(q, unsampled.len())` distinct entries of `unsampled`, uniformly at random.
pub fn draw_candidates<R: Rng + ?Sized>(rng: &mut R, unsampled: &[usize], q: usize) -> Vec<usize> {
    let k = q.min(unsampled.len());
    index::sample(rng, unsampled.len(), k).into_iter().map(|i| unsampled[i]).collect()
}

/// The `p` candidates with the largest residual norms, largest first. Ties
/// keep the lower angle index first.
pub fn select_largest(candidates: &[(usize, f64)], p: usize) -> Vec<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    sorted.into_iter().take(p).map(|(j, _)| j).collect()
}
