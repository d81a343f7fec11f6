use crate::schedule::Sequence;

/// Exact minimum of the weight score: a linear assignment of positions
/// (rows) to workers (columns) with cost `weights[pos * n + worker]`.
/// Shortest augmenting paths with potentials, `O(n³)`.
pub fn min_cost_assignment(n: usize, weights: &[f64]) -> Sequence {
    assert_eq!(weights.len(), n * n);
    // 1-based arrays, column 0 is the virtual start
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of[0] = row;
        let mut col0 = 0;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = row_of[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = weights[(r - 1) * n + (col - 1)] - u[r] - v[col];
                if reduced < min_to[col] {
                    min_to[col] = reduced;
                    way[col] = col0;
                }
                if min_to[col] < delta {
                    delta = min_to[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_to[col] -= delta;
                }
            }
            col0 = col1;
            if row_of[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of[col0] = row_of[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut order = vec![0; n];
    for col in 1..=n {
        order[row_of[col] - 1] = col - 1;
    }
    Sequence::new(order).expect("assignment is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::score_order;
    use crate::search::exhaustive_min;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_exhaustive_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=6 {
            for _ in 0..20 {
                let w: Vec<f64> = (0..n * n).map(|_| rng.gen()).collect();
                let a = min_cost_assignment(n, &w);
                let e = exhaustive_min(n, &w);
                assert!((score_order(a.order(), &w) - score_order(e.order(), &w)).abs() < 1e-12);
            }
        }
    }
}
