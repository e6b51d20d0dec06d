//! Maximum-weight assignment for eigenvector matching.

/// Exhaustive search is exact and affordable up to this size.
pub const BRUTE_FORCE_MAX: usize = 8;

/// Permutation `p` maximizing `Σ_i score[i][p[i]]` for a square score table.
///
/// Rows whose individual best column is unique across all rows are accepted
/// greedily; otherwise the conflict is resolved by exhaustive search for
/// `n ≤ 8` and by the Hungarian method above that.
pub fn best_assignment(score: &[Vec<f64>]) -> Vec<usize> {
    let n = score.len();
    if n == 0 {
        return Vec::new();
    }
    let greedy: Vec<usize> = score.iter().map(|row| argmax(row)).collect();
    let mut seen = vec![false; n];
    let conflict = greedy.iter().any(|&j| std::mem::replace(&mut seen[j], true));
    if !conflict {
        return greedy;
    }
    if n <= BRUTE_FORCE_MAX {
        brute_force(score)
    } else {
        hungarian_max(score)
    }
}

pub fn total(score: &[Vec<f64>], perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| score[i][j]).sum()
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

fn brute_force(score: &[Vec<f64>]) -> Vec<usize> {
    let n = score.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_val = total(score, &perm);
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let v = total(score, &perm);
            if v > best_val {
                best_val = v;
                best.copy_from_slice(&perm);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// O(n³) Hungarian method on the negated scores.
fn hungarian_max(score: &[Vec<f64>]) -> Vec<usize> {
    let n = score.len();
    let cost = |i: usize, j: usize| -score[i][j];
    // 1-based potentials, column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_path_when_unambiguous() {
        let s = vec![vec![0.1, 0.9], vec![0.8, 0.2]];
        assert_eq!(best_assignment(&s), vec![1, 0]);
    }

    #[test]
    fn conflict_resolved_by_total() {
        // both rows prefer column 0; total is maximized by giving it to row 1
        let s = vec![vec![0.6, 0.5], vec![0.9, 0.1]];
        assert_eq!(best_assignment(&s), vec![1, 0]);
    }

    #[test]
    fn hungarian_agrees_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(2..=7);
            let s: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
            let a = brute_force(&s);
            let b = hungarian_max(&s);
            assert!((total(&s, &a) - total(&s, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn large_instance_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 12;
        let s: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let mut p = best_assignment(&s);
        p.sort();
        assert_eq!(p, (0..n).collect::<Vec<_>>());
    }
}
