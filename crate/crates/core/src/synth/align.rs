//! Best one-to-one matching of predicted cluster ids to planted style ids.

/// Minimum-cost assignment of every row to a distinct column
/// (`rows <= cols`), by the shortest augmenting path form of the Hungarian
/// method. Returns the column of each row.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "more rows than columns");
    assert!(cost.iter().all(|r| r.len() == m), "ragged cost matrix");

    // 1-based potentials and matching, column 0 is a virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=m {
        if row_of[j] > 0 {
            col_of[row_of[j] - 1] = j - 1;
        }
    }
    col_of
}

/// Maps each predicted id in `0..n_predicted` to a planted id in
/// `0..n_planted` so that the number of agreeing steps is maximal.
/// Predicted ids left over when `n_predicted > n_planted` map to `None`.
pub fn align_labels(
    predicted: &[usize],
    planted: &[usize],
    n_predicted: usize,
    n_planted: usize,
) -> Vec<Option<usize>> {
    assert_eq!(predicted.len(), planted.len());
    let mut overlap = vec![vec![0.0; n_planted]; n_predicted];
    for (&p, &t) in predicted.iter().zip(planted) {
        overlap[p][t] += 1.0;
    }
    if n_predicted <= n_planted {
        let cost: Vec<Vec<f64>> = overlap.iter().map(|r| r.iter().map(|w| -w).collect()).collect();
        min_cost_assignment(&cost).into_iter().map(Some).collect()
    } else {
        let cost: Vec<Vec<f64>> = (0..n_planted)
            .map(|t| (0..n_predicted).map(|p| -overlap[p][t]).collect())
            .collect();
        let mut map = vec![None; n_predicted];
        for (t, p) in min_cost_assignment(&cost).into_iter().enumerate() {
            map[p] = Some(t);
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0..10) as f64).collect())
                .collect();
            let total = |a: &[usize]| a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>();
            let best = permutations(n).iter().map(|p| total(p)).fold(f64::INFINITY, f64::min);
            let got = min_cost_assignment(&cost);
            let mut cols = got.clone();
            cols.sort();
            assert_eq!(cols, (0..n).collect::<Vec<_>>());
            assert_eq!(total(&got), best);
        }
    }

    #[test]
    fn rectangular() {
        let cost = vec![vec![5.0, 1.0, 9.0], vec![1.0, 2.0, 9.0]];
        assert_eq!(min_cost_assignment(&cost), vec![1, 0]);
    }

    #[test]
    fn relabelled_clusters_align_back() {
        let planted = [0, 0, 1, 1, 2, 2, 2];
        let predicted = [2, 2, 0, 0, 1, 1, 0];
        assert_eq!(align_labels(&predicted, &planted, 3, 3), vec![Some(1), Some(2), Some(0)]);
        // an extra predicted cluster stays unmatched
        let predicted = [3, 3, 0, 0, 1, 1, 2];
        let map = align_labels(&predicted, &planted, 4, 3);
        assert_eq!(map, vec![Some(1), Some(2), None, Some(0)]);
    }
}
