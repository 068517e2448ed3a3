/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the deepest even-column entry of the epsilon table, which for
/// alternating or geometrically converging sums is usually far closer to the
/// limit than the last partial sum.
pub fn wynn_epsilon(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    if n == 0 {
        return f64::NAN;
    }
    if n < 3 {
        return partial_sums[n - 1];
    }
    // prev = column k−1, cur = column k; each column is one entry shorter.
    let mut prev = vec![0.0; n + 1];
    let mut cur = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                // Converged (or broke down) at this depth.
                return if k % 2 == 1 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&last) = cur.last() {
                if last.is_finite() {
                    best = last;
                }
            }
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}
