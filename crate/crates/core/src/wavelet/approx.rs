/// Result of keeping the `k` largest coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NTerm {
    pub kept: Vec<f64>,
    /// Indices of the retained coefficients in decreasing magnitude order.
    pub indices: Vec<usize>,
    /// Sum of squares of the discarded coefficients.
    pub error_sq: f64,
}

/// Indices sorted by decreasing magnitude, ties broken by position.
fn order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx
}

/// Keeps the `k` largest entries in magnitude and zeroes the rest.
pub fn nterm(values: &[f64], k: usize) -> NTerm {
    let idx = order(values);
    let k = k.min(values.len());
    let mut kept = vec![0.0; values.len()];
    for &i in &idx[..k] {
        kept[i] = values[i];
    }
    let error_sq = idx[k..].iter().rev().map(|&i| values[i] * values[i]).sum();
    NTerm { kept, indices: idx[..k].to_vec(), error_sq }
}

/// Decreasing rearrangement `|a|_(1) >= |a|_(2) >= ...`.
pub fn rearrangement(values: &[f64]) -> Vec<f64> {
    let mut m: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m
}

/// Squared tail `sum_{i > k} |a|_(i)^2` for each requested `k`.
pub fn nterm_error_curve(values: &[f64], ks: &[usize]) -> Vec<f64> {
    let r = rearrangement(values);
    let mut tail = vec![0.0; r.len() + 1];
    for i in (0..r.len()).rev() {
        tail[i] = tail[i + 1] + r[i] * r[i];
    }
    ks.iter().map(|&k| tail[k.min(r.len())]).collect()
}

pub fn threshold_hard(values: &mut [f64], lambda: f64) {
    values.iter_mut().for_each(|v| {
        if v.abs() <= lambda {
            *v = 0.0
        }
    });
}

pub fn threshold_soft(values: &mut [f64], lambda: f64) {
    values.iter_mut().for_each(|v| *v = v.signum() * (v.abs() - lambda).max(0.0));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ties_go_to_lower_index() {
        let r = nterm(&[1.0, -3.0, 3.0, 2.0], 2);
        assert_eq!(r.indices, vec![1, 2]);
        assert_eq!(r.kept, vec![0.0, -3.0, 3.0, 0.0]);
        assert_eq!(r.error_sq, 5.0);
    }

    #[test]
    fn thresholds() {
        let mut a = vec![0.5, -1.5, 2.0, -0.2];
        threshold_hard(&mut a, 1.0);
        assert_eq!(a, vec![0.0, -1.5, 2.0, 0.0]);
        let mut b = vec![0.5, -1.5, 2.0];
        threshold_soft(&mut b, 1.0);
        assert_eq!(b, vec![0.0, -0.5, 1.0]);
    }

    proptest! {
        #[test]
        fn error_curve_is_monotone_and_matches_nterm(v in prop::collection::vec(-10.0f64..10.0, 1..64), k in 0usize..70) {
            let ks: Vec<usize> = (0..=v.len()).collect();
            let curve = nterm_error_curve(&v, &ks);
            for w in curve.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            let r = nterm(&v, k);
            let direct = nterm_error_curve(&v, &[k])[0];
            prop_assert!((r.error_sq - direct).abs() <= 1e-9 * (1.0 + direct));
            let total: f64 = v.iter().map(|x| x * x).sum();
            let kept: f64 = r.kept.iter().map(|x| x * x).sum();
            prop_assert!((total - kept - r.error_sq).abs() <= 1e-9 * (1.0 + total));
        }
    }
}
