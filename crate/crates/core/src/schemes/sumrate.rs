//! Largest `R1 + R2` in a resolved two-rate region.

use crate::polytope::NumericSystem;

/// Feasible `R1` interval on the segment `R1 + R2 = t`, `R1, R2 >= 0`.
fn segment(sys: &NumericSystem, t: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, t);
    for (row, &b) in sys.rows.iter().zip(&sys.rhs) {
        if b == f64::INFINITY {
            continue;
        }
        if !b.is_finite() {
            return None;
        }
        // a1 R1 + a2 (t - R1) <= b
        let (a1, a2) = (row[0], row[1]);
        let k = a1 - a2;
        let r = b - a2 * t;
        if k > 0.0 {
            hi = hi.min(r / k);
        } else if k < 0.0 {
            lo = lo.max(r / k);
        } else if r < 0.0 {
            return None;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Membership of the line `R1 + R2 = t` by exact interval clipping,
/// bisected on `t`. Empty regions give 0; unbounded ones `+inf`.
pub fn max_sum_rate(sys: &NumericSystem) -> f64 {
    assert_eq!(sys.variables.len(), 2, "two-rate region expected");
    if segment(sys, 0.0).is_none() {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while segment(sys, hi).is_some() {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if segment(sys, mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rows: Vec<[f64; 2]>, rhs: Vec<f64>) -> NumericSystem {
        NumericSystem { variables: vec!["R1".into(), "R2".into()], rows: rows.into_iter().map(|r| r.to_vec()).collect(), rhs }
    }

    #[test]
    fn pentagon() {
        let s = sys(vec![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], vec![1.0, 2.0, 2.5]);
        assert!((max_sum_rate(&s) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_rows() {
        // 2 R1 + R2 <= 3, R1 + 2 R2 <= 3 peaks at (1, 1).
        let s = sys(vec![[2.0, 1.0], [1.0, 2.0]], vec![3.0, 3.0]);
        assert!((max_sum_rate(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_unbounded() {
        assert_eq!(max_sum_rate(&sys(vec![[1.0, 0.0]], vec![-1.0])), 0.0);
        assert_eq!(max_sum_rate(&sys(vec![[1.0, 0.0]], vec![f64::NEG_INFINITY])), 0.0);
        assert_eq!(max_sum_rate(&sys(vec![[1.0, 0.0]], vec![1.0])), f64::INFINITY);
    }
}
