//! Small linear programs over a resolved system.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};

use super::{NumericSystem, PolytopeError};

/// Outcome of [`build`]: either a problem ready to solve or a verdict
/// that is already known from infinite right-hand sides.
enum Built {
    Problem(Problem),
    Infeasible,
}

/// Variables with `fixed[j] = Some(v)` are pinned to `v`, the others range
/// over `[0, inf)`. Rows with `+inf` bounds are dropped; a `-inf` or NaN
/// bound makes the system empty.
fn build(system: &NumericSystem, fixed: &[Option<f64>], objective: &[f64], slack: bool) -> Built {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let x: Vec<Variable> = (0..system.variables.len())
        .map(|j| match fixed.get(j).copied().flatten() {
            Some(v) => p.add_var(0.0, (v, v)),
            None => p.add_var(objective.get(j).copied().unwrap_or(0.0), (0.0, f64::INFINITY)),
        })
        .collect();
    let t = slack.then(|| p.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY)));
    for (row, &b) in system.rows.iter().zip(&system.rhs) {
        if b == f64::INFINITY {
            continue;
        }
        if !b.is_finite() {
            return Built::Infeasible;
        }
        let mut terms: Vec<(Variable, f64)> =
            row.iter().zip(&x).filter(|(a, _)| **a != 0.0).map(|(a, v)| (*v, *a)).collect();
        if let Some(t) = t {
            terms.push((t, 1.0));
        }
        if terms.is_empty() {
            if b < 0.0 {
                return Built::Infeasible;
            }
            continue;
        }
        p.add_constraint(&terms, ComparisonOp::Le, b);
    }
    Built::Problem(p)
}

fn solve(p: &Problem) -> Result<Option<f64>, PolytopeError> {
    match p.solve() {
        Ok(SolveOutcome::Solution(s)) => Ok(Some(s.objective())),
        Ok(other) => Err(PolytopeError::Lp(format!("{other:?}"))),
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(microlp::Error::Unbounded) => Ok(Some(f64::INFINITY)),
        Err(e) => Err(PolytopeError::Lp(e.to_string())),
    }
}

/// Largest `t` such that some `x` satisfies `rows·x + t <= rhs` on every
/// row, with the `fixed` coordinates pinned and the free ones nonnegative.
/// `+inf` when `t` is unbounded, `-inf` when a bound is `-inf`.
pub fn max_uniform_slack(system: &NumericSystem, fixed: &[Option<f64>]) -> Result<f64, PolytopeError> {
    match build(system, fixed, &[], true) {
        Built::Infeasible => Ok(f64::NEG_INFINITY),
        Built::Problem(p) => Ok(solve(&p)?.unwrap_or(f64::NEG_INFINITY)),
    }
}

/// Maximizes `objective·x` over the region with all variables nonnegative.
/// `None` when the region is empty.
pub fn lp_maximize(system: &NumericSystem, objective: &[f64]) -> Result<Option<f64>, PolytopeError> {
    match build(system, &[], objective, false) {
        Built::Infeasible => Ok(None),
        Built::Problem(p) => solve(&p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> NumericSystem {
        NumericSystem {
            variables: vec!["a".into(), "b".into()],
            rows: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            rhs: vec![1.0, 2.0, 2.5],
        }
    }

    #[test]
    fn maximizes_sum() {
        let v = lp_maximize(&square(), &[1.0, 1.0]).unwrap().unwrap();
        assert!((v - 2.5).abs() < 1e-9);
    }

    #[test]
    fn slack_at_a_pinned_point() {
        let s = square();
        let t = max_uniform_slack(&s, &[Some(0.5), None]).unwrap();
        // b = 0 gives slacks 0.5, 2 and 2.0; rows tie at 0.5 for row one.
        assert!((t - 0.5).abs() < 1e-9);
        let t = max_uniform_slack(&s, &[Some(2.0), Some(2.0)]).unwrap();
        assert!((t + 1.5).abs() < 1e-9);
    }

    #[test]
    fn infinite_bounds() {
        let mut s = square();
        s.rhs[2] = f64::NEG_INFINITY;
        assert_eq!(lp_maximize(&s, &[1.0, 1.0]).unwrap(), None);
        assert_eq!(max_uniform_slack(&s, &[None, None]).unwrap(), f64::NEG_INFINITY);
        s.rhs = vec![f64::INFINITY; 3];
        assert_eq!(lp_maximize(&s, &[1.0, 0.0]).unwrap(), Some(f64::INFINITY));
    }
}
