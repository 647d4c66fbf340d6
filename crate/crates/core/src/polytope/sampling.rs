//! Sampled membership comparison of two systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AtomValuation, ConstraintSystem, NumericSystem, PolytopeError};

const MEMBERSHIP_TOL: f64 = 1e-9;
const MAX_WITNESSES: usize = 10;
const JITTER: f64 = 1e-3;

/// A point on which the two systems disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub valuation_index: usize,
    pub point: Vec<f64>,
    pub in_a: bool,
    pub in_b: bool,
    /// Constraint indices violated in whichever system rejects the point.
    pub violated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub agree: bool,
    pub variables: Vec<String>,
    pub points_checked: usize,
    pub disagreements: usize,
    pub witnesses: Vec<Witness>,
}

fn reorder(sys: NumericSystem, order: &[String]) -> NumericSystem {
    let perm: Vec<usize> =
        order.iter().map(|v| sys.variables.iter().position(|w| w == v).expect("same variable set")).collect();
    let rows = sys.rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
    NumericSystem { variables: order.to_vec(), rows, rhs: sys.rhs }
}

/// Compares membership of `a` and `b` on `n_points` rate points per valuation.
///
/// Points are drawn from `[0, 1.25·max(1, max |rhs|)]^d`. Half are uniform;
/// the other half are projected onto a randomly chosen constraint hyperplane
/// of either system and then jittered, so that boundaries get exercised.
pub fn regions_equal_sampled(
    a: &ConstraintSystem,
    b: &ConstraintSystem,
    valuations: &[AtomValuation],
    n_points: usize,
    seed: u64,
) -> Result<SampleReport, PolytopeError> {
    if valuations.is_empty() {
        return Err(PolytopeError::NoValuations);
    }
    let mut va = a.variables().to_vec();
    let mut vb = b.variables().to_vec();
    va.sort();
    vb.sort();
    if va != vb {
        return Err(PolytopeError::VariableMismatch(a.variables().to_vec(), b.variables().to_vec()));
    }
    let order = a.variables().to_vec();
    let dim = order.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SampleReport {
        agree: true,
        variables: order.clone(),
        points_checked: 0,
        disagreements: 0,
        witnesses: Vec::new(),
    };
    for (vi, val) in valuations.iter().enumerate() {
        let na = a.resolve(val)?;
        let nb = reorder(b.resolve(val)?, &order);
        let scale = 1.25
            * na.rhs
                .iter()
                .chain(&nb.rhs)
                .filter(|x| x.is_finite())
                .fold(1.0f64, |m, x| m.max(x.abs()));
        let planes: Vec<(&Vec<f64>, f64)> = na
            .rows
            .iter()
            .zip(&na.rhs)
            .chain(nb.rows.iter().zip(&nb.rhs))
            .filter(|(r, b)| b.is_finite() && r.iter().any(|x| *x != 0.0))
            .map(|(r, b)| (r, *b))
            .collect();
        for k in 0..n_points {
            let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=scale)).collect();
            if k % 2 == 1 && !planes.is_empty() {
                let (row, rhs) = planes[rng.gen_range(0..planes.len())];
                let dot: f64 = row.iter().zip(&x).map(|(r, xi)| r * xi).sum();
                let norm2: f64 = row.iter().map(|r| r * r).sum();
                let t = (dot - rhs) / norm2;
                for (xi, r) in x.iter_mut().zip(row) {
                    *xi -= t * r;
                    *xi += rng.gen_range(-1.0..=1.0) * JITTER * scale;
                }
            }
            let (in_a, in_b) = (na.contains(&x, MEMBERSHIP_TOL), nb.contains(&x, MEMBERSHIP_TOL));
            report.points_checked += 1;
            if in_a != in_b {
                report.agree = false;
                report.disagreements += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    let violated =
                        if in_a { nb.violated(&x, MEMBERSHIP_TOL) } else { na.violated(&x, MEMBERSHIP_TOL) };
                    report.witnesses.push(Witness { valuation_index: vi, point: x, in_a, in_b, violated });
                }
            }
        }
    }
    Ok(report)
}
