//! Blahut–Arimoto computation of single-letter channel capacity.

use super::{Channel, DiscreteError};

#[derive(Debug, Clone, PartialEq)]
pub struct BlahutArimoto {
    /// Lower bound on capacity at termination, in bits.
    pub capacity: f64,
    /// Upper bound at termination; the gap is below the requested tolerance.
    pub upper: f64,
    pub input_pmf: Vec<f64>,
    pub iterations: usize,
    /// Mutual information of each iterate; nondecreasing.
    pub history: Vec<f64>,
}

/// `D(W(.|x) || q)` in bits for every input `x`.
fn divergences(w: &[Vec<f64>], q: &[f64]) -> Vec<f64> {
    w.iter()
        .map(|row| {
            row.iter()
                .zip(q)
                .filter(|(p, _)| **p > 0.0)
                .map(|(p, qy)| p * (p / qy).log2())
                .sum()
        })
        .collect()
}

fn output_law(w: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; w[0].len()];
    for (row, px) in w.iter().zip(p) {
        for (qy, wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    q
}

/// Iterates from the uniform input until the upper and lower capacity bounds
/// are within `tol` bits.
pub fn blahut_arimoto(channel: &Channel, tol: f64, max_iter: usize) -> Result<BlahutArimoto, DiscreteError> {
    let w = channel.matrix()?;
    let nx = w.len();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut history = Vec::new();
    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        let q = output_law(&w, &p);
        let d = divergences(&w, &q);
        let mi: f64 = p.iter().zip(&d).map(|(px, dx)| px * dx).sum();
        history.push(mi);
        let z: f64 = p.iter().zip(&d).map(|(px, dx)| px * dx.exp2()).sum();
        let lower = z.log2();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < tol {
            return Ok(BlahutArimoto { capacity: lower.max(mi), upper, input_pmf: p, iterations: it, history });
        }
        p = p.iter().zip(&d).map(|(px, dx)| px * dx.exp2() / z).collect();
    }
    Err(DiscreteError::NotConverged { iterations: max_iter, gap })
}
