//! Seeded multistart pattern search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Optimizer effort. Restart `r` draws its start from stream `r` of a
/// ChaCha generator seeded with `seed`, so a larger budget repeats every
/// restart of a smaller one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { restarts: 64, max_evals: 20_000, seed: 0 }
    }
}

pub const INITIAL_STEP: f64 = 0.25;
pub const SHRINK: f64 = 0.5;
pub const MIN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub theta: Vec<f64>,
    /// Index of the winning start; warm starts come first.
    pub best_start: usize,
    pub evaluations: usize,
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Coordinate moves of `±step·scale[i]` around `x`, keeping each one that
/// improves the value.
fn explore<F, P>(f: &F, project: &P, x: &mut Vec<f64>, val: &mut f64, step: f64, scales: &[f64], evals: &mut usize)
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut trial = x.clone();
    for i in 0..x.len() {
        if scales[i] == 0.0 {
            continue;
        }
        for dir in [1.0, -1.0] {
            trial.copy_from_slice(x);
            trial[i] += dir * step * scales[i];
            project(&mut trial);
            let v = clean(f(&trial));
            *evals += 1;
            if v > *val {
                *val = v;
                x.copy_from_slice(&trial);
                break;
            }
        }
    }
}

/// Hooke–Jeeves pattern search: coordinate exploration plus pattern moves
/// along the last successful displacement. The step halves after a failed
/// exploration; the search stops once the largest absolute step drops
/// below [`MIN_STEP`] or the evaluation budget is spent.
pub fn pattern_search<F, P>(f: &F, project: &P, start: Vec<f64>, scales: &[f64], max_evals: usize) -> (f64, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut base = start;
    project(&mut base);
    let mut fbase = clean(f(&base));
    let mut evals = 1;
    let smax = scales.iter().copied().fold(0.0, f64::max);
    let mut step = INITIAL_STEP;
    while step * smax >= MIN_STEP && evals < max_evals {
        let (mut x, mut v) = (base.clone(), fbase);
        explore(f, project, &mut x, &mut v, step, scales, &mut evals);
        if v <= fbase {
            step *= SHRINK;
            continue;
        }
        while evals < max_evals {
            let mut p: Vec<f64> = x.iter().zip(&base).map(|(xi, bi)| 2.0 * xi - bi).collect();
            project(&mut p);
            base.copy_from_slice(&x);
            fbase = v;
            let mut vp = clean(f(&p));
            evals += 1;
            explore(f, project, &mut p, &mut vp, step, scales, &mut evals);
            if vp > fbase {
                x = p;
                v = vp;
            } else {
                break;
            }
        }
    }
    (fbase, base, evals)
}

/// Refines every warm start, then `budget.restarts` random starts drawn
/// uniformly from `[-scale, scale]`. Ties go to the lowest start index.
pub fn multistart<F, P>(f: &F, project: &P, scales: &[f64], warm: &[Vec<f64>], budget: Budget) -> SearchResult
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut out = SearchResult { value: f64::NEG_INFINITY, theta: vec![0.0; scales.len()], best_start: 0, evaluations: 0 };
    let random = (0..budget.restarts).map(|r| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(r as u64);
        scales.iter().map(|s| if *s > 0.0 { rng.gen_range(-*s..=*s) } else { 0.0 }).collect::<Vec<f64>>()
    });
    for (idx, start) in warm.iter().cloned().chain(random).enumerate() {
        let (v, x, e) = pattern_search(f, project, start, scales, budget.max_evals);
        out.evaluations += e;
        if v > out.value {
            out.value = v;
            out.theta = x;
            out.best_start = idx;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_concave_peak() {
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2) - (x[1] + 0.7).powi(2);
        let r = multistart(&f, &|_: &mut [f64]| {}, &[1.0, 1.0], &[], Budget { restarts: 3, ..Default::default() });
        assert!((r.theta[0] - 0.3).abs() < 1e-4 && (r.theta[1] + 0.7).abs() < 1e-4);
    }

    #[test]
    fn projection_is_respected() {
        let f = |x: &[f64]| x[0];
        let clamp = |x: &mut [f64]| x[0] = x[0].min(0.5);
        let r = multistart(&f, &clamp, &[1.0], &[], Budget { restarts: 2, ..Default::default() });
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn more_restarts_never_hurt() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() + (5.0 * x[1]).cos();
        let mut last = f64::NEG_INFINITY;
        for restarts in 1..6 {
            let r = multistart(&f, &|_: &mut [f64]| {}, &[2.0, 2.0], &[], Budget { restarts, max_evals: 200, seed: 4 });
            assert!(r.value >= last);
            last = r.value;
        }
    }
}
