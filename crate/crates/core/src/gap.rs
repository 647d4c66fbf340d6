//! Constant-gap audit between the relaxed decode-forward inner bound and
//! the relaxed cut-set outer bound.
//!
//! Both bounds share the capacity part of a cut and the log-det term
//! `½·log2 det(I + P·G(D,S)G(D,S)ᵀ)`. The inner bound subtracts `|D|/2`;
//! the outer bound adds `½·min{|S|, |D|·log2|S|}`. The empty-`S` cut has no
//! signal term, and there both bounds are the exact fronthaul sum.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gaussian::{capacity_logdet, CranNetwork, GaussianError};
use crate::regions::lex_subsets;

/// Tolerance for `inner <= outer` and for the bound check.
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    /// 1-based BS indices.
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    /// 1-based user indices.
    #[serde(rename = "D")]
    pub d: Vec<usize>,
    pub inner: f64,
    pub outer: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAudit {
    pub max_gap: f64,
    pub reports: Vec<CutReport>,
    pub bound: f64,
    pub pass: bool,
}

fn cut_capacity(network: &CranNetwork, s: &[usize]) -> f64 {
    (0..network.num_bs())
        .filter(|k| !s.contains(k))
        .map(|k| network.c[k] + s.iter().map(|&j| network.coop(k, j)).sum::<f64>())
        .sum()
}

fn signal_term(network: &CranNetwork, d: &[usize], s: &[usize]) -> Result<f64, GaussianError> {
    let g = DMatrix::from_fn(d.len(), s.len(), |r, c| network.g[(d[r], s[c])]);
    capacity_logdet(&g, &DMatrix::from_diagonal_element(s.len(), s.len(), network.p))
}

/// Relaxation slack of the outer bound: `½·min{|S|, |D|·log2|S|}`.
pub fn outer_slack(s_len: usize, d_len: usize) -> f64 {
    if s_len == 0 {
        return 0.0;
    }
    0.5 * (s_len as f64).min(d_len as f64 * (s_len as f64).log2())
}

/// Expected per-cut gap: `|D|/2 + outer_slack` for nonempty `S`, else 0.
pub fn cut_gap_formula(s_len: usize, d_len: usize) -> f64 {
    if s_len == 0 {
        0.0
    } else {
        d_len as f64 / 2.0 + outer_slack(s_len, d_len)
    }
}

/// Relaxed inner bound of cut `(S, D)` with 0-based index sets.
pub fn ddf_inner_relaxed(network: &CranNetwork, d: &[usize], s: &[usize]) -> Result<f64, GaussianError> {
    let cap = cut_capacity(network, s);
    if s.is_empty() {
        return Ok(cap);
    }
    Ok(cap + signal_term(network, d, s)? - d.len() as f64 / 2.0)
}

/// Relaxed cut-set outer bound of cut `(S, D)` with 0-based index sets.
pub fn cutset_outer_relaxed(network: &CranNetwork, d: &[usize], s: &[usize]) -> Result<f64, GaussianError> {
    let cap = cut_capacity(network, s);
    if s.is_empty() {
        return Ok(cap);
    }
    Ok(cap + signal_term(network, d, s)? + outer_slack(s.len(), d.len()))
}

/// `L/2 + min{N, L·log2 N}/2`.
pub fn gap_bound(n: usize, l: usize) -> f64 {
    let (n, l) = (n as f64, l as f64);
    l / 2.0 + n.min(l * n.log2()) / 2.0
}

/// Every cut `(S, D ≠ ∅)`, ordered by `S` then `D` lexicographically.
pub fn audit(network: &CranNetwork) -> Result<GapAudit, GaussianError> {
    let (n, l) = (network.num_bs(), network.num_users());
    let mut reports = Vec::new();
    for s in lex_subsets(n) {
        for d in lex_subsets(l).into_iter().filter(|d| !d.is_empty()) {
            let inner = ddf_inner_relaxed(network, &d, &s)?;
            let outer = cutset_outer_relaxed(network, &d, &s)?;
            reports.push(CutReport {
                s: s.iter().map(|i| i + 1).collect(),
                d: d.iter().map(|i| i + 1).collect(),
                inner,
                outer,
                gap: outer - inner,
            });
        }
    }
    let bound = gap_bound(n, l);
    let max_gap = reports.iter().map(|r| r.gap).fold(0.0, f64::max);
    let pass = max_gap <= bound + GAP_TOL && reports.iter().all(|r| r.inner <= r.outer + GAP_TOL);
    Ok(GapAudit { max_gap, reports, bound, pass })
}

/// A random network: `N, L` uniform in `1..=nmax`, `1..=lmax`, gains in
/// `[-2, 2]`, power in `[0.1, 100]`, fronthaul in `[0, 5]`, cooperation
/// in `[0, 2]`.
pub fn random_network<R: Rng>(rng: &mut R, nmax: usize, lmax: usize) -> CranNetwork {
    let n = rng.gen_range(1..=nmax.max(1));
    let l = rng.gen_range(1..=lmax.max(1));
    let g = DMatrix::from_fn(l, n, |_, _| rng.gen_range(-2.0..=2.0));
    let p = rng.gen_range(0.1..=100.0);
    let c = (0..n).map(|_| rng.gen_range(0.0..=5.0)).collect();
    let coop = DMatrix::from_fn(n, n, |k, j| if k == j { 0.0 } else { rng.gen_range(0.0..=2.0) });
    CranNetwork::new(g, p, c, coop).expect("random network is valid by construction")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceAudit {
    pub index: usize,
    pub n: usize,
    pub l: usize,
    pub p: f64,
    pub max_gap: f64,
    pub bound: f64,
    /// Largest deviation of a per-cut gap from [`cut_gap_formula`].
    pub formula_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub instances: usize,
    pub seed: u64,
    pub passed: usize,
    pub max_formula_error: f64,
    pub pass: bool,
    pub results: Vec<InstanceAudit>,
}

/// Audits `instances` random networks; instance `i` uses stream `i` of a
/// ChaCha generator seeded with `seed`.
pub fn audit_random(instances: usize, seed: u64, nmax: usize, lmax: usize) -> Result<AuditSummary, GaussianError> {
    let mut results = Vec::with_capacity(instances);
    for index in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let net = random_network(&mut rng, nmax, lmax);
        let a = audit(&net)?;
        let formula_error = a
            .reports
            .iter()
            .map(|r| (r.gap - cut_gap_formula(r.s.len(), r.d.len())).abs())
            .fold(0.0, f64::max);
        results.push(InstanceAudit {
            index,
            n: net.num_bs(),
            l: net.num_users(),
            p: net.p,
            max_gap: a.max_gap,
            bound: a.bound,
            formula_error,
            pass: a.pass && formula_error <= GAP_TOL,
        });
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let max_formula_error = results.iter().map(|r| r.formula_error).fold(0.0, f64::max);
    Ok(AuditSummary { instances, seed, passed, max_formula_error, pass: passed == instances, results })
}
