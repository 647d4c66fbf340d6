//! Gaussian evaluation of the cooperative schemes.
//!
//! Each scheme pairs an explicit two-rate region with a jointly Gaussian
//! auxiliary construction. [`optimize_scheme`] searches the construction's
//! parameters for the largest sum rate; [`rsum_star`] gives the infinite
//! fronthaul reference by optimizing dirty-paper coding directly.

mod construct;
mod optimize;
mod sumrate;

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, RowVector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::Atom;
use crate::gaussian::{CranNetwork, GaussianError, JointCovariance};
use crate::polytope::{rat_to_f64, AtomValuation, ConstraintSystem, NumericSystem, PolytopeError};
use crate::regions::{
    capacity_valuation, gcomp_theorem2_region, scheme1_region, scheme2_region, scheme3_region, scheme3_side_conditions,
};

pub use construct::{
    build_joint_cov, build_joint_cov_theta, decode, dimension, dirty_paper_precoder, project, scales, CompressionParams, DescriptionIIIParams,
    DescriptionIIParams, DescriptionIParams, Mat2, SchemeParams,
};
pub use optimize::{multistart, pattern_search, Budget, SearchResult, INITIAL_STEP, MIN_STEP, SHRINK};
pub use sumrate::max_sum_rate;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("Gaussian schemes are defined for 2 BSs and 2 users (got N = {n}, L = {l})")]
    Shape { n: usize, l: usize },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "GDS-I")]
    GdsI,
    #[serde(rename = "GDS-II")]
    GdsII,
    #[serde(rename = "GDS-III")]
    GdsIII,
    #[serde(rename = "GCOMP")]
    Gcomp,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::GdsI, Scheme::GdsII, Scheme::GdsIII, Scheme::Gcomp];

    pub fn id(self) -> &'static str {
        match self {
            Scheme::GdsI => "GDS-I",
            Scheme::GdsII => "GDS-II",
            Scheme::GdsIII => "GDS-III",
            Scheme::Gcomp => "GCOMP",
        }
    }

    /// The explicit two-rate region the construction is plugged into.
    pub fn region(self) -> ConstraintSystem {
        match self {
            Scheme::GdsI => scheme1_region(),
            Scheme::GdsII => scheme2_region(),
            Scheme::GdsIII => scheme3_region(),
            Scheme::Gcomp => gcomp_theorem2_region(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = SchemeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemeError::UnknownScheme(s.to_string()))
    }
}

/// A region with capacities already substituted: each right-hand side is
/// `constant + Σ coef·atom`.
struct CompiledRegion {
    rows: Vec<Vec<f64>>,
    constant: Vec<f64>,
    terms: Vec<Vec<(usize, f64)>>,
    atoms: Vec<Atom>,
    names: Vec<String>,
}

impl CompiledRegion {
    fn new(sys: &ConstraintSystem, constants: &AtomValuation) -> Result<Self, SchemeError> {
        let mut names: Vec<String> = Vec::new();
        let mut atoms = Vec::new();
        let mut rows = Vec::new();
        let mut constant = Vec::new();
        let mut terms = Vec::new();
        for c in sys.constraints() {
            rows.push(sys.variables().iter().map(|v| rat_to_f64(&c.coefficient(v))).collect());
            let mut k = rat_to_f64(&c.rhs().constant_term());
            let mut t = Vec::new();
            for (name, coef) in c.rhs().terms() {
                let coef = rat_to_f64(coef);
                match Atom::parse(name).map_err(GaussianError::from)? {
                    Atom::Constant(cn) => {
                        k += coef * constants.get(&cn).ok_or(GaussianError::UnresolvedConstant(cn))?;
                    }
                    atom => {
                        let idx = match names.iter().position(|n| n == name) {
                            Some(i) => i,
                            None => {
                                names.push(name.to_string());
                                atoms.push(atom);
                                names.len() - 1
                            }
                        };
                        t.push((idx, coef));
                    }
                }
            }
            constant.push(k);
            terms.push(t);
        }
        Ok(Self { rows, constant, terms, atoms, names })
    }

    fn resolve(&self, values: &[f64]) -> NumericSystem {
        let rhs = self
            .constant
            .iter()
            .zip(&self.terms)
            .map(|(k, t)| t.iter().fold(*k, |acc, (i, c)| acc + c * values[*i]))
            .collect();
        NumericSystem { variables: vec!["R1".into(), "R2".into()], rows: self.rows.clone(), rhs }
    }
}

/// Evaluates the sum rate of one scheme on one network, caching the
/// compiled region.
pub struct SchemeEvaluator {
    scheme: Scheme,
    network: CranNetwork,
    region: CompiledRegion,
}

impl SchemeEvaluator {
    pub fn new(scheme: Scheme, network: &CranNetwork) -> Result<Self, SchemeError> {
        if network.num_bs() != 2 || network.num_users() != 2 {
            return Err(SchemeError::Shape { n: network.num_bs(), l: network.num_users() });
        }
        let region = CompiledRegion::new(&scheme.region(), &capacity_valuation(network))?;
        Ok(Self { scheme, network: network.clone(), region })
    }

    /// Atom values and the resolved region at the given construction.
    pub fn resolve(&self, params: &SchemeParams) -> Result<(AtomValuation, NumericSystem), SchemeError> {
        if params.scheme() != self.scheme {
            return Err(SchemeError::BadParameters(format!("{} parameters for {}", params.scheme(), self.scheme)));
        }
        let cov = build_joint_cov(params, &self.network)?;
        let values: Vec<f64> = self.region.atoms.iter().map(|a| cov.atom_value(a)).collect::<Result<_, _>>()?;
        let val = self.region.names.iter().cloned().zip(values.iter().copied()).collect();
        Ok((val, self.region.resolve(&values)))
    }

    /// Largest `R1 + R2` in the region; zero when scheme III's side
    /// conditions fail or the region is empty.
    pub fn sumrate(&self, params: &SchemeParams) -> Result<f64, SchemeError> {
        if params.scheme() != self.scheme {
            return Err(SchemeError::BadParameters(format!("{} parameters for {}", params.scheme(), self.scheme)));
        }
        self.sumrate_of(&build_joint_cov(params, &self.network)?)
    }

    pub fn sumrate_theta(&self, theta: &[f64]) -> Result<f64, SchemeError> {
        let cov = build_joint_cov_theta(self.scheme, theta, &self.network)?;
        self.sumrate_of(&cov)
    }

    fn sumrate_of(&self, cov: &JointCovariance) -> Result<f64, SchemeError> {
        let values: Vec<f64> = self.region.atoms.iter().map(|a| cov.atom_value(a)).collect::<Result<_, _>>()?;
        if self.scheme == Scheme::GdsIII {
            let val: AtomValuation = self.region.names.iter().cloned().zip(values.iter().copied()).collect();
            if !scheme3_side_conditions(&val)? {
                return Ok(0.0);
            }
        }
        Ok(max_sum_rate(&self.region.resolve(&values)))
    }
}

/// Sum rate of a scheme at fixed parameters.
pub fn scheme_sumrate(params: &SchemeParams, network: &CranNetwork) -> Result<f64, SchemeError> {
    SchemeEvaluator::new(params.scheme(), network)?.sumrate(params)
}

/// Best construction found for a scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeEvaluation {
    pub scheme: Scheme,
    pub params: SchemeParams,
    /// Raw parameter vector; usable as a warm start.
    pub theta: Vec<f64>,
    pub sum_rate: f64,
    pub restarts: usize,
    pub best_start: usize,
    pub evaluations: usize,
}

/// Multistart optimization of a scheme's sum rate.
pub fn optimize_scheme(scheme: Scheme, network: &CranNetwork, budget: Budget) -> Result<SchemeEvaluation, SchemeError> {
    optimize_scheme_warm(scheme, network, budget, &[])
}

/// As [`optimize_scheme`], refining the given parameter vectors first.
pub fn optimize_scheme_warm(
    scheme: Scheme,
    network: &CranNetwork,
    budget: Budget,
    warm: &[Vec<f64>],
) -> Result<SchemeEvaluation, SchemeError> {
    let eval = SchemeEvaluator::new(scheme, network)?;
    if let Some(w) = warm.iter().find(|w| w.len() != dimension(scheme)) {
        return Err(SchemeError::BadParameters(format!("warm start of length {}", w.len())));
    }
    let p = network.p;
    let sc = scales(scheme, p);
    let f = |theta: &[f64]| eval.sumrate_theta(theta).unwrap_or(f64::NEG_INFINITY);
    let proj = |theta: &mut [f64]| project(scheme, theta, p);
    let r = multistart(&f, &proj, &sc, warm, budget);
    let mut theta = r.theta;
    project(scheme, &mut theta, p);
    let params = decode(scheme, &theta)?;
    let sum_rate = eval.sumrate_theta(&theta)?.max(0.0);
    Ok(SchemeEvaluation {
        scheme,
        params,
        theta,
        sum_rate,
        restarts: budget.restarts + warm.len(),
        best_start: r.best_start,
        evaluations: r.evaluations,
    })
}

/// Time sharing between the three data-sharing special cases at one
/// instance: the best of their sum rates.
pub fn gds_timeshare_sumrate(network: &CranNetwork, budget: Budget) -> Result<f64, SchemeError> {
    let mut best = 0.0f64;
    for s in [Scheme::GdsI, Scheme::GdsII, Scheme::GdsIII] {
        best = best.max(optimize_scheme(s, network, budget)?.sum_rate);
    }
    Ok(best)
}

/// Dirty-paper sum rate of the two encoding orders for user covariances
/// `k1`, `k2`; the better order is returned.
pub fn dpc_sum_rate(g: &[RowVector2<f64>; 2], k1: &Matrix2<f64>, k2: &Matrix2<f64>) -> f64 {
    let q = |gk: &RowVector2<f64>, k: &Matrix2<f64>| (gk * k * gk.transpose())[(0, 0)];
    // The user encoded last sees no interference from the other.
    let order = |first: usize, kf: &Matrix2<f64>, kl: &Matrix2<f64>| {
        let last = 1 - first;
        let rf = 0.5 * ((1.0 + q(&g[first], kf) + q(&g[first], kl)) / (1.0 + q(&g[first], kl))).log2();
        let rl = 0.5 * (1.0 + q(&g[last], kl)).log2();
        rf + rl
    };
    order(0, k1, k2).max(order(1, k2, k1))
}

/// Sum capacity of the two-user broadcast channel with per-antenna power
/// `P`: dirty-paper coding optimized over both orders and all `(K1, K2)`.
pub fn rsum_star(network: &CranNetwork, budget: Budget) -> Result<f64, SchemeError> {
    if network.num_bs() != 2 || network.num_users() != 2 {
        return Err(SchemeError::Shape { n: network.num_bs(), l: network.num_users() });
    }
    let g = [
        RowVector2::new(network.g[(0, 0)], network.g[(0, 1)]),
        RowVector2::new(network.g[(1, 0)], network.g[(1, 1)]),
    ];
    let gram = |t: &[f64]| {
        let l = Matrix2::new(t[0], 0.0, t[1], t[2]);
        l * l.transpose()
    };
    let p = network.p;
    let f = |t: &[f64]| dpc_sum_rate(&g, &gram(&t[0..3]), &gram(&t[3..6]));
    let proj = |t: &mut [f64]| project(Scheme::GdsI, t, p);
    let r = multistart(&f, &proj, &scales(Scheme::GdsI, p), &[], budget);
    Ok(r.value.max(0.0))
}
