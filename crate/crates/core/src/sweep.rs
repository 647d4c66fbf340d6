//! Sum-rate sweeps over fronthaul and cooperation capacities.
//!
//! For each cooperation capacity `T` and scheme, the fronthaul grid is
//! walked upwards and every point is warm-started from the previous
//! optimum. Regions only grow with `C`, so each curve is nondecreasing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::{CranNetwork, GaussianError};
use crate::regions::cutset_symmetric_sumrate;
use crate::schemes::{optimize_scheme_warm, rsum_star, Budget, Scheme, SchemeError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Curve label for time sharing between the three data-sharing cases.
pub const TIMESHARE_ID: &str = "GDS-TS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "C_grid")]
    pub c_grid: Vec<f64>,
    #[serde(rename = "T")]
    pub t: OneOrMany,
    /// Scheme ids (`GDS-I`, `GDS-II`, `GDS-III`, `GCOMP`) or `GDS-TS`.
    pub schemes: Vec<String>,
    #[serde(default)]
    pub budget: Budget,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        serde_json::from_str(text).map_err(|e| SweepError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    fn invalid(field: &'static str, message: impl Into<String>) -> SweepError {
        SweepError::Invalid { field, message: message.into() }
    }

    /// Checks the grids and scheme list; returns the schemes to optimize
    /// and whether the time-share curve is requested.
    pub fn validate(&self) -> Result<(Vec<Scheme>, bool), SweepError> {
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(Self::invalid("P", "must be finite and nonnegative"));
        }
        if self.g.len() != 2 || self.g.iter().any(|r| r.len() != 2) {
            return Err(Self::invalid("G", "must be a 2x2 matrix"));
        }
        let grid_ok = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !grid_ok(&self.c_grid) {
            return Err(Self::invalid("C_grid", "must be a nonempty list of nonnegative numbers"));
        }
        if !grid_ok(&self.t.values()) {
            return Err(Self::invalid("T", "must be a nonnegative number or a nonempty list of them"));
        }
        if self.schemes.is_empty() {
            return Err(Self::invalid("schemes", "must list at least one scheme"));
        }
        if self.budget.restarts == 0 || self.budget.max_evals == 0 {
            return Err(Self::invalid("budget", "restarts and max_evals must be positive"));
        }
        let mut wanted = Vec::new();
        let mut timeshare = false;
        for s in &self.schemes {
            if s.eq_ignore_ascii_case(TIMESHARE_ID) {
                timeshare = true;
                continue;
            }
            let scheme: Scheme = s.parse().map_err(|_| Self::invalid("schemes", format!("unknown scheme `{s}`")))?;
            if !wanted.contains(&scheme) {
                wanted.push(scheme);
            }
        }
        if timeshare {
            for s in [Scheme::GdsI, Scheme::GdsII, Scheme::GdsIII] {
                if !wanted.contains(&s) {
                    wanted.push(s);
                }
            }
        }
        Ok((wanted, timeshare))
    }

    fn network(&self, c: f64, t: f64) -> Result<CranNetwork, GaussianError> {
        let g = DMatrix::from_fn(2, 2, |i, j| self.g[i][j]);
        CranNetwork::new(g, self.p, vec![c, c], DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub scheme: String,
    pub sum_rate: f64,
    pub cutset: f64,
    pub rsum_star: f64,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Runs every `(C, T, scheme)` point. Rows are sorted by `(C, T, scheme)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    let (schemes, timeshare) = config.validate()?;
    let budget = Budget { seed: config.seed, ..config.budget };
    let reference = config.network(1.0, 0.0)?;
    let rstar = rsum_star(&reference, Budget { restarts: budget.restarts.max(64), ..budget })?;
    let cs = sorted_unique(config.c_grid.clone());
    let ts = sorted_unique(config.t.values());
    let listed = |s: Scheme| config.schemes.iter().any(|x| x.eq_ignore_ascii_case(s.id()));

    let mut values: BTreeMap<(usize, usize, Scheme), f64> = BTreeMap::new();
    for (ti, &t) in ts.iter().enumerate() {
        for &scheme in &schemes {
            let mut warm: Vec<Vec<f64>> = Vec::new();
            for (ci, &c) in cs.iter().enumerate() {
                let net = config.network(c, t)?;
                let e = optimize_scheme_warm(scheme, &net, budget, &warm)?;
                values.insert((ci, ti, scheme), e.sum_rate);
                warm = vec![e.theta];
            }
        }
    }

    let mut rows = Vec::new();
    for (ci, &c) in cs.iter().enumerate() {
        for (ti, &t) in ts.iter().enumerate() {
            let cutset = cutset_symmetric_sumrate(c, rstar);
            let row = |scheme: &str, v: f64| SweepRow { c, t, scheme: scheme.to_string(), sum_rate: v, cutset, rsum_star: rstar };
            for &s in &schemes {
                if listed(s) {
                    rows.push(row(s.id(), values[&(ci, ti, s)]));
                }
            }
            if timeshare {
                let best = [Scheme::GdsI, Scheme::GdsII, Scheme::GdsIII]
                    .iter()
                    .map(|s| values[&(ci, ti, *s)])
                    .fold(0.0, f64::max);
                rows.push(row(TIMESHARE_ID, best));
            }
        }
    }
    rows.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.t.total_cmp(&b.t)).then(a.scheme.cmp(&b.scheme)));
    Ok(rows)
}

/// CSV with header `C,T,scheme,sum_rate,cutset,rsum_star`, six decimals.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("C,T,scheme,sum_rate,cutset,rsum_star\n");
    for r in rows {
        let _ = writeln!(out, "{:.6},{:.6},{},{:.6},{:.6},{:.6}", r.c, r.t, r.scheme, r.sum_rate, r.cutset, r.rsum_star);
    }
    out
}
