use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::GaussianError;

/// An N-BS L-user Gaussian C-RAN: `Y = G X + Z` with unit-variance noise,
/// per-BS power `p`, fronthaul capacities `c[k]` and cooperation
/// capacities `ccoop[(k, j)]` on the link from BS `j` to BS `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CranNetwork {
    pub g: DMatrix<f64>,
    pub p: f64,
    pub c: Vec<f64>,
    pub ccoop: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    #[serde(rename = "G")]
    pub g: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "Ccoop", default)]
    pub ccoop: Option<Vec<Vec<f64>>>,
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, GaussianError> {
    let nr = rows.len();
    let nc = rows.first().map(Vec::len).unwrap_or(0);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(GaussianError::BadNetwork(format!("{what} rows have different lengths")));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

impl CranNetwork {
    pub fn new(g: DMatrix<f64>, p: f64, c: Vec<f64>, ccoop: DMatrix<f64>) -> Result<Self, GaussianError> {
        let n = g.ncols();
        let bad = |m: &str| Err(GaussianError::BadNetwork(m.to_string()));
        if n == 0 || g.nrows() == 0 {
            return bad("G must have at least one row and one column");
        }
        if !(p >= 0.0 && p.is_finite()) {
            return bad("P must be finite and nonnegative");
        }
        if c.len() != n {
            return bad("C must have one entry per BS");
        }
        if ccoop.nrows() != n || ccoop.ncols() != n {
            return bad("Ccoop must be N x N");
        }
        if c.iter().chain(ccoop.iter()).any(|x| !(*x >= 0.0)) {
            return bad("capacities must be nonnegative");
        }
        if (0..n).any(|k| ccoop[(k, k)] != 0.0) {
            return bad("Ccoop must have a zero diagonal");
        }
        if g.iter().any(|x| !x.is_finite()) {
            return bad("G entries must be finite");
        }
        Ok(Self { g, p, c, ccoop })
    }

    /// The 2x2 symmetric instance: unit direct gains, cross gains
    /// `g12` (BS 2 to user 1) and `g21`, fronthaul `cap`, cooperation `t`.
    pub fn symmetric(p: f64, g12: f64, g21: f64, cap: f64, t: f64) -> Result<Self, GaussianError> {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, g12, g21, 1.0]);
        let ccoop = DMatrix::from_row_slice(2, 2, &[0.0, t, t, 0.0]);
        Self::new(g, p, vec![cap, cap], ccoop)
    }

    pub fn num_bs(&self) -> usize {
        self.g.ncols()
    }

    pub fn num_users(&self) -> usize {
        self.g.nrows()
    }

    /// `C_kj`, the link from BS `j` to BS `k` (0-based).
    pub fn coop(&self, k: usize, j: usize) -> f64 {
        self.ccoop[(k, j)]
    }

    pub fn from_json(json: &NetworkJson) -> Result<Self, GaussianError> {
        let g = rows_to_matrix(&json.g, "G")?;
        let n = g.ncols();
        let ccoop = match &json.ccoop {
            Some(rows) => rows_to_matrix(rows, "Ccoop")?,
            None => DMatrix::zeros(n, n),
        };
        Self::new(g, json.p, json.c.clone(), ccoop)
    }

    pub fn to_json(&self) -> NetworkJson {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        NetworkJson { g: rows(&self.g), p: self.p, c: self.c.clone(), ccoop: Some(rows(&self.ccoop)) }
    }
}
