//! Jointly Gaussian vectors described by a covariance over named components.
//!
//! Every covariance carries a square-root factor `F` with `K = F Fᵀ`.
//! Information measures are ½·log2 pseudo-determinant ratios computed from
//! singular values of (conditioned) factors, which keeps nearly singular
//! covariances accurate. A deterministic dependence between the two sides
//! of a mutual information yields `+inf`.

mod network;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::atom::{Atom, AtomError, VarSet};
use crate::polytope::AtomValuation;

pub use network::{CranNetwork, NetworkJson};

const SYM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;
const RANK_REL: f64 = 1e-10;
/// Singular values below this fraction of the largest one are zero.
const SV_REL: f64 = 1e-9;
/// Floor relative to the overall factor scale, for rounding left over by
/// conditioning.
const SV_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` declared twice")]
    DuplicateComponent(String),
    #[error("matrix is {got}x{got} but components need {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("component sets must be nonempty and disjoint")]
    BadSets,
    #[error("differential entropy atom `{0}` is not supported")]
    UnsupportedAtom(String),
    #[error("atom `{0}` needs an externally supplied value")]
    UnresolvedConstant(String),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("invalid network: {0}")]
    BadNetwork(String),
    #[error("input variance {value} at BS {index} exceeds the power limit {limit}")]
    PowerExceeded { index: usize, value: f64, limit: f64 },
}

/// Eigenvalues of a symmetric matrix, ascending.
fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Rank and log2 pseudo-determinant of `R Rᵀ`, singular values of `R` at
/// or below `threshold` dropped.
fn factor_rank_logdet(r: &DMatrix<f64>, threshold: f64) -> (usize, f64) {
    singular_values(r).into_iter().filter(|s| *s > threshold).fold((0, 0.0), |(k, acc), s| (k + 1, acc + 2.0 * s.log2()))
}

/// Orthonormal basis (as columns) of the row space of `f`.
fn row_basis(f: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    if f.nrows() == 0 {
        return DMatrix::zeros(f.ncols(), 0);
    }
    let svd = f.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = (SV_REL * smax).max(floor);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > thr).collect();
    DMatrix::from_fn(f.ncols(), keep.len(), |i, j| vt[(keep[j], i)])
}

/// `f` with its component in the span of `basis` removed.
fn residual(f: &DMatrix<f64>, basis: &DMatrix<f64>) -> DMatrix<f64> {
    if basis.ncols() == 0 {
        return f.clone();
    }
    f - (f * basis) * basis.transpose()
}

/// Symmetric square root with eigenvalues below `RANK_REL·λmax` set to 0.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let d = eig.eigenvalues.map(|l| if l > RANK_REL * lmax { l.sqrt() } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Moore–Penrose inverse of a symmetric PSD matrix.
pub fn pinv_symmetric(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(m.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cut = RANK_REL * lmax;
    let mut out = DMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cut && l > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / l;
        }
    }
    out
}

/// ½·log2 det(I + G K Gᵀ).
pub fn capacity_logdet(g: &DMatrix<f64>, k: &DMatrix<f64>) -> Result<f64, GaussianError> {
    if g.ncols() != k.nrows() || k.nrows() != k.ncols() {
        return Err(GaussianError::DimensionMismatch { expected: g.ncols(), got: k.nrows() });
    }
    if g.nrows() == 0 {
        return Ok(0.0);
    }
    let m = DMatrix::identity(g.nrows(), g.nrows()) + g * k * g.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let ld: f64 = eigenvalues(&m).iter().map(|l| l.max(f64::MIN_POSITIVE).log2()).sum();
    Ok((0.5 * ld).max(0.0))
}

/// A zero-mean Gaussian vector made of named blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCovariance {
    components: Vec<(String, usize)>,
    offsets: Vec<usize>,
    matrix: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl JointCovariance {
    fn layout<S: Into<String>>(components: Vec<(S, usize)>) -> Result<(Vec<(String, usize)>, Vec<usize>, usize), GaussianError> {
        let components: Vec<(String, usize)> = components.into_iter().map(|(n, d)| (n.into(), d)).collect();
        let mut seen = BTreeSet::new();
        let mut offsets = Vec::with_capacity(components.len());
        let mut total = 0;
        for (name, d) in &components {
            if !seen.insert(name.clone()) {
                return Err(GaussianError::DuplicateComponent(name.clone()));
            }
            offsets.push(total);
            total += d;
        }
        Ok((components, offsets, total))
    }

    pub fn new<S: Into<String>>(components: Vec<(S, usize)>, matrix: DMatrix<f64>) -> Result<Self, GaussianError> {
        let (components, offsets, total) = Self::layout(components)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(GaussianError::DimensionMismatch { expected: total, got: matrix.nrows() });
        }
        let scale = matrix.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let asym = (&matrix - matrix.transpose()).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if asym > SYM_TOL * scale {
            return Err(GaussianError::NotSymmetric(asym));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        if let Some(&min) = eigenvalues(&matrix).first() {
            if min < -PSD_TOL * scale {
                return Err(GaussianError::NotPsd(min));
            }
        }
        let factor = psd_sqrt(&matrix);
        Ok(Self { components, offsets, matrix, factor })
    }

    /// The law of `F w` for white `w`: covariance `F Fᵀ`, rows of `F`
    /// split into the listed components.
    pub fn from_factor<S: Into<String>>(components: Vec<(S, usize)>, factor: DMatrix<f64>) -> Result<Self, GaussianError> {
        let (components, offsets, total) = Self::layout(components)?;
        if factor.nrows() != total {
            return Err(GaussianError::DimensionMismatch { expected: total, got: factor.nrows() });
        }
        if factor.iter().any(|x| !x.is_finite()) {
            return Err(GaussianError::NotPsd(f64::NAN));
        }
        let matrix = &factor * factor.transpose();
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { components, offsets, matrix, factor })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn components(&self) -> impl Iterator<Item = (&str, usize)> {
        self.components.iter().map(|(n, d)| (n.as_str(), *d))
    }

    fn position(&self, name: &str) -> Result<usize, GaussianError> {
        self.components.iter().position(|c| c.0 == name).ok_or_else(|| GaussianError::UnknownComponent(name.into()))
    }

    /// Scalar indices of the listed components, in component order.
    fn indices(&self, set: &[&str]) -> Result<Vec<usize>, GaussianError> {
        let mut pos = Vec::with_capacity(set.len());
        for s in set {
            pos.push(self.position(s)?);
        }
        pos.sort_unstable();
        pos.dedup();
        Ok(pos.into_iter().flat_map(|p| self.offsets[p]..self.offsets[p] + self.components[p].1).collect())
    }

    fn factor_rows(&self, rows: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), self.factor.ncols(), |i, j| self.factor[(rows[i], j)])
    }

    fn floor(&self, rows: &[usize]) -> f64 {
        let scale = rows.iter().flat_map(|&r| self.factor.row(r).iter().map(|x| x.abs()).collect::<Vec<_>>()).fold(0.0, f64::max);
        (SV_FLOOR * scale).max(f64::MIN_POSITIVE)
    }

    /// Factor of `rows` given `given`: the part orthogonal to the row
    /// space of the conditioning factor.
    fn conditional_factor(&self, rows: &[usize], given: &[usize]) -> DMatrix<f64> {
        let f = self.factor_rows(rows);
        if given.is_empty() {
            return f;
        }
        let all: Vec<usize> = rows.iter().chain(given).copied().collect();
        residual(&f, &row_basis(&self.factor_rows(given), self.floor(&all)))
    }

    /// Law of `s` given `t`.
    pub fn schur_conditional(&self, s: &[&str], t: &[&str]) -> Result<JointCovariance, GaussianError> {
        if s.iter().any(|x| t.contains(x)) {
            return Err(GaussianError::BadSets);
        }
        let (si, ti) = (self.indices(s)?, self.indices(t)?);
        let comps: Vec<(String, usize)> =
            self.components.iter().filter(|(name, _)| s.contains(&name.as_str())).cloned().collect();
        let mut out = JointCovariance::from_factor(comps, self.conditional_factor(&si, &ti))?;
        if ti.is_empty() {
            out.matrix = DMatrix::from_fn(si.len(), si.len(), |i, j| self.matrix[(si[i], si[j])]);
        }
        Ok(out)
    }

    /// `I(A;B|C)` in bits; `+inf` when `A` and `B` share a deterministic component given `C`.
    pub fn gauss_mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, GaussianError> {
        if a.is_empty() || b.is_empty() || a.iter().any(|x| b.contains(x) || c.contains(x)) || b.iter().any(|x| c.contains(x)) {
            return Err(GaussianError::BadSets);
        }
        let (ai, bi, ci) = (self.indices(a)?, self.indices(b)?, self.indices(c)?);
        let ab: Vec<usize> = ai.iter().chain(&bi).copied().collect();
        let joint = self.conditional_factor(&ab, &ci);
        let all: Vec<usize> = ab.iter().chain(&ci).copied().collect();
        // The Frobenius norm bounds the largest singular value within √rank.
        let thr = (SV_REL * joint.norm()).max(self.floor(&all));
        let na = ai.len();
        let ra_f = joint.rows(0, na).into_owned();
        let rb_f = joint.rows(na, bi.len()).into_owned();
        let (ra, la) = factor_rank_logdet(&ra_f, thr);
        let (rb, lb) = factor_rank_logdet(&rb_f, thr);
        let (rab, lab) = factor_rank_logdet(&joint, thr);
        if rab < ra + rb {
            return Ok(f64::INFINITY);
        }
        Ok((0.5 * (la + lb - lab)).max(0.0))
    }

    /// Σ h(X_i) − h(X_1..X_k) over components; `+inf` on deterministic dependence.
    pub fn total_correlation(&self, set: &[&str]) -> Result<f64, GaussianError> {
        if set.is_empty() {
            return Err(GaussianError::BadSets);
        }
        let all = self.indices(set)?;
        let joint = self.factor_rows(&all);
        let thr = (SV_REL * joint.norm()).max(self.floor(&all));
        let (rj, lj) = factor_rank_logdet(&joint, thr);
        let (mut r, mut l) = (0, 0.0);
        for s in set {
            let idx = self.indices(&[s])?;
            let (ri, li) = factor_rank_logdet(&self.factor_rows(&idx), thr);
            r += ri;
            l += li;
        }
        if rj < r {
            return Ok(f64::INFINITY);
        }
        Ok((0.5 * (l - lj)).max(0.0))
    }

    pub fn atom_value(&self, atom: &Atom) -> Result<f64, GaussianError> {
        fn v(s: &VarSet) -> Vec<&str> {
            s.iter().map(String::as_str).collect()
        }
        match atom {
            Atom::MutualInfo { a, b, given } => self.gauss_mi(&v(a), &v(b), &v(given)),
            Atom::TotalCorrelation { vars } => self.total_correlation(&v(vars)),
            Atom::Entropy { .. } => Err(GaussianError::UnsupportedAtom(atom.name())),
            Atom::Constant(c) => Err(GaussianError::UnresolvedConstant(c.clone())),
        }
    }

    /// Values every atom; constants come from `constants`.
    pub fn atom_valuation<'a, I>(&self, atoms: I, constants: &AtomValuation) -> Result<AtomValuation, GaussianError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = AtomValuation::new();
        for name in atoms {
            let atom = Atom::parse(name)?;
            let v = match &atom {
                Atom::Constant(c) => constants.get(c).ok_or_else(|| GaussianError::UnresolvedConstant(c.clone()))?,
                _ => self.atom_value(&atom)?,
            };
            out.insert(name, v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
enum Source {
    Covariance(DMatrix<f64>),
    Factor(DMatrix<f64>),
}

impl Source {
    fn dim(&self) -> usize {
        match self {
            Source::Covariance(m) | Source::Factor(m) => m.nrows(),
        }
    }
}

/// Components that are linear maps of independent Gaussian sources:
/// `component = M·s` with `s ~ N(0, blockdiag(source blocks))`.
#[derive(Debug, Clone, Default)]
pub struct LinearGaussian {
    sources: Vec<Source>,
    components: Vec<(String, Vec<(usize, DMatrix<f64>)>)>,
}

impl LinearGaussian {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an independent source with the given covariance; returns its id.
    pub fn source(&mut self, cov: DMatrix<f64>) -> usize {
        self.sources.push(Source::Covariance(cov));
        self.sources.len() - 1
    }

    /// Registers an independent source `L w` with white `w`, i.e. with
    /// covariance `L Lᵀ`. Preferred over [`Self::source`] when a factor is
    /// at hand: nearly singular sources keep their precision.
    pub fn source_factor(&mut self, factor: DMatrix<f64>) -> usize {
        self.sources.push(Source::Factor(factor));
        self.sources.len() - 1
    }

    /// Adds a component `Σ_j maps[j].1 · source(maps[j].0)`.
    pub fn component(&mut self, name: impl Into<String>, maps: Vec<(usize, DMatrix<f64>)>) {
        self.components.push((name.into(), maps));
    }

    pub fn covariance(&self) -> Result<JointCovariance, GaussianError> {
        let mut factors = Vec::with_capacity(self.sources.len());
        let mut covs = Vec::with_capacity(self.sources.len());
        for s in &self.sources {
            let (f, c) = match s {
                Source::Covariance(m) => {
                    let j = JointCovariance::new(vec![("s", m.nrows())], m.clone())?;
                    (j.factor, j.matrix)
                }
                Source::Factor(f) => (f.clone(), f * f.transpose()),
            };
            factors.push(f);
            covs.push(c);
        }
        let src_offsets: Vec<usize> = covs.iter().scan(0, |acc, c| {
            let o = *acc;
            *acc += c.nrows();
            Some(o)
        }).collect();
        let ns: usize = covs.iter().map(|c| c.nrows()).sum();
        let mut sigma = DMatrix::zeros(ns, ns);
        for (c, &o) in covs.iter().zip(&src_offsets) {
            sigma.view_mut((o, o), (c.nrows(), c.nrows())).copy_from(c);
        }
        let mut maps_all: Vec<DMatrix<f64>> = Vec::new();
        let white: usize = factors.iter().map(|f| f.ncols()).sum();
        let mut comps = Vec::new();
        let mut rows: Vec<DMatrix<f64>> = Vec::new();
        for (name, maps) in &self.components {
            let dim = maps.first().map(|m| m.1.nrows()).unwrap_or(0);
            let mut m = DMatrix::zeros(dim, white);
            let mut direct = DMatrix::zeros(dim, ns);
            for (src, map) in maps {
                let src_dim = self.sources.get(*src).map(Source::dim).ok_or(GaussianError::DimensionMismatch {
                    expected: self.sources.len(),
                    got: *src,
                })?;
                if map.nrows() != dim || map.ncols() != src_dim {
                    return Err(GaussianError::DimensionMismatch { expected: dim, got: map.nrows() });
                }
                let off: usize = factors[..*src].iter().map(|f| f.ncols()).sum();
                let f = &factors[*src];
                let mut view = m.view_mut((0, off), (dim, f.ncols()));
                view += map * f;
                let mut dv = direct.view_mut((0, src_offsets[*src]), (dim, map.ncols()));
                dv += map;
            }
            comps.push((name.clone(), dim));
            rows.push(m);
            maps_all.push(direct);
        }
        let total: usize = comps.iter().map(|c| c.1).sum();
        let mut big = DMatrix::zeros(total, white);
        let mut r = 0;
        for m in &rows {
            big.view_mut((r, 0), (m.nrows(), white)).copy_from(m);
            r += m.nrows();
        }
        let mut direct = DMatrix::zeros(total, ns);
        let mut r = 0;
        for m in &maps_all {
            direct.view_mut((r, 0), (m.nrows(), ns)).copy_from(m);
            r += m.nrows();
        }
        let matrix = &direct * sigma * direct.transpose();
        let mut out = JointCovariance::from_factor(comps, big)?;
        out.matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(out)
    }
}
