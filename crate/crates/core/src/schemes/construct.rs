//! Gaussian auxiliary constructions and their parameterization.
//!
//! Every construction is driven by a flat parameter vector `theta`:
//! covariances enter through lower-triangular factors `K = L Lᵀ`, so any
//! vector decodes to a valid construction. [`project`] rescales a vector
//! onto the per-BS power constraint.

use nalgebra::{DMatrix, Matrix2, RowVector2, Vector2};
use serde::{Deserialize, Serialize};

use crate::gaussian::{CranNetwork, GaussianError, JointCovariance, LinearGaussian};

use super::{Scheme, SchemeError};

pub type Mat2 = [[f64; 2]; 2];

fn to_m(m: &Mat2) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn from_m(m: &Matrix2<f64>) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn dyn_m(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Common auxiliaries: `U0 = S1`, `V0 = S2 + A S1`, `X = S1 + S2`, with `A`
/// the dirty-paper precoder for user 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptionIParams {
    pub k1: Mat2,
    pub k2: Mat2,
}

/// Six iid standard auxiliaries; each BS sends a linear combination of the
/// four it knows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptionIIParams {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

/// Private auxiliaries: `[U1;U2] = S1`, `[V1;V2] = S2 + A S1`,
/// `X = (I + A) S1 + S2` with a free precoder `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptionIIIParams {
    pub k1: Mat2,
    pub k2: Mat2,
    pub a: Mat2,
}

/// Compression: `U1 = S1`, `U2 = S2 + A S1`, `X = S1 + S2 + W` and a unit
/// variance cloud center `X0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionParams {
    pub k1: Mat2,
    pub k2: Mat2,
    pub kw: Mat2,
    /// Covariances of `X0` with `(S1, S2, W)`, six entries.
    pub x0cov: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "description", rename_all = "snake_case")]
pub enum SchemeParams {
    I(DescriptionIParams),
    II(DescriptionIIParams),
    III(DescriptionIIIParams),
    Compression(CompressionParams),
}

impl SchemeParams {
    pub fn scheme(&self) -> Scheme {
        match self {
            SchemeParams::I(_) => Scheme::GdsI,
            SchemeParams::II(_) => Scheme::GdsII,
            SchemeParams::III(_) => Scheme::GdsIII,
            SchemeParams::Compression(_) => Scheme::Gcomp,
        }
    }

    /// Per-BS transmit variances.
    pub fn input_variances(&self) -> [f64; 2] {
        match self {
            SchemeParams::I(p) => {
                let k = to_m(&p.k1) + to_m(&p.k2);
                [k[(0, 0)], k[(1, 1)]]
            }
            SchemeParams::II(p) => [p.a.iter().map(|v| v * v).sum(), p.b.iter().map(|v| v * v).sum()],
            SchemeParams::III(p) => {
                let t = Matrix2::identity() + to_m(&p.a);
                let k = t * to_m(&p.k1) * t.transpose() + to_m(&p.k2);
                [k[(0, 0)], k[(1, 1)]]
            }
            SchemeParams::Compression(p) => {
                let k = to_m(&p.k1) + to_m(&p.k2) + to_m(&p.kw);
                [k[(0, 0)], k[(1, 1)]]
            }
        }
    }
}

/// Number of entries of `theta` for a scheme.
pub fn dimension(scheme: Scheme) -> usize {
    match scheme {
        Scheme::GdsI => 6,
        Scheme::GdsII => 8,
        Scheme::GdsIII => 10,
        Scheme::Gcomp => 15,
    }
}

/// Natural size of each coordinate of `theta` at power `p`, used for
/// random starts and step sizes.
pub fn scales(scheme: Scheme, p: f64) -> Vec<f64> {
    let s = p.sqrt();
    match scheme {
        Scheme::GdsI | Scheme::GdsII => vec![s; dimension(scheme)],
        Scheme::GdsIII => [vec![s; 6], vec![1.0; 4]].concat(),
        Scheme::Gcomp => [vec![s; 9], vec![1.0 / s.max(1e-6); 6]].concat(),
    }
}

fn chol(t: &[f64]) -> Matrix2<f64> {
    Matrix2::new(t[0], 0.0, t[1], t[2])
}

fn gram(t: &[f64]) -> Matrix2<f64> {
    let l = chol(t);
    l * l.transpose()
}

/// Scales row `i` of a lower-triangular factor stored as `[l00, l10, l11]`.
fn scale_rows(t: &mut [f64], d: [f64; 2]) {
    t[0] *= d[0];
    t[1] *= d[1];
    t[2] *= d[1];
}

fn row_energy(t: &[f64]) -> [f64; 2] {
    [t[0] * t[0], t[1] * t[1] + t[2] * t[2]]
}

fn shrink(var: [f64; 2], p: f64) -> [f64; 2] {
    var.map(|v| if v > p && v > 0.0 { (p / v).sqrt() } else { 1.0 })
}

/// Block covariance `blockdiag(K1, K2, Kw)` of the compression sources.
fn compression_sigma(t: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(6, 6);
    for (b, off) in [(0, 0), (3, 2), (6, 4)] {
        let k = gram(&t[b..b + 3]);
        for i in 0..2 {
            for j in 0..2 {
                s[(off + i, off + j)] = k[(i, j)];
            }
        }
    }
    s
}

/// Moves `theta` onto the power constraint by rescaling each antenna, and
/// for compression keeps `Var(cᵀ s) <= 1`.
pub fn project(scheme: Scheme, theta: &mut [f64], p: f64) {
    match scheme {
        Scheme::GdsI => {
            let (e1, e2) = (row_energy(&theta[0..3]), row_energy(&theta[3..6]));
            let d = shrink([e1[0] + e2[0], e1[1] + e2[1]], p);
            scale_rows(&mut theta[0..3], d);
            scale_rows(&mut theta[3..6], d);
        }
        Scheme::GdsII => {
            for block in theta.chunks_mut(4) {
                let e: f64 = block.iter().map(|v| v * v).sum();
                if e > p && e > 0.0 {
                    let f = (p / e).sqrt();
                    block.iter_mut().for_each(|v| *v *= f);
                }
            }
        }
        Scheme::GdsIII => {
            let a = Matrix2::new(theta[6], theta[7], theta[8], theta[9]);
            let t = Matrix2::identity() + a;
            let k = t * gram(&theta[0..3]) * t.transpose() + gram(&theta[3..6]);
            let d = shrink([k[(0, 0)], k[(1, 1)]], p);
            if d != [1.0, 1.0] {
                scale_rows(&mut theta[0..3], d);
                scale_rows(&mut theta[3..6], d);
                let dm = Matrix2::new(d[0], 0.0, 0.0, d[1]);
                let dinv = Matrix2::new(1.0 / d[0], 0.0, 0.0, 1.0 / d[1]);
                let a2 = dm * t * dinv - Matrix2::identity();
                theta[6..10].copy_from_slice(&[a2[(0, 0)], a2[(0, 1)], a2[(1, 0)], a2[(1, 1)]]);
            }
        }
        Scheme::Gcomp => {
            let e: Vec<[f64; 2]> = (0..3).map(|b| row_energy(&theta[3 * b..3 * b + 3])).collect();
            let d = shrink([e.iter().map(|x| x[0]).sum(), e.iter().map(|x| x[1]).sum()], p);
            for b in 0..3 {
                scale_rows(&mut theta[3 * b..3 * b + 3], d);
            }
            let sigma = compression_sigma(theta);
            let c = DMatrix::from_column_slice(6, 1, &theta[9..15]);
            let v = (c.transpose() * &sigma * &c)[(0, 0)];
            if v > 1.0 {
                let f = 1.0 / v.sqrt();
                theta[9..15].iter_mut().for_each(|x| *x *= f);
            }
        }
    }
}

/// The construction encoded by `theta` (no projection applied).
pub fn decode(scheme: Scheme, theta: &[f64]) -> Result<SchemeParams, SchemeError> {
    if theta.len() != dimension(scheme) {
        return Err(SchemeError::BadParameters(format!(
            "{scheme} needs {} parameters, got {}",
            dimension(scheme),
            theta.len()
        )));
    }
    Ok(match scheme {
        Scheme::GdsI => SchemeParams::I(DescriptionIParams { k1: from_m(&gram(&theta[0..3])), k2: from_m(&gram(&theta[3..6])) }),
        Scheme::GdsII => SchemeParams::II(DescriptionIIParams {
            a: [theta[0], theta[1], theta[2], theta[3]],
            b: [theta[4], theta[5], theta[6], theta[7]],
        }),
        Scheme::GdsIII => SchemeParams::III(DescriptionIIIParams {
            k1: from_m(&gram(&theta[0..3])),
            k2: from_m(&gram(&theta[3..6])),
            a: [[theta[6], theta[7]], [theta[8], theta[9]]],
        }),
        Scheme::Gcomp => {
            let sigma = compression_sigma(theta);
            let c = DMatrix::from_column_slice(6, 1, &theta[9..15]);
            let cov = &sigma * c;
            SchemeParams::Compression(CompressionParams {
                k1: from_m(&gram(&theta[0..3])),
                k2: from_m(&gram(&theta[3..6])),
                kw: from_m(&gram(&theta[6..9])),
                x0cov: [cov[0], cov[1], cov[2], cov[3], cov[4], cov[5]],
            })
        }
    })
}

fn check_two_by_two(network: &CranNetwork) -> Result<(), SchemeError> {
    if network.num_bs() != 2 || network.num_users() != 2 {
        return Err(SchemeError::Shape { n: network.num_bs(), l: network.num_users() });
    }
    Ok(())
}

fn check_power(params: &SchemeParams, p: f64) -> Result<(), SchemeError> {
    for (i, v) in params.input_variances().into_iter().enumerate() {
        if v > p * (1.0 + 1e-9) + 1e-12 {
            return Err(GaussianError::PowerExceeded { index: i + 1, value: v, limit: p }.into());
        }
    }
    Ok(())
}

fn dm(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(r, c, v)
}

/// `K2 g2ᵀ (1 + g2 (K2 + extra) g2ᵀ)⁻¹ g2`.
pub fn dirty_paper_precoder(k2: &Matrix2<f64>, extra: &Matrix2<f64>, g2: &RowVector2<f64>) -> Matrix2<f64> {
    let denom = 1.0 + (g2 * (k2 + extra) * g2.transpose())[(0, 0)];
    let col: Vector2<f64> = k2 * g2.transpose() / denom;
    col * g2
}

/// Adds `Xk`, `Yk` for `X = Σ maps` and `Y = G X + Z`.
fn add_outputs(lg: &mut LinearGaussian, g: &DMatrix<f64>, x_maps: Vec<(usize, DMatrix<f64>)>) {
    let z = lg.source(DMatrix::identity(2, 2));
    for k in 0..2 {
        let ek = dm(1, 2, if k == 0 { &[1.0, 0.0] } else { &[0.0, 1.0] });
        lg.component(format!("X{}", k + 1), x_maps.iter().map(|(s, m)| (*s, &ek * m)).collect());
    }
    for k in 0..2 {
        let gk = g.rows(k, 1).into_owned();
        let mut maps: Vec<(usize, DMatrix<f64>)> = x_maps.iter().map(|(s, m)| (*s, &gk * m)).collect();
        let ek = dm(1, 2, if k == 0 { &[1.0, 0.0] } else { &[0.0, 1.0] });
        maps.push((z, ek));
        lg.component(format!("Y{}", k + 1), maps);
    }
}

/// Square-root data decoded straight from `theta`: the triangular factors
/// of the source covariances and, for compression, the coefficients `c`.
struct Exact {
    chol: Vec<Matrix2<f64>>,
    c: Option<DMatrix<f64>>,
}

/// The joint covariance of the auxiliaries, `X1, X2` and `Y1, Y2` for
/// `Y = G X + Z` with unit-variance independent noise.
pub fn build_joint_cov(params: &SchemeParams, network: &CranNetwork) -> Result<JointCovariance, SchemeError> {
    assemble(params, None, network)
}

/// As [`build_joint_cov`] for the construction encoded by `theta`, using
/// its covariance factors directly. More accurate near singular covariances.
pub fn build_joint_cov_theta(scheme: Scheme, theta: &[f64], network: &CranNetwork) -> Result<JointCovariance, SchemeError> {
    let params = decode(scheme, theta)?;
    let exact = match scheme {
        Scheme::GdsI => Exact { chol: vec![chol(&theta[0..3]), chol(&theta[3..6])], c: None },
        Scheme::GdsII => Exact { chol: vec![], c: None },
        Scheme::GdsIII => Exact { chol: vec![chol(&theta[0..3]), chol(&theta[3..6])], c: None },
        Scheme::Gcomp => Exact {
            chol: vec![chol(&theta[0..3]), chol(&theta[3..6]), chol(&theta[6..9])],
            c: Some(DMatrix::from_column_slice(6, 1, &theta[9..15])),
        },
    };
    assemble(&params, Some(&exact), network)
}

fn assemble(params: &SchemeParams, exact: Option<&Exact>, network: &CranNetwork) -> Result<JointCovariance, SchemeError> {
    check_two_by_two(network)?;
    check_power(params, network.p)?;
    let g = &network.g;
    let g2 = RowVector2::new(g[(1, 0)], g[(1, 1)]);
    let id = || DMatrix::<f64>::identity(2, 2);
    let mut lg = LinearGaussian::new();
    // Source `i` with covariance `k`, through its factor when known.
    let source = |lg: &mut LinearGaussian, i: usize, k: &Matrix2<f64>| match exact {
        Some(e) => lg.source_factor(dyn_m(&e.chol[i])),
        None => lg.source(dyn_m(k)),
    };
    match params {
        SchemeParams::I(p) => {
            let (k1, k2) = (to_m(&p.k1), to_m(&p.k2));
            let a = dyn_m(&dirty_paper_precoder(&k2, &Matrix2::zeros(), &g2));
            let s1 = source(&mut lg, 0, &k1);
            let s2 = source(&mut lg, 1, &k2);
            lg.component("U0", vec![(s1, id())]);
            lg.component("V0", vec![(s2, id()), (s1, a)]);
            add_outputs(&mut lg, g, vec![(s1, id()), (s2, id())]);
        }
        SchemeParams::II(p) => {
            let aux = lg.source(DMatrix::identity(6, 6));
            for (k, name) in ["U0", "V0", "U1", "V1", "U2", "V2"].iter().enumerate() {
                let mut e = DMatrix::zeros(1, 6);
                e[(0, k)] = 1.0;
                lg.component(*name, vec![(aux, e)]);
            }
            // Aux order U0, V0, U1, V1, U2, V2.
            let mut m = DMatrix::zeros(2, 6);
            for j in 0..4 {
                m[(0, j)] = p.a[j];
            }
            m[(1, 0)] = p.b[0];
            m[(1, 1)] = p.b[1];
            m[(1, 4)] = p.b[2];
            m[(1, 5)] = p.b[3];
            add_outputs(&mut lg, g, vec![(aux, m)]);
        }
        SchemeParams::III(p) => {
            let a = dyn_m(&to_m(&p.a));
            let s1 = source(&mut lg, 0, &to_m(&p.k1));
            let s2 = source(&mut lg, 1, &to_m(&p.k2));
            let row = |k: usize| dm(1, 2, if k == 0 { &[1.0, 0.0] } else { &[0.0, 1.0] });
            lg.component("U1", vec![(s1, row(0))]);
            lg.component("U2", vec![(s1, row(1))]);
            lg.component("V1", vec![(s2, row(0)), (s1, row(0) * &a)]);
            lg.component("V2", vec![(s2, row(1)), (s1, row(1) * &a)]);
            add_outputs(&mut lg, g, vec![(s1, id() + &a), (s2, id())]);
        }
        SchemeParams::Compression(p) => {
            let (k1, k2, kw) = (to_m(&p.k1), to_m(&p.k2), to_m(&p.kw));
            let a = dyn_m(&dirty_paper_precoder(&k2, &kw, &g2));
            // X0 = cᵀ s + n0; without `theta`, c solves Σ c = x0cov.
            let (c, resid) = match exact.and_then(|e| e.c.as_ref().map(|c| (e, c))) {
                Some((e, c)) => {
                    let mut lt = DMatrix::zeros(6, 6);
                    for (b, l) in e.chol.iter().enumerate() {
                        lt.view_mut((2 * b, 2 * b), (2, 2)).copy_from(&dyn_m(&l.transpose()));
                    }
                    (c.clone(), 1.0 - (lt * c).norm_squared())
                }
                None => {
                    let mut sigma = DMatrix::zeros(6, 6);
                    for (k, off) in [(&k1, 0), (&k2, 2), (&kw, 4)] {
                        sigma.view_mut((off, off), (2, 2)).copy_from(&dyn_m(k));
                    }
                    let cov = DMatrix::from_column_slice(6, 1, &p.x0cov);
                    let c = crate::gaussian::pinv_symmetric(&sigma) * &cov;
                    if (&sigma * &c - &cov).amax() > 1e-7 * (1.0 + cov.amax()) {
                        return Err(GaussianError::NotPsd(0.0).into());
                    }
                    let explained = (c.transpose() * &cov)[(0, 0)];
                    (c, 1.0 - explained)
                }
            };
            if resid < -1e-9 {
                return Err(GaussianError::NotPsd(resid).into());
            }
            let s1 = source(&mut lg, 0, &k1);
            let s2 = source(&mut lg, 1, &k2);
            let w = source(&mut lg, 2, &kw);
            let n0 = lg.source_factor(DMatrix::from_element(1, 1, resid.max(0.0).sqrt()));
            lg.component("U1", vec![(s1, id())]);
            lg.component("U2", vec![(s2, id()), (s1, a)]);
            let ct = c.transpose();
            lg.component(
                "X0",
                vec![
                    (s1, ct.columns(0, 2).into_owned()),
                    (s2, ct.columns(2, 2).into_owned()),
                    (w, ct.columns(4, 2).into_owned()),
                    (n0, DMatrix::from_element(1, 1, 1.0)),
                ],
            );
            add_outputs(&mut lg, g, vec![(s1, id()), (s2, id()), (w, id())]);
        }
    }
    Ok(lg.covariance()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_meets_power() {
        let p = 2.0;
        for scheme in Scheme::ALL {
            let mut theta: Vec<f64> = (0..dimension(scheme)).map(|i| 1.0 + 0.3 * i as f64).collect();
            project(scheme, &mut theta, p);
            let params = decode(scheme, &theta).unwrap();
            for v in params.input_variances() {
                assert!(v <= p * (1.0 + 1e-12), "{scheme}: {v}");
            }
        }
    }

    #[test]
    fn rescaling_keeps_the_description_iii_structure() {
        // X = (I + A) S1 + S2 scaled by D is again of that form.
        let mut theta = vec![2.0, 0.5, 1.0, 1.0, -0.3, 0.7, 0.4, -0.2, 0.1, 0.3];
        let before = decode(Scheme::GdsIII, &theta).unwrap();
        project(Scheme::GdsIII, &mut theta, 1.0);
        let after = decode(Scheme::GdsIII, &theta).unwrap();
        let v = after.input_variances();
        assert!(v.iter().all(|x| *x <= 1.0 + 1e-12));
        assert_ne!(before, after);
    }

    #[test]
    fn zero_power_is_all_zero() {
        let mut theta = vec![1.0; 6];
        project(Scheme::GdsI, &mut theta, 0.0);
        assert!(theta.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(matches!(decode(Scheme::GdsII, &[1.0]), Err(SchemeError::BadParameters(_))));
    }
}
