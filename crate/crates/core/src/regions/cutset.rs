//! The cut-set outer bound for Gaussian networks.

use nalgebra::DMatrix;

use crate::gaussian::{capacity_logdet, CranNetwork, GaussianError, JointCovariance};
use crate::polytope::{rat, AffineExpr, AtomValuation, ConstraintSystem, LinearConstraint};

use super::ddf::{capacity_valuation, cut_capacity, rate_vars};
use super::{lex_subsets, RegionError, RegionSpec};

fn join(set: &[usize]) -> String {
    set.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("_")
}

/// Name of the log-det term of cut `(S, D)` (0-based index sets).
pub fn logdet_atom(s: &[usize], d: &[usize]) -> String {
    format!("LogDet_S_{}_D_{}", join(s), join(d)).replace("__", "_")
}

/// One constraint per `(S, nonempty D)`: capacities across the cut plus the
/// log-det term, which is an atom valued by [`cutset_valuation`].
pub fn cutset_region(n: usize, l: usize) -> Result<ConstraintSystem, RegionError> {
    RegionSpec::Cutset { n, l }.validate()?;
    let vars = rate_vars(l);
    let mut sys = ConstraintSystem::new(vars.clone());
    for s in lex_subsets(n) {
        for d in lex_subsets(l).into_iter().filter(|d| !d.is_empty()) {
            let rhs = cut_capacity(n, &s) + AffineExpr::atom(logdet_atom(&s, &d));
            sys.push(LinearConstraint::new(d.iter().map(|&u| (vars[u].clone(), rat(1))), rhs))?;
        }
    }
    Ok(sys.with_nonnegativity(vars.iter().map(String::as_str))?)
}

/// Capacities plus `½·log2 det(I + G(D,S) K(S|S^c) G(D,S)ᵀ)` for every cut,
/// for the input covariance `k`.
pub fn cutset_valuation(network: &CranNetwork, k: &DMatrix<f64>) -> Result<AtomValuation, GaussianError> {
    let n = network.num_bs();
    let l = network.num_users();
    if k.nrows() != n || k.ncols() != n {
        return Err(GaussianError::DimensionMismatch { expected: n, got: k.nrows() });
    }
    for i in 0..n {
        if k[(i, i)] > network.p * (1.0 + 1e-12) + 1e-12 {
            return Err(GaussianError::PowerExceeded { index: i + 1, value: k[(i, i)], limit: network.p });
        }
    }
    let names: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let cov = JointCovariance::new(names.iter().map(|x| (x.clone(), 1)).collect(), k.clone())?;
    let mut val = capacity_valuation(network);
    for s in lex_subsets(n) {
        let sn: Vec<&str> = s.iter().map(|&i| names[i].as_str()).collect();
        let scn: Vec<&str> = (0..n).filter(|i| !s.contains(i)).map(|i| names[i].as_str()).collect();
        let kc = if s.is_empty() { DMatrix::zeros(0, 0) } else { cov.schur_conditional(&sn, &scn)?.matrix().clone() };
        for d in lex_subsets(l).into_iter().filter(|d| !d.is_empty()) {
            let g = DMatrix::from_fn(d.len(), s.len(), |r, c| network.g[(d[r], s[c])]);
            val.insert(logdet_atom(&s, &d), capacity_logdet(&g, &kc)?);
        }
    }
    Ok(val)
}

/// The symmetric shortcut `min{2C, R★sum}`.
pub fn cutset_symmetric_sumrate(c: f64, rsum_star: f64) -> f64 {
    (2.0 * c).min(rsum_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_power_forces_zero_rates_without_fronthaul_slack() {
        let net = CranNetwork::symmetric(0.0, 0.5, 0.5, 1.0, 0.0).unwrap();
        let val = cutset_valuation(&net, &DMatrix::zeros(2, 2)).unwrap();
        let sys = cutset_region(2, 2).unwrap();
        let res = sys.resolve(&val).unwrap();
        assert!(res.contains(&[0.0, 0.0], 1e-12));
        assert!(!res.contains(&[1e-6, 0.0], 1e-9));
    }

    #[test]
    fn power_violation_is_rejected() {
        let net = CranNetwork::symmetric(1.0, 0.5, 0.5, 1.0, 0.0).unwrap();
        let k = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(cutset_valuation(&net, &k), Err(GaussianError::PowerExceeded { .. })));
    }

    #[test]
    fn atom_names() {
        assert_eq!(logdet_atom(&[0, 1], &[0]), "LogDet_S_1_2_D_1");
        assert_eq!(logdet_atom(&[], &[1]), "LogDet_S_D_2");
    }

    #[test]
    fn symmetric_shortcut() {
        assert_eq!(cutset_symmetric_sumrate(1.0, 3.5), 2.0);
        assert_eq!(cutset_symmetric_sumrate(4.0, 3.5), 3.5);
    }
}
