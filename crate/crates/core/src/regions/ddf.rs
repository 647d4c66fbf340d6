//! The refined distributed decode-forward region for N BSs and L users.

use crate::gaussian::CranNetwork;
use crate::polytope::{rat, AffineExpr, AtomValuation, ConstraintSystem, LinearConstraint};

use super::{cst, gamma, lex_subsets, mi, RegionError, RegionSpec};

/// Name of the fronthaul capacity of BS `k` (1-based).
pub fn capacity_atom(k: usize) -> String {
    format!("C{k}")
}

/// Name of the cooperation capacity from BS `j` to BS `k` (1-based).
pub fn coop_atom(k: usize, j: usize) -> String {
    if k < 10 && j < 10 {
        format!("C{k}{j}")
    } else {
        format!("C{k}_{j}")
    }
}

/// Fronthaul and cooperation capacities of a network as atom values.
pub fn capacity_valuation(network: &CranNetwork) -> AtomValuation {
    let n = network.num_bs();
    let mut val = AtomValuation::new();
    for k in 0..n {
        val.insert(capacity_atom(k + 1), network.c[k]);
        for j in 0..n {
            if j != k {
                val.insert(coop_atom(k + 1, j + 1), network.coop(k, j));
            }
        }
    }
    val
}

/// Capacity part of the cut `S`: links from the processor into `S^c` and
/// cooperation links from `S` into `S^c`.
pub(crate) fn cut_capacity(n: usize, s: &[usize]) -> AffineExpr {
    let sc: Vec<usize> = (0..n).filter(|k| !s.contains(k)).collect();
    let mut e = AffineExpr::zero();
    for &k in &sc {
        e = e + cst(&capacity_atom(k + 1));
        for &j in s {
            e = e + cst(&coop_atom(k + 1, j + 1));
        }
    }
    e
}

pub(crate) fn rate_vars(l: usize) -> Vec<String> {
    (1..=l).map(|i| format!("R{i}")).collect()
}

/// One constraint per cut `S ⊆ [N]` and nonempty user set `D ⊆ [L]`, in
/// lexicographic `(S, D)` order, followed by nonnegativity of every rate.
pub fn ddf_p1_region(n: usize, l: usize) -> Result<ConstraintSystem, RegionError> {
    RegionSpec::DdfP1 { n, l }.validate()?;
    let vars = rate_vars(l);
    let mut sys = ConstraintSystem::new(vars.clone());
    for s in lex_subsets(n) {
        let sc: Vec<usize> = (0..n).filter(|k| !s.contains(k)).collect();
        for d in lex_subsets(l).into_iter().filter(|d| !d.is_empty()) {
            let mut rhs = cut_capacity(n, &s);
            for &u in &d {
                rhs = rhs + mi([format!("U{}", u + 1)], [format!("Y{}", u + 1)], Vec::<String>::new());
            }
            let mut g: Vec<String> = sc.iter().map(|k| format!("X{}", k + 1)).collect();
            g.extend(d.iter().map(|u| format!("U{}", u + 1)));
            rhs = rhs - gamma(g);
            sys.push(LinearConstraint::new(d.iter().map(|&u| (vars[u].clone(), rat(1))), rhs))?;
        }
    }
    Ok(sys.with_nonnegativity(vars.iter().map(String::as_str))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_count_for_two_by_two() {
        let sys = ddf_p1_region(2, 2).unwrap();
        assert_eq!(sys.len(), 12 + 2);
    }

    #[test]
    fn single_bs_single_user() {
        let sys = ddf_p1_region(1, 1).unwrap();
        let text = sys.to_string();
        assert_eq!(text, "vars: R1\nR1 <= C1 - Gamma(U1,X1) + I(U1;Y1)\nR1 <= I(U1;Y1)\n-R1 <= 0\n");
    }

    #[test]
    fn coop_names() {
        assert_eq!(coop_atom(1, 2), "C12");
        assert_eq!(coop_atom(10, 2), "C10_2");
    }
}
