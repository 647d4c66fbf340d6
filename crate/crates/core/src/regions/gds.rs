//! The generalized data-sharing region and its projections.

use std::collections::{BTreeMap, BTreeSet};

use crate::atom::Atom;
use crate::polytope::{fme_project, rat, AffineExpr, ConstraintSystem, FmeOptions, LinearConstraint, PolytopeError};

use super::{cst, gamma, lex_subsets, mi};

/// Auxiliary rates of the multicoding scheme, in elimination-list order.
pub const AUX_RATES: [&str; 6] = ["Ru0", "Ru1", "Ru2", "Rv0", "Rv1", "Rv2"];

fn names(prefix: &str, set: &[usize]) -> Vec<String> {
    set.iter().map(|i| format!("{prefix}{i}")).collect()
}

/// The achievable region over `(R1, R2)` and the six auxiliary rates.
///
/// Three groups: codeword-existence bounds for every pair of index sets with
/// at least two members in total, decoding bounds at each user, and fronthaul
/// bounds for BS 1, BS 2 and their sum. 57 + 7 + 7 + 3 = 74 constraints.
pub fn gds_theorem1_system() -> ConstraintSystem {
    let mut vars = vec!["R1", "R2"];
    vars.extend(AUX_RATES);
    let mut sys = ConstraintSystem::new(vars);
    let subsets = lex_subsets(3);
    for ou in &subsets {
        for ov in &subsets {
            if ou.len() + ov.len() < 2 {
                continue;
            }
            let mut lhs: Vec<(String, i64)> = Vec::new();
            if ou.len() == 3 {
                lhs.push(("R1".into(), 1));
            }
            if ov.len() == 3 {
                lhs.push(("R2".into(), 1));
            }
            lhs.extend(names("Ru", ou).into_iter().map(|v| (v, -1)));
            lhs.extend(names("Rv", ov).into_iter().map(|v| (v, -1)));
            let mut g = names("U", ou);
            g.extend(names("V", ov));
            sys = sys.with(LinearConstraint::new(
                lhs.into_iter().map(|(v, c)| (v, rat(c))),
                -gamma(g),
            ));
        }
    }
    for (rate, aux, out) in [("Ru", "U", "Y1"), ("Rv", "V", "Y2")] {
        for om in subsets.iter().filter(|s| !s.is_empty()) {
            let comp: Vec<usize> = (0..3).filter(|i| !om.contains(i)).collect();
            let mut rest = names(aux, &comp);
            rest.push(out.to_string());
            let rhs = mi(names(aux, om), rest, Vec::<String>::new()) + gamma(names(aux, om));
            sys = sys.with(LinearConstraint::new(names(rate, om).into_iter().map(|v| (v, rat(1))), rhs));
        }
    }
    let ones = |v: &[&str]| v.iter().map(|x| (x.to_string(), rat(1))).collect::<Vec<_>>();
    let g1 = gamma(["U0", "V0", "U1", "V1"]);
    let g2 = gamma(["U0", "V0", "U2", "V2"]);
    sys.with(LinearConstraint::new(ones(&["Ru0", "Ru1", "Rv0", "Rv1"]), cst("C1") + cst("C12") + g1.clone()))
        .with(LinearConstraint::new(ones(&["Ru0", "Ru2", "Rv0", "Rv2"]), cst("C2") + cst("C21") + g2.clone()))
        .with(LinearConstraint::new(
            ones(&AUX_RATES),
            cst("C1") + cst("C2") + g1 + g2 - gamma(["U0", "V0"]),
        ))
}

/// The restricted correlation structures studied as special cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substitution {
    /// Only the common auxiliaries `U0, V0`.
    SchemeI,
    /// Mutually independent auxiliaries.
    SchemeII,
    /// Only the private auxiliaries `U1, V1, U2, V2`.
    SchemeIII,
    /// One BS: `(U1, V1) = (U, V)`, `C2 = C12 = C21 = 0`.
    Cor4,
    /// One user: `R2 = 0`, `(U0, U1, U2) = (U, X1, X2)`.
    Cor5,
}

impl Substitution {
    fn degenerate(self) -> &'static [&'static str] {
        match self {
            Substitution::SchemeI => &["U1", "U2", "V1", "V2"],
            Substitution::SchemeII => &[],
            Substitution::SchemeIII => &["U0", "V0"],
            Substitution::Cor4 => &["U0", "U2", "V0", "V2"],
            Substitution::Cor5 => &["V0", "V1", "V2"],
        }
    }

    fn fixed_rates(self) -> &'static [&'static str] {
        match self {
            Substitution::SchemeI => &["Ru1", "Ru2", "Rv1", "Rv2"],
            Substitution::SchemeII => &[],
            Substitution::SchemeIII => &["Ru0", "Rv0"],
            Substitution::Cor4 => &["Ru0", "Ru2", "Rv0", "Rv2"],
            Substitution::Cor5 => &["Rv0", "Rv1", "Rv2", "R2"],
        }
    }

    fn zero_constants(self) -> &'static [&'static str] {
        match self {
            Substitution::Cor4 => &["C2", "C12", "C21"],
            _ => &[],
        }
    }

    fn renames(self) -> BTreeMap<&'static str, &'static str> {
        match self {
            Substitution::Cor4 => [("U1", "U"), ("V1", "V")].into(),
            Substitution::Cor5 => [("U0", "U"), ("U1", "X1"), ("U2", "X2")].into(),
            _ => BTreeMap::new(),
        }
    }

    /// Rate variables left after projection.
    pub fn kept(self) -> &'static [&'static str] {
        match self {
            Substitution::Cor5 => &["R1"],
            _ => &["R1", "R2"],
        }
    }
}

/// Applies a substitution to the general data-sharing system without eliminating
/// anything: nonnegativity of all rates is added, fixed rates are set to
/// zero and atoms are rewritten.
pub fn gds_substitute(system: &ConstraintSystem, substitution: Substitution) -> Result<ConstraintSystem, PolytopeError> {
    let all: Vec<String> = system.variables().to_vec();
    let mut sys = system.clone().with_nonnegativity(all.iter().map(String::as_str))?;
    for v in substitution.fixed_rates() {
        sys = sys.fix_variable(v, rat(0))?;
    }
    let degenerate: BTreeSet<String> = substitution.degenerate().iter().map(|s| s.to_string()).collect();
    let renames = substitution.renames();
    let zero_constants = substitution.zero_constants();
    let independent = substitution == Substitution::SchemeII;
    Ok(sys.substitute_atoms(|name| {
        let atom = Atom::parse(name).ok()?;
        if let Atom::Constant(c) = &atom {
            return zero_constants.contains(&c.as_str()).then(AffineExpr::zero);
        }
        match atom.without(&degenerate) {
            None => Some(AffineExpr::zero()),
            Some(Atom::TotalCorrelation { .. }) if independent => Some(AffineExpr::zero()),
            Some(a) => Some(AffineExpr::atom(a.rename(&renames).name())),
        }
    }))
}

/// Auxiliary rates still present after [`gds_substitute`].
pub fn aux_rates_left(system: &ConstraintSystem) -> Vec<&'static str> {
    AUX_RATES.iter().copied().filter(|v| system.has_variable(v)).collect()
}

/// [`gds_substitute`] followed by elimination of the auxiliary rates.
pub fn gds_project(
    system: &ConstraintSystem,
    substitution: Substitution,
    opts: FmeOptions,
) -> Result<ConstraintSystem, PolytopeError> {
    let sys = gds_substitute(system, substitution)?;
    let projected = fme_project(&sys, &aux_rates_left(&sys), opts)?;
    // Reorder the surviving variables to the canonical (R1, R2) order.
    let mut out = ConstraintSystem::new(substitution.kept().iter().copied());
    for c in projected.constraints() {
        out.push(c.clone())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_constraint_count() {
        // 64 pairs of index sets, 7 of which have fewer than two members.
        let pairs = (0..8u32).flat_map(|a| (0..8u32).map(move |b| (a, b)));
        let big = pairs.filter(|(a, b)| a.count_ones() + b.count_ones() >= 2).count();
        assert_eq!(big, 57);
        let sys = gds_theorem1_system();
        assert_eq!(sys.len(), big + 7 + 7 + 3);
        assert_eq!(sys.variables().len(), 8);
    }

    #[test]
    fn full_u_set_with_empty_v_set() {
        let sys = gds_theorem1_system();
        let hit = sys.constraints().iter().find(|c| {
            c.coefficient("R1") == rat(1)
                && c.coefficient("R2") == rat(0)
                && ["Ru0", "Ru1", "Ru2"].iter().all(|v| c.coefficient(v) == rat(-1))
                && ["Rv0", "Rv1", "Rv2"].iter().all(|v| c.coefficient(v) == rat(0))
        });
        let c = hit.expect("constraint present");
        assert_eq!(c.rhs(), &(-AffineExpr::atom("Gamma(U0,U1,U2)")));
    }

    #[test]
    fn scheme1_projection_only_mentions_common_auxiliaries() {
        let p = gds_project(&gds_theorem1_system(), Substitution::SchemeI, FmeOptions::default()).unwrap();
        assert_eq!(p.variables(), &["R1".to_string(), "R2".to_string()]);
        for a in p.atoms() {
            assert!(!a.contains("U1") && !a.contains("V2"), "{a}");
        }
    }
}
