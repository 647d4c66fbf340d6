//! Symbolic rate regions for the C-RAN downlink.
//!
//! Every generator returns a [`ConstraintSystem`] whose right-hand sides are
//! affine in canonical atom names, so the same region can be resolved with
//! a discrete pmf, a Gaussian covariance, or a hand-written valuation.
//! Strict inequalities are stored in closure form.

mod corollaries;
mod cutset;
mod ddf;
mod gcomp;
mod gds;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::atom::Atom;
use crate::polytope::{format_expr, rat_to_f64, AffineExpr, AtomValuation, ConstraintSystem, PolytopeError};

pub use corollaries::{
    corollary4_region, corollary5_rate, corollary5_system, scheme1_region, scheme2_region, scheme3_region,
    scheme3_side_conditions, scheme3_side_margins, SIDE_CONDITION_TOL,
};
pub use cutset::{cutset_region, cutset_symmetric_sumrate, cutset_valuation, logdet_atom};
pub use ddf::{capacity_atom, capacity_valuation, coop_atom, ddf_p1_region};
pub use gcomp::gcomp_theorem2_region;
pub use gds::{aux_rates_left, gds_project, gds_substitute, gds_theorem1_system, Substitution, AUX_RATES};

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("unknown region id `{0}`")]
    UnknownRegion(String),
    #[error("region {id} needs N, L >= 1 (got N = {n}, L = {l})")]
    BadShape { id: &'static str, n: usize, l: usize },
    #[error("too many nodes for subset enumeration: {0}")]
    TooManyNodes(usize),
}

/// Which region to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionSpec {
    GdsT1,
    GdsI,
    GdsII,
    GdsIII,
    Cor4,
    Cor5,
    GcompT2,
    DdfP1 { n: usize, l: usize },
    Cutset { n: usize, l: usize },
}

const MAX_NODES: usize = 12;

impl RegionSpec {
    pub fn id(&self) -> &'static str {
        match self {
            RegionSpec::GdsT1 => "GDS-T1",
            RegionSpec::GdsI => "GDS-I",
            RegionSpec::GdsII => "GDS-II",
            RegionSpec::GdsIII => "GDS-III",
            RegionSpec::Cor4 => "COR4",
            RegionSpec::Cor5 => "COR5",
            RegionSpec::GcompT2 => "GCOMP-T2",
            RegionSpec::DdfP1 { .. } => "DDF-P1",
            RegionSpec::Cutset { .. } => "CUTSET",
        }
    }

    /// Parses an id; `n` and `l` are used by the N-BS L-user regions only.
    pub fn from_id(id: &str, n: usize, l: usize) -> Result<Self, RegionError> {
        let spec = match id.to_ascii_uppercase().as_str() {
            "GDS-T1" => RegionSpec::GdsT1,
            "GDS-I" => RegionSpec::GdsI,
            "GDS-II" => RegionSpec::GdsII,
            "GDS-III" => RegionSpec::GdsIII,
            "COR4" => RegionSpec::Cor4,
            "COR5" => RegionSpec::Cor5,
            "GCOMP-T2" => RegionSpec::GcompT2,
            "DDF-P1" => RegionSpec::DdfP1 { n, l },
            "CUTSET" => RegionSpec::Cutset { n, l },
            _ => return Err(RegionError::UnknownRegion(id.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), RegionError> {
        match *self {
            RegionSpec::DdfP1 { n, l } | RegionSpec::Cutset { n, l } => {
                if n == 0 || l == 0 {
                    return Err(RegionError::BadShape { id: self.id(), n, l });
                }
                if n + l > MAX_NODES {
                    return Err(RegionError::TooManyNodes(n + l));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The explicit symbolic system of this region. For the G-DS schemes this
    /// is the closed-form inequality list, not the projection.
    pub fn system(&self) -> Result<ConstraintSystem, RegionError> {
        self.validate()?;
        Ok(match *self {
            RegionSpec::GdsT1 => gds_theorem1_system(),
            RegionSpec::GdsI => scheme1_region(),
            RegionSpec::GdsII => scheme2_region(),
            RegionSpec::GdsIII => scheme3_region(),
            RegionSpec::Cor4 => corollary4_region(),
            RegionSpec::Cor5 => corollary5_system(),
            RegionSpec::GcompT2 => gcomp_theorem2_region(),
            RegionSpec::DdfP1 { n, l } => ddf_p1_region(n, l)?,
            RegionSpec::Cutset { n, l } => cutset_region(n, l)?,
        })
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RegionSpec {
    type Err = RegionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RegionSpec::from_id(s, 2, 2)
    }
}

/// One constraint with its right-hand side resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConstraint {
    pub lhs: Vec<(String, f64)>,
    pub rhs: f64,
    pub symbolic_rhs: String,
}

/// Resolves a region under a valuation for export.
pub fn resolve_region(
    system: &ConstraintSystem,
    valuation: &AtomValuation,
) -> Result<Vec<ResolvedConstraint>, RegionError> {
    let mut out = Vec::with_capacity(system.len());
    for c in system.constraints() {
        let rhs = c.rhs().eval(valuation)?;
        out.push(ResolvedConstraint {
            lhs: c
                .lhs()
                .map(|(v, q)| (v.to_string(), rat_to_f64(q)))
                .collect(),
            rhs,
            symbolic_rhs: format_expr(c.rhs()),
        });
    }
    Ok(out)
}

/// `Γ` of a set, or zero when the set has fewer than two members.
pub(crate) fn gamma<I, S>(vars: I) -> AffineExpr
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
    if vars.len() < 2 {
        AffineExpr::zero()
    } else {
        AffineExpr::atom(Atom::gamma(vars).name())
    }
}

/// `I(A;B|C)`, or zero when either side is empty.
pub(crate) fn mi<A, B, C>(a: A, b: B, c: C) -> AffineExpr
where
    A: IntoIterator,
    A::Item: Into<String>,
    B: IntoIterator,
    B::Item: Into<String>,
    C: IntoIterator,
    C::Item: Into<String>,
{
    let a: Vec<String> = a.into_iter().map(Into::into).collect();
    let b: Vec<String> = b.into_iter().map(Into::into).collect();
    if a.is_empty() || b.is_empty() {
        return AffineExpr::zero();
    }
    AffineExpr::atom(Atom::cond_mi(a, b, c.into_iter().map(Into::into).collect::<Vec<String>>()).name())
}

pub(crate) fn cst(name: &str) -> AffineExpr {
    AffineExpr::atom(name)
}

/// Subsets of `0..n` in lexicographic order of their sorted member lists.
pub(crate) fn lex_subsets(n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}
