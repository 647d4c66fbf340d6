//! Symbolic information-measure atoms.
//!
//! Constraint systems refer to information quantities by name only. This
//! module owns the canonical spelling of those names so that valuations built
//! from discrete pmfs and from Gaussian covariances are interchangeable:
//!
//! | atom                | canonical name     |
//! |---------------------|--------------------|
//! | entropy             | `H(A,B)` / `H(A|C)` |
//! | mutual information  | `I(A;B|C)`         |
//! | total correlation   | `Gamma(A,B,C)`     |
//! | externally supplied | `C1`, `C12`, ...   |
//!
//! Variable lists are sorted; the two sides of a mutual information are
//! ordered so that `I(A;B)` and `I(B;A)` share one name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtomError {
    #[error("malformed atom `{0}`")]
    Malformed(String),
    #[error("atom `{0}` has overlapping or empty variable sets")]
    BadSets(String),
}

pub type VarSet = BTreeSet<String>;

/// One information quantity appearing on the right-hand side of a rate constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `H(vars | given)`
    Entropy { vars: VarSet, given: VarSet },
    /// `I(a ; b | given)`
    MutualInfo { a: VarSet, b: VarSet, given: VarSet },
    /// `Gamma(vars)`: sum of marginal entropies minus the joint entropy.
    TotalCorrelation { vars: VarSet },
    /// A constant whose value is supplied from outside (link capacities).
    Constant(String),
}

fn set<I, S>(items: I) -> VarSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

impl Atom {
    pub fn entropy<I: IntoIterator<Item = S>, S: Into<String>>(vars: I) -> Self {
        Atom::Entropy { vars: set(vars), given: VarSet::new() }
    }

    pub fn cond_entropy<I, J, S, T>(vars: I, given: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        Atom::Entropy { vars: set(vars), given: set(given) }
    }

    pub fn mi<I, J, S, T>(a: I, b: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        Self::cond_mi(a, b, std::iter::empty::<String>())
    }

    pub fn cond_mi<I, J, K, S, T, U>(a: I, b: J, given: K) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        K: IntoIterator<Item = U>,
        S: Into<String>,
        T: Into<String>,
        U: Into<String>,
    {
        let (a, b) = (set(a), set(b));
        let (a, b) = if join(&a, ",") <= join(&b, ",") { (a, b) } else { (b, a) };
        Atom::MutualInfo { a, b, given: set(given) }
    }

    pub fn gamma<I: IntoIterator<Item = S>, S: Into<String>>(vars: I) -> Self {
        Atom::TotalCorrelation { vars: set(vars) }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Atom::Constant(name.into())
    }

    /// Canonical name.
    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Every random variable the atom refers to.
    pub fn variables(&self) -> VarSet {
        match self {
            Atom::Entropy { vars, given } => vars.union(given).cloned().collect(),
            Atom::MutualInfo { a, b, given } => {
                a.iter().chain(b).chain(given).cloned().collect()
            }
            Atom::TotalCorrelation { vars } => vars.clone(),
            Atom::Constant(_) => VarSet::new(),
        }
    }

    /// Rewrites the atom for a distribution in which the variables in
    /// `degenerate` are constants. Returns `None` when the atom is then
    /// identically zero.
    pub fn without(&self, degenerate: &VarSet) -> Option<Atom> {
        let strip = |s: &VarSet| -> VarSet { s.difference(degenerate).cloned().collect() };
        match self {
            Atom::Entropy { vars, given } => {
                let given = strip(given);
                let vars: VarSet = strip(vars).difference(&given).cloned().collect();
                (!vars.is_empty()).then_some(Atom::Entropy { vars, given })
            }
            Atom::MutualInfo { a, b, given } => {
                let given = strip(given);
                let a: VarSet = strip(a).difference(&given).cloned().collect();
                let b: VarSet = strip(b).difference(&given).cloned().collect();
                if a.is_empty() || b.is_empty() {
                    None
                } else {
                    Some(Atom::cond_mi(a, b, given))
                }
            }
            Atom::TotalCorrelation { vars } => {
                let vars = strip(vars);
                (vars.len() >= 2).then_some(Atom::TotalCorrelation { vars })
            }
            Atom::Constant(_) => Some(self.clone()),
        }
    }

    /// Renames variables (for instance `U1 -> U`); unmapped names are kept.
    pub fn rename(&self, map: &BTreeMap<&str, &str>) -> Atom {
        let r = |s: &VarSet| -> VarSet {
            s.iter().map(|v| map.get(v.as_str()).map(|m| m.to_string()).unwrap_or_else(|| v.clone())).collect()
        };
        match self {
            Atom::Entropy { vars, given } => Atom::Entropy { vars: r(vars), given: r(given) },
            Atom::MutualInfo { a, b, given } => Atom::cond_mi(r(a), r(b), r(given)),
            Atom::TotalCorrelation { vars } => Atom::TotalCorrelation { vars: r(vars) },
            Atom::Constant(_) => self.clone(),
        }
    }

    /// Parses a canonical (or hand-written) atom name.
    pub fn parse(name: &str) -> Result<Atom, AtomError> {
        let bad = || AtomError::Malformed(name.to_string());
        let name = name.trim();
        let inner = |prefix: &str| -> Option<&str> {
            name.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'))
        };
        if let Some(body) = inner("Gamma(") {
            let vars = parse_list(body).ok_or_else(bad)?;
            if vars.is_empty() {
                return Err(AtomError::BadSets(name.to_string()));
            }
            return Ok(Atom::TotalCorrelation { vars });
        }
        if let Some(body) = inner("H(") {
            let (main, given) = split_given(body);
            let vars = parse_list(main).ok_or_else(bad)?;
            let given = parse_list(given).ok_or_else(bad)?;
            if vars.is_empty() || !vars.is_disjoint(&given) {
                return Err(AtomError::BadSets(name.to_string()));
            }
            return Ok(Atom::Entropy { vars, given });
        }
        if let Some(body) = inner("I(") {
            let (main, given) = split_given(body);
            let (a, b) = main.split_once(';').ok_or_else(bad)?;
            let a = parse_list(a).ok_or_else(bad)?;
            let b = parse_list(b).ok_or_else(bad)?;
            let given = parse_list(given).ok_or_else(bad)?;
            if a.is_empty() || b.is_empty() || !a.is_disjoint(&b) || !a.is_disjoint(&given)
                || !b.is_disjoint(&given)
            {
                return Err(AtomError::BadSets(name.to_string()));
            }
            return Ok(Atom::cond_mi(a, b, given));
        }
        if is_ident(name) {
            return Ok(Atom::Constant(name.to_string()));
        }
        Err(bad())
    }
}

fn split_given(body: &str) -> (&str, &str) {
    body.split_once('|').unwrap_or((body, ""))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_list(s: &str) -> Option<VarSet> {
    let s = s.trim();
    if s.is_empty() {
        return Some(VarSet::new());
    }
    s.split(',')
        .map(|v| {
            let v = v.trim();
            is_ident(v).then(|| v.to_string())
        })
        .collect()
}

fn join(s: &VarSet, sep: &str) -> String {
    s.iter().map(String::as_str).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Entropy { vars, given } if given.is_empty() => write!(f, "H({})", join(vars, ",")),
            Atom::Entropy { vars, given } => {
                write!(f, "H({}|{})", join(vars, ","), join(given, ","))
            }
            Atom::MutualInfo { a, b, given } if given.is_empty() => {
                write!(f, "I({};{})", join(a, ","), join(b, ","))
            }
            Atom::MutualInfo { a, b, given } => {
                write!(f, "I({};{}|{})", join(a, ","), join(b, ","), join(given, ","))
            }
            Atom::TotalCorrelation { vars } => write!(f, "Gamma({})", join(vars, ",")),
            Atom::Constant(name) => f.write_str(name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_order_normalized() {
        assert_eq!(Atom::mi(["Y1"], ["U1", "U0"]).name(), "I(U0,U1;Y1)");
        assert_eq!(Atom::mi(["U0", "U1"], ["Y1"]).name(), "I(U0,U1;Y1)");
        assert_eq!(Atom::gamma(["V0", "U2", "U0"]).name(), "Gamma(U0,U2,V0)");
        assert_eq!(Atom::cond_mi(["U2"], ["Y1"], ["U1", "U0"]).name(), "I(U2;Y1|U0,U1)");
    }

    #[test]
    fn parse_round_trips() {
        for s in ["I(U0,U1;Y1|U2)", "H(X1|X0)", "H(Y2)", "Gamma(U0,V0)", "C12"] {
            assert_eq!(Atom::parse(s).unwrap().name(), s);
        }
        assert_eq!(Atom::parse("I(Y1;U0)").unwrap().name(), "I(U0;Y1)");
        assert!(Atom::parse("I(U0;U0)").is_err());
        assert!(Atom::parse("I(U0 Y1)").is_err());
        assert!(Atom::parse("3C").is_err());
    }

    #[test]
    fn degenerate_variables_drop_out() {
        let deg: VarSet = set(["U1", "U2"]);
        assert_eq!(Atom::gamma(["U0", "U1", "V0"]).without(&deg), Some(Atom::gamma(["U0", "V0"])));
        assert_eq!(Atom::gamma(["U0", "U1"]).without(&deg), None);
        assert_eq!(Atom::mi(["U1"], ["U0", "Y1"]).without(&deg), None);
        assert_eq!(
            Atom::mi(["U0"], ["U1", "U2", "Y1"]).without(&deg),
            Some(Atom::mi(["U0"], ["Y1"]))
        );
        assert_eq!(Atom::constant("C1").without(&deg), Some(Atom::constant("C1")));
    }

    #[test]
    fn rename_recanonicalizes() {
        let map: BTreeMap<&str, &str> = [("U0", "U"), ("U1", "X1")].into();
        assert_eq!(Atom::cond_mi(["U1"], ["Y1"], ["U0"]).rename(&map).name(), "I(X1;Y1|U)");
        assert_eq!(Atom::gamma(["U0", "V0"]).rename(&map).name(), "Gamma(U,V0)");
    }
}
