//! Linear inequality systems over named rate variables whose right-hand sides
//! are affine in symbolic atoms.
//!
//! Every constraint is stored as `Σ a_i·R_i <= Σ c_j·atom_j + c0` with exact
//! rational coefficients. Atom values only enter at membership time, through
//! an [`AtomValuation`].

mod fme;
mod lp;
mod sampling;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use lp::{lp_maximize, max_uniform_slack};
pub use fme::{fme_eliminate, fme_project, FmeOptions, DEFAULT_ROW_CAP};
pub use sampling::{regions_equal_sampled, SampleReport, Witness};
pub use text::{format_expr, format_system, parse_system};

pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("unknown rate variable `{0}`")]
    UnknownVariable(String),
    #[error("valuation has no value for atom `{0}`")]
    MissingAtom(String),
    #[error("point has no value for variable `{0}`")]
    MissingCoordinate(String),
    #[error("elimination produced {count} constraints, above the cap of {cap}")]
    RowCap { cap: usize, count: usize },
    #[error("integer overflow while combining constraints")]
    Overflow,
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("at least one valuation is required")]
    NoValuations,
    #[error("systems are over different variables: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("linear program failed: {0}")]
    Lp(String),
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub(crate) fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Values of atoms, in bits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomValuation {
    values: BTreeMap<String, f64>,
}

impl AtomValuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: impl Into<String>, value: f64) {
        self.values.insert(atom.into(), value);
    }

    pub fn with(mut self, atom: impl Into<String>, value: f64) -> Self {
        self.insert(atom, value);
        self
    }

    pub fn get(&self, atom: &str) -> Option<f64> {
        self.values.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copies every entry of `other` into `self`, overwriting on collision.
    pub fn extend(&mut self, other: &AtomValuation) {
        for (k, v) in other.iter() {
            self.insert(k, v);
        }
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for AtomValuation {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        Self { values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

/// `Σ c_j·atom_j + constant` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AffineExpr {
    terms: BTreeMap<String, Rational>,
    constant: Rational,
}

impl AffineExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self { terms: BTreeMap::new(), constant: c }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    pub fn atom(name: impl Into<String>) -> Self {
        Self::zero().with_term(name, rat(1))
    }

    /// Adds `coef·name`, dropping the entry if it cancels.
    pub fn with_term(mut self, name: impl Into<String>, coef: Rational) -> Self {
        self.add_term(name.into(), coef);
        self
    }

    fn add_term(&mut self, name: String, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(name).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn coefficient(&self, atom: &str) -> Rational {
        self.terms.get(atom).copied().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates under a valuation. A sum that mixes `+inf` and `-inf` is
    /// treated as `-inf` so that ill-defined bounds never admit points.
    pub fn eval(&self, valuation: &AtomValuation) -> Result<f64, PolytopeError> {
        let mut sum = rat_to_f64(&self.constant);
        for (name, coef) in &self.terms {
            let v = valuation.get(name).ok_or_else(|| PolytopeError::MissingAtom(name.clone()))?;
            sum += rat_to_f64(coef) * v;
        }
        Ok(if sum.is_nan() { f64::NEG_INFINITY } else { sum })
    }

    /// Replaces atoms by expressions; atoms mapped to `None` are kept.
    pub fn substitute<F>(&self, f: &mut F) -> AffineExpr
    where
        F: FnMut(&str) -> Option<AffineExpr>,
    {
        let mut out = AffineExpr::constant(self.constant);
        for (name, coef) in &self.terms {
            match f(name) {
                Some(e) => out = out + e * *coef,
                None => out.add_term(name.clone(), *coef),
            }
        }
        out
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: AffineExpr) -> AffineExpr {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: AffineExpr) -> AffineExpr {
        self + (-rhs)
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self * rat(-1)
    }
}

impl Mul<Rational> for AffineExpr {
    type Output = AffineExpr;
    fn mul(mut self, k: Rational) -> AffineExpr {
        if k.is_zero() {
            return AffineExpr::zero();
        }
        for v in self.terms.values_mut() {
            *v *= k;
        }
        self.constant *= k;
        self
    }
}

impl Mul<i64> for AffineExpr {
    type Output = AffineExpr;
    fn mul(self, k: i64) -> AffineExpr {
        self * rat(k)
    }
}

/// `Σ lhs_i·R_i <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    lhs: BTreeMap<String, Rational>,
    rhs: AffineExpr,
}

impl LinearConstraint {
    pub fn new<I, S>(lhs: I, rhs: AffineExpr) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut map: BTreeMap<String, Rational> = BTreeMap::new();
        for (k, v) in lhs {
            *map.entry(k.into()).or_insert_with(Rational::zero) += v;
        }
        map.retain(|_, v| !v.is_zero());
        Self { lhs: map, rhs }
    }

    /// Integer-coefficient convenience constructor.
    pub fn int<'a, I>(lhs: I, rhs: AffineExpr) -> Self
    where
        I: IntoIterator<Item = (&'a str, i64)>,
    {
        Self::new(lhs.into_iter().map(|(k, v)| (k, rat(v))), rhs)
    }

    pub fn lhs(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.lhs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn coefficient(&self, var: &str) -> Rational {
        self.lhs.get(var).copied().unwrap_or_else(Rational::zero)
    }

    pub fn rhs(&self) -> &AffineExpr {
        &self.rhs
    }

    /// True when no rate variable appears.
    pub fn is_atom_relation(&self) -> bool {
        self.lhs.is_empty()
    }

    /// `rhs - lhs·point` under the valuation.
    pub fn slack(&self, valuation: &AtomValuation, point: &BTreeMap<String, f64>) -> Result<f64, PolytopeError> {
        let mut s = self.rhs.eval(valuation)?;
        for (var, coef) in &self.lhs {
            let x = point.get(var).ok_or_else(|| PolytopeError::MissingCoordinate(var.clone()))?;
            s -= rat_to_f64(coef) * x;
        }
        Ok(s)
    }
}

/// A conjunction of [`LinearConstraint`]s over an ordered variable list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    variables: Vec<String>,
    constraints: Vec<LinearConstraint>,
}

impl ConstraintSystem {
    pub fn new<I, S>(variables: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        let variables =
            variables.into_iter().map(Into::into).filter(|v: &String| seen.insert(v.clone())).collect();
        Self { variables, constraints: Vec::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn has_variable(&self, var: &str) -> bool {
        self.variables.iter().any(|v| v == var)
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<(), PolytopeError> {
        if let Some((bad, _)) = c.lhs().find(|(v, _)| !self.has_variable(v)) {
            return Err(PolytopeError::UnknownVariable(bad.to_string()));
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Builder form of [`push`](Self::push) for generators whose variables
    /// are known statically.
    pub(crate) fn with(mut self, c: LinearConstraint) -> Self {
        self.push(c).expect("generator used an undeclared variable");
        self
    }

    /// Adds `-v <= 0` for every listed variable.
    pub fn with_nonnegativity<'a, I: IntoIterator<Item = &'a str>>(mut self, vars: I) -> Result<Self, PolytopeError> {
        for v in vars {
            self.push(LinearConstraint::int([(v, -1)], AffineExpr::zero()))?;
        }
        Ok(self)
    }

    /// Every atom referenced by some right-hand side, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.constraints.iter().flat_map(|c| c.rhs.terms().map(|(a, _)| a.to_string())).collect()
    }

    /// Substitutes `value` for `var` and drops it from the variable list.
    pub fn fix_variable(&self, var: &str, value: Rational) -> Result<Self, PolytopeError> {
        if !self.has_variable(var) {
            return Err(PolytopeError::UnknownVariable(var.to_string()));
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let coef = c.coefficient(var);
                let lhs = c.lhs.iter().filter(|(k, _)| *k != var).map(|(k, v)| (k.clone(), *v));
                LinearConstraint::new(lhs, c.rhs.clone() - AffineExpr::constant(coef * value))
            })
            .collect();
        Ok(Self {
            variables: self.variables.iter().filter(|v| *v != var).cloned().collect(),
            constraints,
        })
    }

    /// Rewrites right-hand-side atoms; atoms mapped to `None` are kept.
    pub fn substitute_atoms<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&str) -> Option<AffineExpr>,
    {
        let constraints = self
            .constraints
            .iter()
            .map(|c| LinearConstraint { lhs: c.lhs.clone(), rhs: c.rhs.substitute(&mut f) })
            .collect();
        Self { variables: self.variables.clone(), constraints }
    }

    /// Resolves every right-hand side under a valuation.
    pub fn resolve(&self, valuation: &AtomValuation) -> Result<NumericSystem, PolytopeError> {
        let index: HashMap<&str, usize> =
            self.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut rows = Vec::with_capacity(self.constraints.len());
        let mut rhs = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let mut row = vec![0.0; self.variables.len()];
            for (v, coef) in &c.lhs {
                row[index[v.as_str()]] = rat_to_f64(coef);
            }
            rows.push(row);
            rhs.push(c.rhs.eval(valuation)?);
        }
        Ok(NumericSystem { variables: self.variables.clone(), rows, rhs })
    }

    /// True iff every constraint holds with slack at least `-tol`.
    pub fn is_member(
        &self,
        valuation: &AtomValuation,
        point: &BTreeMap<String, f64>,
        tol: f64,
    ) -> Result<bool, PolytopeError> {
        if let Some(v) = self.variables.iter().find(|v| !point.contains_key(*v)) {
            return Err(PolytopeError::MissingCoordinate(v.clone()));
        }
        for c in &self.constraints {
            if c.slack(valuation, point)? < -tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Removes exact duplicates and constraints whose right-hand side exceeds
    /// that of another constraint with the same left-hand side by a
    /// nonnegative constant. Order of the survivors is preserved.
    pub fn syntactic_reduce(&self) -> Self {
        let mut best: HashMap<(&BTreeMap<String, Rational>, Vec<(&str, &Rational)>), (usize, Rational)> =
            HashMap::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let key = (&c.lhs, c.rhs.terms().collect::<Vec<_>>());
            let k = c.rhs.constant;
            best.entry(key)
                .and_modify(|e| {
                    if k < e.1 {
                        *e = (i, k);
                    }
                })
                .or_insert((i, k));
        }
        let mut keep: Vec<usize> = best.values().map(|e| e.0).collect();
        keep.sort_unstable();
        Self {
            variables: self.variables.clone(),
            constraints: keep.into_iter().map(|i| self.constraints[i].clone()).collect(),
        }
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_system(self))
    }
}

/// A system with every right-hand side resolved to a float: `rows·x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSystem {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl NumericSystem {
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| b - row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(row, b)| b - row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() >= -tol)
    }

    /// Indices of constraints violated by more than `tol`.
    pub fn violated(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| {
                self.rhs[i] - self.rows[i].iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() < -tol
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn closure_membership() {
        let sys = ConstraintSystem::new(["R1"]).with(LinearConstraint::int([("R1", 1)], AffineExpr::atom("C1")));
        let val = AtomValuation::new().with("C1", 1.0);
        assert!(sys.is_member(&val, &pt(&[("R1", 1.0)]), 1e-9).unwrap());
        assert!(!sys.is_member(&val, &pt(&[("R1", 1.001)]), 1e-9).unwrap());
        assert_eq!(
            sys.is_member(&AtomValuation::new(), &pt(&[("R1", 0.0)]), 1e-9),
            Err(PolytopeError::MissingAtom("C1".into()))
        );
    }

    #[test]
    fn reduce_drops_duplicates_and_dominated() {
        let c = |k: i64| LinearConstraint::int([("x", 1)], AffineExpr::atom("a") + AffineExpr::int(k));
        let sys = ConstraintSystem::new(["x"]).with(c(0)).with(c(0)).with(c(1));
        let red = sys.syntactic_reduce();
        assert_eq!(red.constraints(), &[c(0)]);
        let other = LinearConstraint::int([("x", 1)], AffineExpr::atom("b"));
        let sys = ConstraintSystem::new(["x"]).with(c(1)).with(other.clone());
        assert_eq!(sys.syntactic_reduce().len(), 2);
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let mut sys = ConstraintSystem::new(["R1"]);
        let err = sys.push(LinearConstraint::int([("R9", 1)], AffineExpr::zero()));
        assert_eq!(err, Err(PolytopeError::UnknownVariable("R9".into())));
    }

    #[test]
    fn fixing_a_variable_moves_it_to_the_rhs() {
        let sys = ConstraintSystem::new(["x", "y"])
            .with(LinearConstraint::int([("x", 1), ("y", 2)], AffineExpr::atom("a")));
        let fixed = sys.fix_variable("y", rat(3)).unwrap();
        assert_eq!(fixed.variables(), &["x".to_string()]);
        assert_eq!(fixed.constraints()[0].rhs(), &(AffineExpr::atom("a") - AffineExpr::int(6)));
    }

    #[test]
    fn mixed_infinities_evaluate_to_negative_infinity() {
        let e = AffineExpr::atom("a") - AffineExpr::atom("b");
        let v = AtomValuation::new().with("a", f64::INFINITY).with("b", f64::INFINITY);
        assert_eq!(e.eval(&v).unwrap(), f64::NEG_INFINITY);
    }
}
