//! Finite-alphabet joint distributions and their information measures.
//!
//! All quantities are in bits, with `0·log 0 = 0`.

mod capacity;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::{Atom, AtomError, VarSet};
use crate::polytope::AtomValuation;

pub use capacity::{blahut_arimoto, BlahutArimoto};

/// Largest tensor any pmf or channel may hold.
pub const MAX_STATES: usize = 10_000_000;
const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscreteError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has alphabet size 0")]
    EmptyAlphabet(String),
    #[error("state space of {0} entries exceeds the limit")]
    TooLarge(usize),
    #[error("expected {expected} probabilities, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("probability {0} is negative or not finite")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("variable sets must be nonempty and disjoint")]
    BadSets,
    #[error("channel input `{0}` has size {1} in the channel but {2} in the pmf")]
    SizeMismatch(String, usize, usize),
    #[error("Blahut-Arimoto stopped after {iterations} iterations with bound gap {gap}")]
    NotConverged { iterations: usize, gap: f64 },
    #[error("channel must have exactly one input and one output variable")]
    NotSingleLetter,
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("atom `{0}` needs an externally supplied value")]
    UnresolvedConstant(String),
}

fn checked_states(vars: &[(String, usize)]) -> Result<usize, DiscreteError> {
    let mut seen = VarSet::new();
    let mut total: usize = 1;
    for (name, size) in vars {
        if !seen.insert(name.clone()) {
            return Err(DiscreteError::DuplicateVariable(name.clone()));
        }
        if *size == 0 {
            return Err(DiscreteError::EmptyAlphabet(name.clone()));
        }
        total = total.checked_mul(*size).filter(|t| *t <= MAX_STATES).ok_or(DiscreteError::TooLarge(usize::MAX))?;
    }
    Ok(total)
}

fn check_probs(probs: &[f64]) -> Result<f64, DiscreteError> {
    let mut sum = 0.0;
    for &p in probs {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(DiscreteError::BadProbability(p));
        }
        sum += p;
    }
    Ok(sum)
}

/// Advances a mixed-radix counter; returns false after the last state.
fn next_index(idx: &mut [usize], sizes: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < sizes[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Row-major flat offset.
fn flat(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (i, s)| acc * s + i)
}

fn xlog2x_sum(probs: impl IntoIterator<Item = f64>) -> f64 {
    -probs.into_iter().filter(|p| *p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// A joint pmf over named finite-alphabet variables, stored densely in
/// row-major order (last variable fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<(String, usize)>,
    probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfJson {
    pub variables: Vec<VariableSpec>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub given: Vec<VariableSpec>,
    pub variables: Vec<VariableSpec>,
    pub probs: Vec<f64>,
}

fn specs(vars: &[(String, usize)]) -> Vec<VariableSpec> {
    vars.iter().map(|(name, size)| VariableSpec { name: name.clone(), size: *size }).collect()
}

fn unspec(specs: Vec<VariableSpec>) -> Vec<(String, usize)> {
    specs.into_iter().map(|s| (s.name, s.size)).collect()
}

impl JointPmf {
    pub fn new<S: Into<String>>(vars: Vec<(S, usize)>, probs: Vec<f64>) -> Result<Self, DiscreteError> {
        let vars: Vec<(String, usize)> = vars.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let total = checked_states(&vars)?;
        if probs.len() != total {
            return Err(DiscreteError::DimensionMismatch { expected: total, got: probs.len() });
        }
        let sum = check_probs(&probs)?;
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(DiscreteError::NotNormalized(sum));
        }
        Ok(Self { vars, probs })
    }

    /// Builds a pmf from nonnegative weights, normalizing them.
    pub fn from_weights<S: Into<String>>(vars: Vec<(S, usize)>, mut weights: Vec<f64>) -> Result<Self, DiscreteError> {
        let sum = check_probs(&weights)?;
        if sum <= 0.0 {
            return Err(DiscreteError::NotNormalized(sum));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        let fixed: f64 = weights.iter().sum();
        if let Some(w) = weights.iter_mut().rev().find(|w| **w > 0.0) {
            *w += 1.0 - fixed;
            *w = w.max(0.0);
        }
        Self::new(vars, weights)
    }

    /// Evaluates `f` on every joint index.
    pub fn from_fn<S, F>(vars: Vec<(S, usize)>, mut f: F) -> Result<Self, DiscreteError>
    where
        S: Into<String>,
        F: FnMut(&[usize]) -> f64,
    {
        let vars: Vec<(String, usize)> = vars.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let total = checked_states(&vars)?;
        let sizes: Vec<usize> = vars.iter().map(|v| v.1).collect();
        let mut idx = vec![0; sizes.len()];
        let mut probs = Vec::with_capacity(total);
        loop {
            probs.push(f(&idx));
            if !next_index(&mut idx, &sizes) {
                break;
            }
        }
        Self::new(vars, probs)
    }

    pub fn from_json(json: PmfJson) -> Result<Self, DiscreteError> {
        Self::new(unspec(json.variables), json.probs)
    }

    pub fn to_json(&self) -> PmfJson {
        PmfJson { variables: specs(&self.vars), probs: self.probs.clone() }
    }

    pub fn variables(&self) -> impl Iterator<Item = (&str, usize)> {
        self.vars.iter().map(|(n, s)| (n.as_str(), *s))
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.0.clone()).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn sizes(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.1).collect()
    }

    fn position(&self, name: &str) -> Result<usize, DiscreteError> {
        self.vars.iter().position(|v| v.0 == name).ok_or_else(|| DiscreteError::UnknownVariable(name.into()))
    }

    pub fn size_of(&self, name: &str) -> Result<usize, DiscreteError> {
        Ok(self.vars[self.position(name)?].1)
    }

    /// Probability of a joint index given in variable order.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.probs[flat(idx, &self.sizes())]
    }

    fn mask<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<u64, DiscreteError> {
        let mut m = 0u64;
        for n in names {
            m |= 1 << self.position(n)?;
        }
        Ok(m)
    }

    fn marginal_probs(&self, mask: u64) -> Vec<f64> {
        let sizes = self.sizes();
        let kept: Vec<usize> = (0..sizes.len()).filter(|i| mask >> i & 1 == 1).collect();
        let ksizes: Vec<usize> = kept.iter().map(|&i| sizes[i]).collect();
        let mut out = vec![0.0; ksizes.iter().product()];
        if kept.len() == sizes.len() {
            out.copy_from_slice(&self.probs);
            return out;
        }
        let mut idx = vec![0; sizes.len()];
        let mut k = vec![0; kept.len()];
        for &p in &self.probs {
            if p > 0.0 {
                for (slot, &i) in k.iter_mut().zip(&kept) {
                    *slot = idx[i];
                }
                out[flat(&k, &ksizes)] += p;
            }
            next_index(&mut idx, &sizes);
        }
        out
    }

    /// Sums out every variable not in `keep`; kept variables retain their order.
    pub fn marginalize<'a, I: IntoIterator<Item = &'a str>>(&self, keep: I) -> Result<JointPmf, DiscreteError> {
        let mask = self.mask(keep)?;
        let vars = self.vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        Ok(JointPmf { vars, probs: self.marginal_probs(mask) })
    }

    /// Joint law of the pmf's variables and the channel outputs.
    pub fn compose(&self, channel: &Channel) -> Result<JointPmf, DiscreteError> {
        let mut in_pos = Vec::new();
        for (name, size) in &channel.inputs {
            let p = self.position(name)?;
            if self.vars[p].1 != *size {
                return Err(DiscreteError::SizeMismatch(name.clone(), *size, self.vars[p].1));
            }
            in_pos.push(p);
        }
        let mut vars = self.vars.clone();
        vars.extend(channel.outputs.iter().cloned());
        let total = checked_states(&vars)?;
        let out_states = channel.output_states();
        let in_sizes: Vec<usize> = channel.inputs.iter().map(|v| v.1).collect();
        let sizes = self.sizes();
        let mut probs = Vec::with_capacity(total);
        let mut idx = vec![0; sizes.len()];
        let mut cin = vec![0; in_pos.len()];
        for &p in &self.probs {
            for (slot, &i) in cin.iter_mut().zip(&in_pos) {
                *slot = idx[i];
            }
            let row = flat(&cin, &in_sizes) * out_states;
            probs.extend(channel.probs[row..row + out_states].iter().map(|w| p * w));
            next_index(&mut idx, &sizes);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            probs.iter_mut().for_each(|x| *x /= sum);
        }
        JointPmf::new(vars, probs)
    }

    /// Renames variables; names absent from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<&str, &str>) -> Result<JointPmf, DiscreteError> {
        let vars: Vec<(String, usize)> = self
            .vars
            .iter()
            .map(|(n, s)| (map.get(n.as_str()).map(|m| m.to_string()).unwrap_or_else(|| n.clone()), *s))
            .collect();
        checked_states(&vars)?;
        Ok(JointPmf { vars, probs: self.probs.clone() })
    }

    /// Product law with an independent pmf over disjoint variables.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf, DiscreteError> {
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().cloned());
        checked_states(&vars)?;
        let probs = self.probs.iter().flat_map(|p| other.probs.iter().map(move |q| p * q)).collect();
        Ok(JointPmf { vars, probs })
    }

    pub fn entropy<'a, I: IntoIterator<Item = &'a str>>(&self, set: I) -> Result<f64, DiscreteError> {
        InfoEvaluator::new(self).entropy_of(self.mask(set)?)
    }

    /// `I(A;B|C)`, clamped at zero against rounding.
    pub fn mutual_info(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, DiscreteError> {
        let (a, b, c) = (self.mask(a.iter().copied())?, self.mask(b.iter().copied())?, self.mask(c.iter().copied())?);
        InfoEvaluator::new(self).mi(a, b, c)
    }

    pub fn total_correlation(&self, set: &[&str]) -> Result<f64, DiscreteError> {
        let mask = self.mask(set.iter().copied())?;
        InfoEvaluator::new(self).total_correlation(mask)
    }

    /// Evaluates one atom; constants are not resolvable from a pmf.
    pub fn atom_value(&self, atom: &Atom) -> Result<f64, DiscreteError> {
        InfoEvaluator::new(self).atom(atom)
    }

    /// Values every atom name; names that parse as constants are looked up in
    /// `constants`.
    pub fn atom_valuation<'a, I>(&self, atoms: I, constants: &AtomValuation) -> Result<AtomValuation, DiscreteError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut eval = InfoEvaluator::new(self);
        let mut out = AtomValuation::new();
        for name in atoms {
            let atom = Atom::parse(name)?;
            let v = match &atom {
                Atom::Constant(c) => {
                    constants.get(c).ok_or_else(|| DiscreteError::UnresolvedConstant(c.clone()))?
                }
                _ => eval.atom(&atom)?,
            };
            out.insert(name, v);
        }
        Ok(out)
    }
}

/// Entropy evaluation with a per-subset cache.
pub struct InfoEvaluator<'a> {
    pmf: &'a JointPmf,
    cache: HashMap<u64, f64>,
}

impl<'a> InfoEvaluator<'a> {
    pub fn new(pmf: &'a JointPmf) -> Self {
        Self { pmf, cache: HashMap::new() }
    }

    fn entropy_of(&mut self, mask: u64) -> Result<f64, DiscreteError> {
        if mask == 0 {
            return Ok(0.0);
        }
        if let Some(h) = self.cache.get(&mask) {
            return Ok(*h);
        }
        let h = xlog2x_sum(self.pmf.marginal_probs(mask));
        self.cache.insert(mask, h);
        Ok(h)
    }

    fn mi(&mut self, a: u64, b: u64, c: u64) -> Result<f64, DiscreteError> {
        if a == 0 || b == 0 || a & b != 0 || a & c != 0 || b & c != 0 {
            return Err(DiscreteError::BadSets);
        }
        let v = self.entropy_of(a | c)? + self.entropy_of(b | c)? - self.entropy_of(a | b | c)? - self.entropy_of(c)?;
        Ok(v.max(0.0))
    }

    fn total_correlation(&mut self, mask: u64) -> Result<f64, DiscreteError> {
        if mask == 0 {
            return Err(DiscreteError::BadSets);
        }
        let mut sum = 0.0;
        for i in 0..64 {
            if mask >> i & 1 == 1 {
                sum += self.entropy_of(1 << i)?;
            }
        }
        Ok((sum - self.entropy_of(mask)?).max(0.0))
    }

    pub fn atom(&mut self, atom: &Atom) -> Result<f64, DiscreteError> {
        let pmf = self.pmf;
        let m = |s: &VarSet| pmf.mask(s.iter().map(String::as_str));
        match atom {
            Atom::Entropy { vars, given } => {
                let (v, g) = (m(vars)?, m(given)?);
                if v == 0 || v & g != 0 {
                    return Err(DiscreteError::BadSets);
                }
                Ok((self.entropy_of(v | g)? - self.entropy_of(g)?).max(0.0))
            }
            Atom::MutualInfo { a, b, given } => {
                let (a, b, c) = (m(a)?, m(b)?, m(given)?);
                self.mi(a, b, c)
            }
            Atom::TotalCorrelation { vars } => {
                let v = m(vars)?;
                self.total_correlation(v)
            }
            Atom::Constant(c) => Err(DiscreteError::UnresolvedConstant(c.clone())),
        }
    }
}

/// A conditional pmf of output variables given input variables, row-major
/// over inputs then outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: Vec<(String, usize)>,
    outputs: Vec<(String, usize)>,
    probs: Vec<f64>,
}

impl Channel {
    pub fn new<S: Into<String>, T: Into<String>>(
        inputs: Vec<(S, usize)>,
        outputs: Vec<(T, usize)>,
        probs: Vec<f64>,
    ) -> Result<Self, DiscreteError> {
        let inputs: Vec<(String, usize)> = inputs.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let outputs: Vec<(String, usize)> = outputs.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let mut all = inputs.clone();
        all.extend(outputs.iter().cloned());
        let total = checked_states(&all)?;
        if probs.len() != total {
            return Err(DiscreteError::DimensionMismatch { expected: total, got: probs.len() });
        }
        check_probs(&probs)?;
        let ch = Self { inputs, outputs, probs };
        let k = ch.output_states();
        for row in ch.probs.chunks(k) {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(DiscreteError::NotNormalized(s));
            }
        }
        Ok(ch)
    }

    /// Outputs are a deterministic function of the inputs.
    pub fn deterministic<S, T, F>(inputs: Vec<(S, usize)>, outputs: Vec<(T, usize)>, f: F) -> Result<Self, DiscreteError>
    where
        S: Into<String>,
        T: Into<String>,
        F: Fn(&[usize]) -> Vec<usize>,
    {
        let inputs: Vec<(String, usize)> = inputs.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let outputs: Vec<(String, usize)> = outputs.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let in_sizes: Vec<usize> = inputs.iter().map(|v| v.1).collect();
        let out_sizes: Vec<usize> = outputs.iter().map(|v| v.1).collect();
        let k: usize = out_sizes.iter().product();
        let rows: usize = in_sizes.iter().product();
        let mut probs = vec![0.0; rows * k];
        let mut idx = vec![0; in_sizes.len()];
        for r in 0..rows {
            let y = f(&idx);
            if y.len() != out_sizes.len() || y.iter().zip(&out_sizes).any(|(v, s)| v >= s) {
                return Err(DiscreteError::DimensionMismatch { expected: out_sizes.len(), got: y.len() });
            }
            probs[r * k + flat(&y, &out_sizes)] = 1.0;
            next_index(&mut idx, &in_sizes);
        }
        Self::new(inputs, outputs, probs)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(input: &str, output: &str, p: f64) -> Result<Self, DiscreteError> {
        Self::new(vec![(input, 2)], vec![(output, 2)], vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn from_json(json: ChannelJson) -> Result<Self, DiscreteError> {
        Self::new(unspec(json.given), unspec(json.variables), json.probs)
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson { given: specs(&self.inputs), variables: specs(&self.outputs), probs: self.probs.clone() }
    }

    pub fn inputs(&self) -> impl Iterator<Item = (&str, usize)> {
        self.inputs.iter().map(|(n, s)| (n.as_str(), *s))
    }

    pub fn outputs(&self) -> impl Iterator<Item = (&str, usize)> {
        self.outputs.iter().map(|(n, s)| (n.as_str(), *s))
    }

    fn output_states(&self) -> usize {
        self.outputs.iter().map(|v| v.1).product()
    }

    /// Transition matrix of a single-input single-output channel.
    pub fn matrix(&self) -> Result<Vec<Vec<f64>>, DiscreteError> {
        if self.inputs.len() != 1 || self.outputs.len() != 1 {
            return Err(DiscreteError::NotSingleLetter);
        }
        Ok(self.probs.chunks(self.outputs[0].1).map(|r| r.to_vec()).collect())
    }
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    xlog2x_sum([p, 1.0 - p])
}
