//! Fourier–Motzkin elimination on integer rows.
//!
//! Each constraint is scaled to a primitive integer vector over
//! `(rate variables, atoms)` plus a rational constant. Atoms behave as
//! parameters that are never eliminated, so every pruning rule used here is
//! sound for every valuation at once.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, Signed};

use super::{rat, AffineExpr, ConstraintSystem, LinearConstraint, PolytopeError, Rational};

pub const DEFAULT_ROW_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FmeOptions {
    /// Abort when an elimination step generates more rows than this.
    pub row_cap: usize,
    /// Drop rows combined from more than `k + 1` originals after `k` steps.
    pub chernikov: bool,
    /// Pick the next variable greedily instead of following the given order.
    pub greedy_order: bool,
    /// Drop rows implied by another row with the same atom part, a constant
    /// no larger, and variable coefficients no smaller, where coefficients
    /// may differ only on variables whose nonnegativity row is present.
    pub dominance: bool,
}

impl Default for FmeOptions {
    fn default() -> Self {
        Self { row_cap: DEFAULT_ROW_CAP, chernikov: true, greedy_order: true, dominance: true }
    }
}

#[derive(Debug, Clone)]
struct Row {
    /// Variable coefficients followed by atom coefficients; primitive.
    coef: Vec<i64>,
    constant: Rational,
    history: Vec<u64>,
}

impl Row {
    fn origins(&self) -> u32 {
        self.history.iter().map(|w| w.count_ones()).sum()
    }
}

fn lcm_checked(a: i64, b: i64) -> Result<i64, PolytopeError> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(PolytopeError::Overflow)
}

/// Divides the coefficient part by its gcd. Returns `None` for a trivially
/// true row `0 <= c` with `c >= 0`.
fn normalize(mut coef: Vec<i64>, mut constant: Rational, history: Vec<u64>) -> Option<Row> {
    let g = coef.iter().fold(0i64, |g, &c| g.gcd(&c));
    if g == 0 {
        if !constant.is_negative() {
            return None;
        }
        constant = rat(-1);
    } else if g > 1 {
        coef.iter_mut().for_each(|c| *c /= g);
        constant /= rat(g);
    }
    Some(Row { coef, constant, history })
}

struct Layout {
    vars: Vec<String>,
    atoms: Vec<String>,
}

fn to_rows(system: &ConstraintSystem) -> Result<(Layout, Vec<Row>), PolytopeError> {
    let vars = system.variables().to_vec();
    let atoms: Vec<String> = system.atoms().into_iter().collect();
    let vidx: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let aidx: HashMap<&str, usize> =
        atoms.iter().enumerate().map(|(i, a)| (a.as_str(), vars.len() + i)).collect();
    let words = system.len().div_ceil(64).max(1);
    let mut rows = Vec::with_capacity(system.len());
    for (i, c) in system.constraints().iter().enumerate() {
        let mut denom = 1i64;
        for (_, r) in c.lhs().chain(c.rhs().terms()) {
            denom = lcm_checked(denom, *r.denom())?;
        }
        let scale = |r: &Rational| -> Result<i64, PolytopeError> {
            r.checked_mul(&rat(denom)).map(|x| x.to_integer()).ok_or(PolytopeError::Overflow)
        };
        let mut coef = vec![0i64; vars.len() + atoms.len()];
        for (v, r) in c.lhs() {
            coef[vidx[v]] = scale(r)?;
        }
        for (a, r) in c.rhs().terms() {
            // Stored on the left: lhs - atoms <= constant.
            coef[aidx[a]] = -scale(r)?;
        }
        let constant = c.rhs().constant_term().checked_mul(&rat(denom)).ok_or(PolytopeError::Overflow)?;
        let mut history = vec![0u64; words];
        history[i / 64] |= 1 << (i % 64);
        if let Some(row) = normalize(coef, constant, history) {
            rows.push(row);
        }
    }
    Ok((Layout { vars, atoms }, rows))
}

fn from_rows(layout: &Layout, keep_vars: &[String], rows: &[Row]) -> ConstraintSystem {
    let mut out = ConstraintSystem::new(keep_vars.iter().cloned());
    let nv = layout.vars.len();
    for row in rows {
        let lhs = (0..nv).filter(|&i| row.coef[i] != 0).map(|i| (layout.vars[i].clone(), rat(row.coef[i])));
        let mut rhs = AffineExpr::constant(row.constant);
        for (j, name) in layout.atoms.iter().enumerate() {
            let c = row.coef[nv + j];
            if c != 0 {
                rhs = rhs.with_term(name.clone(), rat(-c));
            }
        }
        out.push(LinearConstraint::new(lhs, rhs)).expect("projected rows only use kept variables");
    }
    out
}

/// Removes duplicates, keeping for each coefficient vector the smallest
/// constant (ties: fewest origins, then earliest).
fn dedup(rows: Vec<Row>) -> Vec<Row> {
    let mut best: HashMap<Vec<i64>, usize> = HashMap::with_capacity(rows.len());
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for row in rows {
        match best.get(&row.coef) {
            Some(&i) => {
                let cur = &out[i];
                if row.constant < cur.constant
                    || (row.constant == cur.constant && row.origins() < cur.origins())
                {
                    out[i] = row;
                }
            }
            None => {
                best.insert(row.coef.clone(), out.len());
                out.push(row);
            }
        }
    }
    out
}

/// `-x_j <= c` with `c <= 0` and nothing else.
fn nonneg_column(row: &Row) -> Option<usize> {
    let mut hit = None;
    for (j, &c) in row.coef.iter().enumerate() {
        match c {
            0 => {}
            -1 if hit.is_none() => hit = Some(j),
            _ => return None,
        }
    }
    hit.filter(|_| !row.constant.is_positive())
}

/// Removes rows dominated under the nonnegativity rows present. Those rows
/// themselves are never removed, which keeps the rule free of cycles.
fn prune_dominated(rows: Vec<Row>, nv: usize) -> Vec<Row> {
    let mut nonneg = vec![false; nv];
    let mut protected = vec![false; rows.len()];
    for (i, r) in rows.iter().enumerate() {
        if let Some(j) = nonneg_column(r).filter(|&j| j < nv) {
            nonneg[j] = true;
            protected[i] = true;
        }
    }
    let mut groups: HashMap<&[i64], Vec<usize>> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(&r.coef[nv..]).or_default().push(i);
    }
    let dominates = |big: &Row, small: &Row| {
        big.constant <= small.constant
            && (0..nv).all(|j| {
                let (a, b) = (small.coef[j], big.coef[j]);
                a == b || (a < b && nonneg[j])
            })
    };
    let mut drop = vec![false; rows.len()];
    for members in groups.values() {
        if members.len() < 2 {
            continue;
        }
        for &i in members {
            if protected[i] {
                continue;
            }
            let small = &rows[i];
            let sum_small: i64 = small.coef[..nv].iter().sum();
            for &k in members {
                if k == i || drop[k] && !protected[k] {
                    continue;
                }
                let big = &rows[k];
                if big.coef[..nv].iter().sum::<i64>() >= sum_small && dominates(big, small) {
                    drop[i] = true;
                    break;
                }
            }
        }
    }
    rows.into_iter().zip(drop).filter(|(_, d)| !d).map(|(r, _)| r).collect()
}

fn eliminate_column(rows: Vec<Row>, col: usize, cap: usize) -> Result<Vec<Row>, PolytopeError> {
    let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        match r.coef[col].signum() {
            1 => pos.push(r),
            -1 => neg.push(r),
            _ => keep.push(r),
        }
    }
    let count = keep.len() + pos.len() * neg.len();
    if count > cap {
        return Err(PolytopeError::RowCap { cap, count });
    }
    for p in &pos {
        for q in &neg {
            let (a, b) = (-q.coef[col], p.coef[col]);
            let coef = p
                .coef
                .iter()
                .zip(&q.coef)
                .map(|(&x, &y)| {
                    a.checked_mul(x).zip(b.checked_mul(y)).and_then(|(u, v)| u.checked_add(v))
                })
                .collect::<Option<Vec<i64>>>()
                .ok_or(PolytopeError::Overflow)?;
            let constant = p
                .constant
                .checked_mul(&rat(a))
                .zip(q.constant.checked_mul(&rat(b)))
                .and_then(|(u, v)| u.checked_add(&v))
                .ok_or(PolytopeError::Overflow)?;
            let history = p.history.iter().zip(&q.history).map(|(x, y)| x | y).collect();
            if let Some(row) = normalize(coef, constant, history) {
                keep.push(row);
            }
        }
    }
    Ok(keep)
}

/// Eliminates a single variable.
pub fn fme_eliminate(system: &ConstraintSystem, var: &str) -> Result<ConstraintSystem, PolytopeError> {
    fme_project(system, &[var], FmeOptions::default())
}

/// Eliminates every listed variable.
///
/// The result has the same solution set as the input projected onto the
/// remaining variables, for every valuation of the atoms.
pub fn fme_project(
    system: &ConstraintSystem,
    eliminate: &[&str],
    opts: FmeOptions,
) -> Result<ConstraintSystem, PolytopeError> {
    for v in eliminate {
        if !system.has_variable(v) {
            return Err(PolytopeError::UnknownVariable(v.to_string()));
        }
    }
    let (layout, rows) = to_rows(system)?;
    let mut rows = dedup(rows);
    let nv = layout.vars.len();
    if opts.dominance {
        rows = prune_dominated(rows, nv);
    }
    let col_of = |v: &str| layout.vars.iter().position(|x| x == v).expect("checked above");
    let mut pending: Vec<usize> = Vec::new();
    for v in eliminate {
        let c = col_of(v);
        if !pending.contains(&c) {
            pending.push(c);
        }
    }
    let mut done = 0u32;
    while !pending.is_empty() {
        let pick = if opts.greedy_order {
            let cost = |&c: &usize| {
                let p = rows.iter().filter(|r| r.coef[c] > 0).count() as i64;
                let n = rows.iter().filter(|r| r.coef[c] < 0).count() as i64;
                p * n - p - n
            };
            // min_by_key keeps the first minimum, so ties follow the caller's order.
            (0..pending.len()).min_by_key(|&i| cost(&pending[i])).expect("nonempty")
        } else {
            0
        };
        let col = pending.remove(pick);
        rows = eliminate_column(rows, col, opts.row_cap)?;
        done += 1;
        if opts.chernikov {
            rows.retain(|r| r.origins() <= done + 1);
        }
        rows = dedup(rows);
        if opts.dominance {
            rows = prune_dominated(rows, nv);
        }
    }
    let keep_vars: Vec<String> =
        layout.vars.iter().filter(|v| !eliminate.contains(&v.as_str())).cloned().collect();
    Ok(from_rows(&layout, &keep_vars, &rows))
}

#[cfg(test)]
mod tests {
    use super::super::AtomValuation;
    use super::*;
    use std::collections::BTreeMap;

    fn a(name: &str) -> AffineExpr {
        AffineExpr::atom(name)
    }

    #[test]
    fn single_pair() {
        let sys = ConstraintSystem::new(["x"])
            .with(LinearConstraint::int([("x", 1)], a("a")))
            .with(LinearConstraint::int([("x", -1)], -a("b")));
        let out = fme_eliminate(&sys, "x").unwrap();
        assert!(out.variables().is_empty());
        assert_eq!(out.len(), 1);
        assert!(out.constraints()[0].is_atom_relation());
        assert_eq!(out.constraints()[0].rhs(), &(a("a") - a("b")));
    }

    #[test]
    fn two_lower_upper_pairings() {
        let sys = ConstraintSystem::new(["x", "y"])
            .with(LinearConstraint::int([("y", 1)], a("a") * 5))
            .with(LinearConstraint::int([("x", 1), ("y", -1)], AffineExpr::int(3)))
            .with(LinearConstraint::int([("y", -1)], AffineExpr::zero()));
        let out = fme_eliminate(&sys, "y").unwrap();
        // 0 <= 5a is stored in primitive form.
        let want = vec![
            LinearConstraint::int([], a("a")),
            LinearConstraint::int([("x", 1)], a("a") * 5 + AffineExpr::int(3)),
        ];
        for w in &want {
            assert!(out.constraints().contains(w), "missing {w:?} in {out}");
        }
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn unknown_variable() {
        let sys = ConstraintSystem::new(["x"]);
        assert_eq!(fme_eliminate(&sys, "z"), Err(PolytopeError::UnknownVariable("z".into())));
    }

    #[test]
    fn rational_coefficients_are_scaled() {
        let half = Rational::new(1, 2);
        let sys = ConstraintSystem::new(["x", "y"])
            .with(LinearConstraint::new([("x", half), ("y", half)], a("c")))
            .with(LinearConstraint::int([("y", -1)], AffineExpr::zero()));
        let out = fme_eliminate(&sys, "y").unwrap();
        assert_eq!(out.constraints(), &[LinearConstraint::int([("x", 1)], a("c") * 2)]);
    }

    #[test]
    fn row_cap_is_enforced() {
        let mut sys = ConstraintSystem::new(["x"]);
        for i in 0..20 {
            sys.push(LinearConstraint::int([("x", 1)], a(&format!("u{i}")))).unwrap();
            sys.push(LinearConstraint::int([("x", -1)], a(&format!("l{i}")))).unwrap();
        }
        let opts = FmeOptions { row_cap: 100, ..FmeOptions::default() };
        assert!(matches!(fme_project(&sys, &["x"], opts), Err(PolytopeError::RowCap { .. })));
    }

    #[test]
    fn projecting_nothing_is_identity_up_to_dedup() {
        let sys = ConstraintSystem::new(["x"]).with(LinearConstraint::int([("x", 2)], a("a") * 2));
        let out = fme_project(&sys, &[], FmeOptions::default()).unwrap();
        assert_eq!(out.constraints(), &[LinearConstraint::int([("x", 1)], a("a"))]);
        let v = AtomValuation::new().with("a", 1.0);
        let p: BTreeMap<String, f64> = [("x".to_string(), 1.0)].into();
        assert!(out.is_member(&v, &p, 0.0).unwrap());
    }
}
