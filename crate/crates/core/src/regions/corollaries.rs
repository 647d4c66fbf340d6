//! Explicit inequality lists of the restricted G-DS schemes and the two
//! small topologies.

use crate::polytope::{AffineExpr, AtomValuation, ConstraintSystem, LinearConstraint, PolytopeError};

use super::{cst, mi};

type Lhs = &'static [(&'static str, i64)];

const R1: Lhs = &[("R1", 1)];
const R2: Lhs = &[("R2", 1)];
const SUM: Lhs = &[("R1", 1), ("R2", 1)];

fn i(a: &[&str], b: &[&str]) -> AffineExpr {
    mi(a.iter().copied(), b.iter().copied(), Vec::<&str>::new())
}

fn ic(a: &[&str], b: &[&str], c: &[&str]) -> AffineExpr {
    mi(a.iter().copied(), b.iter().copied(), c.iter().copied())
}

fn build(vars: &[&str], rows: Vec<(Lhs, AffineExpr)>) -> ConstraintSystem {
    let mut sys = ConstraintSystem::new(vars.iter().copied());
    for (lhs, rhs) in rows {
        sys = sys.with(LinearConstraint::int(lhs.iter().copied(), rhs));
    }
    for v in vars {
        sys = sys.with(LinearConstraint::int([(*v, -1)], AffineExpr::zero()));
    }
    sys
}

/// Common auxiliaries only.
pub fn scheme1_region() -> ConstraintSystem {
    let (c1, c2, c12, c21) = (cst("C1"), cst("C2"), cst("C12"), cst("C21"));
    build(
        &["R1", "R2"],
        vec![
            (R1, i(&["U0"], &["Y1"])),
            (R2, i(&["V0"], &["Y2"])),
            (SUM, i(&["U0"], &["Y1"]) + i(&["V0"], &["Y2"]) - i(&["U0"], &["V0"])),
            (SUM, c1.clone() + c12),
            (SUM, c2.clone() + c21),
            (SUM, c1 + c2),
        ],
    )
}

/// Independent auxiliaries.
pub fn scheme2_region() -> ConstraintSystem {
    let c1c12 = cst("C1") + cst("C12");
    let c2c21 = cst("C2") + cst("C21");
    let all = cst("C1") + cst("C2") + cst("C12") + cst("C21");
    let u2 = ic(&["U2"], &["Y1"], &["U0", "U1"]);
    let u1 = ic(&["U1"], &["Y1"], &["U0", "U2"]);
    let v2 = ic(&["V2"], &["Y2"], &["V0", "V1"]);
    let v1 = ic(&["V1"], &["Y2"], &["V0", "V2"]);
    let u12 = ic(&["U1", "U2"], &["Y1"], &["U0"]);
    let v12 = ic(&["V1", "V2"], &["Y2"], &["V0"]);
    build(
        &["R1", "R2"],
        vec![
            (R1, c1c12.clone() + u2.clone()),
            (R1, c2c21.clone() + u1.clone()),
            (R1, i(&["U0", "U1", "U2"], &["Y1"])),
            (R2, c1c12.clone() + v2.clone()),
            (R2, c2c21.clone() + v1.clone()),
            (R2, i(&["V0", "V1", "V2"], &["Y2"])),
            (SUM, cst("C1") + cst("C2")),
            (SUM, c1c12 + u2 + v2),
            (SUM, c2c21 + u1 + v1),
            (&[("R1", 1), ("R2", 2)], all.clone() + v12.clone()),
            (&[("R1", 2), ("R2", 1)], all.clone() + u12.clone()),
            (&[("R1", 2), ("R2", 2)], all + u12 + v12),
        ],
    )
}

/// Private auxiliaries only. The four side conditions on the pmf are
/// checked separately by [`scheme3_side_conditions`].
pub fn scheme3_region() -> ConstraintSystem {
    let c1c12 = cst("C1") + cst("C12");
    let c2c21 = cst("C2") + cst("C21");
    let a_u2 = i(&["U2"], &["U1", "Y1"]);
    let a_u1 = i(&["U1"], &["U2", "Y1"]);
    let a_v2 = i(&["V2"], &["V1", "Y2"]);
    let a_v1 = i(&["V1"], &["V2", "Y2"]);
    let u12y = i(&["U1", "U2"], &["Y1"]);
    let v12y = i(&["V1", "V2"], &["Y2"]);
    let cross = i(&["U1", "V1"], &["U2", "V2"]);
    let mut rows: Vec<(Lhs, AffineExpr)> = vec![
        (R1, c1c12.clone() + a_u2.clone() - i(&["U2"], &["U1", "V1"])),
        (R1, c2c21.clone() + a_u1.clone() - i(&["U1"], &["U2", "V2"])),
        (R1, u12y.clone()),
        (R1, u12y.clone() + a_v1.clone() - i(&["V1"], &["U1", "U2"])),
        (R1, u12y.clone() + a_v2.clone() - i(&["V2"], &["U1", "U2"])),
        (R2, c1c12.clone() + a_v2.clone() - i(&["V2"], &["U1", "V1"])),
        (R2, c2c21.clone() + a_v1.clone() - i(&["V1"], &["U2", "V2"])),
        (R2, v12y.clone()),
        (R2, v12y.clone() + a_u2.clone() - i(&["U2"], &["V1", "V2"])),
        (R2, v12y.clone() + a_u1.clone() - i(&["U1"], &["V1", "V2"])),
        (SUM, u12y.clone() + v12y.clone() - i(&["U1", "U2"], &["V1", "V2"])),
        (SUM, cst("C1") + cst("C2") - cross.clone()),
    ];
    let base1 = c1c12 - cross.clone();
    rows.push((SUM, base1.clone() + a_u2.clone() + a_v2.clone() - i(&["U2"], &["V2"])));
    rows.push((
        SUM,
        base1.clone() + a_u2.clone() * 2 + v12y.clone() - i(&["U2"], &["V1"]) - i(&["U2"], &["V2"])
            + i(&["V1"], &["V2"]),
    ));
    rows.push((
        SUM,
        base1 + u12y.clone() + a_v2.clone() * 2 - i(&["U1"], &["V2"]) - i(&["U2"], &["V2"]) + i(&["U1"], &["U2"]),
    ));
    let base2 = c2c21 - cross;
    rows.push((SUM, base2.clone() + a_u1.clone() + a_v1.clone() - i(&["U1"], &["V1"])));
    rows.push((
        SUM,
        base2.clone() + a_u1.clone() * 2 + v12y - i(&["U1"], &["V1"]) - i(&["U1"], &["V2"]) + i(&["V1"], &["V2"]),
    ));
    rows.push((
        SUM,
        base2 + u12y + a_v1 * 2 - i(&["U1"], &["V1"]) - i(&["U2"], &["V1"]) + i(&["U1"], &["U2"]),
    ));
    build(&["R1", "R2"], rows)
}

/// Side conditions are strict; they count as satisfied only with this margin.
pub const SIDE_CONDITION_TOL: f64 = 1e-9;

/// `rhs - lhs` of the four side conditions on the private auxiliaries.
pub fn scheme3_side_margins(valuation: &AtomValuation) -> Result<[f64; 4], PolytopeError> {
    let a_u1 = i(&["U1"], &["U2", "Y1"]);
    let a_u2 = i(&["U2"], &["U1", "Y1"]);
    let a_v1 = i(&["V1"], &["V2", "Y2"]);
    let a_v2 = i(&["V2"], &["V1", "Y2"]);
    let exprs = [
        a_u1.clone() + a_v1.clone() - i(&["U1"], &["V1"]),
        a_u2.clone() + a_v2.clone() - i(&["U2"], &["V2"]),
        a_u1 + a_v2 - i(&["U1"], &["V2"]),
        a_u2 + a_v1 - i(&["U2"], &["V1"]),
    ];
    let mut out = [0.0; 4];
    for (o, e) in out.iter_mut().zip(&exprs) {
        *o = e.eval(valuation)?;
    }
    Ok(out)
}

/// True when all four side conditions hold strictly (margin above
/// [`SIDE_CONDITION_TOL`]); otherwise the parameters are infeasible for
/// the scheme, whatever the rates.
pub fn scheme3_side_conditions(valuation: &AtomValuation) -> Result<bool, PolytopeError> {
    Ok(scheme3_side_margins(valuation)?.iter().all(|m| *m > SIDE_CONDITION_TOL))
}

/// One BS, two users: Marton's region with a fronthaul sum constraint.
pub fn corollary4_region() -> ConstraintSystem {
    build(
        &["R1", "R2"],
        vec![
            (R1, i(&["U"], &["Y1"])),
            (R2, i(&["V"], &["Y2"])),
            (SUM, i(&["U"], &["Y1"]) + i(&["V"], &["Y2"]) - i(&["U"], &["V"])),
            (SUM, cst("C1")),
        ],
    )
}

fn corollary5_bounds() -> Vec<(i64, AffineExpr)> {
    vec![
        (1, cst("C1") + cst("C2") - ic(&["X1"], &["X2"], &["U"])),
        (1, cst("C1") + cst("C12") + ic(&["X2"], &["Y1"], &["U", "X1"])),
        (1, cst("C2") + cst("C21") + ic(&["X1"], &["Y1"], &["U", "X2"])),
        (1, i(&["X1", "X2"], &["Y1"])),
        (
            2,
            cst("C1") + cst("C2") + cst("C12") + cst("C21") + ic(&["X1", "X2"], &["Y1"], &["U"])
                - ic(&["X1"], &["X2"], &["U"]),
        ),
    ]
}

/// Two BSs, one user, as a system over `R1` alone.
pub fn corollary5_system() -> ConstraintSystem {
    let mut sys = ConstraintSystem::new(["R1"]);
    for (k, rhs) in corollary5_bounds() {
        sys = sys.with(LinearConstraint::int([("R1", k)], rhs));
    }
    sys.with(LinearConstraint::int([("R1", -1)], AffineExpr::zero()))
}

/// The largest achievable `R1`: the minimum of the five bounds, floored at 0.
pub fn corollary5_rate(valuation: &AtomValuation) -> Result<f64, PolytopeError> {
    let mut best = f64::INFINITY;
    for (k, rhs) in corollary5_bounds() {
        best = best.min(rhs.eval(valuation)? / k as f64);
    }
    Ok(best.max(0.0))
}
