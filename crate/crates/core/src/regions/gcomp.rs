//! The generalized compression region.

use crate::polytope::{AffineExpr, ConstraintSystem, LinearConstraint};

use super::{cst, mi};

fn i(a: &[&str], b: &[&str]) -> AffineExpr {
    mi(a.iter().copied(), b.iter().copied(), Vec::<&str>::new())
}

/// Marton coding on `(U1, U2)` compressed into a cloud center `X0` and
/// satellites `X1, X2`. Each `min{0, ...}` is expanded into one constraint
/// per argument.
pub fn gcomp_theorem2_region() -> ConstraintSystem {
    let c1 = cst("C1") + cst("C12");
    let c2 = cst("C2") + cst("C21");
    let all = cst("C1") + cst("C2") + cst("C12") + cst("C21");
    let u1y = i(&["U1"], &["Y1"]);
    let u2y = i(&["U2"], &["Y2"]);
    let marton = u1y.clone() + u2y.clone() - i(&["U1"], &["U2"]);
    let x12 = mi(["X1"], ["X2"], ["X0"]);
    let full = i(&["U1", "U2"], &["X0", "X1", "X2"]);
    let joint = marton.clone() + all - full.clone() - x12.clone();

    let mut sys = ConstraintSystem::new(["R1", "R2"]);
    let mut push = |lhs: &[(&str, i64)], rhs: AffineExpr| {
        sys.push(LinearConstraint::int(lhs.iter().copied(), rhs)).expect("declared variables");
    };
    for (r, u, uy) in [("R1", "U1", &u1y), ("R2", "U2", &u2y)] {
        push(&[(r, 1)], uy.clone());
        push(&[(r, 1)], uy.clone() + c1.clone() - i(&[u], &["X0", "X1"]));
        push(&[(r, 1)], uy.clone() + c2.clone() - i(&[u], &["X0", "X2"]));
    }
    let sum = &[("R1", 1), ("R2", 1)];
    push(sum, marton.clone());
    push(sum, marton.clone() + c1 - i(&["U1", "U2"], &["X0", "X1"]));
    push(sum, marton.clone() + c2 - i(&["U1", "U2"], &["X0", "X2"]));
    push(sum, marton.clone() + cst("C1") + cst("C2") - full - x12);
    push(&[("R1", 2), ("R2", 1)], joint.clone() + u1y - i(&["U1"], &["X0"]));
    push(&[("R1", 1), ("R2", 2)], joint.clone() + u2y - i(&["U2"], &["X0"]));
    push(&[("R1", 2), ("R2", 2)], joint + marton - i(&["U1", "U2"], &["X0"]));
    push(&[("R1", -1)], AffineExpr::zero());
    push(&[("R2", -1)], AffineExpr::zero());
    sys
}
