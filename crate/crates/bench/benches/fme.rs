//! Elimination cost for the data-sharing projections and for a denser
//! synthetic system.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cran_core::regions::{gds_project, gds_theorem1_system, Substitution};
use cran_core::{fme_project, AffineExpr, ConstraintSystem, FmeOptions, LinearConstraint};

fn projections(c: &mut Criterion) {
    let system = gds_theorem1_system();
    let mut group = c.benchmark_group("gds_projection");
    group.sample_size(20);
    for sub in [Substitution::SchemeI, Substitution::SchemeIII, Substitution::Cor4, Substitution::Cor5] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{sub:?}")), &sub, |b, &sub| {
            b.iter(|| gds_project(&system, sub, FmeOptions::default()).unwrap())
        });
    }
    group.finish();
}

/// Rows with coefficient patterns from a fixed linear congruential sequence,
/// so the bench needs no random number generator.
fn synthetic(rows: usize) -> ConstraintSystem {
    let vars = ["x", "y", "z", "w", "v"];
    let mut sys = ConstraintSystem::new(vars);
    let mut state: u64 = 12345;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 7) as i64 - 3
    };
    for k in 0..rows {
        let lhs: Vec<(&str, i64)> = vars.iter().map(|v| (*v, next())).collect();
        let rhs = AffineExpr::int(4) + AffineExpr::atom(format!("a{}", k % 3));
        sys.push(LinearConstraint::int(lhs, rhs)).unwrap();
    }
    sys.with_nonnegativity(vars).unwrap()
}

fn pruning(c: &mut Criterion) {
    let sys = synthetic(16);
    let mut group = c.benchmark_group("synthetic_elimination");
    group.sample_size(20);
    let plain = FmeOptions { chernikov: false, dominance: false, ..FmeOptions::default() };
    for (name, opts) in [("pruned", FmeOptions::default()), ("plain", plain)] {
        group.bench_function(name, |b| b.iter(|| fme_project(&sys, &["z", "w", "v"], opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, projections, pruning);
criterion_main!(benches);
