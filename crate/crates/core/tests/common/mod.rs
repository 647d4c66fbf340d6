//! Helpers shared by the integration test binaries.

use cran_core::regions::{gds_project, gds_theorem1_system, scheme3_side_conditions, Substitution};
use cran_core::verify::random::{gds_pmf, random_capacities};
use cran_core::{regions_equal_sampled, AtomValuation, ConstraintSystem, FmeOptions, SampleReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Valuations induced by random pmfs that respect `sub`, with random
/// capacities. Scheme III draws are kept only when its side conditions hold.
pub fn valuations(
    sub: Substitution,
    a: &ConstraintSystem,
    b: &ConstraintSystem,
    count: usize,
    seed: u64,
) -> Vec<AtomValuation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<String> = a.atoms().union(&b.atoms()).cloned().collect();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100 * count, "could not draw enough valid valuations");
        let card = 2 + tries % 2;
        let sparsity = if tries % 3 == 0 { 0.3 } else { 0.0 };
        let pmf = gds_pmf(&mut rng, Some(sub), card, sparsity).unwrap();
        let caps = random_capacities(&mut rng, 2.0);
        let val = pmf.atom_valuation(atoms.iter().map(String::as_str), &caps).unwrap();
        if sub == Substitution::SchemeIII && !scheme3_side_conditions(&val).unwrap() {
            continue;
        }
        out.push(val);
    }
    out
}

/// Projects the general system under `sub` and compares it with `explicit`
/// on `count` valuations and `points` rate points each.
pub fn compare_projection(sub: Substitution, explicit: &ConstraintSystem, count: usize, points: usize, seed: u64) -> SampleReport {
    let projected = gds_project(&gds_theorem1_system(), sub, FmeOptions::default()).unwrap();
    let vals = valuations(sub, &projected, explicit, count, seed);
    regions_equal_sampled(&projected, explicit, &vals, points, seed).unwrap()
}
