//! Random pmf-induced valuations for the G-DS family.
//!
//! Auxiliaries get a random joint law (or a product law when the structure
//! demands independence), BS inputs are random deterministic functions of
//! the auxiliaries each BS knows, and the second hop is a random channel.

use rand::Rng;

use crate::discrete::{Channel, DiscreteError, JointPmf};
use crate::polytope::AtomValuation;
use crate::regions::Substitution;

/// Uniform point of the probability simplex; each entry is zeroed with
/// probability `sparsity` (at least one entry stays positive).
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize, sparsity: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// A channel with independent random rows.
pub fn random_channel<R: Rng>(
    rng: &mut R,
    inputs: Vec<(&str, usize)>,
    outputs: Vec<(&str, usize)>,
    sparsity: f64,
) -> Result<Channel, DiscreteError> {
    let rows: usize = inputs.iter().map(|v| v.1).product();
    let k: usize = outputs.iter().map(|v| v.1).product();
    let probs = (0..rows).flat_map(|_| random_simplex(rng, k, sparsity)).collect();
    Channel::new(inputs, outputs, probs)
}

/// A single output variable that is a random function of the inputs.
pub fn random_function<R: Rng>(
    rng: &mut R,
    inputs: Vec<(&str, usize)>,
    output: (&str, usize),
) -> Result<Channel, DiscreteError> {
    let rows: usize = inputs.iter().map(|v| v.1).product();
    let sizes: Vec<usize> = inputs.iter().map(|v| v.1).collect();
    let table: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..output.1)).collect();
    Channel::deterministic(inputs, vec![output], move |idx| {
        let r = idx.iter().zip(&sizes).fold(0, |acc, (i, s)| acc * s + i);
        vec![table[r]]
    })
}

fn joint<R: Rng>(rng: &mut R, vars: &[&str], card: usize, sparsity: f64) -> Result<JointPmf, DiscreteError> {
    let n = card.pow(vars.len() as u32);
    JointPmf::new(vars.iter().map(|v| (*v, card)).collect(), random_simplex(rng, n, sparsity))
}

fn product<R: Rng>(rng: &mut R, vars: &[&str], card: usize, sparsity: f64) -> Result<JointPmf, DiscreteError> {
    let mut pmf = joint(rng, &vars[..1], card, sparsity)?;
    for v in &vars[1..] {
        pmf = pmf.product(&joint(rng, &[v], card, sparsity)?)?;
    }
    Ok(pmf)
}

/// A pmf for the full scheme (`None`) or one of its restrictions, with
/// auxiliaries of size `card` and binary BS inputs and user outputs.
///
/// Variable names match the atoms produced by the corresponding projection:
/// `U0..V2, X1, X2, Y1, Y2` in general, `U, V, X1, Y1, Y2` for the one-BS
/// case and `U, X1, X2, Y1` for the one-user case.
pub fn gds_pmf<R: Rng>(
    rng: &mut R,
    structure: Option<Substitution>,
    card: usize,
    sparsity: f64,
) -> Result<JointPmf, DiscreteError> {
    let two_hop = |rng: &mut R, pmf: JointPmf, x1: &[&str], x2: &[&str]| -> Result<JointPmf, DiscreteError> {
        let f1 = random_function(rng, x1.iter().map(|v| (*v, card)).collect(), ("X1", 2))?;
        let f2 = random_function(rng, x2.iter().map(|v| (*v, card)).collect(), ("X2", 2))?;
        let ch = random_channel(rng, vec![("X1", 2), ("X2", 2)], vec![("Y1", 2), ("Y2", 2)], sparsity)?;
        pmf.compose(&f1)?.compose(&f2)?.compose(&ch)
    };
    match structure {
        None => {
            let aux = joint(rng, &["U0", "V0", "U1", "V1", "U2", "V2"], card, sparsity)?;
            two_hop(rng, aux, &["U0", "V0", "U1", "V1"], &["U0", "V0", "U2", "V2"])
        }
        Some(Substitution::SchemeI) => {
            let aux = joint(rng, &["U0", "V0"], card, sparsity)?;
            two_hop(rng, aux, &["U0", "V0"], &["U0", "V0"])
        }
        Some(Substitution::SchemeII) => {
            let aux = product(rng, &["U0", "V0", "U1", "V1", "U2", "V2"], card, sparsity)?;
            two_hop(rng, aux, &["U0", "V0", "U1", "V1"], &["U0", "V0", "U2", "V2"])
        }
        Some(Substitution::SchemeIII) => {
            let aux = joint(rng, &["U1", "V1", "U2", "V2"], card, sparsity)?;
            two_hop(rng, aux, &["U1", "V1"], &["U2", "V2"])
        }
        Some(Substitution::Cor4) => {
            let aux = joint(rng, &["U", "V"], card, sparsity)?;
            let f1 = random_function(rng, vec![("U", card), ("V", card)], ("X1", 2))?;
            let ch = random_channel(rng, vec![("X1", 2)], vec![("Y1", 2), ("Y2", 2)], sparsity)?;
            aux.compose(&f1)?.compose(&ch)
        }
        Some(Substitution::Cor5) => {
            let u = joint(rng, &["U"], card, sparsity)?;
            let x = random_channel(rng, vec![("U", card)], vec![("X1", 2), ("X2", 2)], sparsity)?;
            let ch = random_channel(rng, vec![("X1", 2), ("X2", 2)], vec![("Y1", 2)], sparsity)?;
            u.compose(&x)?.compose(&ch)
        }
    }
}

/// Fronthaul and cooperation capacities drawn uniformly from `[0, max]`.
pub fn random_capacities<R: Rng>(rng: &mut R, max: f64) -> AtomValuation {
    ["C1", "C2", "C12", "C21"].into_iter().map(|c| (c.to_string(), rng.gen_range(0.0..=max))).collect()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = gds_pmf(&mut rng, None, 2, 0.0).unwrap();
        assert_eq!(full.probs().len(), 1 << 10);
        let c5 = gds_pmf(&mut rng, Some(Substitution::Cor5), 3, 0.0).unwrap();
        assert_eq!(c5.names(), vec!["U", "X1", "X2", "Y1"]);
    }

    #[test]
    fn inputs_are_functions_of_auxiliaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pmf = gds_pmf(&mut rng, Some(Substitution::SchemeIII), 2, 0.2).unwrap();
        let h = pmf.entropy(["X1", "U1", "V1"]).unwrap() - pmf.entropy(["U1", "V1"]).unwrap();
        assert!(h.abs() < 1e-12);
        let pmf = gds_pmf(&mut rng, Some(Substitution::SchemeII), 2, 0.0).unwrap();
        assert!(pmf.total_correlation(&["U0", "V0", "U1", "V1", "U2", "V2"]).unwrap() < 1e-12);
    }
}
