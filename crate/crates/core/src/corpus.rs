//! Seeded pseudo-random binomial ideals for testing and benchmarking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::field::{FieldElement, Q};
use crate::ideal::{normalize_generator, Generator, Term, VarClass};
use crate::stratum::Stratum;

pub const CHARACTERISTICS: [u64; 4] = [0, 2, 3, 5];

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub max_vars: usize,
    pub max_exp: i64,
    pub max_gens: usize,
    /// Probability that a generator is a monomial.
    pub monomial_rate: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { max_vars: 4, max_exp: 4, max_gens: 3, monomial_rate: 0.15 }
    }
}

fn coefficient(rng: &mut ChaCha8Rng, p: u64) -> FieldElement {
    if p > 0 {
        return FieldElement::from_int(p, rng.gen_range(1..p as i64));
    }
    let n = rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let d = rng.gen_range(1..=2i64);
    FieldElement::new(0, Q::new(n.into(), d.into())).expect("nonzero denominator")
}

/// One generator with positive degree on both terms after removing the common factor.
fn generator(rng: &mut ChaCha8Rng, spec: &CorpusSpec, n: usize, p: u64) -> Generator {
    let cls = vec![VarClass::X; n];
    loop {
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=spec.max_exp)).collect();
        if rng.gen_bool(spec.monomial_rate) {
            if a.iter().sum::<i64>() > 0 {
                return Generator::Monomial { m: a };
            }
            continue;
        }
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=spec.max_exp)).collect();
        let free_a: i64 = a.iter().zip(&b).map(|(x, y)| x - x.min(y)).sum();
        let free_b: i64 = a.iter().zip(&b).map(|(x, y)| y - x.min(y)).sum();
        if free_a == 0 || free_b == 0 {
            continue;
        }
        let terms = [
            Term { coeff: FieldElement::one(p), exp: a },
            Term { coeff: coefficient(rng, p).neg(), exp: b },
        ];
        if let Ok(g) = normalize_generator(&terms, &cls) {
            return g;
        }
    }
}

/// A root chart with a random ideal in `n` variables over characteristic `p`.
pub fn random_chart(rng: &mut ChaCha8Rng, spec: &CorpusSpec, n: usize, p: u64) -> Chart {
    let k = rng.gen_range(1..=spec.max_gens);
    let gens = (0..k).map(|_| generator(rng, spec, n, p)).collect();
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    Chart::root(p, &names, Stratum::EMPTY, gens)
}

/// `count` charts from `seed`, cycling through the test characteristics.
pub fn corpus(seed: u64, count: usize) -> Vec<Chart> {
    corpus_with(seed, count, &CorpusSpec::default())
}

pub fn corpus_with(seed: u64, count: usize, spec: &CorpusSpec) -> Vec<Chart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = rng.gen_range(1..=spec.max_vars);
            random_chart(&mut rng, spec, n, CHARACTERISTICS[k % CHARACTERISTICS.len()])
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let a = corpus(7, 40);
        assert_eq!(a, corpus(7, 40));
        for ch in &a {
            ch.check_form().unwrap();
            assert!(ch.dim() <= 4);
            assert!(!ch.ideal.gens.is_empty());
        }
        assert!(a.iter().any(|c| c.characteristic == 3));
    }
}
