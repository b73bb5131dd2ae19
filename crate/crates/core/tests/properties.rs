//! Property tests against independent oracles.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use proptest::prelude::*;

use binres::corpus::{self, CorpusSpec};
use binres::driver::{locally_monomial_resolve, verify};
use binres::eorder::monotonicity_violations;
use binres::field::{q, qf};
use binres::invariant::{compare, GammaTriple, InvariantComponent, InvariantValue};
use binres::io::{parse_ideal, ChartSource};
use binres::monomialize::{hyperbolic_gcd_1var, p_power_split};
use binres::transform::transform_generator;
use binres::{Chart, FieldElement, Stratum, Q};

mod common;
use common::*;



fn chart(seed: u64, p: u64) -> Chart {
    let mut rng = corpus::rng(seed);
    let spec = CorpusSpec::default();
    let n = 1 + (seed % 4) as usize;
    corpus::random_chart(&mut rng, &spec, n, p)
}

#[test]
fn gcd_examples() {
    let f = |n| FieldElement::from_int(0, n);
    assert_eq!(hyperbolic_gcd_1var(2, &f(2), 4, &f(4)), Some((2, f(2))));
    assert_eq!(hyperbolic_gcd_1var(2, &f(1), 2, &f(2)), None);
    assert_eq!(hyperbolic_gcd_1var(3, &f(5), 3, &f(5)), Some((3, f(5))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gcd_agrees_with_division(
        pi in 0usize..5,
        a in 1u64..10,
        gens in prop::collection::vec((1u64..5, any::<i16>(), any::<bool>()), 1..4),
        mu0 in any::<i16>(),
    ) {
        let p = PRIMES[pi];
        let base = element(p, mu0 as i64);
        // related generators are multiples of the first, so common factors occur
        let mut sys = vec![(a, base.clone())];
        for (k, raw, related) in gens {
            if related {
                sys.push((a * k, base.pow(k as i64).unwrap()));
            } else {
                sys.push((k * (1 + a % 3), element(p, raw as i64)));
            }
        }
        let got = hyp_system(&sys);
        let oracle = sys.iter().skip(1).fold(hyp(p, sys[0].0, &sys[0].1), |g, (b, mu)| gcd(g, hyp(p, *b, mu)));
        let oracle = monic(trim(oracle));
        match got {
            None => prop_assert_eq!(oracle.len(), 1),
            Some((d, nu)) => prop_assert_eq!(monic(hyp(p, d, &nu)), oracle),
        }
    }

    #[test]
    fn frobenius_split_round_trips(
        pi in 1usize..5,
        delta in prop::collection::vec(-40i64..40, 1..4),
        raw in any::<i16>(),
    ) {
        let p = PRIMES[pi];
        prop_assume!(delta.iter().any(|&e| e != 0));
        let mu = element(p, raw as i64);
        let (s, d, root) = p_power_split(&delta, &mu, p).unwrap();
        let pw = (p as i64).pow(s);
        prop_assert_eq!(d.iter().map(|e| e * pw).collect::<Vec<_>>(), delta);
        prop_assert!(d.iter().any(|e| e % p as i64 != 0));
        prop_assert_eq!(root.pow(pw).unwrap(), mu);
    }

    #[test]
    fn eorder_is_monotone_on_strata(seed in any::<u64>(), pi in 0usize..4) {
        let ch = chart(seed, corpus::CHARACTERISTICS[pi]);
        prop_assert!(monotonicity_violations(&ch.ideal, ch.active_x()).unwrap().is_empty());
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), pi in 0usize..4) {
        let ch = chart(seed, corpus::CHARACTERISTICS[pi]);
        let back = parse_ideal(&ChartSource(&ch).to_string()).unwrap();
        prop_assert_eq!(&back.ideal, &ch.ideal);
        prop_assert_eq!(back.classes(), ch.classes());
    }

    #[test]
    fn transform_matches_substitution(
        seed in any::<u64>(),
        zmask in 1u64..16,
        pick in any::<usize>(),
        pts in prop::collection::vec(prop::collection::vec(1i64..6, 4), 2),
    ) {
        let ch = chart(seed, 0);
        let n = ch.dim();
        let z = Stratum(zmask & ((1 << n) - 1));
        prop_assume!(!z.is_empty());
        let zs: Vec<usize> = z.iter().collect();
        let i = zs[pick % zs.len()];
        // x_j = x'_j·x'_i for j ∈ Z \ {i}
        let down = |u: &[i64]| -> Vec<i64> {
            (0..n).map(|j| if z.contains(j) && j != i { u[j] * u[i] } else { u[j] }).collect()
        };
        for g in &ch.ideal.gens {
            let t = transform_generator(g, z, i, &ch.classes()).unwrap();
            let ratios: Vec<Option<Q>> = pts
                .iter()
                .map(|u| {
                    let before = eval(&g.terms(), &down(&u[..n]));
                    let after = eval(&t.terms(), &u[..n]);
                    if after.is_zero() {
                        prop_assert!(before.is_zero());
                        Ok(None)
                    } else {
                        Ok(Some(before / after))
                    }
                })
                .collect::<Result<_, TestCaseError>>()?;
            // equal up to one constant factor
            if let [Some(r1), Some(r2)] = &ratios[..] {
                prop_assert_eq!(r1, r2);
            }
        }
    }

    #[test]
    fn invariant_order_is_total(a in component_vec(), b in component_vec(), c in component_vec()) {
        let (a, b, c) = (value(a), value(b), value(c));
        let ab = compare(&a, &b).unwrap();
        prop_assert_eq!(compare(&b, &a).unwrap(), ab.reverse());
        prop_assert_eq!(compare(&a, &a).unwrap(), Ordering::Equal);
        if ab != Ordering::Greater && compare(&b, &c).unwrap() != Ordering::Greater {
            prop_assert_ne!(compare(&a, &c).unwrap(), Ordering::Greater);
        }
        prop_assert_eq!(ab == Ordering::Equal, a == b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resolved_trees_verify(seed in any::<u64>(), pi in 0usize..4) {
        let ch = chart(seed, corpus::CHARACTERISTICS[pi]);
        if let Ok(t) = locally_monomial_resolve(&ch, 500) {
            let rep = verify(&t);
            prop_assert!(rep.ok(), "{:?}", rep.problems);
        }
    }

    #[test]
    fn permuted_inputs_give_isomorphic_trees(seed in any::<u64>(), pi in 0usize..4, shuffle in any::<u64>()) {
        let ch = chart(seed, corpus::CHARACTERISTICS[pi]);
        let n = ch.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for k in (1..n).rev() {
            perm.swap(k, (s % (k as u64 + 1)) as usize);
            s /= 7;
        }
        let (Ok(a), Ok(b)) = (locally_monomial_resolve(&ch, 500), locally_monomial_resolve(&ch.permute(&perm), 500)) else {
            return Ok(());
        };
        prop_assert_eq!(a.signature(0), b.signature(0));
        prop_assert_eq!(a.invariant_profile(), b.invariant_profile());
    }
}

fn eval(terms: &[binres::Term], u: &[i64]) -> Q {
    terms
        .iter()
        .map(|t| {
            let mut v = t.coeff.value().clone();
            for (x, &e) in u.iter().zip(&t.exp) {
                let base = q(*x);
                v *= if e >= 0 { num_traits::pow(base, e as usize) } else { Q::one() / num_traits::pow(base, (-e) as usize) };
            }
            v
        })
        .sum()
}

fn component_vec() -> impl Strategy<Value = Vec<(u8, i64, i64, Vec<u32>)>> {
    prop::collection::vec((0u8..3, -3i64..4, 1i64..4, prop::collection::vec(0u32..4, 0..3)), 3)
}

fn value(raw: Vec<(u8, i64, i64, Vec<u32>)>) -> InvariantValue {
    let components = raw
        .into_iter()
        .map(|(kind, n, d, rho)| match kind {
            0 => InvariantComponent::fin(qf(n.abs(), d)),
            1 => InvariantComponent::gamma(GammaTriple { negp: -(n.abs() % 3) - 1, w: qf(n, d), rho }),
            _ => InvariantComponent::Inf,
        })
        .collect();
    InvariantValue { components }
}
