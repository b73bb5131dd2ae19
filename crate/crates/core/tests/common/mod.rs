//! Shared oracles for the integration tests.
#![allow(dead_code)]

use binres::monomialize::hyperbolic_gcd_1var;
use binres::FieldElement;
use binres::field::qf;

pub const PRIMES: [u64; 5] = [0, 2, 3, 5, 7];

pub fn element(p: u64, raw: i64) -> FieldElement {
    if p > 0 {
        FieldElement::from_int(p, 1 + raw.rem_euclid(p as i64 - 1))
    } else {
        FieldElement::new(0, qf(1 + raw.rem_euclid(3), 1 + raw.rem_euclid(2))).unwrap()
    }
}

// ---- univariate polynomial oracle over the coefficient field ----

pub type Poly = Vec<FieldElement>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last().is_some_and(FieldElement::is_zero) {
        f.pop();
    }
    f
}

pub fn rem(mut f: Poly, g: &Poly) -> Poly {
    let lead = g.last().unwrap().inv().unwrap();
    loop {
        f = trim(f);
        if f.len() < g.len() {
            return f;
        }
        let shift = f.len() - g.len();
        let c = f.last().unwrap().mul(&lead);
        for (k, gk) in g.iter().enumerate() {
            f[shift + k] = f[shift + k].sub(&c.mul(gk));
        }
    }
}

pub fn monic(f: Poly) -> Poly {
    let l = f.last().unwrap().inv().unwrap();
    f.iter().map(|c| c.mul(&l)).collect()
}

pub fn gcd(mut f: Poly, mut g: Poly) -> Poly {
    while !trim(g.clone()).is_empty() {
        let r = rem(f, &g);
        f = g;
        g = r;
    }
    monic(trim(f))
}

/// `1 − μ·y^a` as a coefficient list.
pub fn hyp(p: u64, a: u64, mu: &FieldElement) -> Poly {
    let mut f = vec![FieldElement::zero(p); a as usize + 1];
    f[0] = FieldElement::one(p);
    f[a as usize] = mu.neg();
    f
}

pub fn hyp_system(sys: &[(u64, FieldElement)]) -> Option<(u64, FieldElement)> {
    let mut acc = Some(sys[0].clone());
    for (b, mu) in &sys[1..] {
        acc = acc.and_then(|(a, m)| hyperbolic_gcd_1var(a, &m, *b, mu));
    }
    acc
}

