//! Binomial generators in normal form and ideals `J = M·I`.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fmt_q, q, FieldElement, Q};
use crate::stratum::Stratum;

/// Whether a variable may vanish (`X`) or is invertible on the chart (`Y`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarClass {
    X,
    Y,
}

/// A single coefficient-times-Laurent-monomial term. Exponents are dense over the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: FieldElement,
    pub exp: Vec<i64>,
}

/// A generator in the normal form of a binomial ideal.
///
/// Exponent vectors are dense of chart length. Factors (`m`, `lambda`, `nu`) and the
/// cores `alpha`, `beta` live on `X` variables; `gamma` lives on `Y` variables.
/// A `Hyperbolic` generator `x^λ(1 − μ·y^δ)` may carry `X` entries in `delta` only
/// transiently, between a substitution and the relabeling pass of its chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    Monomial {
        m: Vec<i64>,
    },
    Hyperbolic {
        lambda: Vec<i64>,
        mu: FieldElement,
        delta: Vec<i64>,
    },
    /// `x^ν (y^γ x^α − b x^β)`.
    Binomial {
        nu: Vec<i64>,
        gamma: Vec<i64>,
        alpha: Vec<i64>,
        beta: Vec<i64>,
        b: FieldElement,
    },
}

fn split(exp: &[i64], classes: &[VarClass]) -> (Vec<i64>, Vec<i64>) {
    let mut x = vec![0; exp.len()];
    let mut y = vec![0; exp.len()];
    for (i, &e) in exp.iter().enumerate() {
        match classes[i] {
            VarClass::X => x[i] = e,
            VarClass::Y => y[i] = e,
        }
    }
    (x, y)
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lex_positive(v: &[i64]) -> bool {
    v.iter().find(|&&e| e != 0).is_some_and(|&e| e > 0)
}

/// Sum of the entries of `v` over `lam`.
pub fn deg_on(v: &[i64], lam: Stratum) -> i64 {
    lam.iter().filter(|&i| i < v.len()).map(|i| v[i]).sum()
}

/// Normalizes a raw equation of at most two terms.
///
/// Like terms are merged first. One term gives a `Monomial` (its coefficient and
/// `Y`-part are units). Two terms give a `Hyperbolic` generator when, after removing
/// the common `X`-factor, some term is free of `X` variables, and a `Binomial` otherwise.
pub fn normalize_generator(terms: &[Term], classes: &[VarClass]) -> Result<Generator> {
    let n = classes.len();
    let mut merged: Vec<Term> = Vec::new();
    for t in terms {
        if t.exp.len() != n {
            return Err(Error::Input(format!("term has {} exponents, chart has {n}", t.exp.len())));
        }
        match merged.iter_mut().find(|m| m.exp == t.exp) {
            Some(m) => m.coeff = m.coeff.add(&t.coeff),
            None => merged.push(t.clone()),
        }
    }
    merged.retain(|t| !t.coeff.is_zero());
    for t in &merged {
        if t.exp.iter().zip(classes).any(|(&e, &c)| c == VarClass::X && e < 0) {
            return Err(Error::Input("negative exponent on a vanishing variable".into()));
        }
    }
    match merged.len() {
        0 => Err(Error::Input("zero polynomial".into())),
        1 => Ok(Generator::Monomial { m: split(&merged[0].exp, classes).0 }),
        2 => {
            let (xa, ga) = split(&merged[0].exp, classes);
            let (xb, gb) = split(&merged[1].exp, classes);
            let nu: Vec<i64> = xa.iter().zip(&xb).map(|(a, b)| *a.min(b)).collect();
            let xa = sub(&xa, &nu);
            let xb = sub(&xb, &nu);
            let (ca, cb) = (&merged[0].coeff, &merged[1].coeff);
            let za = xa.iter().all(|&e| e == 0);
            let zb = xb.iter().all(|&e| e == 0);
            if za || zb {
                // constant term first; if both are X-free orient δ lexicographically positive
                let first_const = if za && zb { lex_positive(&sub(&gb, &ga)) } else { za };
                let (c0, e0, c1, e1) = if first_const {
                    (ca, add(&xa, &ga), cb, add(&xb, &gb))
                } else {
                    (cb, add(&xb, &gb), ca, add(&xa, &ga))
                };
                let mu = c1.div(c0)?.neg();
                return Ok(Generator::Hyperbolic { lambda: nu, mu, delta: sub(&e1, &e0) });
            }
            let sa: i64 = xa.iter().sum();
            let sb: i64 = xb.iter().sum();
            let a_first = match sa.cmp(&sb) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => xa > xb,
            };
            let (alpha, ga, ca, beta, gb, cb) =
                if a_first { (xa, ga, ca, xb, gb, cb) } else { (xb, gb, cb, xa, ga, ca) };
            let b = cb.div(ca)?.neg();
            Ok(Generator::Binomial { nu, gamma: sub(&ga, &gb), alpha, beta, b })
        }
        k => Err(Error::Input(format!("{k} terms: not a binomial equation"))),
    }
}

impl Generator {
    pub fn len(&self) -> usize {
        self.factor().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The monomial factor: `m`, `λ` or `ν`.
    pub fn factor(&self) -> &[i64] {
        match self {
            Generator::Monomial { m } => m,
            Generator::Hyperbolic { lambda, .. } => lambda,
            Generator::Binomial { nu, .. } => nu,
        }
    }

    pub fn factor_mut(&mut self) -> &mut Vec<i64> {
        match self {
            Generator::Monomial { m } => m,
            Generator::Hyperbolic { lambda, .. } => lambda,
            Generator::Binomial { nu, .. } => nu,
        }
    }

    /// The same generator with its factor removed (the strict core).
    pub fn core(&self) -> Generator {
        let mut g = self.clone();
        g.factor_mut().iter_mut().for_each(|e| *e = 0);
        g
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Generator::Monomial { m } if m.iter().all(|&e| e == 0))
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Generator::Hyperbolic { .. })
    }

    /// Expands back into terms. The first term has coefficient 1.
    pub fn terms(&self) -> Vec<Term> {
        let p = self.characteristic();
        match self {
            Generator::Monomial { m } => vec![Term { coeff: FieldElement::one(p), exp: m.clone() }],
            Generator::Hyperbolic { lambda, mu, delta } => vec![
                Term { coeff: FieldElement::one(p), exp: lambda.clone() },
                Term { coeff: mu.neg(), exp: add(lambda, delta) },
            ],
            Generator::Binomial { nu, gamma, alpha, beta, b } => vec![
                Term { coeff: FieldElement::one(p), exp: add(&add(nu, alpha), gamma) },
                Term { coeff: b.neg(), exp: add(nu, beta) },
            ],
        }
    }

    fn characteristic(&self) -> u64 {
        match self {
            Generator::Monomial { .. } => 0,
            Generator::Hyperbolic { mu, .. } => mu.characteristic(),
            Generator::Binomial { b, .. } => b.characteristic(),
        }
    }

    /// `X`-parts of the terms, the data that E-orders depend on.
    pub fn x_terms(&self, classes: &[VarClass]) -> Vec<Vec<i64>> {
        let xp = |v: Vec<i64>| split(&v, classes).0;
        match self {
            Generator::Monomial { m } => vec![xp(m.clone())],
            Generator::Hyperbolic { lambda, delta, .. } => {
                vec![xp(lambda.clone()), xp(add(lambda, delta))]
            }
            Generator::Binomial { nu, alpha, beta, .. } => {
                vec![xp(add(nu, alpha)), xp(add(nu, beta))]
            }
        }
    }

    /// E-order along the stratum `lam`.
    pub fn eord(&self, lam: Stratum) -> i64 {
        match self {
            Generator::Monomial { m } => deg_on(m, lam),
            Generator::Hyperbolic { lambda, delta, .. } => {
                deg_on(lambda, lam) + deg_on(delta, lam).min(0).max(0)
            }
            Generator::Binomial { nu, alpha, beta, .. } => {
                deg_on(nu, lam) + deg_on(alpha, lam).min(deg_on(beta, lam))
            }
        }
    }

    /// Applies a variable permutation `perm[i] = σ(i)` to all exponent vectors.
    pub fn permute(&self, perm: &[usize]) -> Generator {
        let pv = |v: &Vec<i64>| {
            let mut out = vec![0; v.len()];
            for (i, &e) in v.iter().enumerate() {
                out[perm[i]] = e;
            }
            out
        };
        match self {
            Generator::Monomial { m } => Generator::Monomial { m: pv(m) },
            Generator::Hyperbolic { lambda, mu, delta } => {
                Generator::Hyperbolic { lambda: pv(lambda), mu: mu.clone(), delta: pv(delta) }
            }
            Generator::Binomial { nu, gamma, alpha, beta, b } => Generator::Binomial {
                nu: pv(nu),
                gamma: pv(gamma),
                alpha: pv(alpha),
                beta: pv(beta),
                b: b.clone(),
            },
        }
    }

    /// Checks the stored-form invariants against the chart classes.
    pub fn check_form(&self, classes: &[VarClass]) -> Result<()> {
        let bad = |msg: &str| Err(Error::Precondition(format!("generator {self:?}: {msg}")));
        let on_y = |v: &[i64]| v.iter().zip(classes).any(|(&e, &c)| c == VarClass::Y && e != 0);
        let on_x = |v: &[i64]| v.iter().zip(classes).any(|(&e, &c)| c == VarClass::X && e != 0);
        if on_y(self.factor()) {
            return bad("factor on an invertible variable");
        }
        match self {
            Generator::Monomial { .. } => Ok(()),
            Generator::Hyperbolic { mu, delta, .. } => {
                if mu.is_zero() {
                    return bad("zero coefficient");
                }
                if on_x(delta) {
                    return bad("hyperbolic exponent on a vanishing variable");
                }
                Ok(())
            }
            Generator::Binomial { gamma, alpha, beta, b, .. } => {
                if b.is_zero() {
                    return bad("zero coefficient");
                }
                if on_x(gamma) || on_y(alpha) || on_y(beta) {
                    return bad("misplaced exponents");
                }
                if alpha.iter().zip(beta).any(|(&a, &b)| a > 0 && b > 0) {
                    return bad("alpha and beta share support");
                }
                let (sa, sb): (i64, i64) = (alpha.iter().sum(), beta.iter().sum());
                if sa == 0 || sa > sb {
                    return bad("term order violated");
                }
                Ok(())
            }
        }
    }
}

/// Renders a field element with a symmetric residue for `p > 0`.
fn signed_value(c: &FieldElement) -> Q {
    let v = c.value().clone();
    let p = c.characteristic();
    if p > 0 && v > q(p as i64) / q(2) {
        v - q(p as i64)
    } else {
        v
    }
}

fn monomial_str(exp: &[i64], names: &[String]) -> String {
    let parts: Vec<String> = exp
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{e}", names[i]) })
        .collect();
    parts.join("*")
}

/// Prints a term list in the input grammar, e.g. `x1^2 - 3*x2^3`.
pub fn terms_str(terms: &[Term], names: &[String]) -> String {
    let mut out = String::new();
    for (k, t) in terms.iter().enumerate() {
        let c = signed_value(&t.coeff);
        let neg = c < Q::zero();
        let a = if neg { -c } else { c };
        let mono = monomial_str(&t.exp, names);
        let body = match (a == q(1), mono.is_empty()) {
            (true, true) => "1".to_string(),
            (true, false) => mono,
            (false, true) => fmt_q(&a),
            (false, false) => format!("{}*{mono}", fmt_q(&a)),
        };
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// An ideal `J = M·I`: a rational monomial part on exceptional variables and an
/// ordered generator list for `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ideal {
    pub gens: Vec<Generator>,
    #[serde(with = "qvec_serde")]
    pub mpart: Vec<Q>,
}

impl Ideal {
    pub fn new(gens: Vec<Generator>, n: usize) -> Self {
        Ideal { gens, mpart: vec![Q::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.mpart.len()
    }

    /// `I = 1`: some generator is the unit monomial.
    pub fn is_unit_i(&self) -> bool {
        self.gens.iter().any(Generator::is_unit)
    }

    pub fn mpart_is_one(&self) -> bool {
        self.mpart.iter().all(Zero::is_zero)
    }

    /// Moves the componentwise minimum of the generator factors on the listed
    /// variables into `mpart`.
    pub fn refactorize(&self, exceptional_x: Stratum) -> Ideal {
        let mut out = self.clone();
        if out.gens.is_empty() {
            return out;
        }
        for i in exceptional_x.iter() {
            let m = out.gens.iter().map(|g| g.factor()[i]).min().unwrap_or(0);
            if m > 0 {
                out.mpart[i] += q(m);
                for g in &mut out.gens {
                    g.factor_mut()[i] -= m;
                }
            }
        }
        out
    }

    /// E-order of `J` along `lam`; the generic stratum has order 0.
    pub fn eord(&self, lam: Stratum) -> Result<Q> {
        if self.gens.is_empty() {
            return Err(Error::Algebra("E-order of the zero ideal".into()));
        }
        let m: Q = lam.iter().map(|i| self.mpart[i].clone()).sum();
        let g = self.gens.iter().map(|g| g.eord(lam)).min().unwrap();
        Ok(m + q(g))
    }

    /// E-order of the `I` part alone.
    pub fn eord_i(&self, lam: Stratum) -> Result<Q> {
        if self.gens.is_empty() {
            return Err(Error::Algebra("E-order of the zero ideal".into()));
        }
        Ok(q(self.gens.iter().map(|g| g.eord(lam)).min().unwrap()))
    }

    pub fn permute(&self, perm: &[usize]) -> Ideal {
        let mut mpart = vec![Q::zero(); self.dim()];
        for (i, v) in self.mpart.iter().enumerate() {
            mpart[perm[i]] = v.clone();
        }
        Ideal { gens: self.gens.iter().map(|g| g.permute(perm)).collect(), mpart }
    }
}

pub(crate) mod qvec_serde {
    use super::*;
    use crate::field::parse_q;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}
