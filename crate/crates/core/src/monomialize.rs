//! Local monomial forms of locally monomial ideals, and regularity checks.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::field::{FieldElement, Q};
use crate::ideal::{Generator, Ideal, VarClass};
use crate::lattice;
use crate::stratum::Stratum;

/// A new coordinate `z = 1 − η·y^a` replacing the invertible variable `index`.
/// `s` is the `p`-power exponent of the generator it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZVar {
    pub index: usize,
    pub eta: FieldElement,
    pub a: Vec<i64>,
    pub s: u32,
}

/// `J = ⟨x^{λ_1}, …, x^{λ_t}⟩` near a point, in the coordinates `x` (on the stratum) and `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalMonomialForm {
    pub stratum: Stratum,
    /// Constant-term generators that vanish at the point, by position in the generator list.
    pub vanishing: Vec<usize>,
    pub zvars: Vec<ZVar>,
    /// Minimal generators, dense over the chart; a `z` entry sits at the index it replaces.
    pub lambdas: Vec<Vec<i64>>,
}

impl LocalMonomialForm {
    pub fn is_unit(&self) -> bool {
        self.lambdas.iter().any(|l| l.iter().all(|&e| e == 0))
    }

    pub fn z_indices(&self) -> Stratum {
        Stratum::from_indices(self.zvars.iter().map(|z| z.index))
    }
}

/// Writes `1 − μ·y^δ` as `(1 − μ'·y^{δ'})^{p^s}` with `s` maximal.
///
/// In characteristic `p` the Frobenius root of `μ ∈ 𝔽_p` is `μ` itself. When the
/// coefficient lives in a different field, the smallest `p^s`-th root is taken.
pub fn p_power_split(delta: &[i64], mu: &FieldElement, p: u64) -> Result<(u32, Vec<i64>, FieldElement)> {
    if p == 0 || delta.iter().all(|&e| e == 0) {
        return Ok((0, delta.to_vec(), mu.clone()));
    }
    let s = delta.iter().filter(|&&e| e != 0).map(|&e| lattice::valuation(e, p)).min().unwrap();
    let pw = p.pow(s) as i64;
    let d: Vec<i64> = delta.iter().map(|&e| e / pw).collect();
    if s == 0 {
        return Ok((0, d, mu.clone()));
    }
    let root = if mu.characteristic() == p {
        mu.clone()
    } else {
        mu.roots(pw as u64)
            .into_iter()
            .min_by(|a, b| a.value().cmp(b.value()))
            .ok_or_else(|| Error::Algebra(format!("{mu} has no {pw}-th root in the coefficient field")))?
    };
    Ok((s, d, root))
}

/// `gcd(1 − μ1·y^a, 1 − μ2·y^b)` in one invertible variable, as `1 − ν·y^g`.
/// `None` means the two generate the unit ideal.
pub fn hyperbolic_gcd_1var(a: u64, mu1: &FieldElement, b: u64, mu2: &FieldElement) -> Option<(u64, FieldElement)> {
    // work with y^a − A where A = 1/μ
    let (mut a, mut aa) = (a, mu1.inv().ok()?);
    let (mut b, mut bb) = (b, mu2.inv().ok()?);
    loop {
        if a < b {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut aa, &mut bb);
        }
        if b == 0 {
            // y^0 − B is the constant 1 − B
            return if bb.is_one() { Some((a, aa.inv().ok()?)) } else { None };
        }
        // y^a − A ≡ B·y^{a−b} − A  mod  y^b − B
        aa = aa.div(&bb).ok()?;
        a -= b;
    }
}

fn restrict(v: &[i64], lam: Stratum) -> Vec<i64> {
    v.iter().enumerate().map(|(i, &e)| if lam.contains(i) { e } else { 0 }).collect()
}

fn add_into(v: &mut [i64], w: &[i64]) {
    for (a, b) in v.iter_mut().zip(w) {
        *a += b;
    }
}

/// Incremental construction of a local form, one constant-term generator at a time.
#[derive(Clone)]
struct Builder {
    p: u64,
    zvars: Vec<ZVar>,
    /// The row of `lambdas` that introduced each `z`.
    zrows: Vec<usize>,
    vanishing: Vec<usize>,
    lambdas: Vec<Vec<i64>>,
}

enum Step {
    Ok(Builder),
    Infeasible,
}

impl Builder {
    fn rows(&self) -> Vec<Vec<i64>> {
        self.zvars.iter().map(|z| z.a.clone()).collect()
    }

    /// Whether `1 − m·y^d` vanishes on some component of the locus `{z = 0}`,
    /// and whether it vanishes on all of them. `c` expresses `d` in the `a`'s.
    fn on_locus(&self, c: &[Q], m: &FieldElement) -> Result<(bool, bool)> {
        let l = c.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let l = l.to_i64().ok_or_else(|| Error::Algebra("relation denominator too large".into()))?;
        // (m·y^d)^l = m^l · Π η_k^{−l c_k} on the locus
        let mut val = m.pow(l)?;
        for (z, ck) in self.zvars.iter().zip(c) {
            let e = (ck * Q::from_integer(l.into())).to_integer().to_i64().unwrap();
            val = val.mul(&z.eta.pow(-e)?);
        }
        let somewhere = val.is_one();
        let mut l_prime = l;
        while self.p > 0 && l_prime % self.p as i64 == 0 {
            l_prime /= self.p as i64;
        }
        Ok((somewhere, somewhere && l_prime == 1))
    }

    /// Exponent of `z_l` in a generator `(1 − ∏(1 − z_l)^{c_l})^{p^s}`.
    fn z_power(&self, cl: &Q, s: u32, k: usize) -> Result<i64> {
        if self.p > 0 && cl.denom().mod_floor(&(self.p as i64).into()).is_zero() {
            return Err(Error::Algebra(format!("constant-term generator {} is a fractional power of a coordinate", k + 1)));
        }
        let num = cl.numer().abs().to_i64().unwrap();
        Ok((self.p.max(1) as i64).pow(s + lattice::valuation(num, self.p)))
    }

    fn push(mut self, k: usize, lam: Stratum, h: (&[i64], &FieldElement, &[i64]), vanish: bool) -> Result<Step> {
        let (lambda, mu, delta) = h;
        let mut lk = restrict(lambda, lam);
        let (s, d, m) = p_power_split(delta, mu, self.p)?;
        let rows = self.rows();
        match lattice::solve(&rows, &d) {
            None if vanish => {
                // TODO: when an absorbed coordinate makes `d` a p-th power modulo the lattice, split again
                let Some(index) = lattice::new_pivot(&rows, &d, self.p) else {
                    return Err(Error::Algebra(format!(
                        "constant-term generator {} is dependent modulo {} on earlier ones",
                        k + 1,
                        self.p
                    )));
                };
                lk[index] += (self.p.max(1) as i64).pow(s);
                self.zvars.push(ZVar { index, eta: m, a: d, s });
                self.zrows.push(self.lambdas.len());
                self.vanishing.push(k);
            }
            None => {}
            Some(c) => {
                let (somewhere, everywhere) = self.on_locus(&c, &m)?;
                if vanish {
                    if !somewhere {
                        return Ok(Step::Infeasible);
                    }
                    // the generator lies in Σ (z_l^{e_l}); directions whose M_l·z_l^{e_l} divides
                    // it are absorbed, and what is left must be a single coordinate
                    let mut dirs = Vec::new();
                    for l in (0..c.len()).filter(|&l| !c[l].is_zero()) {
                        let e = self.z_power(&c[l], s, k)?;
                        let row = &self.lambdas[self.zrows[l]];
                        let zi = self.zvars[l].index;
                        let absorbed = row.iter().enumerate().all(|(i, &a)| a <= lk[i] + if i == zi { e } else { 0 });
                        if !absorbed {
                            dirs.push(l);
                        }
                    }
                    if dirs.is_empty() {
                        self.vanishing.push(k);
                        return Ok(Step::Ok(self));
                    }
                    if dirs.len() != 1 {
                        return Err(Error::Algebra(format!(
                            "constant-term generator {} vanishes along {} coordinate directions; not monomial",
                            k + 1,
                            dirs.len()
                        )));
                    }
                    let e = self.z_power(&c[dirs[0]], s, k)?;
                    lk[self.zvars[dirs[0]].index] += e;
                    self.vanishing.push(k);
                } else if everywhere {
                    return Ok(Step::Infeasible);
                }
            }
        }
        self.lambdas.push(lk);
        Ok(Step::Ok(self))
    }
}

fn minimal_generators(mut ls: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    ls.dedup();
    for (i, l) in ls.iter().enumerate() {
        let redundant = ls.iter().enumerate().any(|(j, m)| {
            j != i && m.iter().zip(l).all(|(a, b)| a <= b) && (m != l || j < i)
        });
        if !redundant {
            out.push(l.clone());
        }
    }
    out
}

type Hyp<'a> = (&'a [i64], &'a FieldElement, &'a [i64]);

fn split_ideal(j: &Ideal, lam: Stratum) -> Result<(Vec<i64>, Vec<Vec<i64>>, Vec<Hyp<'_>>)> {
    let base: Vec<i64> = j
        .mpart
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if !lam.contains(i) {
                return Ok(0);
            }
            if !v.is_integer() {
                return Err(Error::Precondition("local monomial form needs an integral monomial part".into()));
            }
            Ok(v.to_integer().to_i64().unwrap())
        })
        .collect::<Result<_>>()?;
    let mut monos = Vec::new();
    let mut hyps = Vec::new();
    for g in essential(j) {
        match g {
            Generator::Monomial { m } => monos.push(restrict(m, lam)),
            Generator::Hyperbolic { lambda, mu, delta } => hyps.push((&lambda[..], mu, &delta[..])),
            Generator::Binomial { .. } => {
                return Err(Error::Precondition("ideal has a binomial generator; it is not locally monomial".into()))
            }
        }
    }
    Ok((base, monos, hyps))
}

/// Constant-term generators with smaller monomial factors first, then smaller
/// `p`-powers, so that coordinates come from the generators that divide the others.
fn coordinate_order(hyps: &[Hyp<'_>], lam: Stratum, p: u64) -> Result<Vec<usize>> {
    let mut keys = Vec::new();
    for (k, (lambda, mu, delta)) in hyps.iter().enumerate() {
        let (s, _, _) = p_power_split(delta, mu, p)?;
        keys.push((restrict(lambda, lam).iter().sum::<i64>(), s, k));
    }
    keys.sort_unstable();
    Ok(keys.into_iter().map(|(_, _, k)| k).collect())
}

fn finish(mut b: Builder, base: &[i64], monos: &[Vec<i64>], lam: Stratum) -> LocalMonomialForm {
    b.vanishing.sort_unstable();
    let mut ls: Vec<Vec<i64>> = b.lambdas.into_iter().chain(monos.iter().cloned()).collect();
    for l in &mut ls {
        add_into(l, base);
    }
    let mut lambdas = minimal_generators(ls);
    lambdas.sort_unstable_by(|a, b| b.cmp(a));
    LocalMonomialForm { stratum: lam, vanishing: b.vanishing, zvars: b.zvars, lambdas }
}

/// The local form at the most special point of the stratum `lam`: constant-term
/// generators are made to vanish greedily, in `coordinate_order`, whenever consistent.
pub fn local_monomial_form(chart: &Chart, j: &Ideal, lam: Stratum) -> Result<LocalMonomialForm> {
    let (base, monos, hyps) = split_ideal(j, lam)?;
    let mut b = Builder { p: chart.characteristic, zvars: Vec::new(), zrows: Vec::new(), vanishing: Vec::new(), lambdas: Vec::new() };
    for k in coordinate_order(&hyps, lam, chart.characteristic)? {
        let h = &hyps[k];
        b = match b.clone().push(k, lam, *h, true)? {
            Step::Ok(nb) => nb,
            Step::Infeasible => match b.push(k, lam, *h, false)? {
                Step::Ok(nb) => nb,
                Step::Infeasible => unreachable!("a generator cannot be forced both ways"),
            },
        };
    }
    Ok(finish(b, &base, &monos, lam))
}

/// Local forms for every realizable vanishing pattern of the constant-term
/// generators; together their neighbourhoods cover the stratum.
pub fn local_monomial_forms(chart: &Chart, j: &Ideal, lam: Stratum) -> Result<Vec<LocalMonomialForm>> {
    let (base, monos, hyps) = split_ideal(j, lam)?;
    let mut frontier =
        vec![Builder { p: chart.characteristic, zvars: Vec::new(), zrows: Vec::new(), vanishing: Vec::new(), lambdas: Vec::new() }];
    for k in coordinate_order(&hyps, lam, chart.characteristic)? {
        let h = &hyps[k];
        let mut next = Vec::new();
        for b in frontier {
            for vanish in [true, false] {
                if let Step::Ok(nb) = b.clone().push(k, lam, *h, vanish)? {
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|b| finish(b, &base, &monos, lam)).collect())
}

/// Generators left after dropping those divisible by another, monomial, generator.
fn essential(j: &Ideal) -> Vec<&Generator> {
    let divides = |m: &[i64], g: &Generator| m.iter().zip(g.factor()).all(|(a, b)| a <= b);
    j.gens
        .iter()
        .enumerate()
        .filter(|&(k, g)| {
            !j.gens.iter().enumerate().any(|(l, h)| match h {
                Generator::Monomial { m } if l != k => divides(m, g) && (h != g || l < k),
                _ => false,
            })
        })
        .map(|(_, g)| g)
        .collect()
}

/// Whether `j` has the shape `⟨M_1(1 − μ_1 y^{δ_1}), …, M_{r+1}⟩` with every `M_k`
/// supported on exceptional variables.
pub fn is_locally_monomial(chart: &Chart, j: &Ideal) -> bool {
    let exc = chart.exceptional_x();
    let on_exc = |v: &[i64]| v.iter().enumerate().all(|(i, &e)| e == 0 || exc.contains(i));
    let cls = chart.classes();
    let mpart_ok = j.mpart.iter().enumerate().all(|(i, v)| v.is_zero() || exc.contains(i));
    mpart_ok
        && essential(j).iter().all(|g| match g {
            Generator::Monomial { m } => on_exc(m),
            Generator::Hyperbolic { lambda, delta, .. } => {
                on_exc(lambda) && delta.iter().zip(&cls).all(|(&e, &c)| e == 0 || c == VarClass::Y)
            }
            Generator::Binomial { .. } => false,
        })
}

/// Whether `j` is a single monomial in exceptional variables.
pub fn is_log_resolved(chart: &Chart, j: &Ideal) -> bool {
    let exc = chart.exceptional_x();
    let mpart_ok = j.mpart.iter().enumerate().all(|(i, v)| v.is_zero() || exc.contains(i));
    mpart_ok && j.refactorize(exc).is_unit_i()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Regular and normal crossings with `E` along the stratum.
    RegularNC,
    Singular,
    /// Regular but not normal crossings with `E`.
    Tangent,
    /// The subvariety does not meet the stratum.
    Disjoint,
}

/// The Laurent relation `y^d = κ` cut out by a generator at points where all
/// its monomial factors are units.
fn laurent_relation(g: &Generator) -> Result<(Vec<i64>, FieldElement)> {
    match g {
        Generator::Hyperbolic { mu, delta, .. } => Ok((delta.clone(), mu.inv()?)),
        Generator::Binomial { gamma, alpha, beta, b, .. } => {
            let d = gamma.iter().zip(alpha).zip(beta).map(|((g, a), b)| g + a - b).collect();
            Ok((d, b.clone()))
        }
        Generator::Monomial { .. } => Err(Error::Precondition("monomial generator in a subvariety".into())),
    }
}

/// Regularity and normal crossings of `V(gens)` with `E` along the closed stratum `lam`.
pub fn ereg_nc_check(chart: &Chart, gens: &[Generator], lam: Stratum) -> Result<Verdict> {
    let cls = chart.classes();
    if gens.iter().any(|g| matches!(g, Generator::Monomial { .. })) {
        return Err(Error::Precondition("monomial generator in a subvariety".into()));
    }
    let involves = |g: &Generator| g.x_terms(&cls).iter().any(|t| lam.iter().any(|i| t[i] != 0));
    if gens.iter().any(|g| involves(g)) {
        if gens.iter().any(|g| g.eord(lam) >= 2) {
            return Ok(Verdict::Singular);
        }
        return Ok(Verdict::Tangent);
    }
    let rel: Vec<(Vec<i64>, FieldElement)> = gens.iter().map(laurent_relation).collect::<Result<_>>()?;
    let rows: Vec<Vec<i64>> = rel.iter().map(|r| r.0.clone()).collect();
    for c in lattice::integer_relations(&rows)? {
        let mut v = FieldElement::one(chart.characteristic);
        for (ck, (_, kappa)) in c.iter().zip(&rel) {
            v = v.mul(&kappa.pow(*ck)?);
        }
        if !v.is_one() {
            return Ok(Verdict::Disjoint);
        }
    }
    if chart.characteristic > 0 && lattice::rank(&rows, chart.characteristic) < lattice::rank(&rows, 0) {
        return Ok(Verdict::Singular);
    }
    Ok(Verdict::RegularNC)
}
