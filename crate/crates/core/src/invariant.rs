//! The resolution function `t` and the selection of the next center.
//!
//! Everything here works on the term data of an ideal projected to a stratum Λ:
//! for binomial ideals the E-orders along Λ, and hence the whole mobile, only
//! depend on the `x`-exponents of the terms on the variables of Λ.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::field::{fmt_q, q, Q};
use crate::stratum::{Stratum, StratumFamily};

/// The monomial-case value `(−p, w, ρ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GammaTriple {
    pub negp: i64,
    #[serde(with = "crate::field::q_serde")]
    pub w: Q,
    /// Ages of the chosen divisors, newest first.
    pub rho: Vec<u32>,
}

impl fmt::Display for GammaTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.rho.iter().map(u32::to_string).collect();
        write!(f, "G({}, {}, [{}])", self.negp, fmt_q(&self.w), r.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantComponent {
    Fin {
        #[serde(with = "crate::field::q_serde")]
        q: Q,
        gamma: Option<GammaTriple>,
    },
    Inf,
}

impl InvariantComponent {
    pub fn fin(v: Q) -> Self {
        InvariantComponent::Fin { q: v, gamma: None }
    }

    pub fn gamma(g: GammaTriple) -> Self {
        InvariantComponent::Fin { q: Q::zero(), gamma: Some(g) }
    }

    fn rank(&self) -> u8 {
        match self {
            InvariantComponent::Inf => 2,
            InvariantComponent::Fin { gamma: Some(_), .. } => 0,
            InvariantComponent::Fin { .. } => 1,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.rank() != 1
    }
}

impl Ord for InvariantComponent {
    fn cmp(&self, o: &Self) -> Ordering {
        use InvariantComponent::*;
        match (self, o) {
            (Fin { q: a, gamma: None }, Fin { q: b, gamma: None }) => a.cmp(b),
            (Fin { gamma: Some(a), .. }, Fin { gamma: Some(b), .. }) => a.cmp(b),
            _ => self.rank().cmp(&o.rank()),
        }
    }
}

impl PartialOrd for InvariantComponent {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for InvariantComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantComponent::Inf => f.write_str("inf"),
            InvariantComponent::Fin { q, gamma: None } => f.write_str(&fmt_q(q)),
            InvariantComponent::Fin { gamma: Some(g), .. } => write!(f, "{g}"),
        }
    }
}

/// The resolution value: exactly `n` components, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantValue {
    pub components: Vec<InvariantComponent>,
}

impl InvariantValue {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", v.join(", "))
    }
}

/// Lexicographic comparison; values of different lengths are incomparable.
pub fn compare(a: &InvariantValue, b: &InvariantValue) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::Precondition(format!(
            "comparing invariants of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.components.cmp(&b.components))
}

/// One level of the mobile realizing a value of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobileLevel {
    /// Dimension of the ambient hypersurface at this level.
    pub dim: usize,
    /// Terms of `J_i`, projected to the current stratum.
    pub terms: Vec<Vec<Q>>,
    /// The exceptional monomial part `M_i`.
    pub m: Vec<Q>,
    /// `θ_i`, the E-order of `I_i`.
    pub theta: Q,
    /// The control of this level.
    pub c: Q,
    pub contact: Option<usize>,
}

/// A weighted term set: the `x`-exponents of the terms of an ideal with rational weights.
pub type Terms = Vec<Vec<Q>>;

fn deg(t: &[Q], lam: Stratum) -> Q {
    lam.iter().map(|i| t[i].clone()).sum()
}

fn min_deg(ts: &[Vec<Q>], lam: Stratum) -> Q {
    ts.iter().map(|t| deg(t, lam)).min().expect("nonempty term set")
}

/// Terms of `J = M·I` on the `x` variables, as rationals.
pub fn ideal_terms(chart: &Chart) -> Terms {
    let cls = chart.classes();
    let mut out = Vec::new();
    for g in &chart.ideal.gens {
        for t in g.x_terms(&cls) {
            out.push(
                t.iter()
                    .zip(&chart.ideal.mpart)
                    .map(|(&e, m)| q(e) + m)
                    .collect(),
            );
        }
    }
    out
}

/// Builds the companion ideal `P` from `I`, `M`, `θ` and `c`.
pub fn companion(i_terms: &[Vec<Q>], m: &[Q], theta: &Q, c: &Q) -> Result<Terms> {
    if theta.is_zero() {
        return Err(Error::Precondition("companion ideal needs a positive order".into()));
    }
    let mut p = i_terms.to_vec();
    if theta < c && m.iter().any(|v| !v.is_zero()) {
        let w = theta / (c - theta);
        p.push(m.iter().map(|v| v * &w).collect());
    }
    Ok(p)
}

/// Minimal strata of `lam` where the weighted terms reach order `c`.
fn local_esing(ts: &[Vec<Q>], lam: Stratum, c: &Q) -> StratumFamily {
    StratumFamily::from_members(lam.subsets().into_iter().filter(|s| min_deg(ts, *s) >= *c))
}

/// Coordinate hypersurfaces of maximal contact for `P` at `lam`.
///
/// A candidate `x_j` contains every minimal stratum of the local E-singular locus of
/// `P` with control `c`, and some term of order exactly `c` involves `x_j`.
pub fn contact_candidates(p: &[Vec<Q>], c: &Q, lam: Stratum) -> Result<Vec<usize>> {
    let fam = local_esing(p, lam, c);
    if fam.is_empty() {
        return Err(Error::NoMaximalContact(format!("E-singular locus of P empty at {lam}")));
    }
    let common = fam.common();
    let cands: Vec<usize> = common
        .iter()
        .filter(|&j| p.iter().any(|t| t[j] > Q::zero() && deg(t, lam) == *c))
        .collect();
    if cands.is_empty() {
        return Err(Error::NoMaximalContact(format!("no coordinate contains the locus at {lam}")));
    }
    Ok(cands)
}

/// The smallest-index coordinate of maximal contact.
pub fn select_max_contact(p: &[Vec<Q>], c: &Q, lam: Stratum) -> Result<usize> {
    Ok(contact_candidates(p, c, lam)?[0])
}

/// The junior ideal of `P` on `x_j = 0`; `None` stands for the unit ideal.
pub fn ecoeff(p: &[Vec<Q>], c: &Q, j: usize) -> Option<Terms> {
    let out: Terms = p
        .iter()
        .filter(|t| t[j] < *c)
        .map(|t| {
            let w = c / (c - &t[j]);
            t.iter()
                .enumerate()
                .map(|(i, v)| if i == j { Q::zero() } else { v * &w })
                .collect()
        })
        .collect();
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// The monomial-case value of `M` with control `c` on the exceptional variables of `lam`.
pub fn gamma(m: &[Q], c: &Q, ages: &[u32], lam: Stratum) -> Result<(GammaTriple, Stratum)> {
    let ex: Vec<usize> = lam.iter().filter(|&i| ages[i] > 0 && m[i] > Q::zero()).collect();
    let pool = Stratum::from_indices(ex.iter().copied());
    for p in 1..=ex.len() {
        let mut best: Option<((Q, Vec<u32>), Stratum)> = None;
        for s in pool.subsets().into_iter().filter(|s| s.len() == p) {
            let sum: Q = s.iter().map(|i| m[i].clone()).sum();
            if sum >= *c {
                let mut rho: Vec<u32> = s.iter().map(|i| ages[i]).collect();
                rho.sort_unstable_by(|a, b| b.cmp(a));
                let key = (sum / c, rho);
                if best.as_ref().is_none_or(|(k, _)| key > *k) {
                    best = Some((key, s));
                }
            }
        }
        if let Some(((w, rho), s)) = best {
            return Ok((GammaTriple { negp: -(p as i64), w, rho }, s));
        }
    }
    Err(Error::Algebra(format!("no divisor subset reaches the control at {lam}")))
}

/// Result of evaluating `t` at one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: InvariantValue,
    /// Contact and Γ variables accumulated along the descent.
    pub center: Stratum,
    pub levels: Vec<MobileLevel>,
}

fn key_cmp(a: &(Vec<InvariantComponent>, Stratum, Vec<MobileLevel>), b: &(Vec<InvariantComponent>, Stratum, Vec<MobileLevel>), ages: &[u32]) -> Ordering {
    let ag = |s: Stratum| {
        let mut v: Vec<u32> = s.iter().map(|i| ages[i]).collect();
        v.sort_unstable_by(|x, y| y.cmp(x));
        v
    };
    a.0.cmp(&b.0).then_with(|| ag(a.1).cmp(&ag(b.1)))
}

type Branch = (Vec<InvariantComponent>, Stratum, Vec<MobileLevel>);

fn descend(ts: &[Vec<Q>], c: &Q, lam: Stratum, ages: &[u32], depth: usize) -> Result<Branch> {
    let n = ages.len();
    if ts.iter().any(|t| deg(t, lam).is_zero()) {
        return Ok((vec![InvariantComponent::Inf], Stratum::EMPTY, Vec::new()));
    }
    let m: Vec<Q> = (0..n)
        .map(|i| {
            if lam.contains(i) && ages[i] > 0 {
                ts.iter().map(|t| t[i].clone()).min().unwrap()
            } else {
                Q::zero()
            }
        })
        .collect();
    let i_terms: Terms = ts
        .iter()
        .map(|t| t.iter().zip(&m).map(|(a, b)| a - b).collect())
        .collect();
    let theta = min_deg(&i_terms, lam);
    let level = |contact| MobileLevel {
        dim: n - depth,
        terms: ts.to_vec(),
        m: m.clone(),
        theta: theta.clone(),
        c: c.clone(),
        contact,
    };
    if theta.is_zero() {
        let (g, s) = gamma(&m, c, ages, lam)?;
        return Ok((vec![InvariantComponent::gamma(g)], s, vec![level(None)]));
    }
    let head = InvariantComponent::fin(&theta / c);
    let p = companion(&i_terms, &m, &theta, c)?;
    let cp = min_deg(&p, lam);
    let mut best: Option<Branch> = None;
    for j in contact_candidates(&p, &cp, lam)? {
        let (tail, cen, lv) = match ecoeff(&p, &cp, j) {
            None => (vec![InvariantComponent::Inf], Stratum::EMPTY, Vec::new()),
            Some(junior) => descend(&junior, &cp, lam.remove(j), ages, depth + 1)?,
        };
        let mut comps = vec![head.clone()];
        comps.extend(tail);
        let mut levels = vec![level(Some(j))];
        levels.extend(lv);
        let cand = (comps, cen.insert(j), levels);
        if best.as_ref().is_none_or(|b| key_cmp(&cand, b, ages) == Ordering::Less) {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one contact candidate"))
}

/// Evaluates the descent on an arbitrary weighted term set.
pub fn evaluate_terms(ts: &[Vec<Q>], lam: Stratum, c: &Q, ages: &[u32]) -> Result<Evaluation> {
    if ts.is_empty() {
        return Err(Error::Algebra("resolution function of the zero ideal".into()));
    }
    let n = ages.len();
    let proj: Terms = ts
        .iter()
        .map(|t| (0..n).map(|i| if lam.contains(i) { t[i].clone() } else { Q::zero() }).collect())
        .collect();
    if min_deg(&proj, lam) < *c {
        return Err(Error::Precondition(format!("stratum {lam} is outside the E-singular locus")));
    }
    let (mut comps, center, levels) = descend(&proj, c, lam, ages, 0)?;
    comps.truncate(n);
    comps.resize(n, InvariantComponent::Inf);
    Ok(Evaluation { value: InvariantValue { components: comps }, center, levels })
}

/// Evaluates `t` at `lam` for the chart ideal with control `c`.
pub fn evaluate(chart: &Chart, lam: Stratum, c: &Q) -> Result<Evaluation> {
    if !lam.is_subset(chart.x_vars()) {
        return Err(Error::Precondition(format!("stratum {lam} contains invertible variables")));
    }
    evaluate_terms(&ideal_terms(chart), lam, c, &chart.ages())
}

pub fn resolution_function(chart: &Chart, lam: Stratum, c: &Q) -> Result<InvariantValue> {
    Ok(evaluate(chart, lam, c)?.value)
}

/// The maximum of `t` over the E-singular locus and the center realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxLocus {
    pub tmax: InvariantValue,
    pub center: Stratum,
    /// Minimal strata attaining the maximum.
    pub strata: Vec<Stratum>,
    /// E-order of `J` along the center.
    pub theta: Q,
}

/// Values of `t` on every stratum of the E-singular locus.
pub fn evaluate_esing(chart: &Chart, c: &Q) -> Result<Vec<(Stratum, Evaluation)>> {
    let domain = chart.active_x();
    let ts = ideal_terms(chart);
    let ages = chart.ages();
    let mut out = Vec::new();
    if ts.is_empty() {
        return Ok(out);
    }
    for s in domain.subsets() {
        if chart.ideal.eord(s)? >= *c {
            out.push((s, evaluate_terms(&ts, s, c, &ages)?));
        }
    }
    Ok(out)
}

/// Selects the next center: the descent center of the strata where `t` is maximal.
pub fn emaxb(chart: &Chart, c: &Q) -> Result<MaxLocus> {
    let vals = evaluate_esing(chart, c)?;
    let tmax = vals
        .iter()
        .map(|(_, e)| e.value.clone())
        .max_by(|a, b| a.components.cmp(&b.components))
        .ok_or_else(|| Error::Precondition("empty E-singular locus".into()))?;
    let at_max: Vec<&(Stratum, Evaluation)> = vals.iter().filter(|(_, e)| e.value == tmax).collect();
    let fam = StratumFamily::from_members(at_max.iter().map(|(s, _)| *s));
    let mut centers: Vec<Stratum> = at_max
        .iter()
        .filter(|(s, _)| fam.minimal_strata.contains(s))
        .map(|(_, e)| e.center)
        .collect();
    centers.sort();
    centers.dedup();
    if centers.len() != 1 {
        let list: Vec<String> = centers.iter().map(Stratum::to_string).collect();
        return Err(Error::Algebra(format!("ambiguous center: {}", list.join(" "))));
    }
    let center = centers[0];
    let theta = chart.ideal.eord(center)?;
    Ok(MaxLocus { tmax, center, strata: fam.minimal_strata, theta })
}

/// E-order of a weighted term set along `lam`.
pub fn terms_eord(ts: &[Vec<Q>], lam: Stratum) -> Q {
    min_deg(ts, lam)
}

/// Checks that along the realizing descent the center stays inside the locus
/// where each `I_i` keeps its order `θ_i`.
pub fn etop_chain_holds(ev: &Evaluation) -> bool {
    let z = ev.center;
    ev.levels.iter().all(|lv| {
        if lv.theta.is_zero() {
            return true;
        }
        let i_terms: Terms = lv
            .terms
            .iter()
            .map(|t| t.iter().zip(&lv.m).map(|(a, b)| a - b).collect())
            .collect();
        min_deg(&i_terms, z) == lv.theta
    })
}

impl InvariantValue {
    /// Number of leading components equal to one followed only by `inf`.
    pub fn regular_codim(&self) -> Option<usize> {
        let ones = self
            .components
            .iter()
            .take_while(|c| matches!(c, InvariantComponent::Fin { q, gamma: None } if q.is_one()))
            .count();
        if self.components[ones..].iter().all(|c| *c == InvariantComponent::Inf) {
            Some(ones)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qf;

    fn tv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&e| q(e)).collect()
    }

    #[test]
    fn component_order() {
        let g = |p: i64, w: i64| InvariantComponent::gamma(GammaTriple { negp: -p, w: q(w), rho: vec![1] });
        assert!(InvariantComponent::Inf > InvariantComponent::fin(q(5)));
        assert!(InvariantComponent::fin(qf(1, 2)) > g(1, 1));
        assert!(g(1, 2) > g(2, 3));
        assert!(g(1, 2) > g(1, 1));
    }

    #[test]
    fn companion_branches() {
        let i = vec![tv(&[1, 0, 0])];
        let p = companion(&i, &tv(&[0, 0, 2]), &q(1), &q(3)).unwrap();
        assert_eq!(p[1], tv(&[0, 0, 1]));
        let p = companion(&i, &tv(&[0, 0, 0]), &q(1), &q(2)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(companion(&i, &tv(&[0, 0, 0]), &q(0), &q(2)).is_err());
    }

    #[test]
    fn junior_ideals() {
        let cusp = vec![tv(&[2, 0, 0]), tv(&[0, 3, 0])];
        assert_eq!(ecoeff(&cusp, &q(2), 0).unwrap(), vec![tv(&[0, 3, 0])]);
        assert_eq!(ecoeff(&[tv(&[3, 0, 0])], &q(3), 0), None);
        let cone = vec![tv(&[1, 1, 0]), tv(&[0, 0, 3])];
        assert_eq!(ecoeff(&cone, &q(2), 0).unwrap(), vec![tv(&[0, 2, 0]), tv(&[0, 0, 3])]);
    }

    #[test]
    fn gamma_examples() {
        let all = Stratum::from_indices([0, 1]);
        let (g, s) = gamma(&tv(&[2, 3]), &q(2), &[1, 2], all).unwrap();
        assert_eq!(g, GammaTriple { negp: -1, w: qf(3, 2), rho: vec![2] });
        assert_eq!(s, Stratum::from_indices([1]));
        let (g, s) = gamma(&tv(&[1, 1]), &q(2), &[1, 2], all).unwrap();
        assert_eq!(g, GammaTriple { negp: -2, w: q(1), rho: vec![2, 1] });
        assert_eq!(s, all);
        assert!(gamma(&tv(&[1, 0]), &q(2), &[1, 2], all).is_err());
    }

    #[test]
    fn cusp_descent() {
        let ts = vec![tv(&[2, 0, 0]), tv(&[0, 3, 0])];
        let ev = evaluate_terms(&ts, Stratum::from_indices([0, 1]), &q(2), &[0, 0, 0]).unwrap();
        assert_eq!(ev.value.to_string(), "(1, 3/2, inf)");
        assert_eq!(ev.center, Stratum::from_indices([0, 1]));
        assert!(etop_chain_holds(&ev));
    }

    #[test]
    fn monomial_top_level() {
        let ts = vec![tv(&[2, 0])];
        let ev = evaluate_terms(&ts, Stratum::from_indices([0]), &q(2), &[1, 0]).unwrap();
        assert_eq!(ev.value.to_string(), "(G(-1, 1, [1]), inf)");
    }

    #[test]
    fn compare_lengths() {
        let a = InvariantValue { components: vec![InvariantComponent::Inf] };
        let b = InvariantValue { components: vec![InvariantComponent::Inf; 2] };
        assert!(compare(&a, &b).is_err());
        assert_eq!(compare(&b, &b).unwrap(), Ordering::Equal);
    }
}
