//! Blow-ups along combinatorial centers and the transforms of ideals.

use num_traits::Zero;

use crate::chart::{Chart, Divisor, Lineage, Origin};
use crate::driver::ResolutionTree;
use crate::error::{Error, Result};
use crate::field::Q;
use crate::ideal::{normalize_generator, Generator, Ideal, Term, VarClass};
use crate::stratum::Stratum;

/// The substitution of chart `i` of the blow-up along `z`: `x_j ↦ x_i·x_j` for
/// `j ∈ z∖{i}`, so the new exponent of `x_i` is the old degree along `z`.
pub fn substitute(exp: &[i64], z: Stratum, i: usize) -> Vec<i64> {
    let mut out = exp.to_vec();
    out[i] = z.iter().map(|j| exp[j]).sum();
    out
}

fn substitute_q(v: &[Q], z: Stratum, i: usize) -> Vec<Q> {
    let mut out = v.to_vec();
    out[i] = z.iter().map(|j| v[j].clone()).sum();
    out
}

/// Total transform of a generator in chart `i`, normalized against `classes`.
pub fn transform_generator(g: &Generator, z: Stratum, i: usize, classes: &[VarClass]) -> Result<Generator> {
    let terms: Vec<Term> = g
        .terms()
        .into_iter()
        .map(|t| Term { coeff: t.coeff, exp: substitute(&t.exp, z, i) })
        .collect();
    normalize_generator(&terms, classes)
}

/// Total transform of `J = M·I`: substituted generators and monomial part.
pub fn transform_ideal(j: &Ideal, z: Stratum, i: usize, classes: &[VarClass]) -> Result<Ideal> {
    Ok(Ideal {
        gens: j
            .gens
            .iter()
            .map(|g| transform_generator(g, z, i, classes))
            .collect::<Result<_>>()?,
        mpart: substitute_q(&j.mpart, z, i),
    })
}

/// Strict transform of a generator: its total transform with every exceptional
/// factor removed. Hyperbolic generators are units along the center and pass through.
pub fn strict_transform_gen(g: &Generator, z: Stratum, i: usize, classes: &[VarClass], exceptional: Stratum) -> Result<Generator> {
    if g.is_hyperbolic() {
        return Ok(g.clone());
    }
    let mut t = transform_generator(g, z, i, classes)?;
    for k in exceptional.insert(i).iter() {
        t.factor_mut()[k] = 0;
    }
    Ok(t)
}

/// The child chart `i` of the blow-up of `chart` along `z`, before relabeling.
fn child_chart(chart: &Chart, z: Stratum, i: usize, c: &Q) -> Result<Chart> {
    let cls = chart.classes();
    let age = chart.blowups + 1;
    let mut ch = chart.clone();
    ch.ideal = transform_ideal(&chart.ideal, z, i, &cls)?;
    ch.vars[i].origin = Origin::Exceptional(age);
    ch.blowups = age;
    for d in &mut ch.divisors {
        if d.var == Some(i) {
            d.var = None;
        }
    }
    ch.divisors.push(Divisor { label: format!("E{age}"), var: Some(i), age: Some(age) });
    ch.lineage = Some(Lineage { parent: chart.id, center: z, var: i });
    ch.ideal = ch.ideal.refactorize(ch.exceptional_x());
    if ch.ideal.mpart[i] < *c {
        return Err(Error::Algebra(format!(
            "controlled transform: x{} appears with exponent {} < {}",
            i + 1,
            ch.ideal.mpart[i],
            c
        )));
    }
    ch.ideal.mpart[i] -= c;
    Ok(ch)
}

/// Blows up `chart` along `z` with control `c`; one child per variable of `z`,
/// in increasing index order. The controlled transform is `J* / x_i^c`, i.e.
/// `x_i^{θ−c}` times the weak transform, where `θ` is the E-order along `z`.
pub fn blowup(chart: &Chart, z: Stratum, c: &Q) -> Result<Vec<Chart>> {
    if z.is_empty() || !z.is_subset(chart.x_vars()) {
        return Err(Error::Precondition(format!("center {z} is not a set of vanishing variables")));
    }
    let theta = chart.ideal.eord(z)?;
    if theta < *c {
        return Err(Error::Precondition(format!("center {z} has E-order {theta} below the control {c}")));
    }
    z.iter()
        .map(|i| child_chart(chart, z, i, c)?.detect_hyperbolic_and_relabel())
        .collect()
}

/// Transforms a tracked ideal (total transform) into a child chart: substitution,
/// normalization against the child's classes, and refactorization.
pub fn transform_tracked(j: &Ideal, z: Stratum, i: usize, child: &Chart) -> Result<Ideal> {
    let cls = child.classes();
    let mut t = transform_ideal(j, z, i, &cls)?;
    for (k, c) in cls.iter().enumerate() {
        if *c == VarClass::Y {
            t.mpart[k] = Q::zero();
        }
    }
    Ok(t.refactorize(child.exceptional_x()))
}

/// Re-expresses a tracked ideal against new classes (after relabeling).
pub fn reclassify(j: &Ideal, chart: &Chart) -> Result<Ideal> {
    let cls = chart.classes();
    let mut t = Ideal {
        gens: j
            .gens
            .iter()
            .map(|g| normalize_generator(&g.terms(), &cls))
            .collect::<Result<_>>()?,
        mpart: j.mpart.clone(),
    };
    for (k, c) in cls.iter().enumerate() {
        if *c == VarClass::Y {
            t.mpart[k] = Q::zero();
        }
    }
    Ok(t.refactorize(chart.exceptional_x()))
}

/// Multiplies `x_i^c` back into a controlled transform (as monomial part).
pub fn uncontrol(j: &Ideal, i: usize, c: &Q) -> Ideal {
    let mut out = j.clone();
    out.mpart[i] += c;
    out
}

/// Monomial part as a vector of integers, when it is integral.
pub fn integral_mpart(j: &Ideal) -> Option<Vec<i64>> {
    j.mpart
        .iter()
        .map(|v| {
            if v.is_integer() {
                use num_traits::ToPrimitive;
                v.to_integer().to_i64()
            } else {
                None
            }
        })
        .collect()
}

/// Expanded generator terms of `J = M·I` with the monomial part multiplied in.
pub fn expanded_terms(j: &Ideal) -> Option<Vec<Vec<Term>>> {
    let m = integral_mpart(j)?;
    Some(
        j.gens
            .iter()
            .map(|g| {
                g.terms()
                    .into_iter()
                    .map(|t| Term {
                        coeff: t.coeff,
                        exp: t.exp.iter().zip(&m).map(|(a, b)| a + b).collect(),
                    })
                    .collect()
            })
            .collect(),
    )
}

/// The chart seen on the overlap where every variable of `flip` is invertible.
pub fn overlap_view(chart: &Chart, flip: Stratum) -> Result<Chart> {
    let mut v = chart.clone();
    for i in flip.iter() {
        v.vars[i].class = VarClass::Y;
    }
    v.renormalize()?;
    v.detect_hyperbolic_and_relabel()
}

fn hyperbolic_positions(ch: &Chart) -> Vec<usize> {
    ch.ideal.gens.iter().enumerate().filter(|(_, g)| g.is_hyperbolic()).map(|(k, _)| k).collect()
}

/// Compares two sibling charts on their overlap: relabeling, E-orders and the
/// resolution function must agree on every common stratum.
pub fn compare_siblings(a: &Chart, b: &Chart, c: &Q) -> Result<Vec<String>> {
    let (Some(la), Some(lb)) = (&a.lineage, &b.lineage) else {
        return Err(Error::Precondition("sibling charts need a lineage".into()));
    };
    let flip = Stratum::from_indices([la.var, lb.var]);
    let va = overlap_view(a, flip)?;
    let vb = overlap_view(b, flip)?;
    let mut out = Vec::new();
    let tag = format!("charts {} and {}", a.id, b.id);
    if hyperbolic_positions(&va) != hyperbolic_positions(&vb) {
        out.push(format!("{tag}: different generators become constant-term on the overlap"));
    }
    if va.x_vars() != vb.x_vars() {
        out.push(format!("{tag}: vanishing variables differ on the overlap"));
        return Ok(out);
    }
    let common = va.active_x().union(vb.active_x());
    for s in common.subsets() {
        let (ea, eb) = (va.ideal.eord(s)?, vb.ideal.eord(s)?);
        if ea != eb {
            out.push(format!("{tag}: E-orders {ea} and {eb} at {s}"));
            continue;
        }
        if ea >= *c && !c.is_zero() {
            let ta = crate::invariant::resolution_function(&va, s, c)?;
            let tb = crate::invariant::resolution_function(&vb, s, c)?;
            if ta != tb {
                out.push(format!("{tag}: invariants {ta} and {tb} at {s}"));
            }
        }
    }
    Ok(out)
}

/// Checks every pair of sibling charts of every blow-up in the tree.
pub fn check_chart_compatibility(tree: &ResolutionTree) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for n in &tree.nodes {
        if n.center.is_none() {
            continue;
        }
        let kids: Vec<&crate::driver::Node> = n
            .children
            .iter()
            .map(|&k| &tree.nodes[k])
            .filter(|k| k.kind == crate::driver::NodeKind::Blowup)
            .collect();
        for (x, a) in kids.iter().enumerate() {
            for b in &kids[x + 1..] {
                out.extend(compare_siblings(&a.chart, &b.chart, &a.control)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, FieldElement};

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    fn chart(n: usize, gens: &[&[(i64, &[i64])]]) -> Chart {
        let cls = vec![VarClass::X; n];
        let g = gens
            .iter()
            .map(|ts| {
                let t: Vec<Term> = ts
                    .iter()
                    .map(|(c, e)| Term { coeff: FieldElement::from_int(0, *c), exp: e.to_vec() })
                    .collect();
                normalize_generator(&t, &cls).unwrap()
            })
            .collect();
        Chart::root(0, &names(n), Stratum::EMPTY, g)
    }

    #[test]
    fn cusp_blowup() {
        let ch = chart(3, &[&[(1, &[2, 0, 0]), (-1, &[0, 3, 0])]]);
        let kids = blowup(&ch, Stratum::from_indices([0, 1]), &q(2)).unwrap();
        assert_eq!(kids.len(), 2);
        let k0 = &kids[0];
        assert_eq!(k0.x_vars(), Stratum::from_indices([2]));
        assert!(k0.ideal.gens[0].is_hyperbolic());
        assert!(k0.ideal.mpart_is_one());
        let k1 = &kids[1];
        assert!(k1.ideal.mpart_is_one());
        match &k1.ideal.gens[0] {
            Generator::Binomial { alpha, beta, .. } => {
                assert_eq!(alpha, &vec![0, 1, 0]);
                assert_eq!(beta, &vec![2, 0, 0]);
            }
            g => panic!("{g:?}"),
        }
        assert_eq!(k1.h().len(), 1);
        assert_eq!(k1.divisors.len(), ch.divisors.len() + 1);
    }

    #[test]
    fn monomial_control() {
        let ch = chart(1, &[&[(1, &[2])]]);
        let kids = blowup(&ch, Stratum::from_indices([0]), &q(1)).unwrap();
        assert_eq!(kids[0].ideal.mpart, vec![q(1)]);
        assert!(kids[0].ideal.is_unit_i());
    }

    #[test]
    fn cone_blowup() {
        let ch = chart(3, &[&[(1, &[1, 1, 0]), (-1, &[0, 0, 2])]]);
        let kids = blowup(&ch, Stratum::from_indices([0, 1, 2]), &q(1)).unwrap();
        let k = &kids[2];
        assert_eq!(k.ideal.mpart[2], q(1));
        assert_eq!(k.x_vars(), Stratum::from_indices([2]));
        match &k.ideal.gens[0] {
            Generator::Hyperbolic { mu, delta, .. } => {
                assert!(mu.is_one());
                assert_eq!(delta, &vec![1, 1, 0]);
            }
            g => panic!("{g:?}"),
        }
    }

    #[test]
    fn rejects_center_below_control() {
        let ch = chart(3, &[&[(1, &[2, 0, 0]), (-1, &[0, 3, 0])]]);
        assert!(blowup(&ch, Stratum::from_indices([0]), &q(1)).is_err());
        assert!(blowup(&ch, Stratum::from_indices([0, 1]), &q(3)).is_err());
    }

    #[test]
    fn strict_transforms() {
        let cls = vec![VarClass::X; 3];
        let cusp = chart(3, &[&[(1, &[2, 0, 0]), (-1, &[0, 3, 0])]]).ideal.gens[0].clone();
        let s = strict_transform_gen(&cusp, Stratum::from_indices([0, 1]), 0, &cls, Stratum::EMPTY).unwrap();
        match s {
            Generator::Hyperbolic { lambda, delta, .. } => {
                assert_eq!(lambda, vec![0, 0, 0]);
                assert_eq!(delta, vec![1, 3, 0]);
            }
            g => panic!("{g:?}"),
        }
        let cube = chart(1, &[&[(1, &[3])]]).ideal.gens[0].clone();
        let s = strict_transform_gen(&cube, Stratum::from_indices([0]), 0, &[VarClass::X], Stratum::EMPTY).unwrap();
        assert!(s.is_unit());
    }
}
