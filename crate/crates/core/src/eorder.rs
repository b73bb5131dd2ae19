//! E-orders along strata, E-singular loci and E-top loci.

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::Result;
use crate::field::{q, Q};
use crate::ideal::{Generator, Ideal};
use crate::stratum::{Stratum, StratumFamily};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumValue {
    pub stratum: Stratum,
    #[serde(with = "crate::field::q_serde")]
    pub value: Q,
}

pub fn eord_generator(g: &Generator, lam: Stratum) -> Q {
    q(g.eord(lam))
}

pub fn eord_ideal(j: &Ideal, lam: Stratum) -> Result<Q> {
    j.eord(lam)
}

/// E-orders of `j` on every subset of `domain`.
pub fn eord_table(j: &Ideal, domain: Stratum) -> Result<Vec<StratumValue>> {
    domain
        .subsets()
        .into_iter()
        .map(|s| Ok(StratumValue { stratum: s, value: j.eord(s)? }))
        .collect()
}

/// Strata of `domain` where the E-order of `j` reaches `c`.
pub fn esing_in(j: &Ideal, domain: Stratum, c: &Q) -> Result<StratumFamily> {
    if j.gens.is_empty() {
        return Ok(StratumFamily::default());
    }
    let mut hits = Vec::new();
    for s in domain.subsets() {
        if j.eord(s)? >= *c {
            hits.push(s);
        }
    }
    Ok(StratumFamily::from_members(hits))
}

/// The E-singular locus of the chart ideal with control `c`.
pub fn esing(chart: &Chart, c: &Q) -> Result<StratumFamily> {
    esing_in(&chart.ideal, chart.active_x(), c)
}

/// Maximum E-order over `domain` and its argmax family.
pub fn etop_in(j: &Ideal, domain: Stratum) -> Result<(Q, StratumFamily)> {
    let table = eord_table(j, domain)?;
    let theta = table.iter().map(|v| v.value.clone()).max().unwrap();
    let fam = StratumFamily::from_members(
        table.into_iter().filter(|v| v.value == theta).map(|v| v.stratum),
    );
    Ok((theta, fam))
}

pub fn etop(chart: &Chart) -> Result<(Q, StratumFamily)> {
    etop_in(&chart.ideal, chart.active_x())
}

/// Maximum E-order of the chart ideal.
pub fn max_eord(chart: &Chart) -> Result<Q> {
    Ok(etop(chart)?.0)
}

/// Maximum E-order of the `I` part of the chart ideal.
pub fn max_eord_i(chart: &Chart) -> Result<Q> {
    let domain = chart.active_x();
    let mut best = q(0);
    for s in domain.subsets() {
        let v = chart.ideal.eord_i(s)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Pairs `Λ ⊆ Λ'` of subsets of `domain` where the E-order decreases.
pub fn monotonicity_violations(j: &Ideal, domain: Stratum) -> Result<Vec<(Stratum, Stratum)>> {
    let table = eord_table(j, domain)?;
    let mut bad = Vec::new();
    for a in &table {
        for b in &table {
            if a.stratum.is_subset(b.stratum) && a.value > b.value {
                bad.push((a.stratum, b.stratum));
            }
        }
    }
    Ok(bad)
}
