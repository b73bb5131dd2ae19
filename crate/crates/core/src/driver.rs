//! The resolution driver: passes of E-resolution, restarts and the pipelines built on them.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::eorder::{esing, max_eord, max_eord_i};
use crate::error::{Error, Result};
use crate::field::{q, Q};
use crate::ideal::{Generator, Ideal, VarClass};
use crate::invariant::{emaxb, resolution_function, InvariantValue, MaxLocus};
use crate::monomialize::{
    ereg_nc_check, is_locally_monomial, is_log_resolved, local_monomial_forms, LocalMonomialForm, Verdict,
};
use crate::stratum::Stratum;
use crate::transform::{blowup, check_chart_compatibility, transform_tracked};

pub const DEFAULT_BUDGET: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PipelineGoal {
    LocallyMonomial,
    LogResolution,
    Desingularization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    /// Blown up (interior) or not yet processed.
    Active,
    /// The E-singular locus is empty for the node's control.
    ESingEmpty,
    LocallyMonomial,
    LogResolved,
    Desingularized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Root,
    /// A chart of a blow-up of the parent.
    Blowup,
    /// Same chart as the parent with a new control or a new working ideal.
    Restart,
    /// New coordinates `z` near the points of the parent chart.
    Patch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub kind: NodeKind,
    /// The chart with the working ideal (a controlled transform).
    pub chart: Chart,
    /// The tracked transform of the input: total, or strict when desingularizing.
    pub tracked: Ideal,
    #[serde(with = "crate::field::q_serde")]
    pub control: Q,
    pub pass: usize,
    pub center: Option<Stratum>,
    pub max_invariant: Option<InvariantValue>,
    /// The blow-up step in which this chart was blown up.
    pub step: Option<usize>,
    pub status: Status,
    pub children: Vec<usize>,
    pub patch: Option<LocalMonomialForm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTree {
    pub characteristic: u64,
    pub goal: PipelineGoal,
    pub budget: usize,
    /// Blow-up steps: each blows up every chart of a pass where `t` is maximal.
    pub steps: usize,
    /// Individual chart blow-ups.
    pub chart_blowups: usize,
    pub nodes: Vec<Node>,
}

/// A failed run with the tree built so far.
#[derive(Debug)]
pub struct Failure {
    pub error: Error,
    pub tree: Box<ResolutionTree>,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

pub type RunResult<T> = std::result::Result<T, Failure>;

fn strictify(j: &Ideal, chart: &Chart) -> Ideal {
    let mut out = j.clone();
    for i in chart.exceptional_x().iter() {
        out.mpart[i] = Q::zero();
        for g in &mut out.gens {
            g.factor_mut()[i] = 0;
        }
    }
    out
}

impl ResolutionTree {
    /// A tree with a single root node; the root chart is relabeled first.
    pub fn new(chart: &Chart, goal: PipelineGoal, budget: usize) -> Result<Self> {
        let mut ch = chart.detect_hyperbolic_and_relabel()?;
        ch.id = 0;
        ch.check_form()?;
        let tracked = ch.ideal.clone();
        Ok(ResolutionTree {
            characteristic: ch.characteristic,
            goal,
            budget,
            steps: 0,
            chart_blowups: 0,
            nodes: vec![Node {
                id: 0,
                parent: None,
                kind: NodeKind::Root,
                chart: ch,
                tracked,
                control: Q::zero(),
                pass: 0,
                center: None,
                max_invariant: None,
                step: None,
                status: Status::Active,
                children: Vec::new(),
                patch: None,
            }],
        })
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.children.is_empty()).map(|n| n.id).collect()
    }

    pub fn depth(&self, mut id: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[id].parent {
            id = p;
            d += 1;
        }
        d
    }

    fn add_child(&mut self, parent: usize, kind: NodeKind, mut chart: Chart, tracked: Ideal, control: Q) -> usize {
        let id = self.nodes.len();
        chart.id = id;
        let pass = self.nodes[parent].pass + usize::from(kind != NodeKind::Blowup);
        self.nodes.push(Node {
            id,
            parent: Some(parent),
            kind,
            chart,
            tracked,
            control,
            pass,
            center: None,
            max_invariant: None,
            step: None,
            status: Status::Active,
            children: Vec::new(),
            patch: None,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Canonical string of the subtree at `id`, insensitive to the order of children.
    pub fn signature(&self, id: usize) -> String {
        let n = &self.nodes[id];
        let mut kids: Vec<String> = n.children.iter().map(|&k| self.signature(k)).collect();
        kids.sort();
        let t = n.max_invariant.as_ref().map_or("-".to_string(), |t| t.to_string());
        let c = n.center.map_or(0, |c| c.len());
        format!("{:?}/{:?}/{}/{}/{}[{}]", n.kind, n.status, crate::field::fmt_q(&n.control), t, c, kids.join(","))
    }

    /// Sorted `(depth, max invariant)` pairs over the blown-up nodes.
    pub fn invariant_profile(&self) -> Vec<(usize, String)> {
        let mut v: Vec<(usize, String)> = self
            .nodes
            .iter()
            .filter_map(|n| n.max_invariant.as_ref().map(|t| (self.depth(n.id), t.to_string())))
            .collect();
        v.sort();
        v
    }
}

type LeafHook<'a> = dyn FnMut(&mut ResolutionTree, usize) -> Result<Vec<usize>> + 'a;

/// E-resolution from each of `roots`, with control `fixed` or, when absent, the
/// maximal E-order of the root chart.
///
/// Active charts of all branches share one schedule: a step blows up every chart
/// whose pair `(c, max t)` is the current maximum. `on_leaf` receives each chart
/// whose E-singular locus is empty and returns the roots of further passes.
fn schedule(tree: &mut ResolutionTree, roots: Vec<usize>, fixed: Option<&Q>, on_leaf: &mut LeafHook) -> Result<()> {
    let desing = tree.goal == PipelineGoal::Desingularization;
    let mut active: Vec<(Q, MaxLocus, usize)> = Vec::new();
    let mut pending: Vec<(usize, Option<Q>)> = roots.into_iter().rev().map(|k| (k, fixed.cloned())).collect();
    loop {
        while let Some((k, c)) = pending.pop() {
            let c = match c {
                Some(c) => c,
                None => max_eord(&tree.nodes[k].chart)?,
            };
            tree.nodes[k].control = c.clone();
            let chart = &tree.nodes[k].chart;
            if c > Q::zero() && !esing(chart, &c)?.is_empty() {
                active.push((c.clone(), emaxb(chart, &c)?, k));
                continue;
            }
            tree.nodes[k].status = Status::ESingEmpty;
            let next = on_leaf(tree, k)?;
            pending.extend(next.into_iter().rev().map(|r| (r, fixed.cloned())));
        }
        let Some(top) = active.iter().map(|(c, m, _)| (c.clone(), m.tmax.components.clone())).max() else {
            return Ok(());
        };
        if tree.steps >= tree.budget {
            return Err(Error::Budget(tree.budget));
        }
        tree.steps += 1;
        let (stage, rest): (Vec<_>, Vec<_>) =
            active.drain(..).partition(|(c, m, _)| *c == top.0 && m.tmax.components == top.1);
        active = rest;
        let mut born = Vec::new();
        for (c, ml, k) in stage {
            let chart = tree.nodes[k].chart.clone();
            let kids = blowup(&chart, ml.center, &c)?;
            tree.chart_blowups += 1;
            tree.nodes[k].center = Some(ml.center);
            tree.nodes[k].max_invariant = Some(ml.tmax);
            tree.nodes[k].step = Some(tree.steps);
            let parent_tracked = tree.nodes[k].tracked.clone();
            for (kid, i) in kids.into_iter().zip(ml.center.iter()) {
                let mut tr = transform_tracked(&parent_tracked, ml.center, i, &kid)?;
                if desing {
                    tr = strictify(&tr, &kid);
                }
                let id = tree.add_child(k, NodeKind::Blowup, kid, tr, c.clone());
                born.push((id, Some(c.clone())));
            }
        }
        born.reverse();
        pending = born;
    }
}

/// One pass of E-resolution with control `c`, starting at node `start`.
/// Returns the leaves, where the E-singular locus is empty.
pub fn eresolve(tree: &mut ResolutionTree, start: usize, c: &Q) -> Result<Vec<usize>> {
    let mut leaves = Vec::new();
    schedule(tree, vec![start], Some(c), &mut |_, k| {
        leaves.push(k);
        Ok(Vec::new())
    })?;
    leaves.sort_unstable();
    Ok(leaves)
}

/// The working ideal for the next pass: the generators of `I` that are not
/// constant-term binomials. `None` when there are none.
pub fn build_tilde(chart: &Chart) -> Option<Ideal> {
    let gens: Vec<Generator> = chart.ideal.gens.iter().filter(|g| !g.is_hyperbolic()).cloned().collect();
    if gens.is_empty() {
        return None;
    }
    Some(Ideal::new(gens, chart.dim()).refactorize(chart.exceptional_x()))
}

/// The next pass after a leaf of E-resolution, or `None` when the leaf is final:
/// `I = 1`, or `I` has only constant-term generators left.
fn restart(tree: &mut ResolutionTree, l: usize) -> Result<Option<usize>> {
    let ch = tree.nodes[l].chart.clone();
    let tr = tree.nodes[l].tracked.clone();
    if !max_eord_i(&ch)?.is_zero() {
        return Ok(Some(tree.add_child(l, NodeKind::Restart, ch, tr, Q::zero())));
    }
    if ch.ideal.is_unit_i() {
        return Ok(None);
    }
    Ok(build_tilde(&ch).map(|t| {
        let mut nc = ch;
        nc.ideal = t;
        tree.add_child(l, NodeKind::Restart, nc, tr, Q::zero())
    }))
}

/// Runs passes from `roots` until every leaf is final; `on_final` receives those
/// leaves and may return roots of further passes.
fn monomialize_from(tree: &mut ResolutionTree, roots: Vec<usize>, on_final: &mut LeafHook) -> Result<()> {
    schedule(tree, roots, None, &mut |t, l| match restart(t, l)? {
        Some(r) => Ok(vec![r]),
        None => on_final(t, l),
    })
}

fn certify_monomial(tree: &mut ResolutionTree, l: usize) -> Result<()> {
    let n = &tree.nodes[l];
    if !is_locally_monomial(&n.chart, &n.tracked) {
        return Err(Error::Certification(format!("node {l}: total transform is not locally monomial")));
    }
    tree.nodes[l].status = Status::LocallyMonomial;
    Ok(())
}

fn lm_stage(tree: &mut ResolutionTree) -> Result<()> {
    monomialize_from(tree, vec![0], &mut |t, l| certify_monomial(t, l).map(|_| Vec::new()))
}

fn run<F>(chart: &Chart, goal: PipelineGoal, budget: usize, body: F) -> RunResult<ResolutionTree>
where
    F: FnOnce(&mut ResolutionTree) -> Result<()>,
{
    let mut tree = match ResolutionTree::new(chart, goal, budget) {
        Ok(t) => t,
        Err(error) => {
            let tree = Box::new(ResolutionTree {
                characteristic: chart.characteristic,
                goal,
                budget,
                steps: 0,
            chart_blowups: 0,
                nodes: Vec::new(),
            });
            return Err(Failure { error, tree });
        }
    };
    match body(&mut tree) {
        Ok(()) => Ok(tree),
        Err(error) => Err(Failure { error, tree: Box::new(tree) }),
    }
}

/// Makes the total transform locally monomial.
pub fn locally_monomial_resolve(chart: &Chart, budget: usize) -> RunResult<ResolutionTree> {
    run(chart, PipelineGoal::LocallyMonomial, budget, lm_stage)
}

/// A patch chart at a locally monomial leaf: `z` coordinates replace invertible
/// variables and the working ideal is the local monomial ideal.
pub fn patch_chart(chart: &Chart, form: &LocalMonomialForm) -> Chart {
    let mut ch = chart.clone();
    for (k, z) in form.zvars.iter().enumerate() {
        let v = &mut ch.vars[z.index];
        v.class = VarClass::X;
        v.name = format!("z{}", k + 1);
        v.origin = crate::chart::Origin::Original;
        ch.divisors.push(crate::chart::Divisor { label: format!("V(z{})", k + 1), var: Some(z.index), age: None });
    }
    let gens = form.lambdas.iter().map(|l| Generator::Monomial { m: l.clone() }).collect();
    ch.ideal = Ideal::new(gens, ch.dim()).refactorize(ch.exceptional_x());
    ch
}

fn under_patch(tree: &ResolutionTree, mut k: usize) -> bool {
    loop {
        let n = &tree.nodes[k];
        if n.kind == NodeKind::Patch {
            return true;
        }
        match n.parent {
            Some(p) => k = p,
            None => return false,
        }
    }
}

/// Opens one patch per local monomial form at a locally monomial leaf; returns
/// the patches that still need resolving.
fn open_patches(tree: &mut ResolutionTree, l: usize) -> Result<Vec<usize>> {
    let n = tree.nodes[l].clone();
    let mut roots = Vec::new();
    for form in local_monomial_forms(&n.chart, &n.tracked, n.chart.x_vars())? {
        let pc = patch_chart(&n.chart, &form);
        let tr = pc.ideal.clone();
        let unit = form.is_unit();
        let p = tree.add_child(l, NodeKind::Patch, pc, tr, Q::zero());
        tree.nodes[p].patch = Some(form);
        if unit {
            tree.nodes[p].status = Status::LogResolved;
        } else {
            roots.push(p);
        }
    }
    Ok(roots)
}

fn logres_stage(tree: &mut ResolutionTree) -> Result<()> {
    monomialize_from(tree, vec![0], &mut |t, l| {
        let n = &t.nodes[l];
        if is_log_resolved(&n.chart, &n.tracked) {
            t.nodes[l].status = Status::LogResolved;
            return Ok(Vec::new());
        }
        if under_patch(t, l) {
            return Err(Error::Certification(format!("node {l}: total transform is not a monomial in E")));
        }
        certify_monomial(t, l)?;
        open_patches(t, l)
    })
}

/// Makes the total transform a single monomial in the exceptional divisors.
pub fn log_resolve(chart: &Chart, budget: usize) -> RunResult<ResolutionTree> {
    run(chart, PipelineGoal::LogResolution, budget, logres_stage)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafCertificate {
    pub node: usize,
    /// Codimension of the strict transform near each point pattern (0: absent).
    pub codims: Vec<usize>,
    pub verdicts: Vec<Verdict>,
}

/// The strict transform along a chosen center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterCheck {
    pub node: usize,
    pub verdict: Verdict,
    /// Whether the center lies on the subvariety.
    pub contained: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesingReport {
    pub centers: Vec<CenterCheck>,
    pub leaves: Vec<LeafCertificate>,
}

fn certify_leaf(tree: &ResolutionTree, l: usize) -> Result<LeafCertificate> {
    let n = &tree.nodes[l];
    let gens: Vec<Generator> = n.tracked.gens.iter().filter(|g| !g.is_unit()).cloned().collect();
    if n.tracked.is_unit_i() {
        return Ok(LeafCertificate { node: l, codims: vec![0], verdicts: vec![Verdict::Disjoint] });
    }
    if let Some(g) = gens.iter().find(|g| !g.is_hyperbolic()) {
        return Err(Error::Certification(format!("node {l}: strict transform keeps {g:?}")));
    }
    let mut verdicts = Vec::new();
    for s in n.chart.x_vars().subsets() {
        let v = ereg_nc_check(&n.chart, &gens, s)?;
        if matches!(v, Verdict::Singular | Verdict::Tangent) {
            return Err(Error::Certification(format!("node {l}: strict transform is {v:?} at {s}")));
        }
        if !verdicts.contains(&v) {
            verdicts.push(v);
        }
    }
    let mut codims = Vec::new();
    for form in local_monomial_forms(&n.chart, &strictify(&n.tracked, &n.chart), n.chart.x_vars())? {
        if form.is_unit() {
            codims.push(0);
            continue;
        }
        let zs = form.z_indices();
        let reduced = form.lambdas.len() == zs.len()
            && form.lambdas.iter().all(|l| l.iter().sum::<i64>() == 1 && zs.iter().any(|i| l[i] == 1));
        if !reduced {
            return Err(Error::Certification(format!("node {l}: strict transform is not reduced near {zs}")));
        }
        let pc = patch_chart(&n.chart, &form);
        let t = resolution_function(&pc, zs, &q(1))?;
        if t.regular_codim() != Some(zs.len()) {
            return Err(Error::Certification(format!("node {l}: invariant {t} at {zs} is not regular")));
        }
        codims.push(zs.len());
    }
    Ok(LeafCertificate { node: l, codims, verdicts })
}

fn desing_stage(tree: &mut ResolutionTree) -> Result<DesingReport> {
    let root = &tree.nodes[0];
    if root.chart.ideal.gens.iter().any(|g| matches!(g, Generator::Monomial { .. })) {
        return Err(Error::Precondition("a subvariety to desingularize has no monomial generators".into()));
    }
    if !root.chart.ideal.mpart_is_one() {
        return Err(Error::Precondition("a subvariety to desingularize has no monomial part".into()));
    }
    let leaves = eresolve(tree, 0, &q(1))?;
    let mut report = DesingReport { centers: Vec::new(), leaves: Vec::new() };
    for n in &tree.nodes {
        if let Some(z) = n.center {
            let gens: Vec<Generator> = n.tracked.gens.iter().filter(|g| !g.is_unit()).cloned().collect();
            let verdict = ereg_nc_check(&n.chart, &gens, z)?;
            // the center lies on the subvariety when every strict generator vanishes along it
            let contained = !gens.is_empty() && gens.iter().all(|g| g.eord(z) >= 1);
            if contained && verdict == Verdict::RegularNC {
                return Err(Error::Certification(format!("node {}: center {z} is regular on the subvariety", n.id)));
            }
            report.centers.push(CenterCheck { node: n.id, verdict, contained });
        }
    }
    for l in leaves {
        report.leaves.push(certify_leaf(tree, l)?);
        tree.nodes[l].status = Status::Desingularized;
    }
    Ok(report)
}

/// Embedded desingularization of a binomial subvariety, with its certificate.
pub fn embedded_desingularize(chart: &Chart, budget: usize) -> RunResult<(ResolutionTree, DesingReport)> {
    let mut report = None;
    let tree = run(chart, PipelineGoal::Desingularization, budget, |t| {
        report = Some(desing_stage(t)?);
        Ok(())
    })?;
    Ok((tree, report.expect("set on success")))
}

/// Runs the pipeline for `goal`.
pub fn resolve(chart: &Chart, goal: PipelineGoal, budget: usize) -> RunResult<ResolutionTree> {
    match goal {
        PipelineGoal::LocallyMonomial => locally_monomial_resolve(chart, budget),
        PipelineGoal::LogResolution => log_resolve(chart, budget),
        PipelineGoal::Desingularization => embedded_desingularize(chart, budget).map(|(t, _)| t),
    }
}

/// A single E-resolution pass with a fixed control.
pub fn eresolve_chart(chart: &Chart, c: &Q, budget: usize) -> RunResult<ResolutionTree> {
    run(chart, PipelineGoal::LocallyMonomial, budget, |t| eresolve(t, 0, c).map(|_| ()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub nodes: usize,
    pub blowups: usize,
    pub problems: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Recomputes every recorded decision of a tree and checks its invariants.
pub fn verify(tree: &ResolutionTree) -> VerifyReport {
    let mut rep = VerifyReport { nodes: tree.nodes.len(), ..Default::default() };
    let mut bad = |m: String| rep.problems.push(m);
    for n in &tree.nodes {
        if let Err(e) = n.chart.check_form() {
            bad(format!("node {}: {e}", n.id));
        }
        if let Some(z) = n.center {
            let c = &n.control;
            match emaxb(&n.chart, c) {
                Ok(ml) => {
                    if ml.center != z {
                        bad(format!("node {}: recorded center {z}, recomputed {}", n.id, ml.center));
                    }
                    if Some(&ml.tmax) != n.max_invariant.as_ref() {
                        bad(format!("node {}: recorded invariant differs from {}", n.id, ml.tmax));
                    }
                }
                Err(e) => bad(format!("node {}: {e}", n.id)),
            }
            match blowup(&n.chart, z, c) {
                Ok(kids) => {
                    let stored: Vec<&Node> = n.children.iter().map(|&k| &tree.nodes[k]).collect();
                    if kids.len() != stored.len() {
                        bad(format!("node {}: {} charts expected, {} stored", n.id, kids.len(), stored.len()));
                    }
                    for (k, s) in kids.iter().zip(&stored) {
                        if k.ideal != s.chart.ideal || k.classes() != s.chart.classes() {
                            bad(format!("node {}: chart does not match its recomputed blow-up", s.id));
                        }
                    }
                }
                Err(e) => bad(format!("node {}: {e}", n.id)),
            }
            for &k in &n.children {
                let ch = &tree.nodes[k];
                if let (Some(a), Some(b)) = (&n.max_invariant, &ch.max_invariant) {
                    if ch.pass == n.pass && b.components >= a.components {
                        bad(format!("node {k}: invariant {b} does not drop below {a}"));
                    }
                }
            }
        }
        let leaf_ok = match n.status {
            Status::ESingEmpty => esing(&n.chart, &n.control).map(|f| f.is_empty()).unwrap_or(false) || n.control.is_zero(),
            Status::LocallyMonomial => is_locally_monomial(&n.chart, &n.tracked),
            Status::LogResolved => n.patch.as_ref().is_some_and(LocalMonomialForm::is_unit) || is_log_resolved(&n.chart, &n.tracked),
            Status::Active | Status::Desingularized => true,
        };
        if !leaf_ok {
            bad(format!("node {}: status {:?} does not hold", n.id, n.status));
        }
    }
    rep.blowups = tree.nodes.iter().filter(|n| n.center.is_some()).count();
    match check_chart_compatibility(tree) {
        Ok(p) => rep.problems.extend(p),
        Err(e) => rep.problems.push(e.to_string()),
    }
    rep
}
