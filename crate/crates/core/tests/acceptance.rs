//! Acceptance criteria, one line each. Exits nonzero when any criterion fails.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use binres::chart::Origin;
use binres::corpus::{self, corpus};
use binres::driver::{self, eresolve_chart, locally_monomial_resolve, log_resolve, NodeKind, ResolutionTree, Status};
use binres::eorder::{max_eord, monotonicity_violations};
use binres::field::q;
use binres::invariant::{compare, emaxb, resolution_function};
use binres::io::{generator_str, parse_ideal};
use binres::monomialize::{is_locally_monomial, is_log_resolved, local_monomial_form, p_power_split, Verdict};
use binres::transform::check_chart_compatibility;
use binres::{normalize_generator, Chart, FieldElement, Generator, Stratum, Term, VarClass};

mod common;
use common::*;

const SEED: u64 = 20261016;
const BUDGET: usize = 500;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The tree of a run, finished or not.
fn lm_tree(ch: &Chart) -> (ResolutionTree, Option<String>) {
    match locally_monomial_resolve(ch, BUDGET) {
        Ok(t) => (t, None),
        Err(f) => (*f.tree, Some(f.error.to_string())),
    }
}

fn lm_corpus() -> Vec<(ResolutionTree, Option<String>)> {
    corpus(SEED, 100).iter().map(lm_tree).collect()
}

fn s(ix: &[usize]) -> Stratum {
    Stratum::from_indices(ix.iter().copied())
}

fn cusp() -> Outcome {
    let ch = parse_ideal("char: 0\nvars: x1 x2 x3\ngen: x1^2 - x2^3\n").map_err(|e| e.to_string())?;
    let t = resolution_function(&ch, s(&[0, 1]), &q(2)).map_err(|e| e.to_string())?;
    ensure(t.to_string() == "(1, 3/2, inf)", || format!("t at {{1,2}} is {t}"))?;
    let m = emaxb(&ch, &q(2)).map_err(|e| e.to_string())?;
    ensure(m.center == s(&[0, 1]), || format!("center {}", m.center))?;
    let tree = eresolve_chart(&ch, &q(2), 10).map_err(|f| f.to_string())?;
    ensure(tree.steps == 1, || format!("{} steps", tree.steps))?;
    let leaves = tree.leaves();
    ensure(leaves.len() == 2, || format!("{} leaves", leaves.len()))?;
    for &l in &leaves {
        let n = &tree.nodes[l];
        ensure(n.status == Status::ESingEmpty, || format!("leaf {l} is {:?}", n.status))?;
        let var = n.chart.lineage.as_ref().map(|g| g.var);
        let gens: Vec<String> = n.chart.ideal.gens.iter().map(|g| generator_str(g, &n.chart)).collect();
        match var {
            Some(0) => {
                ensure(gens == ["1 - y1*y2^3"], || format!("chart x1: {gens:?}"))?;
                ensure(n.chart.ideal.gens[0].is_hyperbolic(), || "chart x1 is not hyperbolic".into())?;
            }
            Some(1) => {
                let terms = [
                    Term { coeff: FieldElement::one(0), exp: vec![2, 0, 0] },
                    Term { coeff: FieldElement::one(0).neg(), exp: vec![0, 1, 0] },
                ];
                let want = normalize_generator(&terms, &n.chart.classes()).map_err(|e| e.to_string())?;
                ensure(n.chart.ideal.gens == [want], || format!("chart x2: {gens:?}"))?;
                let e = max_eord(&n.chart).map_err(|e| e.to_string())?;
                ensure(e == q(1), || format!("chart x2 max E-order {e}"))?;
            }
            v => return Err(format!("unexpected chart {v:?}")),
        }
    }
    Ok("t = (1, 3/2, inf), one step, charts x1 and x2 as expected".into())
}

fn tilde() -> Outcome {
    let run = |src: &str| -> Result<Generator, String> {
        let ch = parse_ideal(src).and_then(|c| c.detect_hyperbolic_and_relabel()).map_err(|e| e.to_string())?;
        let t = driver::build_tilde(&ch).ok_or("no working ideal")?;
        ensure(t.gens.len() == 1, || format!("{} generators", t.gens.len()))?;
        Ok(t.gens[0].clone())
    };
    let cls = [VarClass::Y, VarClass::X, VarClass::X];
    let one = FieldElement::one(0);
    let want = |gamma: [i64; 3]| {
        let terms = [
            Term { coeff: one.clone(), exp: vec![0, 1, 0] },
            Term { coeff: one.neg(), exp: vec![gamma[0], gamma[1], gamma[2] + 2] },
        ];
        normalize_generator(&terms, &cls).map_err(|e| e.to_string())
    };
    let a = run("char: 0\nvars: x1 x2 x3\ngen: 1 - x1\ngen: x2 - x3^2\n")?;
    let b = run("char: 0\nvars: x1 x2 x3\ngen: 1 - x1\ngen: x2 - x3^2*x1\n")?;
    ensure(a == want([0, 0, 0])?, || format!("first: {a:?}"))?;
    ensure(b == want([1, 0, 0])?, || format!("second: {b:?}"))?;
    ensure(a != b, || "the two working ideals coincide".into())?;
    Ok("x2 - x3^2 and x2 - y1*x3^2, distinct".into())
}

fn decrease(runs: &[(ResolutionTree, Option<String>)]) -> Outcome {
    let mut pairs = 0;
    for (k, (t, _)) in runs.iter().enumerate() {
        for n in &t.nodes {
            let Some(p) = n.parent else { continue };
            let parent = &t.nodes[p];
            if n.kind != NodeKind::Blowup || n.pass != parent.pass {
                continue;
            }
            let (Some(a), Some(b)) = (&parent.max_invariant, &n.max_invariant) else { continue };
            pairs += 1;
            let ord = compare(b, a).map_err(|e| e.to_string())?;
            ensure(ord == Ordering::Less, || format!("ideal {k}, node {}: {b} not below {a}", n.id))?;
        }
    }
    Ok(format!("{pairs} parent-child pairs strictly decrease"))
}

fn termination(runs: &[(ResolutionTree, Option<String>)]) -> Outcome {
    let mut failed = Vec::new();
    let mut most = 0;
    for (k, (t, err)) in runs.iter().enumerate() {
        if let Some(e) = err {
            failed.push(format!("ideal {k}: {e}"));
            continue;
        }
        most = most.max(t.steps);
        for l in t.leaves() {
            let n = &t.nodes[l];
            ensure(is_locally_monomial(&n.chart, &n.tracked), || format!("ideal {k}, leaf {l} not locally monomial"))?;
        }
    }
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("all finish, at most {most} steps"))
}

fn monotone(runs: &[(ResolutionTree, Option<String>)]) -> Outcome {
    let mut charts = 0;
    for (k, (t, _)) in runs.iter().enumerate() {
        for n in &t.nodes {
            charts += 1;
            let v = monotonicity_violations(&n.chart.ideal, n.chart.x_vars()).map_err(|e| e.to_string())?;
            ensure(v.is_empty(), || format!("ideal {k}, node {}: {} violations", n.id, v.len()))?;
        }
    }
    Ok(format!("{charts} charts checked"))
}

fn equivariance() -> Outcome {
    let mut rng = corpus::rng(SEED);
    let mut runs = 0;
    for (k, ch) in corpus(SEED, 20).iter().enumerate() {
        let Ok(a) = locally_monomial_resolve(ch, BUDGET) else { continue };
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..ch.dim()).collect();
            perm.shuffle(&mut rng);
            let b = locally_monomial_resolve(&ch.permute(&perm), BUDGET).map_err(|f| format!("ideal {k} {perm:?}: {f}"))?;
            ensure(a.signature(0) == b.signature(0), || format!("ideal {k} {perm:?}: trees differ"))?;
            ensure(a.invariant_profile() == b.invariant_profile(), || format!("ideal {k} {perm:?}: invariants differ"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} permuted runs match"))
}

fn desing() -> Outcome {
    let mut notes = Vec::new();
    for src in ["char: 0\nvars: x1 x2 x3\ngen: x1*x2 - x3^2\n", "char: 0\nvars: x1 x2\ngen: x1^2 - x2^3\n"] {
        let ch = parse_ideal(src).map_err(|e| e.to_string())?;
        let (_, rep) = driver::embedded_desingularize(&ch, BUDGET).map_err(|f| f.to_string())?;
        for l in &rep.leaves {
            let ok = l.verdicts.iter().all(|v| matches!(v, Verdict::RegularNC | Verdict::Disjoint));
            ensure(ok, || format!("leaf {}: {:?}", l.node, l.verdicts))?;
        }
        for c in &rep.centers {
            ensure(!(c.contained && c.verdict == Verdict::RegularNC), || format!("center at node {} is regular", c.node))?;
        }
        let off = rep.centers.iter().filter(|c| !c.contained).count();
        notes.push(format!("{} centers ({off} off the subvariety), {} leaves", rep.centers.len(), rep.leaves.len()));
    }
    Ok(notes.join("; "))
}

fn gcd_oracle() -> Outcome {
    let mut rng = corpus::rng(SEED ^ 8);
    for case in 0..200 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let a = rng.gen_range(1..10u64);
        let base = element(p, rng.gen());
        let mut sys = vec![(a, base.clone())];
        for _ in 0..rng.gen_range(1..4) {
            let k = rng.gen_range(1..5u64);
            if rng.gen_bool(0.5) {
                sys.push((a * k, base.pow(k as i64).unwrap()));
            } else {
                sys.push((k * (1 + a % 3), element(p, rng.gen())));
            }
        }
        let got = hyp_system(&sys);
        let oracle = sys.iter().skip(1).fold(hyp(p, sys[0].0, &sys[0].1), |g, (b, mu)| gcd(g, hyp(p, *b, mu)));
        let oracle = monic(trim(oracle));
        let ok = match &got {
            None => oracle.len() == 1,
            Some((d, nu)) => monic(hyp(p, *d, nu)) == oracle,
        };
        ensure(ok, || format!("case {case}, char {p}: {sys:?} gave {got:?}"))?;
    }
    Ok("200 systems agree with polynomial division".into())
}

/// `⟨M_1(1 − μ_1 y^{δ_1}), …, M_r(1 − μ_r y^{δ_r}), M_{r+1}⟩` with exceptional `M_k`.
fn simp_chart(rng: &mut impl Rng, p: u64) -> (Chart, usize) {
    let nx = rng.gen_range(1..=2);
    let ny = rng.gen_range(1..=2);
    let n = nx + ny;
    let cls: Vec<VarClass> = (0..n).map(|i| if i < nx { VarClass::X } else { VarClass::Y }).collect();
    let r = rng.gen_range(1..=3);
    let mut gens = Vec::new();
    while gens.len() < r {
        let lam: Vec<i64> = (0..n).map(|i| if i < nx { rng.gen_range(0..3) } else { 0 }).collect();
        let delta: Vec<i64> = (0..n).map(|i| if i < nx { 0 } else { rng.gen_range(-3..=3) }).collect();
        if delta.iter().all(|&e| e == 0) {
            continue;
        }
        let top: Vec<i64> = lam.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let terms = [Term { coeff: FieldElement::one(p), exp: lam }, Term { coeff: element(p, rng.gen()).neg(), exp: top }];
        gens.push(normalize_generator(&terms, &cls).unwrap());
    }
    let m: Vec<i64> = (0..n).map(|i| if i < nx { rng.gen_range(1..4) } else { 0 }).collect();
    gens.push(Generator::Monomial { m });
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let inv = Stratum::from_indices(nx..n);
    let mut ch = Chart::root(p, &names, inv, gens);
    for i in 0..nx {
        ch.vars[i].origin = Origin::Exceptional(1);
    }
    ch.ideal = ch.ideal.refactorize(ch.exceptional_x());
    (ch, r)
}

fn simpideal() -> Outcome {
    let mut rng = corpus::rng(SEED ^ 9);
    let (mut over_n, mut rejected) = (Vec::new(), Vec::new());
    for case in 0..100 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let (ch, r) = simp_chart(&mut rng, p);
        match local_monomial_form(&ch, &ch.ideal, ch.x_vars()) {
            Ok(form) => {
                let t = form.lambdas.len();
                ensure(t <= r + 1, || format!("case {case}: t = {t} with r = {r}"))?;
                // the minimal generators form an antichain, so t is the minimal number of generators
                let ls = &form.lambdas;
                let divides = |a: &Vec<i64>, b: &Vec<i64>| a.iter().zip(b).all(|(x, y)| x <= y);
                let antichain = ls.iter().enumerate().all(|(i, a)| ls.iter().enumerate().all(|(j, b)| i == j || !divides(a, b)));
                ensure(antichain, || format!("case {case}: {ls:?} is not minimal"))?;
                if t > ch.dim() {
                    over_n.push(format!("case {case}: t = {t}, n = {}, lambdas {ls:?}", ch.dim()));
                }
            }
            Err(e) => rejected.push(format!("case {case}: {e} [{}]", gens_str(&ch))),
        }
        if p > 0 {
            for g in &ch.ideal.gens {
                if let Generator::Hyperbolic { mu, delta, .. } = g {
                    let (s, d, root) = p_power_split(delta, mu, p).map_err(|e| e.to_string())?;
                    let pw = (p as i64).pow(s);
                    let back: Vec<i64> = d.iter().map(|e| e * pw).collect();
                    ensure(&back == delta && root.pow(pw).unwrap() == *mu, || format!("case {case}: split of {g:?}"))?;
                }
            }
        }
        // a single p-th power: 1 − μ·y^{p^s·a}
        let p = PRIMES[1 + case % 4];
        let s = rng.gen_range(0..3u32);
        let a = loop {
            let a = rng.gen_range(1..6i64);
            if a % p as i64 != 0 {
                break a;
            }
        };
        let pw = (p as i64).pow(s);
        let mu = element(p, rng.gen());
        let terms = [Term { coeff: FieldElement::one(p), exp: vec![0] }, Term { coeff: mu.neg(), exp: vec![pw * a] }];
        let g = normalize_generator(&terms, &[VarClass::Y]).map_err(|e| e.to_string())?;
        let one = Chart::root(p, &["x1".to_string()], s_all(1), vec![g]);
        let f = local_monomial_form(&one, &one.ideal, Stratum::default()).map_err(|e| e.to_string())?;
        ensure(f.zvars.len() == 1 && f.zvars[0].s == s, || format!("case {case}: zvars {:?}", f.zvars))?;
        ensure(f.lambdas == vec![vec![pw]], || format!("case {case}: lambdas {:?}", f.lambdas))?;
    }
    let mut problems = Vec::new();
    if !over_n.is_empty() {
        problems.push(format!("{} forms exceed t <= n ({})", over_n.len(), over_n.join("; ")));
    }
    if !rejected.is_empty() {
        problems.push(format!("{} instances have no form ({})", rejected.len(), rejected.join("; ")));
    }
    ensure(problems.is_empty(), || format!("t <= r+1 holds throughout; {}", problems.join("; ")))?;
    Ok("100 instances within bounds".into())
}

fn s_all(n: usize) -> Stratum {
    Stratum::from_indices(0..n)
}

fn logres() -> Outcome {
    let mut failed = Vec::new();
    let mut leaves = 0;
    for (k, ch) in corpus(SEED, 30).iter().enumerate() {
        let t = match log_resolve(ch, BUDGET) {
            Ok(t) => t,
            Err(f) => {
                failed.push(format!("ideal {k}: {f}"));
                continue;
            }
        };
        for l in t.leaves() {
            let n = &t.nodes[l];
            ensure(is_log_resolved(&n.chart, &n.tracked), || format!("ideal {k}, leaf {l} not log-resolved"))?;
            leaves += 1;
        }
        let bad = check_chart_compatibility(&t).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("ideal {k}: {}", bad.join("; ")))?;
    }
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{leaves} leaves log-resolved"))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let runs = lm_corpus();
    let corpus_time = t0.elapsed();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 cusp invariant and one blow-up step", Box::new(cusp)),
        ("2 working ideal after a restart", Box::new(tilde)),
        ("3 invariant strictly decreases", Box::new(|| decrease(&runs))),
        ("4 termination within the step budget", Box::new(|| termination(&runs))),
        ("5 E-order monotone on strata", Box::new(|| monotone(&runs))),
        ("6 equivariance under permutations", Box::new(equivariance)),
        ("7 embedded desingularization certificate", Box::new(desing)),
        ("8 hyperbolic gcd against division", Box::new(gcd_oracle)),
        ("9 local monomial forms", Box::new(simpideal)),
        ("10 log-resolution", Box::new(logres)),
    ];
    println!("locally monomial corpus: 100 ideals in {:.2?}", corpus_time);
    let mut red = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let out = f();
        let dt = t.elapsed();
        match out {
            Ok(msg) => println!("PASS {name} ({dt:.2?}): {msg}"),
            Err(msg) => {
                red += 1;
                println!("FAIL {name} ({dt:.2?}): {msg}");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - red, criteria.len());
    if red > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn gens_str(ch: &Chart) -> String {
    ch.ideal.gens.iter().map(|g| generator_str(g, ch)).collect::<Vec<_>>().join(", ")
}
