use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::multidist::MultiDist;
use crate::redex::{self, RedexClass};
use crate::syntax::{Calculus, Canon, Term};

use super::graph::ReductionGraph;
use super::report::CheckReport;

/// All `N` with `M ⇛ N` under parallel βv reduction (cbv terms).
pub fn par_set(m: &Term) -> BTreeSet<Term> {
    match m {
        Term::Var(_) => BTreeSet::from([m.clone()]),
        Term::Lam(x, b) => par_set(b).into_iter().map(|n| Term::lam(x, n)).collect(),
        Term::BangLam(x, b) => par_set(b)
            .into_iter()
            .map(|n| Term::bang_lam(x, n))
            .collect(),
        Term::Bang(b) => par_set(b).into_iter().map(Term::bang).collect(),
        Term::App(f, a) => {
            let fs = par_set(f);
            let args = par_set(a);
            let mut out: BTreeSet<Term> = fs
                .iter()
                .flat_map(|f2| args.iter().map(move |a2| Term::app(f2.clone(), a2.clone())))
                .collect();
            if let (Term::Lam(x, body), true) = (&**f, a.is_value()) {
                let bodies = par_set(body);
                for w in &args {
                    assert!(
                        w.is_value(),
                        "parallel reduct of value {a} is not a value: {w}"
                    );
                    for b2 in &bodies {
                        out.insert(b2.subst(x, w));
                    }
                }
            }
            out
        }
        Term::Choice(l, r) => {
            let rs = par_set(r);
            par_set(l)
                .into_iter()
                .flat_map(|l2| {
                    rs.iter()
                        .map(move |r2| Term::choice(l2.clone(), r2.clone()))
                })
                .collect()
        }
    }
}

/// All `N` with `M ⇛ᵈ N` under deep parallel reduction (cbv terms).
pub fn deep_par_set(m: &Term) -> BTreeSet<Term> {
    match m {
        Term::Var(_) => BTreeSet::from([m.clone()]),
        Term::Lam(x, b) => par_set(b).into_iter().map(|n| Term::lam(x, n)).collect(),
        Term::BangLam(x, b) => par_set(b)
            .into_iter()
            .map(|n| Term::bang_lam(x, n))
            .collect(),
        Term::Bang(b) => par_set(b).into_iter().map(Term::bang).collect(),
        Term::App(f, a) => {
            let args = deep_par_set(a);
            deep_par_set(f)
                .into_iter()
                .flat_map(|f2| args.iter().map(move |a2| Term::app(f2.clone(), a2.clone())))
                .collect()
        }
        Term::Choice(l, r) => {
            let rs = par_set(r);
            par_set(l)
                .into_iter()
                .flat_map(|l2| {
                    rs.iter()
                        .map(move |r2| Term::choice(l2.clone(), r2.clone()))
                })
                .collect()
        }
    }
}

pub fn par_reduces(a: &Term, b: &Term) -> bool {
    par_set(a).contains(b)
}

pub fn deep_par_reduces(a: &Term, b: &Term) -> bool {
    deep_par_set(a).contains(b)
}

/// Terms reachable from `m` by deep βv steps, or `None` past `budget`.
pub fn deep_beta_reach(m: &Term, budget: usize) -> Option<BTreeSet<Term>> {
    let mut seen = BTreeSet::from([m.clone()]);
    let mut queue = VecDeque::from([m.clone()]);
    while let Some(t) = queue.pop_front() {
        for r in redex::redexes(&t, Calculus::Cbv) {
            if RedexClass::DeepBeta.admits(&r) {
                let n = redex::beta_step(&t, &r);
                if seen.insert(n.clone()) {
                    if seen.len() > budget {
                        return None;
                    }
                    queue.push_back(n);
                }
            }
        }
    }
    Some(seen)
}

/// Checks the parallel relations on `m` against step-based oracles:
/// `⇛` is reflexive and contains every βv step, and `⇛ᵈ` is exactly `⇛`
/// restricted to what deep βv steps reach.
pub fn check_parallel_oracle(m: &Term) -> CheckReport {
    let report = CheckReport::new("parallel", Calculus::Cbv, m);
    let par = par_set(m);
    let dpar = deep_par_set(m);
    if !par.contains(m) || !dpar.contains(m) {
        return report.fail("parallel reduction is not reflexive");
    }
    for r in redex::redexes(m, Calculus::Cbv) {
        if r.kind.is_beta() {
            let n = redex::beta_step(m, &r);
            if !par.contains(&n) {
                return report.fail(format!("βv step to {n} is not a parallel step"));
            }
        }
    }
    let Some(reach) = deep_beta_reach(m, 20_000) else {
        return report.budget("deep βv reachability exceeded its budget");
    };
    let expected: BTreeSet<Term> = par.intersection(&reach).cloned().collect();
    if expected != dpar {
        let extra: Vec<String> = dpar.difference(&expected).map(|t| t.to_string()).collect();
        let missing: Vec<String> = expected.difference(&dpar).map(|t| t.to_string()).collect();
        return report.fail(format!(
            "deep parallel reducts differ: extra [{}], missing [{}]",
            extra.join(", "),
            missing.join(", ")
        ));
    }
    report
}

/// Whether `s ⇛ᵈ n` entrywise: a probability-preserving bijection of
/// entries with each `n` entry a deep parallel reduct of its `s` entry.
pub fn deep_par_lifted(
    s: &MultiDist,
    n: &MultiDist,
    cache: &mut HashMap<Canon, BTreeSet<Term>>,
) -> bool {
    if s.len() != n.len() {
        return false;
    }
    let sets: Vec<BTreeSet<Term>> = s
        .terms()
        .map(|t| {
            cache
                .entry(t.canonical())
                .or_insert_with(|| deep_par_set(t))
                .clone()
        })
        .collect();
    let mut used = vec![false; n.len()];
    assign(0, s, n, &sets, &mut used)
}

fn assign(
    i: usize,
    s: &MultiDist,
    n: &MultiDist,
    sets: &[BTreeSet<Term>],
    used: &mut [bool],
) -> bool {
    if i == s.len() {
        return true;
    }
    let (p, _) = &s.entries()[i];
    for (j, (q, u)) in n.entries().iter().enumerate() {
        if !used[j] && p == q && sets[i].contains(u) {
            used[j] = true;
            if assign(i + 1, s, n, sets, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// For every `M′` with `M ⇛ᵈ M′` and every surface step `M′ →ˢ 𝔫`, some
/// `𝔰` with `[1 M] ⇒ˢ* 𝔰` satisfies `𝔰 ⇛ᵈ 𝔫`.
pub fn check_postponement(m: &Term, budget: usize) -> CheckReport {
    let report = CheckReport::new("postponement", Calculus::Cbv, m);
    let mut graph = ReductionGraph::new(
        &MultiDist::unit(m.clone()),
        Calculus::Cbv,
        RedexClass::Surface,
        budget,
    );
    let mut cache = HashMap::new();
    let mut witness = Vec::new();
    for m2 in deep_par_set(m) {
        for r in redex::redexes(&m2, Calculus::Cbv) {
            if !r.flags.surface {
                continue;
            }
            let n = redex::step(&m2, &r, Calculus::Cbv).expect("enumerated redex");
            match graph.explore_until(|s| deep_par_lifted(s, &n, &mut cache)) {
                Some(s) => witness.push(s),
                None if graph.exhausted() => {
                    return report
                        .fail(format!(
                            "no surface reduct of [1 {m}] deep-parallel reduces to {n}"
                        ))
                        .with_witness([&n]);
                }
                None => {
                    return report
                        .budget(format!("surface search for {n} exceeded {budget} nodes"))
                        .with_witness([&n]);
                }
            }
        }
    }
    report.with_witness(&witness)
}
