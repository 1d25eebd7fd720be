use std::collections::HashSet;

use crate::multidist::{MdKey, MultiDist};
use crate::redex::{self, Redex, RedexClass};
use crate::syntax::{Calculus, Term};

use super::graph::{joinable, normalize, one_lifted_step, JoinVerdict};
use super::report::CheckReport;

fn step1(t: &Term, r: &Redex, calculus: Calculus) -> MultiDist {
    redex::step(t, r, calculus).expect("enumerated redex")
}

/// Every pair of distinct one-step reducts of `[1 term]` has a common
/// reduct.
pub fn check_local_confluence(term: &Term, calculus: Calculus, budget: usize) -> CheckReport {
    let report = CheckReport::new("confluence", calculus, term);
    let mut reducts: Vec<MultiDist> = Vec::new();
    let mut keys: HashSet<MdKey> = HashSet::new();
    for r in redex::redexes(term, calculus) {
        let m = step1(term, &r, calculus);
        if keys.insert(m.key()) {
            reducts.push(m);
        }
    }
    let nfs: Vec<Option<MdKey>> = reducts
        .iter()
        .map(|m| normalize(m, calculus, 200, 5_000).map(|p| p.last().expect("path").key()))
        .collect();
    for i in 0..reducts.len() {
        for j in i + 1..reducts.len() {
            if nfs[i].is_some() && nfs[i] == nfs[j] {
                continue;
            }
            match joinable(&reducts[i], &reducts[j], calculus, budget) {
                JoinVerdict::Joined(_) => {}
                JoinVerdict::Disjoint => {
                    return report
                        .fail(format!(
                            "{} and {} have no common reduct",
                            reducts[i], reducts[j]
                        ))
                        .with_witness([&reducts[i], &reducts[j]]);
                }
                JoinVerdict::Budget => {
                    return report
                        .budget(format!(
                            "no join of {} and {} within budget",
                            reducts[i], reducts[j]
                        ))
                        .with_witness([&reducts[i], &reducts[j]]);
                }
            }
        }
    }
    report
}

fn one_step_keys(m: &MultiDist, calculus: Calculus, class: RedexClass) -> HashSet<MdKey> {
    one_lifted_step(m, calculus, class)
        .iter()
        .map(MultiDist::key)
        .collect()
}

/// Closes `n ⇒_a r` and `s ⇒_b r` with one lifted step on each side.
fn close(
    n: &MultiDist,
    class_n: RedexClass,
    s: &MultiDist,
    class_s: RedexClass,
    calculus: Calculus,
) -> Option<MultiDist> {
    let from_s = one_step_keys(s, calculus, class_s);
    one_lifted_step(n, calculus, class_n)
        .into_iter()
        .find(|r| from_s.contains(&r.key()))
}

/// The ⊕ steps out of `[1 term]` close pairwise in one lifted ⊕ step.
pub fn check_diamond_oplus(term: &Term, calculus: Calculus) -> CheckReport {
    let report = CheckReport::new("diamond", calculus, term);
    let rs: Vec<Redex> = redex::redexes(term, calculus)
        .into_iter()
        .filter(|r| RedexClass::Oplus.admits(r))
        .collect();
    let mut witness = Vec::new();
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            let n = step1(term, &rs[i], calculus);
            let s = step1(term, &rs[j], calculus);
            match close(&n, RedexClass::Oplus, &s, RedexClass::Oplus, calculus) {
                Some(r) => witness.push(r),
                None => {
                    return report
                        .fail(format!("{n} and {s} do not close in one ⊕ step"))
                        .with_witness([&n, &s]);
                }
            }
        }
    }
    report.with_witness(&witness)
}

/// For each β step to `n` and ⊕ step to `s` out of `[1 term]`, some `r`
/// has `n ⇒⊕ r` and `s ⇒β r` in one lifted step each.
pub fn check_commute_pointwise(term: &Term, calculus: Calculus) -> CheckReport {
    let report = CheckReport::new("commute", calculus, term);
    let rs = redex::redexes(term, calculus);
    let mut witness = Vec::new();
    for rb in rs.iter().filter(|r| r.kind.is_beta()) {
        for ro in rs.iter().filter(|r| RedexClass::Oplus.admits(r)) {
            let n = step1(term, rb, calculus);
            let s = step1(term, ro, calculus);
            match close(&n, RedexClass::Oplus, &s, RedexClass::Beta, calculus) {
                Some(r) => witness.push(r),
                None => {
                    return report
                        .fail(format!("{n} (β) and {s} (⊕) do not commute in one step"))
                        .with_witness([&n, &s]);
                }
            }
        }
    }
    report.with_witness(&witness)
}
