use std::collections::{HashMap, VecDeque};

use crate::asymptotics::{Strategy, StrategyKind, Trace};
use crate::error::{Error, Result};
use crate::multidist::{Decision, LiftChoice, MultiDist, Rational};
use crate::prelude::Prelude;
use crate::redex::{self, redex_at, RedexClass};
use crate::syntax::{parse_with, Calculus, Canon, ParseOptions, Position, Term};

use super::graph::{ReductionGraph, DEFAULT_BUDGET};
use super::report::CheckReport;

/// `𝔪 ⇒ˢ* 𝔯 ⇒ᵈ* 𝔫`.
#[derive(Clone, Debug, PartialEq)]
pub struct StdWitness {
    /// Surface steps from the start to `𝔯`, both ends included.
    pub surface_path: Vec<MultiDist>,
    /// For each entry `p·R` of `𝔯`, the scaled part `p·𝔇` of the target
    /// that `[1 R]` reaches by deep steps.
    pub deep_parts: Vec<MultiDist>,
}

impl StdWitness {
    pub fn r(&self) -> &MultiDist {
        self.surface_path.last().expect("nonempty path")
    }

    /// No deep step is needed.
    pub fn deep_is_empty(&self) -> bool {
        self.r()
            .entries()
            .iter()
            .zip(&self.deep_parts)
            .all(|((_, t), d)| d.len() == 1 && &d.entries()[0].1 == t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StdVerdict {
    Witness(StdWitness),
    /// Every search space was exhausted without a witness.
    NotFound,
    Budget,
}

/// Deep-only reachability from single terms, memoized.
struct DeepReach {
    calculus: Calculus,
    budget: usize,
    cache: HashMap<Canon, (Vec<MultiDist>, bool)>,
    hit_budget: bool,
}

impl DeepReach {
    fn get(&mut self, t: &Term) -> &[MultiDist] {
        let k = t.canonical();
        if !self.cache.contains_key(&k) {
            let mut g = ReductionGraph::new(
                &MultiDist::unit(t.clone()),
                self.calculus,
                RedexClass::Deep,
                self.budget,
            );
            g.explore();
            let done = g.exhausted();
            self.hit_budget |= !done;
            self.cache
                .insert(k.clone(), (g.states().cloned().collect(), done));
        }
        &self.cache[&k].0
    }
}

type Bag = HashMap<Canon, Vec<Rational>>;

fn bag(m: &MultiDist) -> Bag {
    let mut b: Bag = HashMap::new();
    for (p, t) in m.entries() {
        b.entry(t.canonical()).or_default().push(p.clone());
    }
    b
}

fn take(b: &mut Bag, part: &MultiDist, scale: &Rational) -> Option<Vec<(Canon, Rational)>> {
    let mut taken = Vec::new();
    for (q, t) in part.entries() {
        let k = t.canonical();
        let want = scale * q;
        let slot = b
            .get_mut(&k)
            .and_then(|v| v.iter().position(|p| *p == want).map(|i| (v, i)));
        match slot {
            Some((v, i)) => {
                v.swap_remove(i);
                taken.push((k, want));
            }
            None => {
                give_back(b, taken);
                return None;
            }
        }
    }
    Some(taken)
}

fn give_back(b: &mut Bag, taken: Vec<(Canon, Rational)>) {
    for (k, p) in taken {
        b.entry(k).or_default().push(p);
    }
}

/// Splits `n` into one deep reduct per entry of `r`.
fn decompose(r: &MultiDist, n: &MultiDist, deep: &mut DeepReach) -> Option<Vec<MultiDist>> {
    if r.mass() != n.mass() {
        return None;
    }
    let mut remaining = bag(n);
    let mut parts = Vec::new();
    if split(r, 0, &mut remaining, deep, &mut parts) {
        Some(parts)
    } else {
        None
    }
}

fn split(
    r: &MultiDist,
    i: usize,
    remaining: &mut Bag,
    deep: &mut DeepReach,
    parts: &mut Vec<MultiDist>,
) -> bool {
    if i == r.len() {
        return remaining.values().all(Vec::is_empty);
    }
    let (p, t) = r.entries()[i].clone();
    let options = deep.get(&t).to_vec();
    for d in options {
        if let Some(taken) = take(remaining, &d, &p) {
            parts.push(crate::multidist::md_scale(&p, &d));
            if split(r, i + 1, remaining, deep, parts) {
                return true;
            }
            parts.pop();
            give_back(remaining, taken);
        }
    }
    false
}

/// Searches for `𝔯` with `𝔪 ⇒ˢ* 𝔯 ⇒ᵈ* 𝔫`, where `𝔪` and `𝔫` are the
/// first and last states of `trace`. Each search space is capped at
/// `budget` nodes.
pub fn check_standardization_witness(trace: &Trace, budget: usize) -> StdVerdict {
    standardization_witness(trace.first(), trace.last(), trace.calculus, budget)
}

pub fn standardization_witness(
    m: &MultiDist,
    n: &MultiDist,
    calculus: Calculus,
    budget: usize,
) -> StdVerdict {
    let mut deep = DeepReach {
        calculus,
        budget,
        cache: HashMap::new(),
        hit_budget: false,
    };
    let mut surface = ReductionGraph::new(m, calculus, RedexClass::Surface, budget);
    let found = surface.explore_until(|r| decompose(r, n, &mut deep).is_some());
    match found {
        Some(r) => {
            let parts = decompose(&r, n, &mut deep).expect("found above");
            StdVerdict::Witness(StdWitness {
                surface_path: surface.path_to(&r).expect("discovered"),
                deep_parts: parts,
            })
        }
        None if surface.exhausted() && !deep.hit_budget => StdVerdict::NotFound,
        None => StdVerdict::Budget,
    }
}

/// Up to `len` steps from `[1 t]` under the seeded random strategy.
pub fn random_trace(t: &Term, calculus: Calculus, seed: u64, len: usize) -> Trace {
    let s =
        Strategy::new(StrategyKind::Random(seed), calculus).expect("random fits every calculus");
    let mut runner = s.runner();
    let mut trace = Trace::new(calculus, s.name(), MultiDist::unit(t.clone()));
    for _ in 0..len {
        let choice = runner.choose(trace.last());
        if choice.is_identity() {
            break;
        }
        trace.extend(choice).expect("strategy picks valid redexes");
    }
    trace
}

/// Standardization check on the seeded random trace from `[1 term]`.
pub fn standardization_report(
    term: &Term,
    calculus: Calculus,
    seed: u64,
    len: usize,
    budget: usize,
) -> CheckReport {
    let trace = random_trace(term, calculus, seed, len);
    let mut report = CheckReport::new("standardize", calculus, term);
    report.seed = Some(seed);
    match check_standardization_witness(&trace, budget) {
        StdVerdict::Witness(w) => report.with_witness([trace.last(), w.r()]),
        StdVerdict::NotFound => report
            .fail(format!(
                "no surface-then-deep path reaches {}",
                trace.last()
            ))
            .with_witness([trace.last()]),
        StdVerdict::Budget => report
            .budget(format!(
                "no witness for {} within {budget} nodes",
                trace.last()
            ))
            .with_witness([trace.last()]),
    }
}

/// The left-first regression for `calculus` as a report.
pub fn regression_report(calculus: Calculus) -> Result<CheckReport> {
    let f = check_left_standardization_fails(calculus)?;
    let ce = &f.counterexample;
    let report = CheckReport::new("regression", calculus, &ce.start).with_witness([ce.target()]);
    Ok(if f.confirmed() {
        report
    } else {
        report.fail(format!(
            "trace reaches target: {}; left-first graph exhausted: {}; target reachable: {}",
            f.trace_reaches_target, f.exhausted, f.target_reachable
        ))
    })
}

/// Every recorded step reduces only surface redexes.
pub fn is_surface_trace(trace: &Trace) -> bool {
    trace.choices.iter().all(|c| {
        c.0.iter().all(|d| match d {
            Decision::Keep => true,
            Decision::Reduce(r) => r.flags.surface,
        })
    })
}

/// Whether the term-level reduction graph of `t` (through every term in
/// the support of each step) is finite and acyclic. `None` past `budget`
/// terms.
pub fn strongly_normalizing(t: &Term, calculus: Calculus, budget: usize) -> Option<bool> {
    let mut index: HashMap<Canon, usize> = HashMap::from([(t.canonical(), 0)]);
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([(t.clone(), 0usize)]);
    while let Some((u, i)) = queue.pop_front() {
        for r in redex::redexes(&u, calculus) {
            let res = redex::step(&u, &r, calculus).expect("enumerated redex");
            for (_, v) in res.entries() {
                let k = v.canonical();
                let j = match index.get(&k) {
                    Some(&j) => j,
                    None => {
                        let j = edges.len();
                        if j >= budget {
                            return None;
                        }
                        index.insert(k, j);
                        edges.push(Vec::new());
                        queue.push_back((v.clone(), j));
                        j
                    }
                };
                edges[i].push(j);
            }
        }
    }
    let mut indeg = vec![0usize; edges.len()];
    for e in &edges {
        for &j in e {
            indeg[j] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..edges.len()).filter(|&i| indeg[i] == 0).collect();
    let mut removed = 0;
    while let Some(i) = ready.pop() {
        removed += 1;
        for &j in &edges[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    Some(removed == edges.len())
}

/// One of the two fixed counterexamples to left-first standardization.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub calculus: Calculus,
    pub start: Term,
    /// The displayed trace, ending at the target.
    pub trace: Trace,
    /// `[1 start]` after contracting its left (cbv) or head (cbn) redex.
    pub left_first: MultiDist,
}

impl Counterexample {
    pub fn target(&self) -> &MultiDist {
        self.trace.last()
    }
}

fn fixture_term(src: &str, calculus: Calculus) -> Term {
    let opts = ParseOptions {
        affine_check: false,
        ..ParseOptions::default()
    };
    Prelude::standard().expand(&parse_with(src, calculus, opts).expect("fixture parses"))
}

/// Builds a trace from per-entry redex positions (`None` keeps the entry).
pub fn trace_from_positions(
    start: &Term,
    calculus: Calculus,
    steps: &[Vec<Option<&str>>],
) -> Result<Trace> {
    let mut trace = Trace::new(calculus, "recorded", MultiDist::unit(start.clone()));
    for (i, step) in steps.iter().enumerate() {
        let state = trace.last().clone();
        if step.len() != state.len() {
            return Err(Error::ChoiceArity {
                expected: state.len(),
                got: step.len(),
            });
        }
        let mut ds = Vec::new();
        for (j, (pos, t)) in step.iter().zip(state.terms()).enumerate() {
            ds.push(match pos {
                None => Decision::Keep,
                Some(p) => {
                    let pos: Position = p.parse()?;
                    Decision::Reduce(redex_at(t, &pos, calculus).ok_or_else(|| {
                        Error::InvalidRedex {
                            entry: Some(j),
                            detail: format!("no redex at {pos} in step {i}"),
                        }
                    })?)
                }
            });
        }
        trace.extend(LiftChoice(ds))?;
    }
    Ok(trace)
}

/// `(I I)((λx. y ⊕ z) I)` in cbv, or `(λx. I (y ⊕ z)) I` in cbn.
pub fn counterexample(calculus: Calculus) -> Result<Counterexample> {
    let (src, steps, left): (&str, Vec<Vec<Option<&str>>>, &str) = match calculus {
        Calculus::Cbv => (
            "(I I) ((\\x. y (+) z) I)",
            vec![
                vec![Some("arg")],
                vec![Some("arg")],
                vec![Some("fun"), None],
            ],
            "fun",
        ),
        Calculus::Cbn => (
            "(\\x. I (y (+) z)) I",
            vec![
                vec![Some("fun.body")],
                vec![Some("fun.body")],
                vec![Some("root"), None],
            ],
            "root",
        ),
        Calculus::Bang => {
            return Err(Error::Unknown {
                what: "counterexample",
                name: calculus.to_string(),
            })
        }
    };
    let start = fixture_term(src, calculus);
    let trace = trace_from_positions(&start, calculus, &steps)?;
    let left_first = trace_from_positions(&start, calculus, &[vec![Some(left)]])?
        .last()
        .clone();
    Ok(Counterexample {
        calculus,
        start,
        trace,
        left_first,
    })
}

#[derive(Clone, Debug)]
pub struct LeftFailure {
    pub counterexample: Counterexample,
    /// The left or head redex contracted first is of that class.
    pub first_step_is_left: bool,
    /// The displayed trace replays and ends at the target.
    pub trace_reaches_target: bool,
    /// Size of the graph explored from the left-first state.
    pub explored: usize,
    /// The whole graph from the left-first state was explored.
    pub exhausted: bool,
    pub target_reachable: bool,
}

impl LeftFailure {
    /// The regression holds: the trace works, left-first provably does not.
    pub fn confirmed(&self) -> bool {
        self.first_step_is_left
            && self.trace_reaches_target
            && self.exhausted
            && !self.target_reachable
    }
}

/// Explores everything reachable after the left-first step and looks for
/// the target of the counterexample trace.
pub fn check_left_standardization_fails(calculus: Calculus) -> Result<LeftFailure> {
    let cx = counterexample(calculus)?;
    let class = if calculus == Calculus::Cbv {
        RedexClass::Left
    } else {
        RedexClass::Head
    };
    let first_step_is_left = redex::redexes(&cx.start, calculus)
        .into_iter()
        .find(|r| class.admits(r))
        .map(|r| redex::step(&cx.start, &r, calculus))
        .transpose()?
        .is_some_and(|m| m == cx.left_first);
    let trace_reaches_target = cx.trace.replay().is_ok();
    let mut g = ReductionGraph::new(&cx.left_first, calculus, RedexClass::Any, DEFAULT_BUDGET);
    g.explore();
    let target_reachable = g.contains(cx.target());
    Ok(LeftFailure {
        first_step_is_left,
        trace_reaches_target,
        explored: g.len(),
        exhausted: g.exhausted(),
        target_reachable,
        counterexample: cx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multidist::ratio;

    #[test]
    fn counterexamples_are_confirmed() {
        for c in [Calculus::Cbv, Calculus::Cbn] {
            let f = check_left_standardization_fails(c).unwrap();
            assert!(f.confirmed(), "{c}: {f:?}");
            assert!(is_surface_trace(&f.counterexample.trace));
        }
    }

    #[test]
    fn counterexample_targets() {
        let c = Calculus::Cbv;
        let cx = counterexample(c).unwrap();
        let target = MultiDist::new(vec![
            (ratio(1, 2), fixture_term("I y", c)),
            (ratio(1, 2), fixture_term("(I I) z", c)),
        ])
        .unwrap();
        assert_eq!(cx.target(), &target);
        assert_eq!(
            cx.left_first,
            MultiDist::unit(fixture_term("I ((\\x. y (+) z) I)", c))
        );

        let n = Calculus::Cbn;
        let cx = counterexample(n).unwrap();
        let target = MultiDist::new(vec![
            (ratio(1, 2), fixture_term("y", n)),
            (ratio(1, 2), fixture_term("(\\x. z) I", n)),
        ])
        .unwrap();
        assert_eq!(cx.target(), &target);
        assert_eq!(
            cx.left_first,
            MultiDist::unit(fixture_term("I (y (+) z)", n))
        );
    }

    #[test]
    fn witnesses_for_counterexample_traces() {
        for c in [Calculus::Cbv, Calculus::Cbn] {
            let cx = counterexample(c).unwrap();
            match check_standardization_witness(&cx.trace, 2000) {
                StdVerdict::Witness(w) => {
                    assert_eq!(w.r(), cx.target());
                    assert!(w.deep_is_empty());
                }
                v => panic!("{c}: {v:?}"),
            }
        }
    }

    #[test]
    fn deep_suffix_needed() {
        let c = Calculus::Cbv;
        // deep step under λ, then nothing on the surface
        let m = MultiDist::unit(fixture_term("(\\a. I a) (x (+) y)", c));
        let n = MultiDist::new(vec![
            (ratio(1, 2), fixture_term("(\\a. a) x", c)),
            (ratio(1, 2), fixture_term("(\\a. a) y", c)),
        ])
        .unwrap();
        match standardization_witness(&m, &n, c, 1000) {
            StdVerdict::Witness(w) => {
                assert!(!w.deep_is_empty());
                assert_eq!(w.r().len(), 2);
            }
            v => panic!("{v:?}"),
        }
        let unreachable = MultiDist::unit(fixture_term("x", c));
        assert_eq!(
            standardization_witness(&m, &unreachable, c, 1000),
            StdVerdict::NotFound
        );
    }

    #[test]
    fn strong_normalization() {
        let c = Calculus::Cbv;
        assert_eq!(
            strongly_normalizing(&fixture_term("I (x (+) y)", c), c, 100),
            Some(true)
        );
        assert_eq!(
            strongly_normalizing(&fixture_term("D D", c), c, 100),
            Some(false)
        );
        let pp = fixture_term("(\\x. x x (+) T) (\\x. x x (+) T)", c);
        assert_eq!(strongly_normalizing(&pp, c, 100), None);
    }
}
