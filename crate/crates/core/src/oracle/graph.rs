use std::collections::{HashMap, VecDeque};

use crate::multidist::{lift_step, single_entry_step, Decision, LiftChoice, MdKey, MultiDist};
use crate::redex::{self, RedexClass};
use crate::syntax::Calculus;

/// Default node budget for reachability searches.
pub const DEFAULT_BUDGET: usize = 20_000;

/// Steps that reduce one entry with a redex of `class`. Their reflexive
/// transitive closure is the lifted relation restricted to `class`.
pub fn successors(m: &MultiDist, calculus: Calculus, class: RedexClass) -> Vec<MultiDist> {
    let mut out = Vec::new();
    for (i, t) in m.terms().enumerate() {
        for r in redex::redexes(t, calculus) {
            if class.admits(&r) {
                out.push(single_entry_step(m, i, &r, calculus).expect("enumerated redex"));
            }
        }
    }
    out
}

/// Every multidistribution reachable from `m` by ONE lifted step whose
/// reduced entries use redexes of `class` (identity included).
pub fn one_lifted_step(m: &MultiDist, calculus: Calculus, class: RedexClass) -> Vec<MultiDist> {
    let options: Vec<Vec<Decision>> = m
        .terms()
        .map(|t| {
            let mut v = vec![Decision::Keep];
            v.extend(
                redex::redexes(t, calculus)
                    .into_iter()
                    .filter(|r| class.admits(r))
                    .map(Decision::Reduce),
            );
            v
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; options.len()];
    loop {
        let choice = LiftChoice(
            idx.iter()
                .zip(&options)
                .map(|(&i, o)| o[i].clone())
                .collect(),
        );
        out.push(lift_step(m, &choice, calculus).expect("enumerated redexes"));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Explored part of the reduction graph from one multidistribution.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub calculus: Calculus,
    pub class: RedexClass,
    nodes: HashMap<MdKey, (Option<MdKey>, MultiDist)>,
    order: Vec<MdKey>,
    frontier: VecDeque<MdKey>,
    pub budget: usize,
}

impl ReductionGraph {
    pub fn new(start: &MultiDist, calculus: Calculus, class: RedexClass, budget: usize) -> Self {
        let k = start.key();
        ReductionGraph {
            calculus,
            class,
            nodes: HashMap::from([(k.clone(), (None, start.clone()))]),
            order: vec![k.clone()],
            frontier: VecDeque::from([k]),
            budget,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The whole graph has been explored.
    pub fn exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn contains(&self, m: &MultiDist) -> bool {
        self.nodes.contains_key(&m.key())
    }

    /// Nodes in discovery order.
    pub fn states(&self) -> impl Iterator<Item = &MultiDist> {
        self.order.iter().map(|k| &self.nodes[k].1)
    }

    /// Expands one frontier node. Returns the newly discovered nodes, or
    /// `None` when the frontier is empty or the budget is spent.
    pub fn expand_one(&mut self) -> Option<Vec<MultiDist>> {
        if self.nodes.len() >= self.budget {
            return None;
        }
        let k = self.frontier.pop_front()?;
        let m = self.nodes[&k].1.clone();
        let mut fresh = Vec::new();
        for n in successors(&m, self.calculus, self.class) {
            let nk = n.key();
            if !self.nodes.contains_key(&nk) {
                self.nodes.insert(nk.clone(), (Some(k.clone()), n.clone()));
                self.order.push(nk.clone());
                self.frontier.push_back(nk);
                fresh.push(n);
            }
        }
        Some(fresh)
    }

    /// Explores until exhausted or out of budget.
    pub fn explore(&mut self) {
        while self.expand_one().is_some() {}
    }

    /// Explores until `stop` holds for a node; returns that node.
    pub fn explore_until(&mut self, mut stop: impl FnMut(&MultiDist) -> bool) -> Option<MultiDist> {
        if let Some(m) = self.states().find(|m| stop(m)) {
            return Some(m.clone());
        }
        while let Some(fresh) = self.expand_one() {
            if let Some(m) = fresh.into_iter().find(|m| stop(m)) {
                return Some(m);
            }
        }
        None
    }

    /// The discovery path from the start to `m`, both ends included.
    pub fn path_to(&self, m: &MultiDist) -> Option<Vec<MultiDist>> {
        let mut k = m.key();
        let mut out = Vec::new();
        loop {
            let (parent, node) = self.nodes.get(&k)?;
            out.push(node.clone());
            match parent {
                Some(p) => k = p.clone(),
                None => break,
            }
        }
        out.reverse();
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinWitness {
    /// From the first input to the meeting point.
    pub left: Vec<MultiDist>,
    /// From the second input to the meeting point.
    pub right: Vec<MultiDist>,
}

impl JoinWitness {
    pub fn meet(&self) -> &MultiDist {
        self.left.last().expect("nonempty path")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum JoinVerdict {
    Joined(JoinWitness),
    /// Both reduction graphs were explored completely without meeting.
    Disjoint,
    /// The budget ran out first.
    Budget,
}

impl JoinVerdict {
    pub fn is_joined(&self) -> bool {
        matches!(self, JoinVerdict::Joined(_))
    }
}

/// Steps of leftmost redexes in every entry until no entry has a redex.
/// Returns the path, or `None` if `fuel` steps or `max_size` total size
/// are exceeded first.
pub fn normalize(
    m: &MultiDist,
    calculus: Calculus,
    fuel: usize,
    max_size: usize,
) -> Option<Vec<MultiDist>> {
    let mut path = vec![m.clone()];
    for _ in 0..=fuel {
        let cur = path.last().expect("nonempty");
        let choice = LiftChoice(
            cur.terms()
                .map(|t| match redex::redexes(t, calculus).into_iter().next() {
                    Some(r) => Decision::Reduce(r),
                    None => Decision::Keep,
                })
                .collect(),
        );
        if choice.is_identity() {
            return Some(path);
        }
        let next = lift_step(cur, &choice, calculus).expect("enumerated redexes");
        if next.total_size() > max_size {
            return None;
        }
        path.push(next);
    }
    None
}

const NORMALIZE_FUEL: usize = 200;
const NORMALIZE_SIZE: usize = 5_000;

/// Searches for a common reduct of `a` and `b`: first by normalizing both,
/// then by bidirectional breadth-first search visiting at most `budget`
/// nodes in total.
pub fn joinable(a: &MultiDist, b: &MultiDist, calculus: Calculus, budget: usize) -> JoinVerdict {
    if a.key() == b.key() {
        return JoinVerdict::Joined(JoinWitness {
            left: vec![a.clone()],
            right: vec![b.clone()],
        });
    }
    if let (Some(pa), Some(pb)) = (
        normalize(a, calculus, NORMALIZE_FUEL, NORMALIZE_SIZE),
        normalize(b, calculus, NORMALIZE_FUEL, NORMALIZE_SIZE),
    ) {
        if pa.last().map(MultiDist::key) == pb.last().map(MultiDist::key) {
            return JoinVerdict::Joined(JoinWitness {
                left: pa,
                right: pb,
            });
        }
    }
    let half = budget.div_ceil(2).max(1);
    let mut ga = ReductionGraph::new(a, calculus, RedexClass::Any, half);
    let mut gb = ReductionGraph::new(b, calculus, RedexClass::Any, half);
    let mut turn_a = true;
    loop {
        let (g, other) = if turn_a {
            (&mut ga, &gb)
        } else {
            (&mut gb, &ga)
        };
        match g.expand_one() {
            Some(fresh) => {
                if let Some(m) = fresh.into_iter().find(|m| other.contains(m)) {
                    return JoinVerdict::Joined(JoinWitness {
                        left: ga.path_to(&m).expect("discovered"),
                        right: gb.path_to(&m).expect("discovered"),
                    });
                }
            }
            None => {
                let other_stuck = if turn_a {
                    gb.exhausted() || gb.len() >= gb.budget
                } else {
                    ga.exhausted() || ga.len() >= ga.budget
                };
                if other_stuck {
                    break;
                }
            }
        }
        turn_a = !turn_a;
    }
    if ga.exhausted() && gb.exhausted() {
        JoinVerdict::Disjoint
    } else {
        JoinVerdict::Budget
    }
}
