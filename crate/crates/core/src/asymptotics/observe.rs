use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multidist::{Distribution, MultiDist, Rational};
use crate::redex::{self, RedexClass};
use crate::syntax::{Calculus, Canon, Term};
use crate::{bang, cbn};

/// Default node budget for β-joinability when classing up to β.
pub const DEFAULT_JOIN_FUEL: usize = 200;

/// Largest term considered by bounded β-normalization.
const NORMALIZE_SIZE_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObsKind {
    Values,
    ValuesUptoBeta,
    NormalForms,
    NormalFormSingletons,
    SurfaceNfBang,
    SurfaceNfBangUptoBeta,
    Hnf,
    HnfUptoBeta,
}

impl ObsKind {
    pub fn id(self) -> &'static str {
        match self {
            ObsKind::Values => "values",
            ObsKind::ValuesUptoBeta => "values-upto-beta",
            ObsKind::NormalForms => "normal-forms",
            ObsKind::NormalFormSingletons => "normal-form-singletons",
            ObsKind::SurfaceNfBang => "surface-nf-bang",
            ObsKind::SurfaceNfBangUptoBeta => "surface-nf-bang-upto-beta",
            ObsKind::Hnf => "hnf",
            ObsKind::HnfUptoBeta => "hnf-upto-beta",
        }
    }

    fn calculus(self) -> Option<Calculus> {
        match self {
            ObsKind::Values | ObsKind::ValuesUptoBeta => Some(Calculus::Cbv),
            ObsKind::SurfaceNfBang | ObsKind::SurfaceNfBangUptoBeta => Some(Calculus::Bang),
            ObsKind::Hnf | ObsKind::HnfUptoBeta => Some(Calculus::Cbn),
            ObsKind::NormalForms | ObsKind::NormalFormSingletons => None,
        }
    }

    pub fn upto_beta(self) -> bool {
        matches!(
            self,
            ObsKind::ValuesUptoBeta | ObsKind::SurfaceNfBangUptoBeta | ObsKind::HnfUptoBeta
        )
    }
}

/// A family of disjoint observation classes in one calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ObservationSet {
    pub kind: ObsKind,
    pub calculus: Calculus,
    pub join_fuel: usize,
}

impl ObservationSet {
    pub fn new(kind: ObsKind, calculus: Calculus) -> Result<ObservationSet> {
        if kind.calculus().is_some_and(|c| c != calculus) {
            return Err(Error::IncompatibleObservation {
                obs: kind.id().to_string(),
                calculus,
            });
        }
        Ok(ObservationSet {
            kind,
            calculus,
            join_fuel: DEFAULT_JOIN_FUEL,
        })
    }

    pub fn with_join_fuel(self, join_fuel: usize) -> ObservationSet {
        ObservationSet { join_fuel, ..self }
    }

    pub fn parse(id: &str, calculus: Calculus) -> Result<ObservationSet> {
        let kind = match id {
            "values" => ObsKind::Values,
            "values-upto-beta" => ObsKind::ValuesUptoBeta,
            "normal-forms" => ObsKind::NormalForms,
            "normal-form-singletons" => ObsKind::NormalFormSingletons,
            "cbn-nf-singletons" => {
                return ObservationSet::new(ObsKind::NormalFormSingletons, Calculus::Cbn).and_then(
                    |o| {
                        if calculus == Calculus::Cbn {
                            Ok(o)
                        } else {
                            Err(Error::IncompatibleObservation {
                                obs: id.to_string(),
                                calculus,
                            })
                        }
                    },
                )
            }
            "surface-nf-bang" => ObsKind::SurfaceNfBang,
            "surface-nf-bang-upto-beta" => ObsKind::SurfaceNfBangUptoBeta,
            "hnf" => ObsKind::Hnf,
            "hnf-upto-beta" => ObsKind::HnfUptoBeta,
            _ => {
                return Err(Error::Unknown {
                    what: "observation set",
                    name: id.to_string(),
                })
            }
        };
        ObservationSet::new(kind, calculus)
    }

    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    pub fn contains(&self, t: &Term) -> bool {
        match self.kind {
            ObsKind::Values | ObsKind::ValuesUptoBeta => t.is_value(),
            ObsKind::NormalForms | ObsKind::NormalFormSingletons => {
                redex::redexes(t, self.calculus).is_empty()
            }
            ObsKind::SurfaceNfBang | ObsKind::SurfaceNfBangUptoBeta => bang::is_surface_nf(t),
            ObsKind::Hnf | ObsKind::HnfUptoBeta => cbn::is_head_nf(t),
        }
    }
}

impl fmt::Display for ObservationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Stable identity of an observation class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassKey {
    /// The whole set, for membership-only observations.
    All,
    /// Singleton class, or class of terms with this β-normal form.
    Nf(Canon),
    /// Class without a known normal form, named by its first member.
    Rep(Canon),
}

#[derive(Clone, Debug)]
struct ClassInfo {
    repr: Term,
    nf: Option<Term>,
    resolved: bool,
}

/// Assigns terms to observation classes. Classes found to be β-equal are
/// merged; merges never split.
#[derive(Clone, Debug)]
pub struct Classifier {
    obs: ObservationSet,
    classes: Vec<ClassInfo>,
    parent: Vec<usize>,
    cache: HashMap<Canon, Option<usize>>,
    by_nf: HashMap<Canon, usize>,
    warnings: Vec<String>,
}

impl Classifier {
    pub fn new(obs: ObservationSet) -> Classifier {
        Classifier {
            obs,
            classes: Vec::new(),
            parent: Vec::new(),
            cache: HashMap::new(),
            by_nf: HashMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn obs(&self) -> &ObservationSet {
        &self.obs
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn find(&self, mut id: usize) -> usize {
        while self.parent[id] != id {
            id = self.parent[id];
        }
        id
    }

    pub fn key(&self, id: usize) -> ClassKey {
        let c = &self.classes[self.find(id)];
        if !self.obs.kind.upto_beta() && self.obs.kind != ObsKind::NormalFormSingletons {
            return ClassKey::All;
        }
        match &c.nf {
            Some(nf) => ClassKey::Nf(nf.canonical()),
            None => ClassKey::Rep(c.repr.canonical()),
        }
    }

    /// Printable representative: the set name for membership-only
    /// observations, else the normal form or first member.
    pub fn repr(&self, id: usize) -> String {
        let c = &self.classes[self.find(id)];
        match self.key(id) {
            ClassKey::All => self.obs.id().to_string(),
            _ => c.nf.as_ref().unwrap_or(&c.repr).to_string(),
        }
    }

    pub fn repr_term(&self, id: usize) -> &Term {
        let c = &self.classes[self.find(id)];
        c.nf.as_ref().unwrap_or(&c.repr)
    }

    pub fn resolved(&self, id: usize) -> bool {
        self.classes[self.find(id)].resolved
    }

    fn new_class(&mut self, repr: Term, nf: Option<Term>) -> usize {
        let id = self.classes.len();
        self.classes.push(ClassInfo {
            repr,
            nf,
            resolved: true,
        });
        self.parent.push(id);
        id
    }

    fn roots(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.parent[i] == i)
            .collect()
    }

    /// The class of `t`, or `None` when `t` is outside the observation set.
    pub fn classify(&mut self, t: &Term) -> Option<usize> {
        let key = t.canonical();
        if let Some(hit) = self.cache.get(&key) {
            return hit.map(|id| self.find(id));
        }
        let id = if !self.obs.contains(t) {
            None
        } else if !self.obs.kind.upto_beta() {
            Some(self.classify_syntactic(t, &key))
        } else {
            Some(self.classify_upto_beta(t))
        };
        self.cache.insert(key, id);
        id.map(|i| self.find(i))
    }

    fn classify_syntactic(&mut self, t: &Term, key: &Canon) -> usize {
        if self.obs.kind != ObsKind::NormalFormSingletons {
            return match self.roots().first() {
                Some(&r) => r,
                None => self.new_class(t.clone(), None),
            };
        }
        if let Some(&id) = self.by_nf.get(key) {
            return id;
        }
        let id = self.new_class(t.clone(), Some(t.clone()));
        self.by_nf.insert(key.clone(), id);
        id
    }

    fn classify_upto_beta(&mut self, t: &Term) -> usize {
        let calculus = self.obs.calculus;
        let fuel = self.obs.join_fuel;
        if let Some(nf) = beta_normalize(t, calculus, fuel) {
            let k = nf.canonical();
            if let Some(&id) = self.by_nf.get(&k) {
                return self.find(id);
            }
            let id = self.new_class(t.clone(), Some(nf.clone()));
            self.by_nf.insert(k, id);
            for r in self.roots() {
                if r == id || self.classes[r].nf.is_some() {
                    continue;
                }
                if beta_joinable(&self.classes[r].repr, &nf, calculus, fuel) {
                    self.parent[r] = id;
                } else {
                    self.mark_unresolved(r);
                }
            }
            return id;
        }
        let roots = self.roots();
        for &r in &roots {
            if beta_joinable(t, self.repr_term(r), calculus, fuel) {
                return r;
            }
        }
        let id = self.new_class(t.clone(), None);
        if !roots.is_empty() {
            self.mark_unresolved(id);
            for r in roots {
                if self.classes[r].nf.is_none() {
                    self.mark_unresolved(r);
                }
            }
        }
        id
    }

    fn mark_unresolved(&mut self, id: usize) {
        if self.classes[id].resolved {
            self.classes[id].resolved = false;
            self.warnings.push(format!(
                "class of `{}` not separated from the other classes within join fuel {}",
                self.classes[id].repr, self.obs.join_fuel
            ));
        }
    }

    /// Mass of each class (by current root) in `m`.
    pub fn observe_ids(&mut self, m: &MultiDist) -> Vec<(usize, Rational)> {
        let mut acc: Vec<(usize, Rational)> = Vec::new();
        for (p, t) in m.entries() {
            if let Some(id) = self.classify(t) {
                match acc.iter_mut().find(|(i, _)| *i == id) {
                    Some((_, q)) => *q += p,
                    None => acc.push((id, p.clone())),
                }
            }
        }
        acc
    }

    pub fn observe(&mut self, m: &MultiDist) -> Distribution<ClassKey> {
        let ids = self.observe_ids(m);
        self.finalize(&ids)
    }

    /// Re-keys class masses through the current merges.
    pub fn finalize(&self, ids: &[(usize, Rational)]) -> Distribution<ClassKey> {
        ids.iter().map(|(i, p)| (self.key(*i), p.clone())).collect()
    }

    /// Total observed mass of `m`.
    pub fn observed_mass(&mut self, m: &MultiDist) -> Rational {
        self.observe_ids(m)
            .into_iter()
            .fold(Rational::zero(), |a, (_, p)| a + p)
    }
}

/// Bounded normalization with β steps only, leftmost-outermost.
pub fn beta_normalize(t: &Term, calculus: Calculus, fuel: usize) -> Option<Term> {
    let mut cur = t.clone();
    for _ in 0..=fuel {
        let Some(r) = redex::redexes(&cur, calculus)
            .into_iter()
            .find(|r| RedexClass::Beta.admits(r))
        else {
            return Some(cur);
        };
        cur = redex::beta_step(&cur, &r);
        if cur.size() > NORMALIZE_SIZE_CAP {
            return None;
        }
    }
    None
}

/// Bidirectional search for a common β-reduct, visiting at most `budget`
/// terms in total.
pub fn beta_joinable(a: &Term, b: &Term, calculus: Calculus, budget: usize) -> bool {
    let (ka, kb) = (a.canonical(), b.canonical());
    if ka == kb {
        return true;
    }
    let mut seen = [HashSet::from([ka]), HashSet::from([kb])];
    let mut frontier = [VecDeque::from([a.clone()]), VecDeque::from([b.clone()])];
    let mut visited = 2;
    let mut side = 1;
    while visited < budget && !(frontier[0].is_empty() && frontier[1].is_empty()) {
        side = if frontier[1 - side].is_empty() {
            side
        } else {
            1 - side
        };
        let Some(t) = frontier[side].pop_front() else {
            continue;
        };
        for r in redex::redexes(&t, calculus) {
            if !r.kind.is_beta() {
                continue;
            }
            let n = redex::beta_step(&t, &r);
            if n.size() > NORMALIZE_SIZE_CAP {
                continue;
            }
            let k = n.canonical();
            if seen[1 - side].contains(&k) {
                return true;
            }
            if seen[side].insert(k) {
                visited += 1;
                frontier[side].push_back(n);
                if visited >= budget {
                    return false;
                }
            }
        }
    }
    false
}
