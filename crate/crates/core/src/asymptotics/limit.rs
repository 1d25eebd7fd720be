use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::multidist::{fmt_ratio, pow2_inv, Distribution, MultiDist, Rational};
use crate::syntax::Term;

use super::observe::{beta_joinable, ClassKey, Classifier, ObsKind, ObservationSet};
use super::strategy::Strategy;
use super::trace::Trace;

pub const DEFAULT_MAX_STEPS: usize = 10_000;

pub fn default_epsilon() -> Rational {
    pow2_inv(20)
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub max_steps: usize,
    pub epsilon: Rational,
    /// Stop unconverged once the multidistribution has more entries.
    pub max_entries: Option<usize>,
    /// Stop unconverged once the summed entry sizes exceed this.
    pub max_total_size: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_steps: DEFAULT_MAX_STEPS,
            epsilon: default_epsilon(),
            max_entries: None,
            max_total_size: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMass {
    pub key: ClassKey,
    pub repr: String,
    /// Normal form or first member; `None` for whole-set classes.
    pub repr_term: Option<Term>,
    pub mass: Rational,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitResult {
    pub obs: ObservationSet,
    pub classes: Vec<ClassMass>,
    pub residual: Rational,
    pub steps: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl LimitResult {
    pub fn total(&self) -> Rational {
        self.classes
            .iter()
            .fold(Rational::zero(), |a, c| a + &c.mass)
    }

    pub fn distribution(&self) -> Distribution<ClassKey> {
        self.classes
            .iter()
            .map(|c| (c.key.clone(), c.mass.clone()))
            .collect()
    }

    /// Mass of the class containing `t` (zero if no class matches).
    pub fn mass_of(&self, t: &Term) -> Rational {
        let mut cl = Classifier::new(self.obs);
        let Some(id) = cl.classify(t) else {
            return Rational::zero();
        };
        let key = cl.key(id);
        if let Some(c) = self.classes.iter().find(|c| c.key == key) {
            return c.mass.clone();
        }
        let target = cl.repr_term(id).clone();
        self.classes
            .iter()
            .find(|c| {
                c.repr_term.as_ref().is_some_and(|r| {
                    beta_joinable(r, &target, self.obs.calculus, self.obs.join_fuel)
                })
            })
            .map(|c| c.mass.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "obs": self.obs.id(),
            "calculus": self.obs.calculus,
            "classes": self.classes.iter().map(|c| json!({
                "repr": c.repr,
                "mass": fmt_ratio(&c.mass),
                "resolved": c.resolved,
            })).collect::<Vec<_>>(),
            "residual": fmt_ratio(&self.residual),
            "steps": self.steps,
            "converged": self.converged,
            "warnings": self.warnings,
        })
    }
}

impl fmt::Display for LimitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "observation: {}", self.obs)?;
        for c in &self.classes {
            let mark = if c.resolved { "" } else { " (unresolved)" };
            writeln!(f, "  {} >= {}{}", c.repr, fmt_ratio(&c.mass), mark)?;
        }
        writeln!(f, "residual: {}", fmt_ratio(&self.residual))?;
        writeln!(f, "steps: {}", self.steps)?;
        write!(
            f,
            "{}",
            if self.converged {
                "converged"
            } else {
                "not converged"
            }
        )?;
        for w in &self.warnings {
            write!(f, "\nwarning: {w}")?;
        }
        Ok(())
    }
}

fn check_compatible(strategy: &Strategy, obs: &ObservationSet) -> Result<()> {
    if strategy.calculus != obs.calculus {
        return Err(Error::IncompatibleObservation {
            obs: obs.id().to_string(),
            calculus: strategy.calculus,
        });
    }
    Ok(())
}

pub fn evaluate_limit(
    m: &MultiDist,
    strategy: &Strategy,
    obs: &ObservationSet,
    max_steps: usize,
    epsilon: &Rational,
) -> Result<(LimitResult, Trace)> {
    let mut cl = Classifier::new(*obs);
    let opts = EvalOptions {
        max_steps,
        epsilon: epsilon.clone(),
        ..EvalOptions::default()
    };
    evaluate_with(m, strategy, &mut cl, &opts)
}

/// Like [`evaluate_limit`], reusing a classifier so that class identities
/// agree across several evaluations.
pub fn evaluate_with(
    m: &MultiDist,
    strategy: &Strategy,
    cl: &mut Classifier,
    opts: &EvalOptions,
) -> Result<(LimitResult, Trace)> {
    check_compatible(strategy, cl.obs())?;
    let calculus = strategy.calculus;
    for t in m.terms() {
        t.check_calculus(calculus)?;
    }
    let total = m.mass();
    let mut runner = strategy.runner();
    let mut trace = Trace::new(calculus, strategy.name(), m.clone());
    let mut per_step: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut warnings = Vec::new();
    let warnings_before = cl.warnings().len();
    let mut steps = 0;
    let converged = loop {
        let state = trace.last().clone();
        let ids = cl.observe_ids(&state);
        if let Some(prev) = per_step.last() {
            debug_assert!(
                monotone(cl, prev, &ids),
                "class mass decreased at step {steps}"
            );
        }
        let seen = ids.iter().fold(Rational::zero(), |a, (_, p)| a + p);
        per_step.push(ids);
        if &total - &seen <= opts.epsilon || runner.is_done(&state) {
            break true;
        }
        if steps >= opts.max_steps {
            break false;
        }
        if let Some(cap) = opts.max_entries.filter(|&c| state.len() > c) {
            warnings.push(format!("stopped: more than {cap} entries"));
            break false;
        }
        if let Some(cap) = opts.max_total_size.filter(|&c| state.total_size() > c) {
            warnings.push(format!("stopped: total size above {cap}"));
            break false;
        }
        let choice = runner.choose(&state);
        trace.extend(choice)?;
        steps += 1;
    };
    trace.observed = per_step
        .iter()
        .map(|ids| {
            let mut v: Vec<(String, Rational)> = merge_ids(cl, ids)
                .into_iter()
                .map(|(i, p)| (cl.repr(i), p))
                .collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v
        })
        .collect();
    let last = merge_ids(cl, per_step.last().expect("at least one state"));
    let mut classes: Vec<ClassMass> = last
        .into_iter()
        .map(|(id, mass)| {
            let key = cl.key(id);
            ClassMass {
                repr_term: (key != ClassKey::All).then(|| cl.repr_term(id).clone()),
                key,
                repr: cl.repr(id),
                mass,
                resolved: cl.resolved(id),
            }
        })
        .collect();
    classes.sort_by(|a, b| a.key.cmp(&b.key));
    let residual = total - classes.iter().fold(Rational::zero(), |a, c| a + &c.mass);
    warnings.extend(cl.warnings()[warnings_before..].iter().cloned());
    Ok((
        LimitResult {
            obs: *cl.obs(),
            classes,
            residual,
            steps,
            converged,
            warnings,
        },
        trace,
    ))
}

/// Re-roots class ids after merges and sums their masses.
fn merge_ids(cl: &Classifier, ids: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut out: Vec<(usize, Rational)> = Vec::new();
    for (i, p) in ids {
        let r = cl.find(*i);
        match out.iter_mut().find(|(j, _)| *j == r) {
            Some((_, q)) => *q += p,
            None => out.push((r, p.clone())),
        }
    }
    out
}

fn monotone(cl: &Classifier, prev: &[(usize, Rational)], next: &[(usize, Rational)]) -> bool {
    let next = merge_ids(cl, next);
    merge_ids(cl, prev).iter().all(|(i, p)| {
        next.iter()
            .find(|(j, _)| j == i)
            .is_some_and(|(_, q)| q >= p)
    })
}

/// Value mass reached by `strategy` within `max_steps` (cbv only).
pub fn valuable_mass(m: &MultiDist, strategy: &Strategy, max_steps: usize) -> Result<Rational> {
    let obs = ObservationSet::new(ObsKind::Values, strategy.calculus)?;
    let (res, _) = evaluate_limit(m, strategy, &obs, max_steps, &Rational::zero())?;
    Ok(res.total())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    EqualWithin,
    ABelowB,
    BBelowA,
    Incomparable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::EqualWithin => "equal-within",
            Verdict::ABelowB => "a-below-b",
            Verdict::BBelowA => "b-below-a",
            Verdict::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDelta {
    pub repr: String,
    pub a: Rational,
    pub b: Rational,
    /// `a - b`.
    pub delta: Rational,
    /// The difference exceeds the sum of both residuals.
    pub genuine: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub verdict: Verdict,
    pub deltas: Vec<ClassDelta>,
}

/// Pointwise comparison of two limit approximations.
///
/// Equal masses everywhere give `equal-within`. Otherwise one side is below
/// the other if every delta has the same sign; mixed signs are
/// `equal-within` when no delta is genuine and `incomparable` otherwise.
pub fn compare_limits(a: &LimitResult, b: &LimitResult) -> Result<Comparison> {
    if a.obs.kind != b.obs.kind || a.obs.calculus != b.obs.calculus {
        return Err(Error::ObservationMismatch(
            format!("{} ({})", a.obs.id(), a.obs.calculus),
            format!("{} ({})", b.obs.id(), b.obs.calculus),
        ));
    }
    let tol = &a.residual + &b.residual;
    let mut used = vec![false; b.classes.len()];
    let mut deltas = Vec::new();
    for ca in &a.classes {
        let j = b
            .classes
            .iter()
            .position(|cb| cb.key == ca.key)
            .or_else(|| {
                b.classes.iter().enumerate().position(|(j, cb)| {
                    !used[j]
                        && match (&ca.repr_term, &cb.repr_term) {
                            (Some(x), Some(y)) => {
                                beta_joinable(x, y, a.obs.calculus, a.obs.join_fuel)
                            }
                            _ => false,
                        }
                })
            });
        let mb = match j {
            Some(j) => {
                used[j] = true;
                b.classes[j].mass.clone()
            }
            None => Rational::zero(),
        };
        deltas.push(delta(ca.repr.clone(), ca.mass.clone(), mb, &tol));
    }
    for (j, cb) in b.classes.iter().enumerate() {
        if !used[j] {
            deltas.push(delta(
                cb.repr.clone(),
                Rational::zero(),
                cb.mass.clone(),
                &tol,
            ));
        }
    }
    let neg = deltas.iter().any(|d| d.delta.is_negative());
    let pos = deltas.iter().any(|d| d.delta.is_positive());
    let verdict = match (neg, pos) {
        (false, false) => Verdict::EqualWithin,
        (true, false) => Verdict::ABelowB,
        (false, true) => Verdict::BBelowA,
        (true, true) if deltas.iter().any(|d| d.genuine) => Verdict::Incomparable,
        (true, true) => Verdict::EqualWithin,
    };
    Ok(Comparison { verdict, deltas })
}

fn delta(repr: String, a: Rational, b: Rational, tol: &Rational) -> ClassDelta {
    let delta = &a - &b;
    let genuine = &delta.abs() > tol;
    ClassDelta {
        repr,
        a,
        b,
        delta,
        genuine,
    }
}

/// Re-runs the classifier over every state of `trace`.
pub fn observe_trace(trace: &Trace, cl: &mut Classifier) -> Vec<Distribution<ClassKey>> {
    let raw: Vec<_> = trace.states.iter().map(|m| cl.observe_ids(m)).collect();
    raw.iter().map(|ids| cl.finalize(ids)).collect()
}
