use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multidist::{
    fmt_ratio, lift_step, parse_ratio, Decision, LiftChoice, MultiDist, Rational,
};
use crate::redex::{redex_at, Redex, RedexKind};
use crate::syntax::{Calculus, Position};

/// A recorded reduction sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub calculus: Calculus,
    pub strategy: String,
    pub states: Vec<MultiDist>,
    pub choices: Vec<LiftChoice>,
    /// Observed class masses per state as `(representative, mass)`, when
    /// the trace was produced by an evaluation.
    pub observed: Vec<Vec<(String, Rational)>>,
}

impl Trace {
    pub fn new(calculus: Calculus, strategy: impl Into<String>, start: MultiDist) -> Trace {
        Trace {
            calculus,
            strategy: strategy.into(),
            states: vec![start],
            choices: Vec::new(),
            observed: Vec::new(),
        }
    }

    pub fn first(&self) -> &MultiDist {
        &self.states[0]
    }

    pub fn last(&self) -> &MultiDist {
        self.states.last().expect("a trace has a first state")
    }

    /// Number of lifted steps.
    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// Performs a lifted step from the last state and records it.
    pub fn extend(&mut self, choice: LiftChoice) -> Result<&MultiDist> {
        let next = lift_step(self.last(), &choice, self.calculus)?;
        self.choices.push(choice);
        self.states.push(next);
        Ok(self.last())
    }

    /// Checks that every consecutive pair is related by its recorded choice.
    pub fn replay(&self) -> Result<()> {
        if self.states.len() != self.choices.len() + 1 {
            return Err(Error::Json(
                "trace has mismatched states and choices".into(),
            ));
        }
        for (i, c) in self.choices.iter().enumerate() {
            let next = lift_step(&self.states[i], c, self.calculus)?;
            if next != self.states[i + 1] {
                return Err(Error::InvalidRedex {
                    entry: None,
                    detail: format!("step {i} does not produce the recorded state"),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = TraceJson {
            calculus: self.calculus,
            strategy: self.strategy.clone(),
            states: self.states.iter().map(|m| m.to_json()).collect(),
            choices: self
                .choices
                .iter()
                .map(|c| c.0.iter().map(DecisionJson::from).collect())
                .collect(),
            observed: self
                .observed
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|(r, p)| ObservedJson {
                            repr: r.clone(),
                            mass: fmt_ratio(p),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("trace serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Trace> {
        let raw: TraceJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Json(e.to_string()))?;
        let calculus = raw.calculus;
        let states = raw
            .states
            .iter()
            .map(|s| MultiDist::from_json(s, calculus))
            .collect::<Result<Vec<_>>>()?;
        if states.is_empty() {
            return Err(Error::Json("trace has no states".into()));
        }
        let mut choices = Vec::new();
        for (i, c) in raw.choices.into_iter().enumerate() {
            let state = states
                .get(i)
                .ok_or_else(|| Error::Json("more choices than states".into()))?;
            let terms: Vec<_> = state.terms().collect();
            if terms.len() != c.len() {
                return Err(Error::ChoiceArity {
                    expected: terms.len(),
                    got: c.len(),
                });
            }
            let mut ds = Vec::new();
            for (j, d) in c.into_iter().enumerate() {
                ds.push(match d {
                    DecisionJson::Keep(_) => Decision::Keep,
                    DecisionJson::Reduce { position, kind } => {
                        let r = redex_at(terms[j], &position, calculus)
                            .filter(|r| r.kind == kind)
                            .ok_or_else(|| Error::InvalidRedex {
                                entry: Some(j),
                                detail: format!("no {kind} redex at {position} in step {i}"),
                            })?;
                        Decision::Reduce(r)
                    }
                });
            }
            choices.push(LiftChoice(ds));
        }
        let observed = raw
            .observed
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .map(|o| Ok((o.repr, parse_ratio(&o.mass)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trace {
            calculus,
            strategy: raw.strategy,
            states,
            choices,
            observed,
        })
    }

    /// Total observed mass per state, from the recorded observations.
    pub fn observed_totals(&self) -> Vec<Rational> {
        self.observed
            .iter()
            .map(|v| v.iter().fold(Rational::zero(), |a, (_, p)| a + p))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    calculus: Calculus,
    strategy: String,
    states: Vec<serde_json::Value>,
    choices: Vec<Vec<DecisionJson>>,
    #[serde(default)]
    observed: Vec<Vec<ObservedJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DecisionJson {
    Keep(KeepTag),
    Reduce { position: Position, kind: RedexKind },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KeepTag {
    Keep,
}

impl From<&Decision> for DecisionJson {
    fn from(d: &Decision) -> Self {
        match d {
            Decision::Keep => DecisionJson::Keep(KeepTag::Keep),
            Decision::Reduce(Redex { position, kind, .. }) => DecisionJson::Reduce {
                position: position.clone(),
                kind: *kind,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ObservedJson {
    repr: String,
    mass: String,
}
