use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multidist::MultiDist;
use crate::syntax::{Calculus, Term};
use crate::translate::{check_simulation, Translation};

use super::graph::DEFAULT_BUDGET;
use super::local::{check_commute_pointwise, check_diamond_oplus, check_local_confluence};
use super::parallel::{check_parallel_oracle, check_postponement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckVerdict {
    Pass,
    Fail,
    Budget,
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckVerdict::Pass => "pass",
            CheckVerdict::Fail => "fail",
            CheckVerdict::Budget => "budget",
        })
    }
}

/// Outcome of one check on one input; serialized as one JSON line.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub calculus: Calculus,
    pub term: String,
    pub verdict: CheckVerdict,
    pub witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckReport {
    pub fn new(check: &str, calculus: Calculus, term: &Term) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            calculus,
            term: term.to_string(),
            verdict: CheckVerdict::Pass,
            witness: Vec::new(),
            detail: None,
            seed: None,
        }
    }

    pub fn fail(mut self, detail: impl Into<String>) -> CheckReport {
        self.verdict = CheckVerdict::Fail;
        self.detail = Some(detail.into());
        self
    }

    pub fn budget(mut self, detail: impl Into<String>) -> CheckReport {
        self.verdict = CheckVerdict::Budget;
        self.detail = Some(detail.into());
        self
    }

    pub fn with_witness<'a>(mut self, ms: impl IntoIterator<Item = &'a MultiDist>) -> CheckReport {
        self.witness = ms.into_iter().map(|m| m.to_string()).collect();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == CheckVerdict::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Term-level checks runnable over an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Confluence,
    Diamond,
    Commute,
    Parallel,
    Postponement,
    Simulation(Translation),
}

impl Check {
    pub fn name(self) -> String {
        match self {
            Check::Confluence => "confluence".into(),
            Check::Diamond => "diamond".into(),
            Check::Commute => "commute".into(),
            Check::Parallel => "parallel".into(),
            Check::Postponement => "postponement".into(),
            Check::Simulation(t) => format!("simulation:{}", t.name()),
        }
    }

    /// Calculus of the input terms.
    pub fn input_calculus(self, requested: Calculus) -> Result<Calculus> {
        match self {
            Check::Parallel | Check::Postponement if requested != Calculus::Cbv => {
                Err(Error::Unknown {
                    what: "check for this calculus",
                    name: format!("{} in {requested}", self.name()),
                })
            }
            Check::Simulation(t) => Ok(t.source()),
            _ => Ok(requested),
        }
    }

    pub fn run(self, term: &Term, calculus: Calculus) -> CheckReport {
        self.run_with_budget(term, calculus, DEFAULT_BUDGET)
    }

    /// Like [`Check::run`] with `budget` graph nodes for the searching checks.
    pub fn run_with_budget(self, term: &Term, calculus: Calculus, budget: usize) -> CheckReport {
        match self {
            Check::Confluence => check_local_confluence(term, calculus, budget),
            Check::Diamond => check_diamond_oplus(term, calculus),
            Check::Commute => check_commute_pointwise(term, calculus),
            Check::Parallel => check_parallel_oracle(term),
            Check::Postponement => check_postponement(term, budget),
            Check::Simulation(t) => simulation_report(term, t, SIMULATION_DEPTH),
        }
    }
}

/// Reduct depth explored by simulation checks.
pub const SIMULATION_DEPTH: usize = 2;

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        Ok(match s {
            "confluence" => Check::Confluence,
            "diamond" => Check::Diamond,
            "commute" => Check::Commute,
            "parallel" => Check::Parallel,
            "postponement" => Check::Postponement,
            _ => match s.strip_prefix("simulation:") {
                Some(t) => Check::Simulation(t.parse()?),
                None => {
                    return Err(Error::Unknown {
                        what: "check",
                        name: s.to_string(),
                    })
                }
            },
        })
    }
}

pub fn simulation_report(term: &Term, which: Translation, depth: usize) -> CheckReport {
    let sim = check_simulation(term, which, depth);
    let mut r = CheckReport::new(&Check::Simulation(which).name(), which.source(), term);
    if !sim.passed() {
        r = r.fail(sim.failures.join("; "));
    }
    r
}

/// Runs `check` on every term in parallel, handing each report to `sink`
/// as it completes.
pub fn run_suite(
    check: Check,
    calculus: Calculus,
    terms: &[Term],
    budget: usize,
    sink: &(dyn Fn(CheckReport) + Sync),
) {
    terms
        .par_iter()
        .for_each(|t| sink(check.run_with_budget(t, calculus, budget)));
}

/// Runs `check` on every term in parallel and returns the reports in input
/// order.
pub fn collect_suite(check: Check, calculus: Calculus, terms: &[Term]) -> Vec<CheckReport> {
    terms.par_iter().map(|t| check.run(t, calculus)).collect()
}
