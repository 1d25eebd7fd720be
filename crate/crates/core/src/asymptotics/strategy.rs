use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::multidist::{Decision, LiftChoice, MultiDist};
use crate::redex::{self, Redex, RedexClass};
use crate::syntax::{Calculus, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Full lifting with surface redexes.
    FullSurface,
    /// Full lifting with left redexes (cbv only).
    FullLeft,
    /// Full lifting with head redexes (cbn only).
    FullHead,
    /// Full lifting with any redex.
    FullAny,
    /// Reduces only the first reducible entry, at its leftmost redex.
    LeftmostAny,
    /// Each reducible entry is kept or reduced at a random redex; at least
    /// one entry is reduced when any can be.
    Random(u64),
}

/// How a full strategy chooses among the admissible redexes of an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Pick {
    #[default]
    Leftmost,
    Rightmost,
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub pick: Pick,
    pub calculus: Calculus,
}

impl Strategy {
    pub fn new(kind: StrategyKind, calculus: Calculus) -> Result<Strategy> {
        let ok = match kind {
            StrategyKind::FullLeft => calculus == Calculus::Cbv,
            StrategyKind::FullHead => calculus == Calculus::Cbn,
            _ => true,
        };
        let s = Strategy {
            kind,
            pick: Pick::Leftmost,
            calculus,
        };
        if !ok {
            return Err(Error::IncompatibleStrategy {
                strategy: s.name(),
                calculus,
            });
        }
        Ok(s)
    }

    pub fn with_pick(self, pick: Pick) -> Strategy {
        Strategy { pick, ..self }
    }

    /// Accepts `full-surface`, `full-left`, `full-head`, `full-any`,
    /// `leftmost-any` and `random(SEED)`.
    pub fn parse(name: &str, calculus: Calculus) -> Result<Strategy> {
        let kind = match name {
            "full-surface" => StrategyKind::FullSurface,
            "full-left" => StrategyKind::FullLeft,
            "full-head" => StrategyKind::FullHead,
            "full-any" => StrategyKind::FullAny,
            "leftmost-any" => StrategyKind::LeftmostAny,
            _ => match name
                .strip_prefix("random(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse().ok())
            {
                Some(seed) => StrategyKind::Random(seed),
                None => {
                    return Err(Error::Unknown {
                        what: "strategy",
                        name: name.to_string(),
                    })
                }
            },
        };
        Strategy::new(kind, calculus)
    }

    pub fn name(&self) -> String {
        match self.kind {
            StrategyKind::FullSurface => "full-surface".into(),
            StrategyKind::FullLeft => "full-left".into(),
            StrategyKind::FullHead => "full-head".into(),
            StrategyKind::FullAny => "full-any".into(),
            StrategyKind::LeftmostAny => "leftmost-any".into(),
            StrategyKind::Random(s) => format!("random({s})"),
        }
    }

    /// The redexes this strategy may contract.
    pub fn class(&self) -> RedexClass {
        match self.kind {
            StrategyKind::FullSurface => RedexClass::Surface,
            StrategyKind::FullLeft => RedexClass::Left,
            StrategyKind::FullHead => RedexClass::Head,
            _ => RedexClass::Any,
        }
    }

    pub fn runner(&self) -> Runner {
        let seed = match (self.kind, self.pick) {
            (StrategyKind::Random(s), _) | (_, Pick::Random(s)) => s,
            _ => 0,
        };
        Runner {
            strategy: *self,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A strategy together with its random state.
#[derive(Clone, Debug)]
pub struct Runner {
    strategy: Strategy,
    rng: ChaCha8Rng,
}

impl Runner {
    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    fn admissible(&self, t: &Term) -> Vec<Redex> {
        let class = self.strategy.class();
        redex::redexes(t, self.strategy.calculus)
            .into_iter()
            .filter(|r| class.admits(r))
            .collect()
    }

    fn pick(&mut self, mut rs: Vec<Redex>) -> Option<Redex> {
        if rs.is_empty() {
            return None;
        }
        let i = match self.strategy.pick {
            Pick::Leftmost => 0,
            Pick::Rightmost => rs.len() - 1,
            Pick::Random(_) => self.rng.gen_range(0..rs.len()),
        };
        Some(rs.swap_remove(i))
    }

    /// The redex this strategy contracts in a single term, if any.
    pub fn select(&mut self, t: &Term) -> Option<Redex> {
        let rs = self.admissible(t);
        self.pick(rs)
    }

    /// The lifted step to perform next.
    pub fn choose(&mut self, m: &MultiDist) -> LiftChoice {
        let mut out = LiftChoice::keep_all(m.len());
        match self.strategy.kind {
            StrategyKind::LeftmostAny => {
                for (i, t) in m.terms().enumerate() {
                    if let Some(r) = self.admissible(t).into_iter().next() {
                        out.0[i] = Decision::Reduce(r);
                        break;
                    }
                }
            }
            StrategyKind::Random(_) => {
                let mut first = None;
                for (i, t) in m.terms().enumerate() {
                    let mut rs = self.admissible(t);
                    if rs.is_empty() {
                        continue;
                    }
                    let j = self.rng.gen_range(0..rs.len());
                    let r = rs.swap_remove(j);
                    if self.rng.gen_bool(0.5) {
                        out.0[i] = Decision::Reduce(r);
                    } else if first.is_none() {
                        first = Some((i, r));
                    }
                }
                if out.is_identity() {
                    if let Some((i, r)) = first {
                        out.0[i] = Decision::Reduce(r);
                    }
                }
            }
            _ => {
                for (i, t) in m.terms().enumerate() {
                    if let Some(r) = self.select(t) {
                        out.0[i] = Decision::Reduce(r);
                    }
                }
            }
        }
        out
    }

    /// No entry has a redex this strategy may contract.
    pub fn is_done(&self, m: &MultiDist) -> bool {
        m.terms().all(|t| self.admissible(t).is_empty())
    }
}
