//! Redexes, context classification and one-step reduction, shared by the
//! three calculi.
//!
//! Context grammars are path predicates over [`Step`]s:
//!
//! | calculus | surface                      | left / head            |
//! |----------|------------------------------|------------------------|
//! | cbv      | `□ │ MS │ SM`                | `□ │ LM │ VL`          |
//! | cbn      | `□ │ λx.S │ SM`              | `λx.H │ K`, `□ │ KM`   |
//! | bang     | `□ │ MS │ SM │ λx.S │ λ!x.S` | none                   |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multidist::{half, MultiDist, Rational};
use crate::syntax::{Calculus, Position, Step, Term};
use num_traits::One;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedexKind {
    BetaV,
    BetaLin,
    BetaBang,
    BetaCbn,
    Oplus,
}

impl RedexKind {
    pub fn is_beta(self) -> bool {
        self != RedexKind::Oplus
    }

    pub fn name(self) -> &'static str {
        match self {
            RedexKind::BetaV => "beta_v",
            RedexKind::BetaLin => "beta_lin",
            RedexKind::BetaBang => "beta_bang",
            RedexKind::BetaCbn => "beta_cbn",
            RedexKind::Oplus => "oplus",
        }
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RedexKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "beta_v" => RedexKind::BetaV,
            "beta_lin" => RedexKind::BetaLin,
            "beta_bang" => RedexKind::BetaBang,
            "beta_cbn" => RedexKind::BetaCbn,
            "oplus" => RedexKind::Oplus,
            _ => {
                return Err(Error::Unknown {
                    what: "redex kind",
                    name: s.to_string(),
                })
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flags {
    pub surface: bool,
    pub left: bool,
    pub head: bool,
    pub deep: bool,
    pub internal: bool,
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v = Vec::new();
        for (on, name) in [
            (self.surface, "surface"),
            (self.left, "left"),
            (self.head, "head"),
            (self.deep, "deep"),
            (self.internal, "internal"),
        ] {
            if on {
                v.push(name);
            }
        }
        f.write_str(&v.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Redex {
    pub position: Position,
    pub kind: RedexKind,
    pub flags: Flags,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {} [{}]", self.kind, self.position, self.flags)
    }
}

/// Which redexes a strategy or search may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedexClass {
    Any,
    Surface,
    Deep,
    Left,
    Head,
    Beta,
    Oplus,
    SurfaceBeta,
    DeepBeta,
}

impl RedexClass {
    pub fn admits(self, r: &Redex) -> bool {
        match self {
            RedexClass::Any => true,
            RedexClass::Surface => r.flags.surface,
            RedexClass::Deep => r.flags.deep,
            RedexClass::Left => r.flags.left,
            RedexClass::Head => r.flags.head,
            RedexClass::Beta => r.kind.is_beta(),
            RedexClass::Oplus => r.kind == RedexKind::Oplus,
            RedexClass::SurfaceBeta => r.flags.surface && r.kind.is_beta(),
            RedexClass::DeepBeta => r.flags.deep && r.kind.is_beta(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HeadPhase {
    Lams,
    Spine,
    Off,
}

#[derive(Clone, Copy, Debug)]
struct Ctx {
    surface: bool,
    left: bool,
    head: HeadPhase,
}

impl Ctx {
    const ROOT: Ctx = Ctx {
        surface: true,
        left: true,
        head: HeadPhase::Lams,
    };

    fn enter(self, calculus: Calculus, parent: &Term, s: Step) -> Ctx {
        match calculus {
            Calculus::Cbv => match s {
                Step::Fun => self,
                Step::Arg => Ctx {
                    left: self.left && matches!(parent, Term::App(f, _) if f.is_value()),
                    ..self
                },
                _ => Ctx {
                    surface: false,
                    left: false,
                    head: HeadPhase::Off,
                },
            },
            Calculus::Cbn => match s {
                Step::Body => Ctx {
                    head: if self.head == HeadPhase::Lams {
                        HeadPhase::Lams
                    } else {
                        HeadPhase::Off
                    },
                    ..self
                },
                Step::Fun => Ctx {
                    head: if self.head == HeadPhase::Off {
                        HeadPhase::Off
                    } else {
                        HeadPhase::Spine
                    },
                    ..self
                },
                _ => Ctx {
                    surface: false,
                    left: false,
                    head: HeadPhase::Off,
                },
            },
            Calculus::Bang => match s {
                Step::Fun | Step::Arg | Step::Body => self,
                _ => Ctx {
                    surface: false,
                    ..self
                },
            },
        }
    }

    fn flags(self, calculus: Calculus) -> Flags {
        let surface = self.surface;
        let left = calculus == Calculus::Cbv && self.left;
        let head = calculus == Calculus::Cbn && self.head != HeadPhase::Off;
        let internal = match calculus {
            Calculus::Cbv => !left,
            Calculus::Cbn => !head,
            Calculus::Bang => !surface,
        };
        Flags {
            surface,
            left,
            head,
            deep: !surface,
            internal,
        }
    }
}

fn node_kind(t: &Term, calculus: Calculus, surface: bool) -> Option<RedexKind> {
    match (calculus, t) {
        (_, Term::Choice(..)) if surface => Some(RedexKind::Oplus),
        (Calculus::Cbv, Term::App(f, a)) if matches!(**f, Term::Lam(..)) && a.is_value() => {
            Some(RedexKind::BetaV)
        }
        (Calculus::Cbn, Term::App(f, _)) if matches!(**f, Term::Lam(..)) => {
            Some(RedexKind::BetaCbn)
        }
        (Calculus::Bang, Term::App(f, a)) => match (&**f, &**a) {
            (Term::Lam(..), _) => Some(RedexKind::BetaLin),
            (Term::BangLam(..), Term::Bang(_)) => Some(RedexKind::BetaBang),
            _ => None,
        },
        _ => None,
    }
}

fn children(t: &Term) -> Vec<(Step, &Term)> {
    match t {
        Term::Var(_) => vec![],
        Term::Lam(_, b) | Term::BangLam(_, b) => vec![(Step::Body, b)],
        Term::Bang(b) => vec![(Step::BangBody, b)],
        Term::App(f, a) => vec![(Step::Fun, f), (Step::Arg, a)],
        Term::Choice(l, r) => vec![(Step::Left, l), (Step::Right, r)],
    }
}

/// All redexes of `term`, in preorder (outermost first, then left to right).
/// No well-formedness check is made.
pub fn redexes(term: &Term, calculus: Calculus) -> Vec<Redex> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(term, calculus, Ctx::ROOT, &mut path, &mut out);
    out
}

fn walk(t: &Term, calculus: Calculus, ctx: Ctx, path: &mut Vec<Step>, out: &mut Vec<Redex>) {
    if let Some(kind) = node_kind(t, calculus, ctx.surface) {
        out.push(Redex {
            position: Position(path.clone()),
            kind,
            flags: ctx.flags(calculus),
        });
    }
    for (s, c) in children(t) {
        path.push(s);
        walk(c, calculus, ctx.enter(calculus, t, s), path, out);
        path.pop();
    }
}

/// Whether the term has at least one redex of the given class.
pub fn has_redex(term: &Term, calculus: Calculus, class: RedexClass) -> bool {
    redexes(term, calculus).iter().any(|r| class.admits(r))
}

/// The redex at `pos`, if any, with its flags.
pub fn redex_at(term: &Term, pos: &Position, calculus: Calculus) -> Option<Redex> {
    let mut t = term;
    let mut ctx = Ctx::ROOT;
    for s in pos.steps() {
        let c = t.child(*s)?;
        ctx = ctx.enter(calculus, t, *s);
        t = c;
    }
    node_kind(t, calculus, ctx.surface).map(|kind| Redex {
        position: pos.clone(),
        kind,
        flags: ctx.flags(calculus),
    })
}

/// Contracts `redex` in `term`. The redex's flags are ignored; position and
/// kind must match a redex of `term` in the calculus.
pub fn step(term: &Term, redex: &Redex, calculus: Calculus) -> Result<MultiDist> {
    let invalid = |detail: String| Error::InvalidRedex {
        entry: None,
        detail,
    };
    let Some(found) = redex_at(term, &redex.position, calculus) else {
        return Err(invalid(format!(
            "no {} redex at {} in `{term}`",
            redex.kind, redex.position
        )));
    };
    if found.kind != redex.kind {
        return Err(invalid(format!(
            "redex at {} is {}, not {}",
            redex.position, found.kind, redex.kind
        )));
    }
    let steps = redex.position.steps();
    let rebuilt = |f: &mut dyn FnMut(&Term) -> Term| {
        term.replace_at(steps, f).expect("position was validated")
    };
    Ok(match redex.kind {
        RedexKind::Oplus => {
            let l = rebuilt(&mut |s| match s {
                Term::Choice(l, _) => (**l).clone(),
                _ => unreachable!(),
            });
            let r = rebuilt(&mut |s| match s {
                Term::Choice(_, r) => (**r).clone(),
                _ => unreachable!(),
            });
            MultiDist::from_entries_unchecked(vec![(half(), l), (half(), r)])
        }
        _ => {
            let t = rebuilt(&mut contract_beta);
            MultiDist::from_entries_unchecked(vec![(Rational::one(), t)])
        }
    })
}

/// Contracts a β-redex of any of the calculi at the root.
pub fn contract_beta(t: &Term) -> Term {
    match t {
        Term::App(f, a) => match (&**f, &**a) {
            (Term::Lam(x, m), n) => m.subst(x, n),
            (Term::BangLam(x, m), Term::Bang(n)) => m.subst(x, n),
            _ => panic!("not a beta redex: {t}"),
        },
        _ => panic!("not a beta redex: {t}"),
    }
}

/// Single-term successor of a β step; panics on ⊕ redexes.
pub fn beta_step(term: &Term, redex: &Redex) -> Term {
    assert!(redex.kind.is_beta());
    term.replace_at(redex.position.steps(), &mut contract_beta)
        .expect("valid position")
}
