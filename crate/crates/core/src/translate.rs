//! Translations between the calculi and a step-level simulation check.
//!
//! | source | image of `M ⊕ N` | other clauses |
//! |--------|------------------|---------------|
//! | cbv, simple | `__z M N` | homomorphic |
//! | cbv, surface-preserving | `__z (λ__w.M) (λ__w.N)` | homomorphic |
//! | bang | `__z !M !N` | homomorphic |
//! | cbn | `M ⊕ N` | `λx.M ↦ λ!x.M`, `M N ↦ M !N` |

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multidist::MultiDist;
use crate::redex::{self, RedexKind};
use crate::syntax::{Calculus, Canon, Position, Step, Term, RESERVED_W, RESERVED_Z};
use crate::{bang, cbn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CbvVariant {
    Simple,
    SurfacePreserving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Translation {
    CbvSimple,
    CbvSurface,
    Bang,
    Cbn,
}

impl Translation {
    pub const ALL: [Translation; 4] = [
        Translation::CbvSimple,
        Translation::CbvSurface,
        Translation::Bang,
        Translation::Cbn,
    ];

    pub fn source(self) -> Calculus {
        match self {
            Translation::CbvSimple | Translation::CbvSurface => Calculus::Cbv,
            Translation::Bang => Calculus::Bang,
            Translation::Cbn => Calculus::Cbn,
        }
    }

    pub fn target(self) -> Calculus {
        match self {
            Translation::CbvSimple | Translation::CbvSurface => Calculus::Cbv,
            Translation::Bang | Translation::Cbn => Calculus::Bang,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Translation::CbvSimple => "cbv-simple",
            Translation::CbvSurface => "cbv-surface",
            Translation::Bang => "bang",
            Translation::Cbn => "cbn",
        }
    }

    pub fn apply(self, t: &Term) -> Result<Term> {
        match self {
            Translation::CbvSimple => translate_cbv(t, CbvVariant::Simple),
            Translation::CbvSurface => translate_cbv(t, CbvVariant::SurfacePreserving),
            Translation::Bang => translate_bang(t),
            Translation::Cbn => translate_cbn(t),
        }
    }

    pub fn apply_md(self, m: &MultiDist) -> Result<MultiDist> {
        let entries = m
            .entries()
            .iter()
            .map(|(p, t)| Ok((p.clone(), self.apply(t)?)))
            .collect::<Result<Vec<_>>>()?;
        MultiDist::new(entries)
    }

    /// The position in the image that corresponds to a source position.
    pub fn map_position(self, pos: &Position) -> Position {
        let mut out = Vec::new();
        for s in pos.steps() {
            match (self, s) {
                (Translation::CbvSimple, Step::Left) => out.extend([Step::Fun, Step::Arg]),
                (Translation::CbvSimple, Step::Right) => out.push(Step::Arg),
                (Translation::CbvSurface, Step::Left) => {
                    out.extend([Step::Fun, Step::Arg, Step::Body])
                }
                (Translation::CbvSurface, Step::Right) => out.extend([Step::Arg, Step::Body]),
                (Translation::Bang, Step::Left) => {
                    out.extend([Step::Fun, Step::Arg, Step::BangBody])
                }
                (Translation::Bang, Step::Right) => out.extend([Step::Arg, Step::BangBody]),
                (Translation::Cbn, Step::Arg) => out.extend([Step::Arg, Step::BangBody]),
                _ => out.push(*s),
            }
        }
        Position(out)
    }

    fn target_kind(self, k: RedexKind) -> RedexKind {
        match (self, k) {
            (Translation::Cbn, RedexKind::BetaCbn) => RedexKind::BetaBang,
            _ => k,
        }
    }

    fn source_steps_simulated(self, k: RedexKind) -> bool {
        self == Translation::Cbn || k.is_beta()
    }

    fn checks_surface(self) -> bool {
        self != Translation::CbvSimple
    }
}

impl fmt::Display for Translation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Translation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cbv-simple" => Translation::CbvSimple,
            "cbv-surface" => Translation::CbvSurface,
            "bang" => Translation::Bang,
            "cbn" => Translation::Cbn,
            _ => {
                return Err(Error::Unknown {
                    what: "translation",
                    name: s.to_string(),
                })
            }
        })
    }
}

fn reject_reserved(t: &Term) -> Result<()> {
    fn find(t: &Term) -> Option<&str> {
        match t {
            Term::Var(x) => (x == RESERVED_Z || x == RESERVED_W).then_some(x.as_str()),
            Term::Lam(x, b) | Term::BangLam(x, b) => {
                if x == RESERVED_Z || x == RESERVED_W {
                    Some(x.as_str())
                } else {
                    find(b)
                }
            }
            Term::Bang(b) => find(b),
            Term::App(a, b) | Term::Choice(a, b) => find(a).or_else(|| find(b)),
        }
    }
    match find(t) {
        Some(x) => Err(Error::ReservedName(x.to_string())),
        None => Ok(()),
    }
}

pub fn translate_cbv(term: &Term, variant: CbvVariant) -> Result<Term> {
    term.check_calculus(Calculus::Cbv)?;
    reject_reserved(term)?;
    Ok(cbv_image(term, variant))
}

fn cbv_image(t: &Term, variant: CbvVariant) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::lam(x.clone(), cbv_image(b, variant)),
        Term::App(f, a) => Term::app(cbv_image(f, variant), cbv_image(a, variant)),
        Term::Choice(l, r) => {
            let (l, r) = (cbv_image(l, variant), cbv_image(r, variant));
            let (l, r) = match variant {
                CbvVariant::Simple => (l, r),
                CbvVariant::SurfacePreserving => {
                    (Term::lam(RESERVED_W, l), Term::lam(RESERVED_W, r))
                }
            };
            Term::app(Term::app(Term::var(RESERVED_Z), l), r)
        }
        Term::BangLam(..) | Term::Bang(_) => unreachable!("checked cbv term"),
    }
}

pub fn translate_bang(term: &Term) -> Result<Term> {
    reject_reserved(term)?;
    let v = bang::affine_violations(term);
    if !v.is_empty() {
        return Err(Error::NotAffine(v));
    }
    Ok(bang_image(term))
}

fn bang_image(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::lam(x.clone(), bang_image(b)),
        Term::BangLam(x, b) => Term::bang_lam(x.clone(), bang_image(b)),
        Term::Bang(b) => Term::bang(bang_image(b)),
        Term::App(f, a) => Term::app(bang_image(f), bang_image(a)),
        Term::Choice(l, r) => Term::app(
            Term::app(Term::var(RESERVED_Z), Term::bang(bang_image(l))),
            Term::bang(bang_image(r)),
        ),
    }
}

pub fn translate_cbn(term: &Term) -> Result<Term> {
    term.check_calculus(Calculus::Cbn)?;
    Ok(cbn_image(term))
}

fn cbn_image(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::bang_lam(x.clone(), cbn_image(b)),
        Term::App(f, a) => Term::app(cbn_image(f), Term::bang(cbn_image(a))),
        Term::Choice(l, r) => Term::choice(cbn_image(l), cbn_image(r)),
        Term::BangLam(..) | Term::Bang(_) => unreachable!("checked cbn term"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub translation: String,
    pub term: String,
    /// Source terms examined (the input and its reducts up to the depth).
    pub checked_terms: usize,
    pub failures: Vec<String>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for `term` and every reduct up to `steps` steps, that source
/// steps and target steps on the image correspond one-to-one through the
/// position map, that results correspond through the translation, and the
/// per-translation side conditions (surface flags, values, normal forms).
pub fn check_simulation(term: &Term, which: Translation, steps: usize) -> SimulationReport {
    let mut report = SimulationReport {
        translation: which.name().to_string(),
        term: term.to_string(),
        checked_terms: 0,
        failures: Vec::new(),
    };
    let mut seen: HashSet<Canon> = HashSet::new();
    let mut queue = VecDeque::from([(term.clone(), 0usize)]);
    seen.insert(term.canonical());
    while let Some((m, depth)) = queue.pop_front() {
        report.checked_terms += 1;
        let succ = simulate_one(&m, which, &mut report.failures);
        if depth < steps {
            for n in succ {
                if seen.insert(n.canonical()) {
                    queue.push_back((n, depth + 1));
                }
            }
        }
    }
    report
}

fn simulate_one(m: &Term, which: Translation, failures: &mut Vec<String>) -> Vec<Term> {
    let src = which.source();
    let tgt = which.target();
    let image = match which.apply(m) {
        Ok(t) => t,
        Err(e) => {
            failures.push(format!("`{m}`: cannot translate: {e}"));
            return Vec::new();
        }
    };
    let source_redexes = redex::redexes(m, src);
    let target_redexes = redex::redexes(&image, tgt);
    let mut matched: HashSet<Position> = HashSet::new();
    let mut successors = Vec::new();
    for r in &source_redexes {
        let Ok(res) = redex::step(m, r, src) else {
            failures.push(format!("`{m}`: source redex {r} does not step"));
            continue;
        };
        successors.extend(res.terms().cloned());
        if !which.source_steps_simulated(r.kind) {
            continue;
        }
        let p = which.map_position(&r.position);
        let Some(tr) = target_redexes.iter().find(|t| t.position == p) else {
            failures.push(format!(
                "`{m}`: source step {r} has no target step at {p} in `{image}`"
            ));
            continue;
        };
        matched.insert(p.clone());
        if tr.kind != which.target_kind(r.kind) {
            failures.push(format!("`{m}`: {r} corresponds to {tr} of another kind"));
        }
        if which.checks_surface() && tr.flags.surface != r.flags.surface {
            failures.push(format!(
                "`{m}`: surface flag of {r} differs from target {tr}"
            ));
        }
        match (which.apply_md(&res), redex::step(&image, tr, tgt)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => failures.push(format!(
                "`{m}`: {r} gives {a} after translation but the target step gives {b}"
            )),
            (Err(e), _) | (_, Err(e)) => failures.push(format!("`{m}`: {e}")),
        }
    }
    for tr in &target_redexes {
        if !matched.contains(&tr.position) {
            failures.push(format!(
                "`{m}`: target step {tr} in `{image}` has no source preimage"
            ));
        }
    }
    match which {
        Translation::Cbn => {
            let h = cbn::is_head_nf(m);
            let s = bang::is_surface_nf(&image);
            if h != s {
                failures.push(format!(
                    "`{m}`: head normal = {h} but image surface normal = {s}"
                ));
            }
        }
        Translation::CbvSimple | Translation::CbvSurface => {
            if m.is_value() != image.is_value() {
                failures.push(format!("`{m}`: value status not preserved by `{image}`"));
            }
        }
        Translation::Bang => {}
    }
    successors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::Prelude;
    use crate::syntax::parse;

    fn cbv(s: &str) -> Term {
        Prelude::standard().expand(&parse(s, Calculus::Cbv).unwrap())
    }

    #[test]
    fn cbv_images() {
        let t = cbv("x (+) y");
        assert_eq!(
            translate_cbv(&t, CbvVariant::Simple).unwrap().to_string(),
            "__z x y"
        );
        assert_eq!(
            translate_cbv(&t, CbvVariant::SurfacePreserving)
                .unwrap()
                .to_string(),
            "__z (\\__w. x) (\\__w. y)"
        );
        let id = cbv("\\x. x");
        assert_eq!(translate_cbv(&id, CbvVariant::Simple).unwrap(), id);
    }

    #[test]
    fn bang_images() {
        let b = |s: &str| parse(s, Calculus::Bang).unwrap();
        assert_eq!(
            translate_bang(&b("x (+) y")).unwrap().to_string(),
            "__z !x !y"
        );
        assert_eq!(translate_bang(&b("\\!x. !x")).unwrap(), b("\\!x. !x"));
        assert_eq!(
            translate_bang(&b("(x (+) y) (+) w")).unwrap().to_string(),
            "__z !(__z !x !y) !w"
        );
    }

    #[test]
    fn cbn_images() {
        let n = |s: &str| parse(s, Calculus::Cbn).unwrap();
        assert_eq!(translate_cbn(&n("\\x. x")).unwrap().to_string(), "\\!x. x");
        assert_eq!(
            translate_cbn(&n("(\\x. x) y")).unwrap().to_string(),
            "(\\!x. x) !y"
        );
        assert_eq!(
            translate_cbn(&n("\\x. y (+) z")).unwrap().to_string(),
            "\\!x. y (+) z"
        );
    }

    #[test]
    fn reserved_names_are_rejected() {
        let t = Term::app(Term::var(RESERVED_Z), Term::var("x"));
        assert!(matches!(
            translate_cbv(&t, CbvVariant::Simple),
            Err(Error::ReservedName(ref n)) if n == "__z"
        ));
        let t = Term::lam(RESERVED_W, Term::choice(Term::var("x"), Term::var("y")));
        assert!(translate_bang(&t).is_err());
    }

    #[test]
    fn simulation_examples() {
        let r = check_simulation(&cbv("(\\x.x)(\\y.y)"), Translation::CbvSimple, 2);
        assert!(r.passed(), "{:?}", r.failures);
        let r = check_simulation(
            &parse("\\x. I I", Calculus::Cbn).unwrap(),
            Translation::Cbn,
            2,
        );
        assert!(r.passed(), "{:?}", r.failures);
        let n = parse("x (y (+) z)", Calculus::Cbn).unwrap();
        let r = check_simulation(&n, Translation::Cbn, 1);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(translate_cbn(&n).unwrap().to_string(), "x !(y (+) z)");
        assert!(redex::redexes(&translate_cbn(&n).unwrap(), Calculus::Bang).is_empty());
    }

    #[test]
    fn simulation_covers_choice_steps_in_cbn() {
        let n = Prelude::standard().expand(&parse("(\\x. I (y (+) z)) I", Calculus::Cbn).unwrap());
        let r = check_simulation(&n, Translation::Cbn, 4);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.checked_terms > 3);
    }

    #[test]
    fn position_map() {
        let p: Position = "fun.right.fun".parse().unwrap();
        assert_eq!(
            Translation::CbvSurface.map_position(&p).to_string(),
            "fun.arg.body.fun"
        );
    }
}
