//! The linear calculus with `!`: linear and bang β anywhere, ⊕ only in
//! surface contexts (not under `!`, not under ⊕).

use std::fmt;

use crate::error::{Error, Result};
use crate::multidist::MultiDist;
use crate::redex::{self, Redex, RedexClass};
use crate::syntax::{Calculus, Position, Step, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// The variable occurs free this many times (more than once).
    Repeated(usize),
    UnderBang,
}

/// A linear abstraction whose variable is not affine in its body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineViolation {
    pub position: Position,
    pub binder: String,
    pub kind: ViolationKind,
}

impl fmt::Display for AffineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Repeated(n) => write!(
                f,
                "`{}` bound at {} occurs {n} times",
                self.binder, self.position
            ),
            ViolationKind::UnderBang => write!(
                f,
                "`{}` bound at {} occurs under `!`",
                self.binder, self.position
            ),
        }
    }
}

/// True iff every linear abstraction `λx.P` has `x` free at most once in
/// `P` and never under `!`. Bang abstractions are unconstrained.
pub fn affine_check(term: &Term) -> (bool, Vec<AffineViolation>) {
    let v = affine_violations(term);
    (v.is_empty(), v)
}

pub fn is_affine(term: &Term) -> bool {
    affine_violations(term).is_empty()
}

pub fn affine_violations(term: &Term) -> Vec<AffineViolation> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(term, &mut path, &mut out);
    out
}

fn collect(t: &Term, path: &mut Vec<Step>, out: &mut Vec<AffineViolation>) {
    if let Term::Lam(x, body) = t {
        let (count, under_bang) = occurrences(body, x, false);
        let position = Position(path.clone());
        if count > 1 {
            out.push(AffineViolation {
                position: position.clone(),
                binder: x.clone(),
                kind: ViolationKind::Repeated(count),
            });
        }
        if under_bang {
            out.push(AffineViolation {
                position,
                binder: x.clone(),
                kind: ViolationKind::UnderBang,
            });
        }
    }
    let mut go = |s: Step, c: &Term, path: &mut Vec<Step>| {
        path.push(s);
        collect(c, path, out);
        path.pop();
    };
    match t {
        Term::Var(_) => {}
        Term::Lam(_, b) | Term::BangLam(_, b) => go(Step::Body, b, path),
        Term::Bang(b) => go(Step::BangBody, b, path),
        Term::App(f, a) => {
            go(Step::Fun, f, path);
            go(Step::Arg, a, path);
        }
        Term::Choice(l, r) => {
            go(Step::Left, l, path);
            go(Step::Right, r, path);
        }
    }
}

fn occurrences(t: &Term, x: &str, banged: bool) -> (usize, bool) {
    match t {
        Term::Var(y) => {
            if y == x {
                (1, banged)
            } else {
                (0, false)
            }
        }
        Term::Lam(y, b) | Term::BangLam(y, b) => {
            if y == x {
                (0, false)
            } else {
                occurrences(b, x, banged)
            }
        }
        Term::Bang(b) => occurrences(b, x, true),
        Term::App(a, b) | Term::Choice(a, b) => {
            let (n, p) = occurrences(a, x, banged);
            let (m, q) = occurrences(b, x, banged);
            (n + m, p || q)
        }
    }
}

/// Redexes of an affine term; non-affine input is rejected.
pub fn bang_redexes(term: &Term) -> Result<Vec<Redex>> {
    let v = affine_violations(term);
    if !v.is_empty() {
        return Err(Error::NotAffine(v));
    }
    Ok(redex::redexes(term, Calculus::Bang))
}

pub fn bang_step(term: &Term, r: &Redex) -> Result<MultiDist> {
    let v = affine_violations(term);
    if !v.is_empty() {
        return Err(Error::NotAffine(v));
    }
    let out = redex::step(term, r, Calculus::Bang)?;
    debug_assert!(
        out.terms().all(is_affine),
        "affinity lost stepping `{term}`"
    );
    Ok(out)
}

/// No surface redex (the set 𝒮! of surface normal forms).
pub fn is_surface_nf(term: &Term) -> bool {
    !redex::has_redex(term, Calculus::Bang, RedexClass::Surface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multidist::half;
    use crate::redex::RedexKind;
    use crate::syntax::{parse, parse_with, ParseOptions};

    fn t(s: &str) -> Term {
        parse(s, Calculus::Bang).unwrap()
    }

    fn raw(s: &str) -> Term {
        let opts = ParseOptions {
            affine_check: false,
            ..Default::default()
        };
        parse_with(s, Calculus::Bang, opts).unwrap()
    }

    #[test]
    fn affine_examples() {
        assert!(affine_check(&t("\\x. x")).0);
        let (ok, v) = affine_check(&raw("\\x. x x"));
        assert!(!ok);
        assert_eq!(v[0].kind, ViolationKind::Repeated(2));
        let (ok, v) = affine_check(&raw("\\x. !x"));
        assert!(!ok);
        assert_eq!(v[0].kind, ViolationKind::UnderBang);
        assert!(affine_check(&t("\\!x. x !x")).0);
        assert!(affine_check(&t("\\x. y")).0);
        assert!(matches!(
            parse("\\x. x x", Calculus::Bang),
            Err(Error::NotAffine(_))
        ));
        // shadowing hides inner occurrences
        assert!(affine_check(&t("\\x. \\x. x")).0);
        assert_eq!(v[0].to_string(), "`x` bound at root occurs under `!`");
    }

    #[test]
    fn redexes_under_lambda_are_surface() {
        let rs = bang_redexes(&t("\\x. (\\y. y) (\\y. y)")).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].kind, RedexKind::BetaLin);
        assert!(rs[0].flags.surface && !rs[0].flags.left && !rs[0].flags.head);
    }

    #[test]
    fn choice_under_bang_is_frozen() {
        assert!(bang_redexes(&t("!(x (+) y)")).unwrap().is_empty());
    }

    #[test]
    fn bang_beta_and_deep_linear_beta() {
        let rs = bang_redexes(&t("(\\!x. !x) !((\\y. y) (\\y. y))")).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].kind, RedexKind::BetaBang);
        assert!(rs[0].flags.surface && rs[0].position.0.is_empty());
        assert_eq!(rs[1].kind, RedexKind::BetaLin);
        assert!(rs[1].flags.deep && rs[1].flags.internal);
    }

    #[test]
    fn non_affine_rejected() {
        assert!(bang_redexes(&raw("(\\x. x x) y")).is_err());
    }

    #[test]
    fn steps() {
        let m = t("(\\x. x) (y z)");
        let r = &bang_redexes(&m).unwrap()[0];
        assert_eq!(bang_step(&m, r).unwrap(), MultiDist::unit(t("y z")));
        let m = t("(\\!x. !x) !(\\y. y)");
        let r = &bang_redexes(&m).unwrap()[0];
        assert_eq!(bang_step(&m, r).unwrap(), MultiDist::unit(t("!(\\y. y)")));
        let m = t("\\z. x (+) y");
        let r = &bang_redexes(&m).unwrap()[0];
        assert_eq!(
            bang_step(&m, r).unwrap(),
            MultiDist::new(vec![(half(), t("\\z. x")), (half(), t("\\z. y"))]).unwrap()
        );
    }

    #[test]
    fn bang_lambda_applied_to_non_bang_is_stuck() {
        assert!(bang_redexes(&t("(\\!x. x) y")).unwrap().is_empty());
    }
}
