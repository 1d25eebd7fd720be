//! The call-by-value calculus: βv anywhere, ⊕ only in surface contexts.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::multidist::MultiDist;
use crate::redex::{self, Redex, RedexClass};
use crate::syntax::{Calculus, Term};

pub fn cbv_redexes(term: &Term) -> Vec<Redex> {
    redex::redexes(term, Calculus::Cbv)
}

pub fn cbv_step(term: &Term, r: &Redex) -> Result<MultiDist> {
    redex::step(term, r, Calculus::Cbv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NfKind {
    Normal,
    SurfaceNormalOnly,
    Reducible,
}

pub fn cbv_nf_kind(term: &Term) -> NfKind {
    let rs = cbv_redexes(term);
    if rs.is_empty() {
        NfKind::Normal
    } else if rs.iter().any(|r| RedexClass::Surface.admits(r)) {
        NfKind::Reducible
    } else {
        NfKind::SurfaceNormalOnly
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multidist::{half, lift_step, ratio, Decision, LiftChoice, Rational};
    use crate::prelude::Prelude;
    use crate::redex::RedexKind;
    use crate::syntax::{parse, Position};
    use num_traits::One;

    fn t(s: &str) -> Term {
        Prelude::standard().expand(&parse(s, Calculus::Cbv).unwrap())
    }

    #[test]
    fn left_flag_follows_the_grammar() {
        let rs = cbv_redexes(&t("x (I I) (I I)"));
        assert_eq!(rs.len(), 2);
        assert!(rs
            .iter()
            .all(|r| r.kind == RedexKind::BetaV && r.flags.surface));
        let first = &rs[0];
        assert_eq!(first.position.to_string(), "fun.arg");
        assert!(first.flags.left && !first.flags.internal);
        assert_eq!(rs[1].position.to_string(), "arg");
        assert!(!rs[1].flags.left && rs[1].flags.internal);
    }

    #[test]
    fn choice_under_lambda_is_frozen() {
        assert!(cbv_redexes(&t("\\z. x (+) y")).is_empty());
        assert!(cbv_redexes(&t("x (+) (y (+) z)")).len() == 1);
    }

    #[test]
    fn xor_example_has_one_redex() {
        let m = t("(\\z. XOR z z) (T (+) F)");
        let rs = cbv_redexes(&m);
        let surface: Vec<_> = rs.iter().filter(|r| r.flags.surface).collect();
        assert_eq!(surface.len(), 1);
        assert_eq!(surface[0].kind, RedexKind::Oplus);
        assert_eq!(surface[0].position.to_string(), "arg");
        assert!(surface[0].flags.left);
        // the remaining redexes sit under λ inside the prelude definitions
        assert!(rs
            .iter()
            .filter(|r| !r.flags.surface)
            .all(|r| r.kind == RedexKind::BetaV));
        let res = cbv_step(&m, surface[0]).unwrap();
        let f = t("\\z. XOR z z");
        let want = MultiDist::new(vec![
            (half(), Term::app(f.clone(), t("T"))),
            (half(), Term::app(f, t("F"))),
        ])
        .unwrap();
        assert_eq!(res, want);
    }

    #[test]
    fn xor_outer_application_is_not_a_redex() {
        let m = parse("(\\z. z) (x (+) y)", Calculus::Cbv).unwrap();
        let rs = cbv_redexes(&m);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].kind, RedexKind::Oplus);
    }

    #[test]
    fn steps() {
        let r = cbv_redexes(&t("(\\x.x)(\\y.y)"));
        assert_eq!(
            cbv_step(&t("(\\x.x)(\\y.y)"), &r[0]).unwrap(),
            MultiDist::unit(t("\\y.y"))
        );
        let r = cbv_redexes(&t("T (+) F"));
        assert_eq!(
            cbv_step(&t("T (+) F"), &r[0]).unwrap(),
            MultiDist::new(vec![(half(), t("T")), (half(), t("F"))]).unwrap()
        );
    }

    #[test]
    fn nf_kinds() {
        assert_eq!(cbv_nf_kind(&t("\\x. I I")), NfKind::SurfaceNormalOnly);
        assert_eq!(cbv_nf_kind(&t("T")), NfKind::Normal);
        assert_eq!(cbv_nf_kind(&t("D D")), NfKind::Reducible);
    }

    #[test]
    fn lift_examples() {
        let m = MultiDist::unit(t("T (+) F"));
        let r = cbv_redexes(&m.entries()[0].1)[0].clone();
        let out = lift_step(
            &m,
            &LiftChoice(vec![Decision::Reduce(r.clone())]),
            Calculus::Cbv,
        )
        .unwrap();
        assert_eq!(
            out,
            MultiDist::new(vec![(half(), t("T")), (half(), t("F"))]).unwrap()
        );

        let m = MultiDist::new(vec![(half(), t("x")), (half(), t("T (+) F"))]).unwrap();
        let out = lift_step(
            &m,
            &LiftChoice(vec![Decision::Keep, Decision::Reduce(r.clone())]),
            Calculus::Cbv,
        )
        .unwrap();
        let want = MultiDist::new(vec![
            (half(), t("x")),
            (ratio(1, 4), t("T")),
            (ratio(1, 4), t("F")),
        ])
        .unwrap();
        assert_eq!(out, want);
        assert_eq!(out.mass(), Rational::one());

        assert_eq!(
            lift_step(&m, &LiftChoice::keep_all(2), Calculus::Cbv).unwrap(),
            m
        );
        let err = lift_step(
            &m,
            &LiftChoice(vec![Decision::Reduce(r), Decision::Keep]),
            Calculus::Cbv,
        )
        .unwrap_err();
        assert!(err.to_string().contains("entry 0"), "{err}");
        assert!(lift_step(&m, &LiftChoice::keep_all(1), Calculus::Cbv).is_err());
    }

    #[test]
    fn full_step_examples() {
        use crate::multidist::full_step;
        let leftmost = |t: &Term| cbv_redexes(t).into_iter().next();
        let m = MultiDist::new(vec![(half(), t("D D")), (half(), t("I I"))]).unwrap();
        let (out, _) = full_step(&m, &mut |x| leftmost(x), Calculus::Cbv).unwrap();
        assert_eq!(
            out,
            MultiDist::new(vec![(half(), t("D D")), (half(), t("I"))]).unwrap()
        );
        let m = MultiDist::unit(t("T"));
        assert_eq!(
            full_step(&m, &mut |x| leftmost(x), Calculus::Cbv)
                .unwrap()
                .0,
            m
        );
        let m = MultiDist::new(vec![(half(), t("T")), (half(), t("T (+) F"))]).unwrap();
        let (out, choice) = full_step(
            &m,
            &mut |x| cbv_redexes(x).into_iter().find(|r| r.flags.surface),
            Calculus::Cbv,
        )
        .unwrap();
        assert_eq!(choice.0[0], Decision::Keep);
        let want = MultiDist::new(vec![
            (half(), t("T")),
            (ratio(1, 4), t("T")),
            (ratio(1, 4), t("F")),
        ])
        .unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn position_of_root_redex() {
        let r = cbv_redexes(&t("I I"));
        assert_eq!(r[0].position, Position::root());
        assert!(r[0].flags.left && r[0].flags.surface);
    }
}
