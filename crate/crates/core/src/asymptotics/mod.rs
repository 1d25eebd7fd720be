//! Limit distributions: strategies, observation classes and bounded
//! evaluation with exact lower bounds.

mod limit;
mod observe;
mod strategy;
mod trace;

pub use limit::{
    compare_limits, default_epsilon, evaluate_limit, evaluate_with, observe_trace, valuable_mass,
    ClassDelta, ClassMass, Comparison, EvalOptions, LimitResult, Verdict, DEFAULT_MAX_STEPS,
};
pub use observe::{
    beta_joinable, beta_normalize, ClassKey, Classifier, ObsKind, ObservationSet, DEFAULT_JOIN_FUEL,
};
pub use strategy::{Pick, Runner, Strategy, StrategyKind};
pub use trace::Trace;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multidist::{half, pow2_inv, ratio, MultiDist, Rational};
    use crate::prelude::Prelude;
    use crate::syntax::{parse_with, Calculus, ParseOptions, Term};
    use num_traits::{One, Zero};

    fn t(src: &str, c: Calculus) -> Term {
        let opts = ParseOptions {
            affine_check: false,
            ..ParseOptions::default()
        };
        Prelude::standard().expand(&parse_with(src, c, opts).unwrap())
    }

    fn cbv(src: &str) -> Term {
        t(src, Calculus::Cbv)
    }

    fn surface() -> Strategy {
        Strategy::new(StrategyKind::FullSurface, Calculus::Cbv).unwrap()
    }

    fn vals() -> ObservationSet {
        ObservationSet::new(ObsKind::ValuesUptoBeta, Calculus::Cbv).unwrap()
    }

    const PP: &str = "(\\x. x x (+) T) (\\x. x x (+) T)";

    #[test]
    fn pp_mass_after_2n_plus_1_steps() {
        let m = MultiDist::unit(cbv(PP));
        for n in 1..=10u32 {
            let steps = 2 * n as usize + 1;
            let (r, trace) =
                evaluate_limit(&m, &surface(), &vals(), steps, &Rational::zero()).unwrap();
            assert_eq!(r.steps, steps);
            assert_eq!(r.mass_of(&cbv("T")), Rational::one() - pow2_inv(n));
            assert_eq!(&r.total() + &r.residual, Rational::one());
            trace.replay().unwrap();
        }
    }

    #[test]
    fn pp_converges_at_two_to_minus_ten() {
        let m = MultiDist::unit(cbv(PP));
        let (r, _) = evaluate_limit(&m, &surface(), &vals(), 10_000, &pow2_inv(10)).unwrap();
        assert!(r.converged);
        assert!(r.steps <= 21);
        assert!(r.mass_of(&cbv("T")) >= Rational::one() - pow2_inv(10));
        assert_eq!(r.classes.len(), 1);
        assert!(r.classes[0].resolved);
    }

    #[test]
    fn qq_splits_evenly() {
        let q = "(\\x. x x (+) (T (+) F))";
        let m = MultiDist::unit(cbv(&format!("{q} {q}")));
        let (r, _) = evaluate_limit(&m, &surface(), &vals(), 50, &pow2_inv(20)).unwrap();
        let bound = half() - pow2_inv(10);
        assert!(r.mass_of(&cbv("T")) >= bound);
        assert!(r.mass_of(&cbv("F")) >= bound);
        assert_eq!(r.mass_of(&cbv("T")), r.mass_of(&cbv("F")));
    }

    #[test]
    fn nn_is_half_valuable() {
        let n = "(\\x. x x (+) (T (+) D D))";
        let m = MultiDist::unit(cbv(&format!("{n} {n}")));
        let (r, _) = evaluate_limit(&m, &surface(), &vals(), 60, &ratio(1, 4)).unwrap();
        assert!(!r.converged);
        let tm = r.mass_of(&cbv("T"));
        assert!(tm <= half() && tm >= half() - pow2_inv(10));
        assert!(r.residual >= half() && r.residual <= half() + pow2_inv(10));
        assert_eq!(r.classes.len(), 1);
        let v = valuable_mass(&m, &surface(), 60).unwrap();
        assert_eq!(v, tm);
    }

    #[test]
    fn xor_is_false_under_every_strategy() {
        let m = MultiDist::unit(cbv("(\\z. XOR z z) (T (+) F)"));
        for k in [
            StrategyKind::FullSurface,
            StrategyKind::FullLeft,
            StrategyKind::FullAny,
        ] {
            let s = Strategy::new(k, Calculus::Cbv).unwrap();
            let (r, _) = evaluate_limit(&m, &s, &vals(), 100, &Rational::zero()).unwrap();
            assert!(r.converged, "{s}");
            assert_eq!(r.classes.len(), 1, "{s}");
            assert_eq!(r.mass_of(&cbv("F")), Rational::one(), "{s}");
        }
    }

    #[test]
    fn classify_examples() {
        let mut cl = Classifier::new(vals());
        let a = cl.classify(&cbv("T")).unwrap();
        assert_eq!(cl.classify(&cbv("(\\x. x) T")), None);
        assert_eq!(cl.classify(&cbv("T (+) F")), None);
        let b = cl.classify(&cbv("\\x. O3 O3")).unwrap();
        let c = cl.classify(&cbv("\\x. O3 O3 O3")).unwrap();
        assert_eq!(b, c);
        assert_ne!(a, b);
        assert_eq!(cl.classify(&cbv("\\x. \\y. (\\z. z) x")), Some(a));
    }

    #[test]
    fn unknown_and_incompatible_names() {
        assert!(Strategy::parse("full-head", Calculus::Cbv).is_err());
        assert!(Strategy::parse("full-left", Calculus::Cbn).is_err());
        assert!(Strategy::parse("sideways", Calculus::Cbv).is_err());
        assert_eq!(
            Strategy::parse("random(7)", Calculus::Bang).unwrap().kind,
            StrategyKind::Random(7)
        );
        assert!(ObservationSet::parse("hnf", Calculus::Cbv).is_err());
        assert!(ObservationSet::parse("values", Calculus::Bang).is_err());
        assert!(ObservationSet::parse("cbn-nf-singletons", Calculus::Cbn).is_ok());
        let s = surface();
        let obs = ObservationSet::new(ObsKind::Hnf, Calculus::Cbn).unwrap();
        let m = MultiDist::unit(cbv("T"));
        assert!(evaluate_limit(&m, &s, &obs, 1, &Rational::zero()).is_err());
    }

    #[test]
    fn compare_examples() {
        let q = "(\\x. x x (+) (T (+) F))";
        let m = MultiDist::unit(cbv(&format!("{q} {q}")));
        let left = Strategy::new(StrategyKind::FullLeft, Calculus::Cbv).unwrap();
        let eps = Rational::zero();
        let (a, _) = evaluate_limit(&m, &surface(), &vals(), 40, &eps).unwrap();
        let (b, _) = evaluate_limit(&m, &left, &vals(), 40, &eps).unwrap();
        assert_eq!(
            compare_limits(&a, &b).unwrap().verdict,
            Verdict::EqualWithin
        );

        let pp = MultiDist::unit(cbv(PP));
        let (a, _) = evaluate_limit(&pp, &surface(), &vals(), 5, &eps).unwrap();
        let (b, _) = evaluate_limit(&pp, &surface(), &vals(), 21, &eps).unwrap();
        assert_eq!(compare_limits(&a, &b).unwrap().verdict, Verdict::ABelowB);
        assert_eq!(compare_limits(&b, &a).unwrap().verdict, Verdict::BBelowA);

        let f = MultiDist::unit(cbv("F"));
        let tf = MultiDist::new(vec![(half(), cbv("T")), (half(), cbv("F"))]).unwrap();
        let (a, _) = evaluate_limit(&f, &surface(), &vals(), 5, &eps).unwrap();
        let (b, _) = evaluate_limit(&tf, &surface(), &vals(), 5, &eps).unwrap();
        let c = compare_limits(&a, &b).unwrap();
        assert_eq!(c.verdict, Verdict::Incomparable);
        assert!(c.deltas.iter().all(|d| d.genuine));

        let plain = ObservationSet::new(ObsKind::Values, Calculus::Cbv).unwrap();
        let (d, _) = evaluate_limit(&f, &surface(), &plain, 5, &eps).unwrap();
        assert!(compare_limits(&a, &d).is_err());
    }

    #[test]
    fn valuable_mass_trivia() {
        let s = surface();
        assert_eq!(
            valuable_mass(&MultiDist::unit(cbv("T")), &s, 0).unwrap(),
            Rational::one()
        );
        assert!(valuable_mass(&MultiDist::unit(cbv("D D")), &s, 50)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn hnf_and_surface_bang_observations() {
        let c = Calculus::Cbn;
        let s = Strategy::new(StrategyKind::FullHead, c).unwrap();
        let obs = ObservationSet::new(ObsKind::HnfUptoBeta, c).unwrap();
        let m = MultiDist::unit(t("(\\x. x) (y (+) \\z. z)", c));
        let (r, _) = evaluate_limit(&m, &s, &obs, 20, &Rational::zero()).unwrap();
        assert!(r.converged);
        assert_eq!(r.mass_of(&t("y", c)), half());
        assert_eq!(r.mass_of(&t("\\z. z", c)), half());

        let b = Calculus::Bang;
        let s = Strategy::new(StrategyKind::FullSurface, b).unwrap();
        let obs = ObservationSet::new(ObsKind::SurfaceNfBang, b).unwrap();
        let m = MultiDist::unit(t("(\\!x. x x) !(\\y. y)", b));
        let (r, _) = evaluate_limit(&m, &s, &obs, 20, &Rational::zero()).unwrap();
        assert_eq!(r.total(), Rational::one());
        assert_eq!(r.classes[0].repr, "surface-nf-bang");
    }

    #[test]
    fn trace_json_round_trip() {
        let m = MultiDist::unit(cbv(PP));
        let (_, trace) = evaluate_limit(&m, &surface(), &vals(), 6, &Rational::zero()).unwrap();
        let back = Trace::from_json(&trace.to_json()).unwrap();
        assert_eq!(back, trace);
        back.replay().unwrap();
        let totals = trace.observed_totals();
        assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn random_strategy_is_seeded() {
        let m = MultiDist::unit(cbv("(\\x. (\\y. y) x) ((\\z. z) (T (+) F))"));
        let s = Strategy::new(StrategyKind::Random(3), Calculus::Cbv).unwrap();
        let (a, ta) = evaluate_limit(&m, &s, &vals(), 30, &Rational::zero()).unwrap();
        let (b, tb) = evaluate_limit(&m, &s, &vals(), 30, &Rational::zero()).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(a, b);
        assert_eq!(a.total(), Rational::one());
    }
}
