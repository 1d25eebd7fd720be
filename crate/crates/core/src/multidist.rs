//! Multidistributions, their lifted reduction, and projection to
//! distributions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::redex::{self, Redex};
use crate::syntax::{parse_with, Calculus, Canon, ParseOptions, Term};

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// `2^-k`.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Formats as `num/den`, always with a denominator.
pub fn fmt_ratio(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` or a bare integer; rejects negatives and zero denominators.
pub fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidProbability(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    if !digits(n) || !digits(d) {
        return Err(bad());
    }
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// A finite multiset of weighted terms. Entries keep insertion order;
/// equality is multiset equality up to α.
#[derive(Clone, Debug, Default)]
pub struct MultiDist {
    entries: Vec<(Rational, Term)>,
}

/// Canonical multiset key: entries sorted by canonical term then probability.
pub type MdKey = Vec<(Canon, Rational)>;

impl MultiDist {
    pub fn new(entries: Vec<(Rational, Term)>) -> Result<MultiDist> {
        for (p, _) in &entries {
            if !p.is_positive() {
                return Err(Error::InvalidProbability(fmt_ratio(p)));
            }
        }
        let m = MultiDist { entries };
        let total = m.mass();
        if total > Rational::one() {
            return Err(Error::MassOverflow(fmt_ratio(&total)));
        }
        Ok(m)
    }

    pub fn unit(t: Term) -> MultiDist {
        MultiDist {
            entries: vec![(Rational::one(), t)],
        }
    }

    pub fn empty() -> MultiDist {
        MultiDist::default()
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<(Rational, Term)>) -> MultiDist {
        MultiDist { entries }
    }

    pub fn entries(&self) -> &[(Rational, Term)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(Rational, Term)> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn mass(&self) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (p, _)| acc + p)
    }

    pub fn key(&self) -> MdKey {
        let mut k: MdKey = self
            .entries
            .iter()
            .map(|(p, t)| (t.canonical(), p.clone()))
            .collect();
        k.sort();
        k
    }

    /// Sum of the sizes of all entry terms.
    pub fn total_size(&self) -> usize {
        self.entries.iter().map(|(_, t)| t.size()).sum()
    }

    /// Merges α-equal terms.
    pub fn associated_distribution(&self) -> Distribution<Term> {
        let mut d = Distribution::new();
        for (p, t) in &self.entries {
            d.add(t.clone(), p.clone());
        }
        d
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MdJson::from(self)).expect("multidistribution serializes")
    }

    pub fn from_json(v: &serde_json::Value, calculus: Calculus) -> Result<MultiDist> {
        let raw: MdJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Json(e.to_string()))?;
        raw.into_multidist(calculus)
    }
}

/// `q · m`. Panics unless `0 < q <= 1`.
pub fn md_scale(q: &Rational, m: &MultiDist) -> MultiDist {
    assert!(
        q.is_positive() && *q <= Rational::one(),
        "scale factor {} outside (0, 1]",
        fmt_ratio(q)
    );
    MultiDist {
        entries: m.entries.iter().map(|(p, t)| (p * q, t.clone())).collect(),
    }
}

/// Concatenation; fails if the total mass exceeds 1.
pub fn md_sum(a: &MultiDist, b: &MultiDist) -> Result<MultiDist> {
    let mut entries = a.entries.clone();
    entries.extend(b.entries.iter().cloned());
    MultiDist::new(entries)
}

impl PartialEq for MultiDist {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.key() == other.key()
    }
}

impl Eq for MultiDist {}

impl fmt::Display for MultiDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (p, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {}", fmt_ratio(p), t)?;
        }
        f.write_str("]")
    }
}

#[derive(Serialize, Deserialize)]
struct MdJson {
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    p: String,
    term: String,
}

impl From<&MultiDist> for MdJson {
    fn from(m: &MultiDist) -> Self {
        MdJson {
            entries: m
                .entries
                .iter()
                .map(|(p, t)| EntryJson {
                    p: fmt_ratio(p),
                    term: t.to_string(),
                })
                .collect(),
        }
    }
}

impl MdJson {
    fn into_multidist(self, calculus: Calculus) -> Result<MultiDist> {
        let opts = ParseOptions::default();
        let entries = self
            .entries
            .into_iter()
            .map(|e| Ok((parse_ratio(&e.p)?, parse_with(&e.term, calculus, opts)?)))
            .collect::<Result<Vec<_>>>()?;
        MultiDist::new(entries)
    }
}

/// A finite map from keys to positive masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution<K: Ord> {
    mass: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Distribution<K> {
    fn default() -> Self {
        Distribution {
            mass: BTreeMap::new(),
        }
    }
}

impl<K: Ord> Distribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds mass to a key; zero additions are ignored.
    pub fn add(&mut self, k: K, p: Rational) {
        if p.is_zero() {
            return;
        }
        *self.mass.entry(k).or_insert_with(Rational::zero) += p;
    }

    pub fn get(&self, k: &K) -> Rational {
        self.mass.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.mass.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.mass.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.mass.keys()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }
}

impl<K: Ord> FromIterator<(K, Rational)> for Distribution<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut d = Distribution::new();
        for (k, p) in iter {
            d.add(k, p);
        }
        d
    }
}

/// Per-entry decision of a lifted step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Keep,
    Reduce(Redex),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LiftChoice(pub Vec<Decision>);

impl LiftChoice {
    pub fn keep_all(n: usize) -> LiftChoice {
        LiftChoice(vec![Decision::Keep; n])
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|d| *d == Decision::Keep)
    }
}

/// One lifted step: kept entries pass through, reduced entries are replaced
/// by their scaled one-step result.
pub fn lift_step(m: &MultiDist, choice: &LiftChoice, calculus: Calculus) -> Result<MultiDist> {
    if choice.0.len() != m.len() {
        return Err(Error::ChoiceArity {
            expected: m.len(),
            got: choice.0.len(),
        });
    }
    let mut out = Vec::with_capacity(m.len() + 1);
    for (i, ((p, t), d)) in m.entries.iter().zip(&choice.0).enumerate() {
        match d {
            Decision::Keep => out.push((p.clone(), t.clone())),
            Decision::Reduce(r) => {
                let res = redex::step(t, r, calculus).map_err(|e| match e {
                    Error::InvalidRedex { detail, .. } => Error::InvalidRedex {
                        entry: Some(i),
                        detail,
                    },
                    other => other,
                })?;
                out.extend(res.entries.into_iter().map(|(q, s)| (p * q, s)));
            }
        }
    }
    Ok(MultiDist { entries: out })
}

/// The full lifting: every entry for which `select` yields a redex is
/// reduced with it; the others are kept.
pub fn full_step(
    m: &MultiDist,
    select: &mut dyn FnMut(&Term) -> Option<Redex>,
    calculus: Calculus,
) -> Result<(MultiDist, LiftChoice)> {
    let choice = LiftChoice(
        m.entries
            .iter()
            .map(|(_, t)| match select(t) {
                Some(r) => Decision::Reduce(r),
                None => Decision::Keep,
            })
            .collect(),
    );
    let next = lift_step(m, &choice, calculus)?;
    Ok((next, choice))
}

/// Replaces entry `i` by its one-step result under `r`.
pub fn single_entry_step(
    m: &MultiDist,
    i: usize,
    r: &Redex,
    calculus: Calculus,
) -> Result<MultiDist> {
    let mut choice = LiftChoice::keep_all(m.len());
    choice.0[i] = Decision::Reduce(r.clone());
    lift_step(m, &choice, calculus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s, Calculus::Cbv).unwrap()
    }

    fn md(v: &[(i64, i64, &str)]) -> MultiDist {
        MultiDist::new(v.iter().map(|(n, d, s)| (ratio(*n, *d), t(s))).collect()).unwrap()
    }

    #[test]
    fn scale() {
        assert_eq!(md_scale(&half(), &md(&[(1, 1, "x")])), md(&[(1, 2, "x")]));
        assert_eq!(
            md_scale(&half(), &md(&[(1, 2, "x"), (1, 2, "y")])),
            md(&[(1, 4, "x"), (1, 4, "y")])
        );
        let m = md(&[(1, 3, "x"), (1, 3, "\\y. y")]);
        assert_eq!(md_scale(&Rational::one(), &m), m);
    }

    #[test]
    #[should_panic]
    fn scale_rejects_zero() {
        md_scale(&Rational::zero(), &md(&[(1, 1, "x")]));
    }

    #[test]
    fn sum() {
        let s = md_sum(&md(&[(1, 2, "x")]), &md(&[(1, 2, "x")])).unwrap();
        assert_eq!(s.len(), 2);
        assert_ne!(s, md(&[(1, 1, "x")]));
        let m = md(&[(1, 2, "y")]);
        assert_eq!(md_sum(&MultiDist::empty(), &m).unwrap(), m);
        assert!(matches!(
            md_sum(&md(&[(1, 2, "x")]), &md(&[(3, 4, "y")])),
            Err(Error::MassOverflow(ref s)) if s == "5/4"
        ));
    }

    #[test]
    fn distribution_merges_alpha_equal_terms() {
        let d = md(&[(1, 2, "a"), (1, 2, "a")]).associated_distribution();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(&t("a")), Rational::one());
        let d = md(&[(1, 2, "\\x.x"), (1, 4, "\\y.y"), (1, 4, "z")]).associated_distribution();
        assert_eq!(d.get(&t("\\q. q")), ratio(3, 4));
        assert_eq!(d.get(&t("z")), ratio(1, 4));
        let d = md(&[(1, 1, "x y")]).associated_distribution();
        assert_eq!(d.get(&t("x y")), Rational::one());
    }

    #[test]
    fn equality_is_multiset_equality() {
        assert_eq!(
            md(&[(1, 2, "x"), (1, 4, "y")]),
            md(&[(1, 4, "y"), (1, 2, "x")])
        );
        assert_eq!(md(&[(1, 2, "\\a. a")]), md(&[(1, 2, "\\b. b")]));
        assert_ne!(
            md(&[(1, 2, "x"), (1, 4, "y")]),
            md(&[(1, 4, "x"), (1, 2, "y")])
        );
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(MultiDist::new(vec![(Rational::zero(), t("x"))]).is_err());
        assert!(MultiDist::new(vec![(ratio(2, 1), t("x"))]).is_err());
    }

    #[test]
    fn ratio_text() {
        assert_eq!(parse_ratio("1/2").unwrap(), half());
        assert_eq!(parse_ratio(" 3 ").unwrap(), ratio(3, 1));
        assert_eq!(fmt_ratio(&ratio(2, 4)), "1/2");
        assert_eq!(fmt_ratio(&Rational::one()), "1/1");
        assert!(parse_ratio("-1/2").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("0.5").is_err());
        assert_eq!(pow2_inv(10), ratio(1, 1024));
    }

    #[test]
    fn json_round_trip() {
        let m = md(&[(1, 2, "\\x. x"), (1, 4, "y (+) z")]);
        let j = m.to_json();
        assert_eq!(
            j,
            serde_json::json!({"entries":[{"p":"1/2","term":"\\x. x"},{"p":"1/4","term":"y (+) z"}]})
        );
        let back = MultiDist::from_json(&j, Calculus::Cbv).unwrap();
        assert_eq!(back, m);
        assert!(MultiDist::from_json(
            &serde_json::json!({"entries":[{"p":"1","term":"x"},{"p":"1","term":"y"}]}),
            Calculus::Cbv
        )
        .is_err());
    }

    #[test]
    fn display() {
        assert_eq!(
            md(&[(1, 2, "x"), (1, 2, "\\y. y")]).to_string(),
            "[1/2 x, 1/2 \\y. y]"
        );
    }
}
