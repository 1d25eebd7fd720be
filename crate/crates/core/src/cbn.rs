//! The call-by-name calculus: β anywhere, ⊕ only on the surface spine.

use crate::error::Result;
use crate::multidist::MultiDist;
use crate::redex::{self, Redex, RedexClass};
use crate::syntax::{Calculus, Term};

pub fn cbn_redexes(term: &Term) -> Vec<Redex> {
    redex::redexes(term, Calculus::Cbn)
}

pub fn cbn_step(term: &Term, r: &Redex) -> Result<MultiDist> {
    redex::step(term, r, Calculus::Cbn)
}

/// No head redex.
pub fn is_head_nf(term: &Term) -> bool {
    let head = !redex::has_redex(term, Calculus::Cbn, RedexClass::Head);
    debug_assert_eq!(head, is_surface_nf(term));
    head
}

pub fn is_surface_nf(term: &Term) -> bool {
    !redex::has_redex(term, Calculus::Cbn, RedexClass::Surface)
}
