//! Probabilistic λ-calculi over multidistributions.
//!
//! Three calculi share one [`Term`] type: call-by-value ([`cbv`]),
//! call-by-name ([`cbn`]) and a linear calculus with `!` ([`bang`]).
//! Reduction acts on [`MultiDist`]s through lifted steps; [`asymptotics`]
//! computes limit distributions, [`translate`] maps between calculi and
//! [`oracle`] checks rewriting properties on enumerated terms.
//!
//! ```
//! use lop_core::asymptotics::{default_epsilon, evaluate_limit, ObservationSet, Strategy};
//! use lop_core::prelude::Prelude;
//! use lop_core::{parse, Calculus, MultiDist};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let c = Calculus::Cbv;
//! let t = Prelude::standard().expand(&parse(r"(\z. XOR z z) (T (+) F)", c)?);
//! let strategy = Strategy::parse("full-left", c)?;
//! let obs = ObservationSet::parse("values-upto-beta", c)?;
//! let (limit, _trace) = evaluate_limit(&MultiDist::unit(t), &strategy, &obs, 100, &default_epsilon())?;
//! assert_eq!(limit.classes[0].repr, r"\x. \y. y");
//! # Ok(())
//! # }
//! ```

pub mod asymptotics;
pub mod bang;
pub mod cbn;
pub mod cbv;
pub mod error;
pub mod multidist;
pub mod oracle;
pub mod prelude;
pub mod redex;
pub mod syntax;
pub mod translate;

pub use error::{Error, Result};
pub use multidist::{Decision, Distribution, LiftChoice, MultiDist, Rational};
pub use redex::{Flags, Redex, RedexClass, RedexKind};
pub use syntax::{parse, Calculus, Position, Step, Term};
