//! Executable checks of rewriting properties over enumerated terms:
//! joinability, local diagrams, standardization witnesses, parallel
//! reduction and the fixed counterexamples.

mod gen;
mod graph;
mod local;
mod parallel;
mod report;
mod standard;

pub use gen::{GenMode, TermGen};
pub use graph::{
    joinable, normalize, one_lifted_step, successors, JoinVerdict, JoinWitness, ReductionGraph,
    DEFAULT_BUDGET,
};
pub use local::{check_commute_pointwise, check_diamond_oplus, check_local_confluence};
pub use parallel::{
    check_parallel_oracle, check_postponement, deep_beta_reach, deep_par_lifted, deep_par_reduces,
    deep_par_set, par_reduces, par_set,
};
pub use report::{
    collect_suite, run_suite, simulation_report, Check, CheckReport, CheckVerdict, SIMULATION_DEPTH,
};
pub use standard::{
    check_left_standardization_fails, check_standardization_witness, counterexample,
    is_surface_trace, random_trace, regression_report, standardization_report,
    standardization_witness, strongly_normalizing, trace_from_positions, Counterexample,
    LeftFailure, StdVerdict, StdWitness,
};
