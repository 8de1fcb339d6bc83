//! Bayes factors for one-factor repeated-measures ANOVA designs.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the numeric side of the
//! toolkit:
//!
//! * [`anova`]: sums-of-squares decomposition, F statistic and its p-value.
//! * [`special`]: regularized incomplete beta function and the F distribution.
//! * [`bayes`]: BIC-approximated Bayes factors from an F statistic (`minimal`),
//!   from a between-subjects F, or from the SST/SSA/SSB triple, and posterior
//!   model probabilities.
//! * [`simulation`]: the mixed-model data generator and the Monte Carlo grid
//!   comparing the two repeated-measures methods.
//! * [`apa`]: a scanner for APA-style `F(df1, df2) = x, p = y` reports.
//!
//! File formats, the CLI and parallel grid execution live in the `rmbayes`
//! companion crate.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used deliberately so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod anova;
pub mod apa;
pub mod bayes;
mod error;
pub mod simulation;
pub mod special;
mod sum;

pub use anova::{rm_anova, AnovaTable, DataMatrix, DesignSpec};
pub use apa::{infer_rm_design, parse_reports, Relation, ReportedStat};
pub use bayes::{
    bf01_between, bf01_minimal_rm, choose_model, delta_bic_nathoo, effective_sample_size,
    posterior_probs, Choice, EvidenceResult, Method, SummaryStats,
};
pub use error::{Error, InferenceError};
pub use simulation::{
    generate_dataset, make_profile, profile_for_rep, run_cell, run_grid, CellResult, FiveNumber,
    GridReport, GridSpec, RepRecord, SimulationConfig, Spacing, TreatmentProfile,
};
pub use special::{f_cdf, f_sf, reg_inc_beta};
