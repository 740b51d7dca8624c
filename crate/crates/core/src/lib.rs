//! Correlation measures, canonical decompositions and local-polytope analysis
//! for two-party, two-input, two-output nonsignaling boxes.

#![allow(clippy::needless_range_loop)]

pub mod audit;
pub mod decompose;
pub mod error;
pub mod input;
pub mod lp;
pub mod measures;
pub mod ns;
pub mod numfmt;
pub mod quantum;
pub mod sampling;
pub mod scenarios;

pub use decompose::{
    bell_canonical, full_canonical, local_content, local_membership, Decomposition, LpResult, Tag,
};
pub use error::{Error, Result, Violation};
pub use measures::MeasureReport;
pub use ns::{CorrelatorForm, LocalRelabel, Lro, NsBox, Probs, Vertex};
pub use quantum::{born_box, MeasurementSettings, TwoQubitState};
