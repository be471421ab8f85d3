//! Genealogy data mining toolkit.
//!
//! Pipeline: parse profile sources ([`ingest`]) into records ([`profile`]),
//! build and clean the kinship multigraph ([`graph`]), extract per-vertex
//! lifespan features ([`features`]), slice named datasets ([`datasets`]), and
//! run the analyses — cohort statistics ([`stats`]), simple/multiple/stepwise
//! regression ([`regress`]), and classifiers with cross-validation
//! ([`learn`]). The [`synth`] module generates populations with known ground
//! truth so every analysis has an oracle.

pub mod country;
pub mod datasets;
pub mod date;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod learn;
pub mod profile;
pub mod regress;
pub mod stats;
pub mod synth;
