//! IO and orchestration companion for [`mediv_core`]: CSV ingestion with
//! quantile binarization, a parallel Monte Carlo driver, and text/CSV report
//! rendering. The `mediv` binary in this crate exposes all of it on the
//! command line.

pub mod ingest;
pub mod montecarlo;
pub mod report;
