//! Benchmark harness behind the `expfam` binary: compositional CSV
//! ingestion, the Dirichlet and Aitchison simulation studies, single-dataset
//! fits, and machine-readable reports.

pub mod config;
pub mod ingest;
pub mod report;
pub mod study;
