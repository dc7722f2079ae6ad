//! Batch front end for the section laboratory: manifest parsing, job
//! execution, reports and corpus generation.

pub mod corpus;
pub mod gxf;
pub mod jobs;
pub mod report;

pub use corpus::{generate_corpus, generate_corpus_text, CorpusError};
pub use gxf::{parse_manifest, serialize, Manifest, ManifestError};
pub use jobs::{run_all, run_job, RunConfig};
pub use report::{render_all, JobStatus, Report};

/// Process exit code for a finished run: 2 if an equivalence check failed,
/// 1 if any job could not run, 0 otherwise.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| r.status == JobStatus::EquivalenceFailed) {
        2
    } else if reports.iter().any(|r| matches!(r.status, JobStatus::Error(_))) {
        1
    } else {
        0
    }
}
