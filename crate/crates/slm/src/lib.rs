//! Files, command line and parallel experiment runners around `slm-core`.
//!
//! * [`schema`] and [`ingest`]: schema files and CSV ingestion with one-hot encoding
//!   and mean imputation.
//! * [`model_file`]: versioned JSON model files.
//! * [`table`]: CSV tables written atomically.
//! * [`lab`]: replication runner on a thread pool sized by `SLM_THREADS`.
//! * [`cli`]: the `slm` binary.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod lab;
pub mod model_file;
pub mod schema;
pub mod table;

pub use error::DataError;
pub use ingest::{load_dataset, load_dataset_with, Encoding, Ingested, LoadOptions};
pub use model_file::{load_model, save_model};
pub use schema::{auto_schema, parse_schema, ColumnKind, ColumnSchema};
pub use table::{emit_table, Table};
