//! Bibliometric analytics over the DBLP XML dump.
//!
//! The crate streams the dump into a validated conference-paper corpus,
//! merges renamed venues under canonical identities, partitions venues
//! into topical area sets, builds co-authorship graphs, and computes
//! community metrics: career lengths, area transitions, productivity
//! periods, venue-mix distributions, publication growth rates,
//! collaboration statistics and population stability. The `lens` binary
//! fronts the pipeline; reports are deterministic CSV (optionally JSON)
//! with a provenance block.

pub mod areas;
pub mod careers;
pub mod config;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod ids;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod venues;

pub use error::{LensError, Result};
pub use ids::{AuthorId, AuthorTable};
