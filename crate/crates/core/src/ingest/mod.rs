//! Streaming ingestion of the DBLP XML dump.
//!
//! The dump is a single multi-gigabyte XML file; parsing is a strict forward
//! pass with memory bounded by the largest record element, not by file size.
//! Records flow into a [`RecordSink`]; the parser itself keeps no record
//! state beyond the element currently being read.
//!
//! Only `inproceedings` elements become publications. `proceedings` elements
//! are routed to the sink separately: they carry the venue name history that
//! the venue registry merges, but they are not corpus members.

mod entities;
mod normalize;
mod xml;

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use entities::EntityTable;
pub use normalize::normalize_author_name;

use crate::error::{LensError, Result};

/// Default lower year bound: DBLP data before 1970 is too irregular to use.
pub const DEFAULT_MIN_YEAR: i32 = 1970;
/// Default upper year bound, mirroring the August 2009 snapshot the
/// reference tables were computed on.
pub const DEFAULT_CUTOFF_YEAR: i32 = 2009;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordKind {
    Inproceedings,
    Other,
}

/// One complete conference paper as parsed from the XML, venue still a raw
/// token. Delivered to the sink in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPublication {
    pub dblp_key: String,
    /// Normalized author names, in document order.
    pub authors: Vec<String>,
    pub title: String,
    pub year: i32,
    /// Booktitle when present, otherwise the crossref key.
    pub venue_token: String,
    pub crossref: Option<String>,
    pub record_kind: RecordKind,
}

/// Venue metadata from one `proceedings` volume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProceedingsMeta {
    pub dblp_key: String,
    /// Booktitle when present, otherwise the title.
    pub name: Option<String>,
    pub year: Option<i32>,
}

/// Counters for one ingest run.
///
/// Invariant: `total_seen` equals `admitted` plus the sum of all `dropped_*`
/// counters.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    /// Record elements encountered directly under the document root.
    pub total_seen: u64,
    pub admitted: u64,
    /// Inproceedings missing authors, title, year or any venue token.
    pub dropped_incomplete: u64,
    pub dropped_pre1970: u64,
    pub dropped_post_cutoff: u64,
    /// Non-inproceedings records (articles, books, proceedings, ...).
    pub dropped_kind: u64,
}

impl IngestStats {
    pub fn dropped_total(&self) -> u64 {
        self.dropped_incomplete
            + self.dropped_pre1970
            + self.dropped_post_cutoff
            + self.dropped_kind
    }

    pub fn is_consistent(&self) -> bool {
        self.total_seen == self.admitted + self.dropped_total()
    }

    /// Share of incomplete records among everything seen; the reference
    /// value for a 2009 snapshot is on the order of 5e-4.
    pub fn incomplete_ratio(&self) -> f64 {
        if self.total_seen == 0 {
            0.0
        } else {
            self.dropped_incomplete as f64 / self.total_seen as f64
        }
    }
}

/// Consumer of parsed records. Implementations decide what to retain; the
/// parser never buffers more than the current element.
pub trait RecordSink {
    fn publication(&mut self, record: RawPublication) -> Result<()>;

    fn proceedings(&mut self, _meta: ProceedingsMeta) -> Result<()> {
        Ok(())
    }
}

/// Collects everything into vectors. Convenient for tests and small inputs.
#[derive(Debug, Default)]
pub struct CollectSink {
    pub publications: Vec<RawPublication>,
    pub proceedings: Vec<ProceedingsMeta>,
}

impl RecordSink for CollectSink {
    fn publication(&mut self, record: RawPublication) -> Result<()> {
        self.publications.push(record);
        Ok(())
    }

    fn proceedings(&mut self, meta: ProceedingsMeta) -> Result<()> {
        self.proceedings.push(meta);
        Ok(())
    }
}

/// Sink that counts and discards. Used for memory-profiling the parser.
#[derive(Debug, Default)]
pub struct DiscardSink {
    pub publications: u64,
    pub proceedings: u64,
}

impl RecordSink for DiscardSink {
    fn publication(&mut self, _record: RawPublication) -> Result<()> {
        self.publications += 1;
        Ok(())
    }

    fn proceedings(&mut self, _meta: ProceedingsMeta) -> Result<()> {
        self.proceedings += 1;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub min_year: i32,
    pub cutoff_year: i32,
    pub entities: EntityTable,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            min_year: DEFAULT_MIN_YEAR,
            cutoff_year: DEFAULT_CUTOFF_YEAR,
            entities: EntityTable::new(),
        }
    }
}

impl IngestOptions {
    pub fn with_cutoff(cutoff_year: i32) -> Self {
        Self {
            cutoff_year,
            ..Self::default()
        }
    }

    pub fn with_dtd(mut self, dtd_path: &Path) -> Result<Self> {
        self.entities = EntityTable::from_dtd_file(dtd_path)?;
        Ok(self)
    }
}

/// Single forward pass over an XML byte stream. See module docs for the
/// filtering rules; returns the counters for the run.
pub fn stream_parse<R: BufRead, S: RecordSink>(
    reader: R,
    options: &IngestOptions,
    sink: &mut S,
) -> Result<IngestStats> {
    xml::parse(reader, options, sink)
}

/// Like [`stream_parse`] but opens `path`, transparently decoding gzip
/// (sniffed from the magic bytes, not the file name).
pub fn stream_parse_file<S: RecordSink>(
    path: &Path,
    options: &IngestOptions,
    sink: &mut S,
) -> Result<IngestStats> {
    let reader = open_xml(path)?;
    stream_parse(reader, options, sink)
}

/// Opens an XML file, wrapping it in a gzip decoder when the magic bytes
/// say so.
pub fn open_xml(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path)
        .map_err(|e| LensError::io_context(format!("opening {}", path.display()), e))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    use std::io::Seek;
    file.seek(std::io::SeekFrom::Start(0))?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::with_capacity(
            1 << 16,
            flate2::read::GzDecoder::new(BufReader::with_capacity(1 << 16, file)),
        )))
    } else {
        Ok(Box::new(BufReader::with_capacity(1 << 16, file)))
    }
}
