//! The resolved corpus: validated records with interned author and venue
//! identities, plus the intermediate record file that caches it.
//!
//! Record file format (line-delimited JSON, versioned):
//!   - line 1: header `{"format":"lens-records","version":1,...}` with year
//!     bounds, the source digest and the ingest counters;
//!   - one line per canonical venue: `{"t":"v","canonical_key":...,...}`;
//!   - one line per record: `{"t":"r","k":<dblp key>,"a":[names],"v":<venue
//!     key>,"y":<year>}` in admission order.
//!
//! Rebuilding a [`Corpus`] from the file is deterministic and yields the
//! same metrics as ingesting the XML again.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::areas::AreaAssignment;
use crate::error::{LensError, Result};
use crate::ids::{AuthorId, AuthorTable};
use crate::ingest::{
    open_xml, stream_parse, IngestOptions, IngestStats, ProceedingsMeta, RawPublication, RecordSink,
};
use crate::venues::{RegistryBuilder, VenueId, VenueRecord, VenueRegistry};

pub const RECORDS_FORMAT: &str = "lens-records";
pub const RECORDS_VERSION: u32 = 1;

/// One admitted, venue-resolved conference paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    /// The DBLP key; opaque downstream.
    pub record_id: String,
    /// Non-empty, no duplicates, document order otherwise.
    pub authors: Vec<AuthorId>,
    pub venue: VenueId,
    pub year: i32,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub ingest: IngestStats,
    /// Admitted by the parser but venue token resolved to nothing.
    pub dropped_unresolved: u64,
    /// Admitted but the DBLP key was already taken by an earlier record.
    pub dropped_duplicate_key: u64,
    /// Tokens the registry could not attach to any conference key.
    pub quarantined_venues: u64,
}

impl CorpusStats {
    /// Conservation: every parser-admitted record is either resolved into
    /// the corpus or counted dropped here.
    pub fn is_conserved(&self, resolved_records: usize) -> bool {
        self.ingest.admitted
            == resolved_records as u64 + self.dropped_unresolved + self.dropped_duplicate_key
    }
}

/// Fully resolved dataset, immutable after construction.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub authors: AuthorTable,
    pub registry: VenueRegistry,
    pub records: Vec<PublicationRecord>,
    pub stats: CorpusStats,
    pub min_year: i32,
    pub cutoff_year: i32,
    /// SHA-256 of the XML source, when known.
    pub source_digest: String,
}

struct IngestBuffers {
    raw: Vec<RawPublication>,
    registry: RegistryBuilder,
}

impl RecordSink for IngestBuffers {
    fn publication(&mut self, record: RawPublication) -> Result<()> {
        self.registry.add_publication(&record);
        self.raw.push(record);
        Ok(())
    }

    fn proceedings(&mut self, meta: ProceedingsMeta) -> Result<()> {
        self.registry.add_proceedings(&meta);
        Ok(())
    }
}

impl Corpus {
    /// Ingests an XML dump end to end: parse, build the registry, resolve
    /// venues, intern authors.
    pub fn ingest_xml(path: &Path, options: &IngestOptions) -> Result<Corpus> {
        let source_digest = sha256_file(path)?;
        let mut buffers = IngestBuffers {
            raw: Vec::new(),
            registry: RegistryBuilder::new(),
        };
        let reader = open_xml(path)?;
        let ingest_stats = stream_parse(reader, options, &mut buffers)?;
        Self::assemble(buffers, ingest_stats, options, source_digest)
    }

    /// Same pipeline over pre-parsed raw material; used by tests and by
    /// in-memory callers.
    pub fn from_raw(
        publications: Vec<RawPublication>,
        proceedings: &[ProceedingsMeta],
        ingest_stats: IngestStats,
        options: &IngestOptions,
    ) -> Result<Corpus> {
        let mut buffers = IngestBuffers {
            raw: Vec::new(),
            registry: RegistryBuilder::new(),
        };
        for meta in proceedings {
            buffers.registry.add_proceedings(meta);
        }
        for record in publications {
            buffers.registry.add_publication(&record);
            buffers.raw.push(record);
        }
        Self::assemble(buffers, ingest_stats, options, String::new())
    }

    fn assemble(
        buffers: IngestBuffers,
        ingest_stats: IngestStats,
        options: &IngestOptions,
        source_digest: String,
    ) -> Result<Corpus> {
        let IngestBuffers { raw, registry } = buffers;
        let (registry, quarantined) = registry.finish();

        // Duplicate keys: keep the first occurrence in document order.
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].dblp_key.cmp(&raw[b].dblp_key).then(a.cmp(&b)));
        let mut duplicate = vec![false; raw.len()];
        for pair in order.windows(2) {
            if raw[pair[0]].dblp_key == raw[pair[1]].dblp_key {
                duplicate[pair[1]] = true;
            }
        }

        let mut authors = AuthorTable::new();
        let mut records = Vec::with_capacity(raw.len());
        let mut stats = CorpusStats {
            ingest: ingest_stats,
            quarantined_venues: quarantined.len() as u64,
            ..CorpusStats::default()
        };

        for (i, publication) in raw.into_iter().enumerate() {
            if duplicate[i] {
                stats.dropped_duplicate_key += 1;
                continue;
            }
            let venue = registry
                .resolve(&publication.dblp_key)
                .or_else(|| {
                    publication
                        .crossref
                        .as_deref()
                        .and_then(|c| registry.resolve(c))
                })
                .or_else(|| registry.resolve(&publication.venue_token));
            let Some(venue) = venue else {
                stats.dropped_unresolved += 1;
                continue;
            };
            let mut ids: Vec<AuthorId> = Vec::with_capacity(publication.authors.len());
            for name in &publication.authors {
                let id = authors.intern_normalized(name.clone());
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            records.push(PublicationRecord {
                record_id: publication.dblp_key,
                authors: ids,
                venue,
                year: publication.year,
            });
        }

        debug_assert!(stats.is_conserved(records.len()));
        Ok(Corpus {
            authors,
            registry,
            records,
            stats,
            min_year: options.min_year,
            cutoff_year: options.cutoff_year,
            source_digest,
        })
    }

    /// Records whose venue belongs to the given bound set.
    pub fn records_in<'a>(
        &'a self,
        assignment: &'a AreaAssignment,
    ) -> impl Iterator<Item = &'a PublicationRecord> {
        self.records.iter().filter(|r| assignment.contains(r.venue))
    }

    /// Records of one area of a bound set.
    pub fn records_in_area<'a>(
        &'a self,
        assignment: &'a AreaAssignment,
        area: usize,
    ) -> impl Iterator<Item = &'a PublicationRecord> {
        self.records
            .iter()
            .filter(move |r| assignment.area_of(r.venue) == Some(area))
    }

    /// Records published at one venue.
    pub fn records_at(&self, venue: VenueId) -> impl Iterator<Item = &PublicationRecord> {
        self.records.iter().filter(move |r| r.venue == venue)
    }

    pub fn write_records_file(&self, path: &Path) -> Result<()> {
        let file = File::create(path)
            .map_err(|e| LensError::io_context(format!("creating {}", path.display()), e))?;
        let mut w = BufWriter::new(file);
        let header = RecordsHeader {
            format: RECORDS_FORMAT.to_string(),
            version: RECORDS_VERSION,
            min_year: self.min_year,
            cutoff_year: self.cutoff_year,
            source_digest: self.source_digest.clone(),
            stats: self.stats,
        };
        serde_json::to_writer(&mut w, &header).map_err(record_file_err(path))?;
        w.write_all(b"\n")?;
        for (_, venue) in self.registry.iter() {
            let line = FileLine::Venue(venue.clone());
            serde_json::to_writer(&mut w, &line).map_err(record_file_err(path))?;
            w.write_all(b"\n")?;
        }
        for record in &self.records {
            let line = FileLine::Record {
                k: record.record_id.clone(),
                a: record
                    .authors
                    .iter()
                    .map(|&id| self.authors.name(id).to_string())
                    .collect(),
                v: self.registry.canonical_key(record.venue).to_string(),
                y: record.year,
            };
            serde_json::to_writer(&mut w, &line).map_err(record_file_err(path))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_records_file(path: &Path) -> Result<Corpus> {
        let file = File::open(path)
            .map_err(|e| LensError::io_context(format!("opening {}", path.display()), e))?;
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| record_file_error(path, "empty file"))??;
        let header: RecordsHeader =
            serde_json::from_str(&header_line).map_err(record_file_err(path))?;
        if header.format != RECORDS_FORMAT {
            return Err(record_file_error(path, "not a lens records file"));
        }
        if header.version != RECORDS_VERSION {
            return Err(record_file_error(
                path,
                format!("unsupported version {}", header.version),
            ));
        }

        let mut venues: Vec<VenueRecord> = Vec::new();
        let mut authors = AuthorTable::new();
        let mut registry: Option<VenueRegistry> = None;
        let mut records: Vec<PublicationRecord> = Vec::new();
        let mut seen_keys: HashSet<String> = HashSet::new();

        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: FileLine = serde_json::from_str(&line).map_err(record_file_err(path))?;
            match parsed {
                FileLine::Venue(v) => {
                    if registry.is_some() {
                        return Err(record_file_error(path, "venue line after record lines"));
                    }
                    venues.push(v);
                }
                FileLine::Record { k, a, v, y } => {
                    let registry = registry.get_or_insert_with(|| {
                        VenueRegistry::from_records(std::mem::take(&mut venues))
                    });
                    let venue = registry
                        .by_key(&v)
                        .ok_or_else(|| record_file_error(path, format!("unknown venue key {v}")))?;
                    if !seen_keys.insert(k.clone()) {
                        return Err(record_file_error(path, format!("duplicate record key {k}")));
                    }
                    let mut ids = Vec::with_capacity(a.len());
                    for name in a {
                        let id = authors.intern_normalized(name);
                        if !ids.contains(&id) {
                            ids.push(id);
                        }
                    }
                    if ids.is_empty() {
                        return Err(record_file_error(
                            path,
                            format!("record {k} has no authors"),
                        ));
                    }
                    records.push(PublicationRecord {
                        record_id: k,
                        authors: ids,
                        venue,
                        year: y,
                    });
                }
            }
        }

        let registry =
            registry.unwrap_or_else(|| VenueRegistry::from_records(std::mem::take(&mut venues)));
        Ok(Corpus {
            authors,
            registry,
            records,
            stats: header.stats,
            min_year: header.min_year,
            cutoff_year: header.cutoff_year,
            source_digest: header.source_digest,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordsHeader {
    format: String,
    version: u32,
    min_year: i32,
    cutoff_year: i32,
    source_digest: String,
    stats: CorpusStats,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "t")]
enum FileLine {
    #[serde(rename = "v")]
    Venue(VenueRecord),
    #[serde(rename = "r")]
    Record {
        k: String,
        a: Vec<String>,
        v: String,
        y: i32,
    },
}

fn record_file_err(path: &Path) -> impl Fn(serde_json::Error) -> LensError + '_ {
    move |e| record_file_error(path, e.to_string())
}

fn record_file_error(path: &Path, message: impl Into<String>) -> LensError {
    LensError::RecordFile {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// SHA-256 of a file, streamed. Hex string.
pub fn sha256_file(path: &Path) -> Result<String> {
    let file = File::open(path)
        .map_err(|e| LensError::io_context(format!("opening {}", path.display()), e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

/// SHA-256 of a byte slice. Hex string.
pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex_string(&Sha256::digest(bytes))
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
