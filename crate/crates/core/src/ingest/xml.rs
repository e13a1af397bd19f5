//! The event loop behind [`stream_parse`](super::stream_parse).
//!
//! Depth layout: the `<dblp>` root sits at depth 1, record elements at
//! depth 2, their fields at depth 3. Field text may contain inline markup
//! (`<i>`, `<sub>`, ...); it is flattened into the field string.

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{LensError, Result};

use super::normalize::normalize_author_name;
use super::{
    EntityTable, IngestOptions, IngestStats, ProceedingsMeta, RawPublication, RecordKind,
    RecordSink,
};

const RECORD_DEPTH: usize = 2;
const FIELD_DEPTH: usize = 3;

#[derive(Default)]
struct RecordCapture {
    element: String,
    key: Option<String>,
    authors: Vec<String>,
    saw_empty_author: bool,
    title: Option<String>,
    year: Option<i32>,
    booktitle: Option<String>,
    crossref: Option<String>,
}

struct FieldCapture {
    name: String,
    text: String,
}

pub(super) fn parse<R: BufRead, S: RecordSink>(
    reader: R,
    options: &IngestOptions,
    sink: &mut S,
) -> Result<IngestStats> {
    let mut xml = Reader::from_reader(reader);
    let mut entities = options.entities.clone();
    let mut stats = IngestStats::default();

    let mut buf = Vec::new();
    let mut depth: usize = 0;
    let mut record: Option<RecordCapture> = None;
    let mut field: Option<FieldCapture> = None;

    loop {
        buf.clear();
        let position = xml.buffer_position();
        let event = xml
            .read_event_into(&mut buf)
            .map_err(|e| syntax(position, e))?;
        match event {
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) => {}
            Event::DocType(t) => {
                // Internal DTD subsets may declare entities inline.
                let text = t.decode().map_err(|e| syntax(position, e))?;
                entities.parse_declarations(&text);
            }
            Event::Start(e) => {
                depth += 1;
                handle_open(
                    &xml,
                    &e,
                    depth,
                    &entities,
                    &mut stats,
                    &mut record,
                    &mut field,
                    position,
                )?;
            }
            Event::Empty(e) => {
                depth += 1;
                handle_open(
                    &xml,
                    &e,
                    depth,
                    &entities,
                    &mut stats,
                    &mut record,
                    &mut field,
                    position,
                )?;
                close_element(
                    &mut depth,
                    &mut record,
                    &mut field,
                    &mut stats,
                    options,
                    sink,
                )?;
            }
            Event::End(_) => {
                close_element(
                    &mut depth,
                    &mut record,
                    &mut field,
                    &mut stats,
                    options,
                    sink,
                )?;
            }
            Event::Text(t) => {
                if let Some(f) = field.as_mut() {
                    f.text
                        .push_str(&t.decode().map_err(|e| syntax(position, e))?);
                }
            }
            Event::CData(t) => {
                if let Some(f) = field.as_mut() {
                    f.text
                        .push_str(&t.decode().map_err(|e| syntax(position, e))?);
                }
            }
            Event::GeneralRef(r) => {
                // Every reference must resolve, captured or not.
                let resolved =
                    if let Some(ch) = r.resolve_char_ref().map_err(|e| syntax(position, e))? {
                        ch.to_string()
                    } else {
                        let name = r.decode().map_err(|e| syntax(position, e))?;
                        match entities.resolve(&name) {
                            Some(v) => v.to_string(),
                            None => {
                                return Err(LensError::UnresolvedEntity {
                                    name: name.into_owned(),
                                    offset: position,
                                })
                            }
                        }
                    };
                if let Some(f) = field.as_mut() {
                    f.text.push_str(&resolved);
                }
            }
            Event::Eof => {
                if depth != 0 {
                    return Err(LensError::XmlSyntax {
                        offset: xml.buffer_position(),
                        message: "unexpected end of file inside an element".into(),
                    });
                }
                break;
            }
        }
    }

    debug_assert!(stats.is_consistent());
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn handle_open<R>(
    xml: &Reader<R>,
    e: &BytesStart<'_>,
    depth: usize,
    entities: &EntityTable,
    stats: &mut IngestStats,
    record: &mut Option<RecordCapture>,
    field: &mut Option<FieldCapture>,
    position: u64,
) -> Result<()> {
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    if depth == RECORD_DEPTH {
        stats.total_seen += 1;
        let mut capture = RecordCapture {
            element: name,
            ..RecordCapture::default()
        };
        for attr in e.attributes() {
            let attr = attr.map_err(|err| syntax(position, err))?;
            if attr.key.as_ref() == b"key" {
                let value = attr
                    .decode_and_unescape_value_with(xml.decoder(), |ent| entities.resolve(ent))
                    .map_err(|err| syntax(position, err))?;
                capture.key = Some(value.into_owned());
            }
        }
        *record = Some(capture);
    } else if depth == FIELD_DEPTH && record.is_some() {
        *field = Some(FieldCapture {
            name,
            text: String::new(),
        });
    }
    // Deeper tags are inline markup; their text keeps flowing into `field`.
    Ok(())
}

fn close_element<S: RecordSink>(
    depth: &mut usize,
    record: &mut Option<RecordCapture>,
    field: &mut Option<FieldCapture>,
    stats: &mut IngestStats,
    options: &IngestOptions,
    sink: &mut S,
) -> Result<()> {
    match *depth {
        FIELD_DEPTH => {
            if let (Some(f), Some(r)) = (field.take(), record.as_mut()) {
                commit_field(r, f);
            }
        }
        RECORD_DEPTH => {
            if let Some(r) = record.take() {
                finish_record(r, stats, options, sink)?;
            }
        }
        _ => {}
    }
    *depth = depth.saturating_sub(1);
    Ok(())
}

fn commit_field(record: &mut RecordCapture, field: FieldCapture) {
    let text = field.text;
    match field.name.as_str() {
        "author" => match normalize_author_name(&text) {
            Some(name) => record.authors.push(name),
            None => record.saw_empty_author = true,
        },
        "title" => {
            let t = text.trim();
            if !t.is_empty() {
                record.title = Some(t.to_string());
            }
        }
        "year" => {
            record.year = text.trim().parse::<i32>().ok();
        }
        "booktitle" => {
            let t = text.trim();
            if !t.is_empty() {
                record.booktitle = Some(t.to_string());
            }
        }
        "crossref" => {
            let t = text.trim();
            if !t.is_empty() {
                record.crossref = Some(t.to_string());
            }
        }
        _ => {}
    }
}

fn finish_record<S: RecordSink>(
    record: RecordCapture,
    stats: &mut IngestStats,
    options: &IngestOptions,
    sink: &mut S,
) -> Result<()> {
    match record.element.as_str() {
        "inproceedings" => {}
        "proceedings" => {
            stats.dropped_kind += 1;
            if let Some(key) = record.key {
                sink.proceedings(ProceedingsMeta {
                    dblp_key: key,
                    name: record.booktitle.or(record.title),
                    year: record.year,
                })?;
            }
            return Ok(());
        }
        _ => {
            stats.dropped_kind += 1;
            return Ok(());
        }
    }

    let complete = record.key.is_some()
        && !record.authors.is_empty()
        && !record.saw_empty_author
        && record.title.is_some()
        && record.year.is_some()
        && (record.booktitle.is_some() || record.crossref.is_some());
    if !complete {
        stats.dropped_incomplete += 1;
        return Ok(());
    }

    let year = record.year.unwrap();
    if year < options.min_year {
        stats.dropped_pre1970 += 1;
        return Ok(());
    }
    if year > options.cutoff_year {
        stats.dropped_post_cutoff += 1;
        return Ok(());
    }

    let venue_token = record
        .booktitle
        .clone()
        .or_else(|| record.crossref.clone())
        .unwrap();
    sink.publication(RawPublication {
        dblp_key: record.key.unwrap(),
        authors: record.authors,
        title: record.title.unwrap(),
        year,
        venue_token,
        crossref: record.crossref,
        record_kind: RecordKind::Inproceedings,
    })?;
    stats.admitted += 1;
    Ok(())
}

fn syntax(offset: u64, err: impl std::fmt::Display) -> LensError {
    LensError::XmlSyntax {
        offset,
        message: err.to_string(),
    }
}
