//! Parser behavior on fixtures: filtering rules, fatal errors, entity
//! resolution, determinism, transport decoding.

use std::io::Write;
use std::path::PathBuf;

use lens_core::ingest::{
    normalize_author_name, stream_parse, stream_parse_file, CollectSink, EntityTable,
    IngestOptions, RawPublication,
};
use lens_core::LensError;
use proptest::prelude::*;

fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn parse_str(xml: &str, options: &IngestOptions) -> (lens_core::ingest::IngestStats, CollectSink) {
    let mut sink = CollectSink::default();
    let stats = stream_parse(xml.as_bytes(), options, &mut sink).expect("parse failed");
    (stats, sink)
}

fn wrap(records: &str) -> String {
    format!("<?xml version=\"1.0\"?>\n<dblp>\n{records}\n</dblp>\n")
}

const COMPLETE_A: &str = r#"<inproceedings key="conf/x/A01"><author>Ann A</author><title>T1.</title><year>2001</year><booktitle>X</booktitle></inproceedings>"#;
const COMPLETE_B: &str = r#"<inproceedings key="conf/x/B02"><author>Ben B</author><author>Cal C</author><title>T2.</title><year>2002</year><booktitle>X</booktitle></inproceedings>"#;
const MISSING_YEAR: &str = r#"<inproceedings key="conf/x/NoYear"><author>Dee D</author><title>T3.</title><booktitle>X</booktitle></inproceedings>"#;
const ARTICLE: &str = r#"<article key="journals/j/E03"><author>Eve E</author><title>T4.</title><year>2003</year><journal>J</journal></article>"#;

#[test]
fn incomplete_records_are_counted_not_fatal() {
    let xml = wrap(&format!("{COMPLETE_A}\n{COMPLETE_B}\n{MISSING_YEAR}"));
    let (stats, sink) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(stats.admitted, 2);
    assert_eq!(stats.dropped_incomplete, 1);
    assert_eq!(stats.total_seen, 3);
    assert!(stats.is_consistent());
    assert_eq!(sink.publications.len(), 2);
}

#[test]
fn kind_filter_drops_articles() {
    let xml = wrap(&format!("{ARTICLE}\n{COMPLETE_A}"));
    let (stats, _) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(stats.admitted, 1);
    assert_eq!(stats.dropped_kind, 1);
}

#[test]
fn year_bounds_are_enforced() {
    let early = r#"<inproceedings key="conf/x/Old"><author>O</author><title>T.</title><year>1969</year><booktitle>X</booktitle></inproceedings>"#;
    let late = r#"<inproceedings key="conf/x/New"><author>N</author><title>T.</title><year>2010</year><booktitle>X</booktitle></inproceedings>"#;
    let xml = wrap(&format!("{early}\n{late}\n{COMPLETE_A}"));
    let (stats, sink) = parse_str(&xml, &IngestOptions::with_cutoff(2009));
    assert_eq!(stats.admitted, 1);
    assert_eq!(stats.dropped_pre1970, 1);
    assert_eq!(stats.dropped_post_cutoff, 1);
    assert_eq!(sink.publications[0].year, 2001);
}

#[test]
fn admitted_sequence_is_deterministic_and_in_document_order() {
    let xml = wrap(&format!("{COMPLETE_B}\n{COMPLETE_A}"));
    let (_, first) = parse_str(&xml, &IngestOptions::default());
    let (_, second) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(first.publications, second.publications);
    let keys: Vec<&str> = first
        .publications
        .iter()
        .map(|p| p.dblp_key.as_str())
        .collect();
    assert_eq!(keys, vec!["conf/x/B02", "conf/x/A01"]);
}

#[test]
fn admitted_count_invariant_under_whitespace_perturbation() {
    let xml = wrap(&format!("{COMPLETE_A}\n{COMPLETE_B}"));
    let perturbed = xml
        .replace("<inproceedings", "\n\n   <inproceedings")
        .replace("</dblp>", "\n\t </dblp>");
    let (a, sink_a) = parse_str(&xml, &IngestOptions::default());
    let (b, sink_b) = parse_str(&perturbed, &IngestOptions::default());
    assert_eq!(a.admitted, b.admitted);
    assert_eq!(sink_a.publications, sink_b.publications);
}

#[test]
fn malformed_xml_is_fatal_with_offset() {
    let xml = "<?xml version=\"1.0\"?>\n<dblp>\n<inproceedings key=\"conf/x/A\"><author>A</author>";
    let mut sink = CollectSink::default();
    let err = stream_parse(xml.as_bytes(), &IngestOptions::default(), &mut sink).unwrap_err();
    match err {
        LensError::XmlSyntax { offset, .. } => assert!(offset > 0),
        other => panic!("expected syntax error, got {other}"),
    }
}

#[test]
fn mismatched_tags_are_fatal() {
    let xml = wrap(r#"<inproceedings key="conf/x/A"><author>A</author></title></inproceedings>"#);
    let mut sink = CollectSink::default();
    let err = stream_parse(xml.as_bytes(), &IngestOptions::default(), &mut sink).unwrap_err();
    assert!(matches!(err, LensError::XmlSyntax { .. }));
}

#[test]
fn unknown_entity_is_fatal_with_name() {
    let xml = wrap(
        r#"<inproceedings key="conf/x/A01"><author>Ann &mystery; B</author><title>T.</title><year>2001</year><booktitle>X</booktitle></inproceedings>"#,
    );
    let mut sink = CollectSink::default();
    let err = stream_parse(xml.as_bytes(), &IngestOptions::default(), &mut sink).unwrap_err();
    match err {
        LensError::UnresolvedEntity { name, .. } => assert_eq!(name, "mystery"),
        other => panic!("expected entity error, got {other}"),
    }
}

#[test]
fn dtd_entities_resolve_in_names_and_titles() {
    let mut entities = EntityTable::new();
    entities.parse_declarations(r#"<!ENTITY uuml "&#252;">"#);
    let options = IngestOptions {
        entities,
        ..IngestOptions::default()
    };
    let xml = wrap(
        r#"<inproceedings key="conf/x/M04"><author>J&uuml;rgen M</author><title>On &uuml;-Things.</title><year>2004</year><booktitle>X</booktitle></inproceedings>"#,
    );
    let (stats, sink) = parse_str(&xml, &options);
    assert_eq!(stats.admitted, 1);
    assert_eq!(sink.publications[0].authors[0], "J\u{fc}rgen M");
    assert_eq!(sink.publications[0].title, "On \u{fc}-Things.");
}

#[test]
fn internal_doctype_subset_declares_entities() {
    let xml = format!(
        "<?xml version=\"1.0\"?>\n<!DOCTYPE dblp [ <!ENTITY eacute \"&#233;\"> ]>\n<dblp>\n{}\n</dblp>",
        r#"<inproceedings key="conf/x/R05"><author>Ren&eacute; R</author><title>T.</title><year>2005</year><booktitle>X</booktitle></inproceedings>"#
    );
    let (stats, sink) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(stats.admitted, 1);
    assert_eq!(sink.publications[0].authors[0], "Ren\u{e9} R");
}

#[test]
fn inline_markup_in_titles_is_flattened() {
    let xml = wrap(
        r#"<inproceedings key="conf/x/S06"><author>S</author><title>On <i>Fast</i> &amp; Slow.</title><year>2006</year><booktitle>X</booktitle></inproceedings>"#,
    );
    let (_, sink) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(sink.publications[0].title, "On Fast & Slow.");
}

#[test]
fn numeric_character_references_resolve_without_a_table() {
    let xml = wrap(
        r#"<inproceedings key="conf/x/N07"><author>A&#32;B</author><title>T&#x2d;.</title><year>2007</year><booktitle>X</booktitle></inproceedings>"#,
    );
    let (_, sink) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(sink.publications[0].authors[0], "A B");
    assert_eq!(sink.publications[0].title, "T-.");
}

#[test]
fn empty_author_makes_record_incomplete() {
    let xml = wrap(
        r#"<inproceedings key="conf/x/E08"><author>  </author><author>Real Name</author><title>T.</title><year>2008</year><booktitle>X</booktitle></inproceedings>"#,
    );
    let (stats, _) = parse_str(&xml, &IngestOptions::default());
    assert_eq!(stats.admitted, 0);
    assert_eq!(stats.dropped_incomplete, 1);
}

#[test]
fn fixture_file_counts() {
    let options = IngestOptions::default()
        .with_dtd(&data_path("dblp.dtd"))
        .unwrap();
    let mut sink = CollectSink::default();
    let stats = stream_parse_file(&data_path("fixture.xml"), &options, &mut sink).unwrap();
    assert_eq!(stats.total_seen, 49);
    assert_eq!(stats.admitted, 37);
    assert_eq!(stats.dropped_incomplete, 1);
    assert_eq!(stats.dropped_pre1970, 1);
    assert_eq!(stats.dropped_post_cutoff, 1);
    assert_eq!(stats.dropped_kind, 9); // 1 article + 8 proceedings
    assert!(stats.is_consistent());
    assert_eq!(sink.proceedings.len(), 8);

    // Entity-bearing author name round-trips through the DTD table.
    let gunter = sink
        .publications
        .iter()
        .flat_map(|p| &p.authors)
        .find(|a| a.starts_with("G\u{fc}nter"));
    assert_eq!(gunter.map(String::as_str), Some("G\u{fc}nter Gro\u{df}"));
}

#[test]
fn latin1_declared_encoding_decodes() {
    // The real dump declares ISO-8859-1; raw Latin-1 bytes must decode.
    let mut xml: Vec<u8> = Vec::new();
    xml.extend_from_slice(b"<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?>\n<dblp>\n");
    xml.extend_from_slice(
        b"<inproceedings key=\"conf/x/M99\"><author>J\xfcrgen M\xfcller</author><title>T.</title><year>1999</year><booktitle>X</booktitle></inproceedings>\n",
    );
    xml.extend_from_slice(b"</dblp>\n");
    let mut sink = CollectSink::default();
    let stats = stream_parse(&xml[..], &IngestOptions::default(), &mut sink).unwrap();
    assert_eq!(stats.admitted, 1);
    assert_eq!(sink.publications[0].authors[0], "J\u{fc}rgen M\u{fc}ller");
}

#[test]
fn gzip_transport_is_sniffed() {
    let xml = wrap(COMPLETE_A);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.xml.gz");
    let file = std::fs::File::create(&path).unwrap();
    let mut encoder = flate2::write::GzEncoder::new(file, flate2::Compression::default());
    encoder.write_all(xml.as_bytes()).unwrap();
    encoder.finish().unwrap();

    let mut sink = CollectSink::default();
    let stats = stream_parse_file(&path, &IngestOptions::default(), &mut sink).unwrap();
    assert_eq!(stats.admitted, 1);
}

#[test]
fn normalization_is_idempotent_on_fixture_names() {
    let options = IngestOptions::default()
        .with_dtd(&data_path("dblp.dtd"))
        .unwrap();
    let mut sink = CollectSink::default();
    stream_parse_file(&data_path("fixture.xml"), &options, &mut sink).unwrap();
    let names: Vec<&String> = sink
        .publications
        .iter()
        .flat_map(|p: &RawPublication| &p.authors)
        .collect();
    assert!(!names.is_empty());
    for name in names {
        let once = normalize_author_name(name).unwrap();
        let twice = normalize_author_name(&once).unwrap();
        assert_eq!(once, twice);
        assert_eq!(&once, name); // parser output is already normalized
    }
}

proptest! {
    #[test]
    fn normalization_idempotent_for_arbitrary_strings(raw in ".{0,40}") {
        if let Some(once) = normalize_author_name(&raw) {
            let twice = normalize_author_name(&once).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn byte_identical_names_intern_identically(raw in "[a-zA-Z \u{e0}-\u{ff}]{1,30}") {
        let mut table = lens_core::AuthorTable::new();
        let a = table.normalize_author(&raw);
        let b = table.normalize_author(&raw);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "inconsistent rejection"),
        }
    }
}
