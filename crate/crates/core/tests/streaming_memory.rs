//! Streaming contract: peak parser allocation must not scale with input
//! size when the sink discards records. Measured with a counting global
//! allocator over a fixture and its 10x-repeated version.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use lens_core::ingest::{stream_parse, DiscardSink, IngestOptions};

struct CountingAllocator;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = unsafe { System.alloc(layout) };
        if !ptr.is_null() {
            let current = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(current, Ordering::Relaxed);
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOCATOR: CountingAllocator = CountingAllocator;

fn synthetic_dump(records: usize) -> String {
    let mut xml = String::from("<?xml version=\"1.0\"?>\n<dblp>\n");
    for i in 0..records {
        xml.push_str(&format!(
            "<inproceedings key=\"conf/v{}/p{i}\"><author>Author {}</author><author>Author {}</author><title>Paper number {i} with a reasonably long title.</title><year>{}</year><booktitle>V{}</booktitle></inproceedings>\n",
            i % 7,
            i % 97,
            (i * 31) % 97,
            1980 + (i % 30),
            i % 7,
        ));
    }
    xml.push_str("</dblp>\n");
    xml
}

/// Peak allocation while parsing `xml`, relative to the level at entry.
fn peak_during_parse(xml: &str) -> usize {
    let mut sink = DiscardSink::default();
    let options = IngestOptions::default();
    let start = CURRENT.load(Ordering::Relaxed);
    PEAK.store(start, Ordering::Relaxed);
    let stats = stream_parse(xml.as_bytes(), &options, &mut sink).expect("parse");
    assert!(stats.admitted > 0);
    PEAK.load(Ordering::Relaxed).saturating_sub(start)
}

#[test]
fn peak_allocation_is_flat_across_10x_input() {
    let small = synthetic_dump(500);
    let large = synthetic_dump(5000);

    // Warm up internal buffers so one-time setup is not attributed to the
    // small run.
    peak_during_parse(&small);

    let peak_small = peak_during_parse(&small);
    let peak_large = peak_during_parse(&large);

    // A parser buffering the document would show ~10x growth; allow 2x
    // plus slack for allocator noise.
    let budget = peak_small * 2 + 256 * 1024;
    assert!(
        peak_large <= budget,
        "peak grew from {peak_small} to {peak_large} bytes over a 10x input (budget {budget})"
    );
}
