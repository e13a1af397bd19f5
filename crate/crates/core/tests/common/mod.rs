//! Shared test support: seeded random corpora and independent brute-force
//! oracles. The oracles recompute every metric from the raw record list
//! with naive scans; they never call the implementation paths they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::RangeInclusive;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lens_core::areas::{Area, AreaAssignment, AreaSet, SetLabel};
use lens_core::corpus::{Corpus, PublicationRecord};
use lens_core::ids::AuthorId;
use lens_core::ingest::{IngestOptions, IngestStats, RawPublication, RecordKind};
use lens_core::venues::VenueId;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random corpus: up to `max_papers` papers over up to `max_authors`
/// authors and `n_venues` venues, with 1-5 authors per paper.
pub fn random_corpus(
    seed: u64,
    max_authors: usize,
    max_papers: usize,
    n_venues: usize,
    years: RangeInclusive<i32>,
) -> Corpus {
    let mut rng = rng(seed);
    let n_authors = rng.random_range(2..=max_authors.max(2));
    let n_papers = rng.random_range(1..=max_papers.max(1));
    let mut raw = Vec::with_capacity(n_papers);
    for i in 0..n_papers {
        let venue = rng.random_range(0..n_venues);
        let year = rng.random_range(years.clone());
        let k = rng.random_range(1..=5.min(n_authors));
        let mut authors: Vec<usize> = (0..n_authors).collect();
        authors.shuffle(&mut rng);
        authors.truncate(k);
        raw.push(RawPublication {
            dblp_key: format!("conf/v{venue}/p{i}"),
            authors: authors.iter().map(|a| format!("Author {a}")).collect(),
            title: format!("Paper {i}."),
            year,
            venue_token: format!("V{venue}"),
            crossref: None,
            record_kind: RecordKind::Inproceedings,
        });
    }
    let stats = IngestStats {
        total_seen: raw.len() as u64,
        admitted: raw.len() as u64,
        ..IngestStats::default()
    };
    Corpus::from_raw(raw, &[], stats, &IngestOptions::default())
        .expect("synthetic corpus must assemble")
}

/// Builds an [`AreaSet`] over explicit venue-key groups and binds it.
pub fn bind_areas(
    corpus: &Corpus,
    label: SetLabel,
    groups: &[(&str, &[&str])],
) -> (AreaSet, AreaAssignment) {
    let areas = groups
        .iter()
        .enumerate()
        .map(|(i, (abbrev, venues))| Area {
            id: i as u32 + 1,
            abbrev: abbrev.to_string(),
            name: abbrev.to_string(),
            venues: venues.iter().map(|v| v.to_string()).collect(),
        })
        .collect();
    let set = AreaSet { label, areas };
    let assignment = set.bind(&corpus.registry, true).expect("bind");
    (set, assignment)
}

/// Splits every venue of the corpus round-robin into `n_areas` areas.
pub fn partition_areas(
    corpus: &Corpus,
    label: SetLabel,
    n_areas: usize,
) -> (AreaSet, AreaAssignment) {
    let mut groups: Vec<Vec<String>> = vec![Vec::new(); n_areas];
    for (i, (_, venue)) in corpus.registry.iter().enumerate() {
        groups[i % n_areas].push(venue.canonical_key.clone());
    }
    let areas = groups
        .into_iter()
        .enumerate()
        .filter(|(_, venues)| !venues.is_empty())
        .map(|(i, venues)| Area {
            id: i as u32 + 1,
            abbrev: format!("A{i}"),
            name: format!("Area {i}"),
            venues,
        })
        .collect();
    let set = AreaSet { label, areas };
    let assignment = set.bind(&corpus.registry, true).expect("bind");
    (set, assignment)
}

// ---------------------------------------------------------------------------
// Graph oracles: naive pair scans over the record list.
// ---------------------------------------------------------------------------

pub struct GraphOracle {
    pub vertices: BTreeSet<AuthorId>,
    pub edges: BTreeMap<(AuthorId, AuthorId), (i32, u32)>,
    pub adjacency: BTreeMap<AuthorId, BTreeSet<AuthorId>>,
}

pub fn graph_oracle<'a>(records: impl IntoIterator<Item = &'a PublicationRecord>) -> GraphOracle {
    let mut vertices = BTreeSet::new();
    let mut edges: BTreeMap<(AuthorId, AuthorId), (i32, u32)> = BTreeMap::new();
    for record in records {
        for &a in &record.authors {
            vertices.insert(a);
        }
        for (i, &a) in record.authors.iter().enumerate() {
            for &b in &record.authors[i + 1..] {
                if a == b {
                    continue;
                }
                let key = if a < b { (a, b) } else { (b, a) };
                let entry = edges.entry(key).or_insert((record.year, 0));
                entry.0 = entry.0.min(record.year);
                entry.1 += 1;
            }
        }
    }
    let mut adjacency: BTreeMap<AuthorId, BTreeSet<AuthorId>> = BTreeMap::new();
    for v in &vertices {
        adjacency.insert(*v, BTreeSet::new());
    }
    for &(a, b) in edges.keys() {
        adjacency.get_mut(&a).unwrap().insert(b);
        adjacency.get_mut(&b).unwrap().insert(a);
    }
    GraphOracle {
        vertices,
        edges,
        adjacency,
    }
}

impl GraphOracle {
    pub fn degree(&self, a: AuthorId) -> usize {
        self.adjacency.get(&a).map_or(0, |s| s.len())
    }

    pub fn singletons(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| self.degree(**v) == 0)
            .count()
    }

    /// Mean local clustering coefficient by exhaustive neighbor-pair
    /// enumeration over vertices with degree >= 2.
    pub fn clustering(&self) -> (f64, usize) {
        let mut locals = Vec::new();
        for (v, neighbors) in &self.adjacency {
            let d = neighbors.len();
            if d < 2 {
                continue;
            }
            let mut closed = 0u64;
            let ns: Vec<AuthorId> = neighbors.iter().copied().collect();
            for i in 0..ns.len() {
                for j in (i + 1)..ns.len() {
                    if self.adjacency[&ns[i]].contains(&ns[j]) {
                        closed += 1;
                    }
                }
            }
            let _ = v;
            locals.push(closed as f64 / (d as f64 * (d as f64 - 1.0) / 2.0));
        }
        if locals.is_empty() {
            return (0.0, 0);
        }
        locals.sort_by(f64::total_cmp);
        let n = locals.len();
        (locals.iter().sum::<f64>() / n as f64, n)
    }
}

// ---------------------------------------------------------------------------
// Growth oracle: independent per-year recount.
// ---------------------------------------------------------------------------

/// (year -> count, year -> AbsGr, year -> RGr) recomputed naively for the
/// records at the given venues (or all records when `venues` is `None`).
pub fn growth_oracle(
    records: &[PublicationRecord],
    venues: Option<&HashSet<VenueId>>,
    baseline: &BTreeMap<i32, u64>,
) -> (BTreeMap<i32, u64>, BTreeMap<i32, f64>, BTreeMap<i32, f64>) {
    let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
    for r in records {
        if venues.is_none_or(|v| v.contains(&r.venue)) {
            *counts.entry(r.year).or_insert(0) += 1;
        }
    }
    let mut abs = BTreeMap::new();
    for (&y, &n) in &counts {
        if let Some(&prev) = counts.get(&(y - 1)) {
            if prev > 0 {
                abs.insert(y, n as f64 / prev as f64);
            }
        }
    }
    let mut base_abs: BTreeMap<i32, f64> = BTreeMap::new();
    for (&y, &n) in baseline {
        if let Some(&prev) = baseline.get(&(y - 1)) {
            if prev > 0 {
                base_abs.insert(y, n as f64 / prev as f64);
            }
        }
    }
    let mut rel = BTreeMap::new();
    for (&y, &a) in &abs {
        if let Some(&b) = base_abs.get(&y) {
            if b > 0.0 {
                rel.insert(y, a / b);
            }
        }
    }
    (counts, abs, rel)
}

// ---------------------------------------------------------------------------
// Stability oracle: exhaustive membership scans per venue-year.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityOracleYear {
    pub year: i32,
    pub total: u32,
    pub newcomers: u32,
    pub pure_newcomers: u32,
    pub leavers: u32,
}

/// Recomputes per-year stability counts for one venue by scanning the full
/// record list for every membership and friendship question.
pub fn stability_oracle(records: &[PublicationRecord], venue: VenueId) -> Vec<StabilityOracleYear> {
    let venue_years: BTreeSet<i32> = records
        .iter()
        .filter(|r| r.venue == venue)
        .map(|r| r.year)
        .collect();

    let authors_at = |year: i32| -> BTreeSet<AuthorId> {
        records
            .iter()
            .filter(|r| r.venue == venue && r.year == year)
            .flat_map(|r| r.authors.iter().copied())
            .collect()
    };
    let published_at_venue_before = |a: AuthorId, year: i32| -> bool {
        records
            .iter()
            .any(|r| r.venue == venue && r.year < year && r.authors.contains(&a))
    };
    let published_at_venue_after = |a: AuthorId, year: i32| -> bool {
        records
            .iter()
            .any(|r| r.venue == venue && r.year > year && r.authors.contains(&a))
    };
    // Co-authored anywhere before `year` with an author who was a venue
    // member before `year`.
    let knows_prior_member = |a: AuthorId, year: i32| -> bool {
        records.iter().any(|r| {
            r.year < year
                && r.authors.contains(&a)
                && r.authors
                    .iter()
                    .any(|&b| b != a && published_at_venue_before(b, year))
        })
    };

    venue_years
        .into_iter()
        .map(|year| {
            let authors = authors_at(year);
            let mut newcomers = 0;
            let mut pure = 0;
            let mut leavers = 0;
            for &a in &authors {
                if !published_at_venue_before(a, year) {
                    newcomers += 1;
                    if !knows_prior_member(a, year) {
                        pure += 1;
                    }
                }
                if !published_at_venue_after(a, year) {
                    leavers += 1;
                }
            }
            StabilityOracleYear {
                year,
                total: authors.len() as u32,
                newcomers,
                pure_newcomers: pure,
                leavers,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Transition oracle: per-author set enumeration from raw (area, year)
// event lists.
// ---------------------------------------------------------------------------

/// Recomputes (support, transition counts) for a cohort directly from the
/// record list: an author is active in an area with >= 2 papers there; the
/// start area is where the cumulative count reaches 2 first (ties: more
/// papers in the area, then smaller area index).
pub fn transition_oracle(
    records: &[PublicationRecord],
    assignment: &AreaAssignment,
    cohort: &BTreeSet<AuthorId>,
    n_areas: usize,
) -> (Vec<u32>, Vec<Vec<u32>>) {
    let mut events: HashMap<AuthorId, Vec<(i32, usize)>> = HashMap::new();
    for r in records {
        if let Some(area) = assignment.area_of(r.venue) {
            for &a in &r.authors {
                events.entry(a).or_default().push((r.year, area));
            }
        }
    }
    let mut support = vec![0u32; n_areas];
    let mut counts = vec![vec![0u32; n_areas]; n_areas];
    for (&author, list) in &events {
        if !cohort.contains(&author) {
            continue;
        }
        let mut totals = vec![0u32; n_areas];
        for &(_, area) in list {
            totals[area] += 1;
        }
        let active: BTreeSet<usize> = (0..n_areas).filter(|&a| totals[a] >= 2).collect();
        if active.is_empty() {
            continue;
        }
        // Activation year per active area: scan chronologically.
        let mut sorted = list.clone();
        sorted.sort();
        let mut start: Option<(i32, u32, usize)> = None; // (year2, -total asc handled below, area)
        for &area in &active {
            let mut cum = 0;
            let mut year2 = i32::MAX;
            for &(year, a) in &sorted {
                if a == area {
                    cum += 1;
                    if cum == 2 {
                        year2 = year;
                        break;
                    }
                }
            }
            let candidate = (year2, u32::MAX - totals[area], area);
            if start.is_none_or(|s| candidate < (s.0, s.1, s.2)) {
                start = Some(candidate);
            }
        }
        let (_, _, start_area) = start.unwrap();
        support[start_area] += 1;
        for &target in &active {
            if target != start_area {
                counts[start_area][target] += 1;
            }
        }
    }
    (support, counts)
}

// ---------------------------------------------------------------------------
// Venue-mix oracle: direct binning.
// ---------------------------------------------------------------------------

/// Recomputes the venue-mix bin counts for (pubs_top, pubs_cs) pairs.
pub fn venue_mix_oracle(ratios: &[(u32, u32)]) -> [u32; 10] {
    let mut bins = [0u32; 10];
    for &(top, cs) in ratios {
        if cs == 0 {
            continue;
        }
        let pct = 100.0 * top as f64 / cs as f64;
        let mut bin = (pct / 10.0).floor() as usize;
        if bin > 9 {
            bin = 9;
        }
        bins[bin] += 1;
    }
    bins
}
