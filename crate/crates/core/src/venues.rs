//! Canonical venue resolution.
//!
//! Conferences change names over the years; DBLP keeps all events of a
//! series under one key prefix (`conf/aaai/...`), so the key is the stable
//! identity. The registry merges every name ever used by a series and
//! picks as display name the one with the longest history, breaking ties
//! by event count and then lexicographically.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::{ProceedingsMeta, RawPublication};

/// Dense handle for one canonical venue, valid for the registry that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VenueId(pub u32);

impl VenueId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Years and event count observed for one exact name of a venue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameSpan {
    pub name: String,
    /// 0 when no year evidence exists for this name.
    pub first_year: i32,
    pub last_year: i32,
    /// Distinct years observed under this name (observation count when no
    /// year evidence exists).
    pub event_count: u32,
}

impl NameSpan {
    pub fn span_years(&self) -> i32 {
        if self.event_count == 0 || self.first_year == 0 {
            0
        } else {
            self.last_year - self.first_year + 1
        }
    }
}

/// One canonical venue with its merged name history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VenueRecord {
    /// DBLP conference key prefix, e.g. `conf/aaai`.
    pub canonical_key: String,
    /// Name of the component with the longest history.
    pub display_name: String,
    /// Sorted by name for determinism.
    pub spans: Vec<NameSpan>,
}

impl VenueRecord {
    pub fn is_merge(&self) -> bool {
        self.spans.len() > 1
    }
}

/// Immutable registry of canonical venues. Built once, shared read-only.
#[derive(Debug, Default, Clone)]
pub struct VenueRegistry {
    venues: Vec<VenueRecord>,
    by_key: HashMap<String, VenueId>,
    /// Exact display-name lookup; names shared by several venues are
    /// excluded as ambiguous.
    by_name: HashMap<String, VenueId>,
}

impl VenueRegistry {
    /// Rebuilds a registry from stored venue records (record-file loading).
    /// Index order is preserved, so venue handles round-trip.
    pub fn from_records(venues: Vec<VenueRecord>) -> Self {
        let mut by_key = HashMap::with_capacity(venues.len());
        let mut name_claims: HashMap<String, Vec<VenueId>> = HashMap::new();
        for (i, v) in venues.iter().enumerate() {
            let id = VenueId(i as u32);
            by_key.insert(v.canonical_key.clone(), id);
            name_claims
                .entry(v.display_name.clone())
                .or_default()
                .push(id);
        }
        let by_name = name_claims
            .into_iter()
            .filter_map(|(name, ids)| (ids.len() == 1).then(|| (name, ids[0])))
            .collect();
        Self {
            venues,
            by_key,
            by_name,
        }
    }

    pub fn len(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn venue(&self, id: VenueId) -> &VenueRecord {
        &self.venues[id.index()]
    }

    pub fn display_name(&self, id: VenueId) -> &str {
        &self.venues[id.index()].display_name
    }

    pub fn canonical_key(&self, id: VenueId) -> &str {
        &self.venues[id.index()].canonical_key
    }

    pub fn by_key(&self, key: &str) -> Option<VenueId> {
        self.by_key.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VenueId, &VenueRecord)> {
        self.venues
            .iter()
            .enumerate()
            .map(|(i, v)| (VenueId(i as u32), v))
    }

    /// Resolves a raw venue token: key-shaped tokens by conference key
    /// prefix, anything else by exact display name. Deterministic.
    pub fn resolve(&self, token: &str) -> Option<VenueId> {
        if let Some(prefix) = conference_key_prefix(token) {
            return self.by_key.get(prefix).copied();
        }
        self.by_name.get(token.trim()).copied()
    }

    /// Venues whose history carries more than one name (for audit).
    pub fn merges(&self) -> impl Iterator<Item = (VenueId, &VenueRecord)> {
        self.iter().filter(|(_, v)| v.is_merge())
    }
}

/// Extracts the series prefix (`conf/<series>`) from a DBLP conference key
/// such as `conf/aaai/Zhou09` or `conf/aaai/2009`. Returns `None` for
/// anything that is not a conference key.
pub fn conference_key_prefix(token: &str) -> Option<&str> {
    let rest = token.strip_prefix("conf/")?;
    let series_len = rest.find('/').unwrap_or(rest.len());
    if series_len == 0 {
        return None;
    }
    Some(&token[.."conf/".len() + series_len])
}

#[derive(Debug, Default, Clone)]
struct NameEvidence {
    years: BTreeSet<i32>,
    yearless_observations: u32,
}

/// Accumulates venue name evidence from proceedings volumes and admitted
/// publications, then freezes into a [`VenueRegistry`].
///
/// Accumulation is commutative, so feeding the same evidence in any order
/// yields an identical registry.
#[derive(Debug, Default)]
pub struct RegistryBuilder {
    // canonical key -> exact name -> evidence
    evidence: BTreeMap<String, BTreeMap<String, NameEvidence>>,
    quarantined: BTreeSet<String>,
}

impl RegistryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_proceedings(&mut self, meta: &ProceedingsMeta) {
        match conference_key_prefix(&meta.dblp_key) {
            Some(prefix) => {
                self.add_evidence(prefix.to_string(), meta.name.as_deref(), meta.year);
            }
            None => {
                self.quarantined.insert(meta.dblp_key.clone());
            }
        }
    }

    /// Publication keys and booktitles are name evidence too; they cover
    /// series that never shipped a proceedings record.
    pub fn add_publication(&mut self, record: &RawPublication) {
        let from_key = conference_key_prefix(&record.dblp_key);
        let from_crossref = record.crossref.as_deref().and_then(conference_key_prefix);
        match from_key.or(from_crossref) {
            Some(prefix) => {
                let name = (record.venue_token != record.dblp_key)
                    .then_some(record.venue_token.as_str())
                    .filter(|t| conference_key_prefix(t).is_none());
                self.add_evidence(prefix.to_string(), name, Some(record.year));
            }
            None => {
                self.quarantined.insert(record.dblp_key.clone());
            }
        }
    }

    fn add_evidence(&mut self, prefix: String, name: Option<&str>, year: Option<i32>) {
        let names = match self.evidence.entry(prefix) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(BTreeMap::new()),
        };
        let Some(name) = name.map(str::trim).filter(|n| !n.is_empty()) else {
            return;
        };
        let ev = names.entry(name.to_string()).or_default();
        match year {
            Some(y) => {
                ev.years.insert(y);
            }
            None => ev.yearless_observations += 1,
        }
    }

    /// Freezes the accumulated evidence. Returns the registry plus the
    /// quarantined tokens that had no usable key.
    pub fn finish(self) -> (VenueRegistry, Vec<String>) {
        let mut venues = Vec::with_capacity(self.evidence.len());
        let mut by_key = HashMap::with_capacity(self.evidence.len());
        let mut name_claims: HashMap<String, Vec<VenueId>> = HashMap::new();

        for (key, names) in self.evidence {
            let mut spans: Vec<NameSpan> = names
                .into_iter()
                .map(|(name, ev)| {
                    let event_count = if ev.years.is_empty() {
                        ev.yearless_observations
                    } else {
                        ev.years.len() as u32
                    };
                    let (first, last) = match (ev.years.first(), ev.years.last()) {
                        (Some(&f), Some(&l)) => (f, l),
                        _ => (0, 0),
                    };
                    NameSpan {
                        name,
                        first_year: first,
                        last_year: last,
                        event_count,
                    }
                })
                .collect();
            spans.sort_by(|a, b| a.name.cmp(&b.name));

            let display_name = spans
                .iter()
                .max_by(|a, b| {
                    (a.span_years(), a.event_count, std::cmp::Reverse(&a.name)).cmp(&(
                        b.span_years(),
                        b.event_count,
                        std::cmp::Reverse(&b.name),
                    ))
                })
                .map(|s| s.name.clone())
                // Series observed only through keys: fall back to the key.
                .unwrap_or_else(|| key.clone());

            let id = VenueId(venues.len() as u32);
            by_key.insert(key.clone(), id);
            name_claims
                .entry(display_name.clone())
                .or_default()
                .push(id);
            venues.push(VenueRecord {
                canonical_key: key,
                display_name,
                spans,
            });
        }

        let by_name = name_claims
            .into_iter()
            .filter_map(|(name, ids)| (ids.len() == 1).then(|| (name, ids[0])))
            .collect();

        (
            VenueRegistry {
                venues,
                by_key,
                by_name,
            },
            self.quarantined.into_iter().collect(),
        )
    }
}
