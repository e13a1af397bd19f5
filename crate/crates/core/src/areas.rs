//! Topical area sets: named partitions of canonical venues.
//!
//! The shipped `configs/top.toml` and `configs/nontop.toml` carry the
//! curated area/venue lists (14 top areas, 6 non-top areas); custom sets
//! load the same way. Within one set a venue belongs to at most one area —
//! a venue may well appear in *different* sets (ICWE is listed both as a
//! top and a non-top venue).

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LensError, Result};
use crate::venues::{VenueId, VenueRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SetLabel {
    Cs,
    Top,
    NonTop,
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetLabel::Cs => write!(f, "CS"),
            SetLabel::Top => write!(f, "TOP"),
            SetLabel::NonTop => write!(f, "NONTOP"),
        }
    }
}

/// Index of an area within its [`AreaSet`] (0-based, config order).
pub type AreaIdx = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Area {
    pub id: u32,
    pub abbrev: String,
    pub name: String,
    /// DBLP conference key prefixes, e.g. `conf/soda`.
    pub venues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaSet {
    pub label: SetLabel,
    /// Sorted by area id.
    pub areas: Vec<Area>,
}

#[derive(Debug, Deserialize)]
struct AreaSetFile {
    set_label: SetLabel,
    #[serde(rename = "area")]
    areas: Vec<AreaFileEntry>,
}

#[derive(Debug, Deserialize)]
struct AreaFileEntry {
    id: u32,
    abbrev: String,
    name: String,
    venues: Vec<String>,
}

impl AreaSet {
    /// Loads and validates an area config file.
    ///
    /// Fatal errors: unparsable file, no areas, an area without venues,
    /// duplicate area ids or abbreviations, and a venue listed in two areas
    /// of the same set (reported with both area ids).
    pub fn load(path: &Path) -> Result<AreaSet> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LensError::io_context(format!("reading {}", path.display()), e))?;
        let file: AreaSetFile = toml::from_str(&text).map_err(|e| LensError::AreaConfig {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let config_err = |message: String| LensError::AreaConfig {
            path: path.to_path_buf(),
            message,
        };

        if file.areas.is_empty() {
            return Err(config_err("no areas defined".into()));
        }

        let mut areas: Vec<Area> = file
            .areas
            .into_iter()
            .map(|a| Area {
                id: a.id,
                abbrev: a.abbrev,
                name: a.name,
                venues: a.venues,
            })
            .collect();
        areas.sort_by_key(|a| a.id);

        let mut seen_ids = HashMap::new();
        let mut seen_abbrevs = HashMap::new();
        let mut venue_owner: HashMap<&str, &Area> = HashMap::new();
        for area in &areas {
            if let Some(prev) = seen_ids.insert(area.id, &area.abbrev) {
                return Err(config_err(format!(
                    "duplicate area id {} ({} and {})",
                    area.id, prev, area.abbrev
                )));
            }
            if seen_abbrevs.insert(area.abbrev.clone(), area.id).is_some() {
                return Err(config_err(format!(
                    "duplicate abbreviation {}",
                    area.abbrev
                )));
            }
            if area.venues.is_empty() {
                return Err(config_err(format!("area {} has no venues", area.abbrev)));
            }
        }
        for area in &areas {
            for venue in &area.venues {
                if let Some(first) = venue_owner.insert(venue.as_str(), area) {
                    return Err(LensError::DuplicateVenue {
                        venue: venue.clone(),
                        first: first.abbrev.clone(),
                        second: area.abbrev.clone(),
                    });
                }
            }
        }

        Ok(AreaSet {
            label: file.set_label,
            areas,
        })
    }

    pub fn area_count(&self) -> usize {
        self.areas.len()
    }

    pub fn area_by_abbrev(&self, abbrev: &str) -> Option<AreaIdx> {
        self.areas
            .iter()
            .position(|a| a.abbrev.eq_ignore_ascii_case(abbrev))
    }

    /// Binds the configured venue keys to registry ids. Keys missing from
    /// the registry are reported per offending area; `strict` turns any
    /// missing key into an error.
    pub fn bind(&self, registry: &VenueRegistry, strict: bool) -> Result<AreaAssignment> {
        let mut venue_to_area = HashMap::new();
        let mut area_venues: Vec<Vec<VenueId>> = vec![Vec::new(); self.areas.len()];
        let mut missing: Vec<(String, String)> = Vec::new();

        for (idx, area) in self.areas.iter().enumerate() {
            for key in &area.venues {
                match registry.by_key(key) {
                    Some(id) => {
                        venue_to_area.insert(id, idx);
                        area_venues[idx].push(id);
                    }
                    None => missing.push((area.abbrev.clone(), key.clone())),
                }
            }
        }

        if strict && !missing.is_empty() {
            let detail = missing
                .iter()
                .map(|(a, k)| format!("{a}: {k}"))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(LensError::Config(format!(
                "unknown venue keys in {} set ({detail})",
                self.label
            )));
        }

        Ok(AreaAssignment {
            label: self.label,
            venue_to_area,
            area_venues,
            missing,
        })
    }
}

/// An [`AreaSet`] bound to a registry: venue handle -> area index.
#[derive(Debug, Clone)]
pub struct AreaAssignment {
    pub label: SetLabel,
    venue_to_area: HashMap<VenueId, AreaIdx>,
    area_venues: Vec<Vec<VenueId>>,
    /// (area abbrev, venue key) pairs that were not present in the registry.
    pub missing: Vec<(String, String)>,
}

impl AreaAssignment {
    pub fn area_of(&self, venue: VenueId) -> Option<AreaIdx> {
        self.venue_to_area.get(&venue).copied()
    }

    pub fn contains(&self, venue: VenueId) -> bool {
        self.venue_to_area.contains_key(&venue)
    }

    pub fn venues_of(&self, area: AreaIdx) -> &[VenueId] {
        &self.area_venues[area]
    }

    pub fn area_count(&self) -> usize {
        self.area_venues.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_valid_config() {
        let f = write_config(
            r#"
set_label = "TOP"

[[area]]
id = 2
abbrev = "AT"
name = "Algorithms & Theory"
venues = ["conf/focs", "conf/stoc"]

[[area]]
id = 1
abbrev = "ARCH"
name = "Hardware & Architecture"
venues = ["conf/isca"]
"#,
        );
        let set = AreaSet::load(f.path()).unwrap();
        assert_eq!(set.label, SetLabel::Top);
        assert_eq!(set.area_count(), 2);
        // sorted by id
        assert_eq!(set.areas[0].abbrev, "ARCH");
        assert_eq!(set.area_by_abbrev("at"), Some(1));
    }

    #[test]
    fn duplicate_venue_is_fatal_with_both_areas() {
        let f = write_config(
            r#"
set_label = "TOP"

[[area]]
id = 1
abbrev = "A"
name = "A"
venues = ["conf/x"]

[[area]]
id = 2
abbrev = "B"
name = "B"
venues = ["conf/x"]
"#,
        );
        let err = AreaSet::load(f.path()).unwrap_err();
        match err {
            LensError::DuplicateVenue {
                venue,
                first,
                second,
            } => {
                assert_eq!(venue, "conf/x");
                assert_eq!(first, "A");
                assert_eq!(second, "B");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_area_is_fatal() {
        let f = write_config(
            r#"
set_label = "NONTOP"

[[area]]
id = 1
abbrev = "A"
name = "A"
venues = []
"#,
        );
        assert!(AreaSet::load(f.path()).is_err());
    }
}
