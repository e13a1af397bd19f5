//! Time-series community metrics: publication growth rates and population
//! stability (newcomers / pure newcomers / leavers per venue).
//!
//! Growth: `AbsGr(A, y) = Publ(A, y) / Publ(A, y-1)`, defined only when the
//! previous year had publications; `RGr(A, y) = AbsGr(A, y) / AbsGr(CS, y)`.
//! Years without publications are skipped, never interpolated.
//!
//! Stability, per venue and year: a newcomer has no earlier publication at
//! the venue; a pure newcomer additionally never co-authored (anywhere in
//! the CS corpus, in an earlier year) with an earlier member of the venue;
//! a leaver never publishes at the venue again.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::PublicationRecord;
use crate::graph::CoauthorshipGraph;
use crate::ids::AuthorId;
use crate::venues::VenueId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthPoint {
    pub year: i32,
    pub publications: u64,
    /// None for the first active year or after a gap.
    pub abs_growth: Option<f64>,
    /// None unless both this series' and the baseline's growth are defined.
    pub rel_growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSeries {
    pub label: String,
    /// Active years only (publication count > 0), ascending.
    pub points: Vec<GrowthPoint>,
}

impl GrowthSeries {
    pub fn abs_growth(&self, year: i32) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.year == year)
            .and_then(|p| p.abs_growth)
    }

    pub fn rel_growth(&self, year: i32) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.year == year)
            .and_then(|p| p.rel_growth)
    }
}

/// Publication counts per year for a record subset.
pub fn publications_per_year<'a>(
    records: impl IntoIterator<Item = &'a PublicationRecord>,
) -> BTreeMap<i32, u64> {
    let mut counts = BTreeMap::new();
    for record in records {
        *counts.entry(record.year).or_insert(0u64) += 1;
    }
    counts
}

/// Builds the growth series from per-year counts. Absolute growth is only
/// defined for a year whose direct predecessor is active.
pub fn growth_series(counts: &BTreeMap<i32, u64>, label: impl Into<String>) -> GrowthSeries {
    let points = counts
        .iter()
        .map(|(&year, &n)| {
            let prev = counts.get(&(year - 1)).copied().unwrap_or(0);
            GrowthPoint {
                year,
                publications: n,
                abs_growth: (prev > 0).then(|| n as f64 / prev as f64),
                rel_growth: None,
            }
        })
        .collect();
    GrowthSeries {
        label: label.into(),
        points,
    }
}

/// Fills relative growth against a baseline series (the CS corpus).
pub fn with_relative(series: &mut GrowthSeries, baseline: &GrowthSeries) {
    let base: BTreeMap<i32, f64> = baseline
        .points
        .iter()
        .filter_map(|p| p.abs_growth.map(|g| (p.year, g)))
        .collect();
    for point in &mut series.points {
        point.rel_growth = match (point.abs_growth, base.get(&point.year)) {
            (Some(a), Some(&b)) if b > 0.0 => Some(a / b),
            _ => None,
        };
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthComparison {
    /// (year, mean TOP AbsGr, mean NONTOP AbsGr); only years where at least
    /// one side is defined.
    pub per_year: Vec<(i32, Option<f64>, Option<f64>)>,
    /// Years where both sides were defined.
    pub comparable_years: u32,
    /// Share of comparable years with NONTOP strictly above TOP.
    pub share_nontop_higher: f64,
    /// Comparable years where both sides are exactly equal.
    pub ties: u32,
    pub mean_abs_top: Option<f64>,
    pub mean_abs_nontop: Option<f64>,
}

/// Compares yearly mean absolute growth across the two sets. Means are
/// taken over the series with a defined growth value for that year.
pub fn compare_growth(top: &[GrowthSeries], nontop: &[GrowthSeries]) -> GrowthComparison {
    let mean_at = |series: &[GrowthSeries], year: i32| -> Option<f64> {
        let values: Vec<f64> = series.iter().filter_map(|s| s.abs_growth(year)).collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    };

    let mut years: BTreeSet<i32> = BTreeSet::new();
    for s in top.iter().chain(nontop) {
        years.extend(
            s.points
                .iter()
                .filter(|p| p.abs_growth.is_some())
                .map(|p| p.year),
        );
    }

    let mut per_year = Vec::new();
    let mut comparable = 0u32;
    let mut higher = 0u32;
    let mut ties = 0u32;
    let mut top_sum = 0.0;
    let mut top_n = 0u32;
    let mut nontop_sum = 0.0;
    let mut nontop_n = 0u32;
    for &year in &years {
        let t = mean_at(top, year);
        let n = mean_at(nontop, year);
        if let Some(t) = t {
            top_sum += t;
            top_n += 1;
        }
        if let Some(n) = n {
            nontop_sum += n;
            nontop_n += 1;
        }
        if let (Some(t), Some(n)) = (t, n) {
            comparable += 1;
            if n > t {
                higher += 1;
            } else if n == t {
                ties += 1;
            }
        }
        per_year.push((year, t, n));
    }

    GrowthComparison {
        per_year,
        comparable_years: comparable,
        share_nontop_higher: if comparable == 0 {
            0.0
        } else {
            higher as f64 / comparable as f64
        },
        ties,
        mean_abs_top: (top_n > 0).then(|| top_sum / top_n as f64),
        mean_abs_nontop: (nontop_n > 0).then(|| nontop_sum / nontop_n as f64),
    }
}

/// Distinct authors per active year at one venue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VenueActivity {
    pub venue: VenueId,
    pub by_year: BTreeMap<i32, BTreeSet<AuthorId>>,
}

impl VenueActivity {
    pub fn from_records<'a>(
        venue: VenueId,
        records: impl IntoIterator<Item = &'a PublicationRecord>,
    ) -> Self {
        let mut by_year: BTreeMap<i32, BTreeSet<AuthorId>> = BTreeMap::new();
        for record in records {
            debug_assert_eq!(record.venue, venue);
            by_year
                .entry(record.year)
                .or_default()
                .extend(&record.authors);
        }
        VenueActivity { venue, by_year }
    }

    pub fn first_year(&self) -> Option<i32> {
        self.by_year.keys().next().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.by_year.keys().last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityYear {
    pub year: i32,
    pub total_authors: u32,
    pub newcomers: u32,
    pub pure_newcomers: u32,
    pub leavers: u32,
    pub frac_newcomers: f64,
    /// None when the year has no newcomers (0/0).
    pub frac_pure_newcomers: Option<f64>,
    pub frac_leavers: f64,
}

/// Which years enter the row averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingConvention {
    /// Skip the first year for newcomer averages (trivially 1.0) and the
    /// last year for leaver averages (right-censored 1.0).
    #[default]
    TrimTrivial,
    /// Average over every active year (sensitivity mode).
    Inclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VenueStability {
    pub venue: VenueId,
    pub first_year: i32,
    pub last_year: i32,
    pub years: Vec<StabilityYear>,
    pub avg_newcomers: Option<f64>,
    pub avg_pure_newcomers: Option<f64>,
    pub avg_leavers: Option<f64>,
    /// True when the venue has a single active year and the trimmed
    /// averages are undefined.
    pub degenerate: bool,
}

/// Per-year stability fractions for one venue, plus row averages.
///
/// The `cs_graph` must cover co-authorships at **all** venues: the pure
/// newcomer test asks whether the author co-authored, in any earlier year
/// and anywhere in the corpus, with an earlier member of this venue.
pub fn stability_metrics(
    activity: &VenueActivity,
    cs_graph: &CoauthorshipGraph,
    convention: AveragingConvention,
) -> VenueStability {
    // First and last venue year per author.
    let mut member_first: BTreeMap<AuthorId, i32> = BTreeMap::new();
    let mut member_last: BTreeMap<AuthorId, i32> = BTreeMap::new();
    for (&year, authors) in &activity.by_year {
        for &a in authors {
            member_first.entry(a).or_insert(year);
            member_last.insert(a, year);
        }
    }

    let first_year = activity.first_year().unwrap_or(0);
    let last_year = activity.last_year().unwrap_or(0);

    let mut years = Vec::with_capacity(activity.by_year.len());
    for (&year, authors) in &activity.by_year {
        let total = authors.len() as u32;
        let mut newcomers = 0u32;
        let mut pure = 0u32;
        let mut leavers = 0u32;
        for &a in authors {
            if member_first[&a] == year {
                newcomers += 1;
                let knows_member = cs_graph.neighbors_with_first_year(a).any(|(b, edge_year)| {
                    edge_year < year && member_first.get(&b).is_some_and(|&fy| fy < year)
                });
                if !knows_member {
                    pure += 1;
                }
            }
            if member_last[&a] == year {
                leavers += 1;
            }
        }
        years.push(StabilityYear {
            year,
            total_authors: total,
            newcomers,
            pure_newcomers: pure,
            leavers,
            frac_newcomers: newcomers as f64 / total as f64,
            frac_pure_newcomers: (newcomers > 0).then(|| pure as f64 / newcomers as f64),
            frac_leavers: leavers as f64 / total as f64,
        });
    }

    let newcomer_window: Vec<&StabilityYear> = years
        .iter()
        .filter(|y| convention == AveragingConvention::Inclusive || y.year > first_year)
        .collect();
    let leaver_window: Vec<&StabilityYear> = years
        .iter()
        .filter(|y| convention == AveragingConvention::Inclusive || y.year < last_year)
        .collect();

    let avg_newcomers = mean(newcomer_window.iter().map(|y| y.frac_newcomers));
    let avg_pure = mean(newcomer_window.iter().filter_map(|y| y.frac_pure_newcomers));
    let avg_leavers = mean(leaver_window.iter().map(|y| y.frac_leavers));
    let degenerate = avg_newcomers.is_none() || avg_leavers.is_none();

    VenueStability {
        venue: activity.venue,
        first_year,
        last_year,
        years,
        avg_newcomers,
        avg_pure_newcomers: avg_pure,
        avg_leavers,
        degenerate,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0u32;
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}
