//! Author-level profiling: career lengths, interdisciplinarity transitions,
//! productivity periods and venue-mix distributions.
//!
//! A profile aggregates one author's publication counts per year at three
//! scopes: the whole conference corpus (CS), the TOP dataset, and each TOP
//! area. Career length is the inclusive span between first and last
//! publication in scope; gaps do not shorten it.

use std::collections::HashMap;

use crate::areas::{AreaAssignment, AreaIdx};
use crate::corpus::PublicationRecord;
use crate::ids::AuthorId;

/// Membership threshold: an author is active in an area iff they have at
/// least this many publications in it.
pub const ACTIVE_AREA_MIN_PUBS: u32 = 2;

/// Career-length threshold for the "experienced researcher" cohorts.
pub const EXPERIENCED_CAREER_YEARS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorProfile {
    pub author: AuthorId,
    pub cs_first_year: i32,
    pub cs_last_year: i32,
    pub pubs_cs: u32,
    /// Sorted by year.
    pub cs_year_counts: Vec<(i32, u32)>,
    pub pubs_top: u32,
    /// Sorted by year; empty when the author never published in TOP.
    pub top_year_counts: Vec<(i32, u32)>,
    /// Sorted by (area, year).
    pub area_year_counts: Vec<(AreaIdx, i32, u32)>,
}

impl AuthorProfile {
    pub fn career_length_cs(&self) -> u32 {
        (self.cs_last_year - self.cs_first_year + 1) as u32
    }

    pub fn top_first_year(&self) -> Option<i32> {
        self.top_year_counts.first().map(|&(y, _)| y)
    }

    pub fn top_last_year(&self) -> Option<i32> {
        self.top_year_counts.last().map(|&(y, _)| y)
    }

    pub fn career_length_top(&self) -> Option<u32> {
        match (self.top_first_year(), self.top_last_year()) {
            (Some(f), Some(l)) => Some((l - f + 1) as u32),
            _ => None,
        }
    }

    pub fn career_length_area(&self, area: AreaIdx) -> Option<u32> {
        let years: Vec<i32> = self
            .area_year_counts
            .iter()
            .filter(|&&(a, _, _)| a == area)
            .map(|&(_, y, _)| y)
            .collect();
        match (years.first(), years.last()) {
            (Some(&f), Some(&l)) => Some((l - f + 1) as u32),
            _ => None,
        }
    }

    /// Lifetime publication count per area, sorted by area.
    pub fn area_totals(&self) -> Vec<(AreaIdx, u32)> {
        let mut totals: Vec<(AreaIdx, u32)> = Vec::new();
        for &(area, _, count) in &self.area_year_counts {
            match totals.last_mut() {
                Some((a, c)) if *a == area => *c += count,
                _ => totals.push((area, count)),
            }
        }
        totals
    }

    /// Areas with at least `min_pubs` lifetime publications.
    pub fn active_areas(&self, min_pubs: u32) -> Vec<AreaIdx> {
        self.area_totals()
            .into_iter()
            .filter(|&(_, c)| c >= min_pubs)
            .map(|(a, _)| a)
            .collect()
    }

    /// The year the author's cumulative count in `area` reaches
    /// `min_pubs`, or `None` if it never does.
    fn activation_year(&self, area: AreaIdx, min_pubs: u32) -> Option<i32> {
        let mut cumulative = 0u32;
        for &(a, year, count) in &self.area_year_counts {
            if a != area {
                continue;
            }
            cumulative += count;
            if cumulative >= min_pubs {
                return Some(year);
            }
        }
        None
    }

    /// Start area: the area where the author first reaches
    /// [`ACTIVE_AREA_MIN_PUBS`] publications. Ties on the activation year
    /// go to the area with more lifetime publications, then the smaller
    /// area index.
    pub fn start_area(&self) -> Option<AreaIdx> {
        let totals: HashMap<AreaIdx, u32> = self.area_totals().into_iter().collect();
        self.active_areas(ACTIVE_AREA_MIN_PUBS)
            .into_iter()
            .filter_map(|a| {
                self.activation_year(a, ACTIVE_AREA_MIN_PUBS)
                    .map(|y| (a, y))
            })
            .min_by(|&(a1, y1), &(a2, y2)| {
                y1.cmp(&y2)
                    .then_with(|| totals[&a2].cmp(&totals[&a1]))
                    .then_with(|| a1.cmp(&a2))
            })
            .map(|(a, _)| a)
    }

    /// Majority-voting area assignment: the area holding the largest share
    /// of the author's publications. Ties go to the area entered earlier,
    /// then the smaller area index.
    pub fn majority_area(&self) -> Option<AreaIdx> {
        let first_pub_year = |area: AreaIdx| {
            self.area_year_counts
                .iter()
                .find(|&&(a, _, _)| a == area)
                .map(|&(_, y, _)| y)
                .unwrap_or(i32::MAX)
        };
        self.area_totals()
            .into_iter()
            .max_by(|&(a1, c1), &(a2, c2)| {
                c1.cmp(&c2)
                    .then_with(|| first_pub_year(a2).cmp(&first_pub_year(a1)))
                    .then_with(|| a2.cmp(&a1))
            })
            .map(|(a, _)| a)
    }
}

/// All profiles of a corpus, sorted by author id.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    profiles: Vec<AuthorProfile>,
    index: HashMap<AuthorId, u32>,
    pub area_count: usize,
}

impl ProfileTable {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, author: AuthorId) -> Option<&AuthorProfile> {
        self.index.get(&author).map(|&i| &self.profiles[i as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = &AuthorProfile> {
        self.profiles.iter()
    }

    /// Authors of the TOP dataset (>= 1 TOP publication).
    pub fn top_authors(&self) -> impl Iterator<Item = &AuthorProfile> {
        self.iter().filter(|p| p.pubs_top > 0)
    }
}

/// Builds profiles from CS records; `top` attributes publications to TOP
/// areas. One aggregation pass, deterministic for a fixed record multiset.
pub fn build_profiles(records: &[PublicationRecord], top: &AreaAssignment) -> ProfileTable {
    let mut cs_events: Vec<(AuthorId, i32)> = Vec::new();
    let mut top_events: Vec<(AuthorId, i32)> = Vec::new();
    let mut area_events: Vec<(AuthorId, AreaIdx, i32)> = Vec::new();

    for record in records {
        let area = top.area_of(record.venue);
        for &author in &record.authors {
            cs_events.push((author, record.year));
            if let Some(area) = area {
                top_events.push((author, record.year));
                area_events.push((author, area, record.year));
            }
        }
    }

    cs_events.sort_unstable();
    top_events.sort_unstable();
    area_events.sort_unstable();

    let mut profiles: Vec<AuthorProfile> = Vec::new();
    let mut index: HashMap<AuthorId, u32> = HashMap::new();
    let mut i = 0;
    while i < cs_events.len() {
        let author = cs_events[i].0;
        let mut year_counts: Vec<(i32, u32)> = Vec::new();
        let mut total = 0u32;
        while i < cs_events.len() && cs_events[i].0 == author {
            let year = cs_events[i].1;
            match year_counts.last_mut() {
                Some((y, c)) if *y == year => *c += 1,
                _ => year_counts.push((year, 1)),
            }
            total += 1;
            i += 1;
        }
        index.insert(author, profiles.len() as u32);
        profiles.push(AuthorProfile {
            author,
            cs_first_year: year_counts.first().unwrap().0,
            cs_last_year: year_counts.last().unwrap().0,
            pubs_cs: total,
            cs_year_counts: year_counts,
            pubs_top: 0,
            top_year_counts: Vec::new(),
            area_year_counts: Vec::new(),
        });
    }

    let mut i = 0;
    while i < top_events.len() {
        let author = top_events[i].0;
        let profile = &mut profiles[index[&author] as usize];
        while i < top_events.len() && top_events[i].0 == author {
            let year = top_events[i].1;
            match profile.top_year_counts.last_mut() {
                Some((y, c)) if *y == year => *c += 1,
                _ => profile.top_year_counts.push((year, 1)),
            }
            profile.pubs_top += 1;
            i += 1;
        }
    }

    for (author, area, year) in area_events {
        let profile = &mut profiles[index[&author] as usize];
        match profile.area_year_counts.last_mut() {
            Some((a, y, c)) if *a == area && *y == year => *c += 1,
            _ => profile.area_year_counts.push((area, year, 1)),
        }
    }

    ProfileTable {
        profiles,
        index,
        area_count: top.area_count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CareerScope {
    Cs,
    Top,
    Area(AreaIdx),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CareerHistogram {
    pub scope: CareerScope,
    pub total_authors: usize,
    /// Dense over lengths 1..=max observed: (length, authors, percentage).
    pub bins: Vec<(u32, u32, f64)>,
}

impl CareerHistogram {
    pub fn percentage_for(&self, length: u32) -> Option<f64> {
        self.bins
            .iter()
            .find(|&&(l, _, _)| l == length)
            .map(|&(_, _, p)| p)
    }

    /// Percentage of authors with career length strictly above `years`.
    pub fn share_longer_than(&self, years: u32) -> f64 {
        self.bins
            .iter()
            .filter(|&&(l, _, _)| l > years)
            .map(|&(_, _, p)| p)
            .sum()
    }
}

/// Distribution of career lengths for the given scope, as percentages of
/// authors. Percentages sum to 100 (up to rounding) whenever any author is
/// in scope.
pub fn career_length_distribution<'a>(
    profiles: impl Iterator<Item = &'a AuthorProfile>,
    scope: CareerScope,
) -> CareerHistogram {
    let mut counts: HashMap<u32, u32> = HashMap::new();
    let mut total = 0usize;
    for profile in profiles {
        let length = match scope {
            CareerScope::Cs => Some(profile.career_length_cs()),
            CareerScope::Top => profile.career_length_top(),
            CareerScope::Area(a) => profile.career_length_area(a),
        };
        if let Some(length) = length {
            *counts.entry(length).or_insert(0) += 1;
            total += 1;
        }
    }
    let max = counts.keys().copied().max().unwrap_or(0);
    let bins = (1..=max)
        .map(|l| {
            let c = counts.get(&l).copied().unwrap_or(0);
            (l, c, 100.0 * c as f64 / total as f64)
        })
        .collect();
    CareerHistogram {
        scope,
        total_authors: total,
        bins,
    }
}

/// Directed area-transition probabilities.
///
/// `probability(start, target)` is the share of authors starting in
/// `start` that are also active in `target`; rows need not sum to one
/// because authors join several areas.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub area_count: usize,
    probabilities: Vec<f64>,
    /// Authors whose start area is this area.
    pub support: Vec<u32>,
}

impl TransitionMatrix {
    pub fn probability(&self, start: AreaIdx, target: AreaIdx) -> Option<f64> {
        if start == target || self.support[start] == 0 {
            return None;
        }
        Some(self.probabilities[start * self.area_count + target])
    }

    /// False when no author starts in this area, leaving the row undefined.
    pub fn row_defined(&self, start: AreaIdx) -> bool {
        self.support[start] > 0
    }
}

/// Builds the transition matrix over the given cohort (the callers filter
/// to experienced authors). Authors without a well-defined start area are
/// skipped.
pub fn transition_matrix(members: &[&AuthorProfile], area_count: usize) -> TransitionMatrix {
    let mut counts = vec![0u32; area_count * area_count];
    let mut support = vec![0u32; area_count];
    for profile in members {
        let Some(start) = profile.start_area() else {
            continue;
        };
        support[start] += 1;
        for target in profile.active_areas(ACTIVE_AREA_MIN_PUBS) {
            if target != start {
                counts[start * area_count + target] += 1;
            }
        }
    }
    let probabilities = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let s = support[i / area_count];
            if s == 0 {
                0.0
            } else {
                c as f64 / s as f64
            }
        })
        .collect();
    TransitionMatrix {
        area_count,
        probabilities,
        support,
    }
}

/// Per start area, the top-k most probable target areas. Zero-probability
/// targets never appear. Ties break by the target area's support, then by
/// area index; undefined rows yield an empty list.
pub fn top_transitions(matrix: &TransitionMatrix, k: usize) -> Vec<(AreaIdx, Vec<(AreaIdx, f64)>)> {
    (0..matrix.area_count)
        .map(|start| {
            if !matrix.row_defined(start) {
                return (start, Vec::new());
            }
            let mut targets: Vec<(AreaIdx, f64)> = (0..matrix.area_count)
                .filter(|&t| t != start)
                .filter_map(|t| {
                    let p = matrix.probability(start, t)?;
                    (p > 0.0).then_some((t, p))
                })
                .collect();
            targets.sort_by(|&(t1, p1), &(t2, p2)| {
                p2.total_cmp(&p1)
                    .then_with(|| matrix.support[t2].cmp(&matrix.support[t1]))
                    .then_with(|| t1.cmp(&t2))
            });
            targets.truncate(k);
            (start, targets)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cohort {
    /// >= 10-year TOP career, exactly one active area.
    SingleAreaTop,
    /// >= 10-year TOP career, several active areas.
    MultiAreaTop,
    /// TOP authors with a >= 10-year career in the CS dataset; periods
    /// count all their CS publications.
    TopAuthorsInCs,
}

impl Cohort {
    pub fn label(self) -> &'static str {
        match self {
            Cohort::SingleAreaTop => "single_area_top",
            Cohort::MultiAreaTop => "multi_area_top",
            Cohort::TopAuthorsInCs => "top_authors_in_cs",
        }
    }
}

/// Members of a productivity cohort.
pub fn cohort_members(
    table: &ProfileTable,
    cohort: Cohort,
    min_career_years: u32,
) -> Vec<&AuthorProfile> {
    table
        .iter()
        .filter(|p| match cohort {
            Cohort::SingleAreaTop => {
                p.career_length_top().is_some_and(|l| l >= min_career_years)
                    && p.active_areas(ACTIVE_AREA_MIN_PUBS).len() == 1
            }
            Cohort::MultiAreaTop => {
                p.career_length_top().is_some_and(|l| l >= min_career_years)
                    && p.active_areas(ACTIVE_AREA_MIN_PUBS).len() >= 2
            }
            Cohort::TopAuthorsInCs => p.pubs_top > 0 && p.career_length_cs() >= min_career_years,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodProfile {
    pub cohort: Cohort,
    /// Mean publications per 5-year career period, period 1 first.
    pub mean_pubs_per_period: Vec<f64>,
    /// Authors contributing to each period.
    pub contributing: Vec<u32>,
    pub empty: bool,
}

const PERIOD_YEARS: u32 = 5;

/// Mean publications per 5-year career period for a cohort. An author with
/// career length L contributes to periods 1..=ceil(L/5); period p covers
/// career years [5(p-1), 5p).
pub fn period_profile(members: &[&AuthorProfile], cohort: Cohort) -> PeriodProfile {
    let mut sums: Vec<u64> = Vec::new();
    let mut contributors: Vec<u32> = Vec::new();

    for profile in members {
        let (first_year, career, counts): (i32, u32, &[(i32, u32)]) = match cohort {
            Cohort::SingleAreaTop | Cohort::MultiAreaTop => {
                let Some(first) = profile.top_first_year() else {
                    continue;
                };
                (
                    first,
                    profile.career_length_top().unwrap(),
                    &profile.top_year_counts,
                )
            }
            Cohort::TopAuthorsInCs => (
                profile.cs_first_year,
                profile.career_length_cs(),
                &profile.cs_year_counts,
            ),
        };
        let periods = career.div_ceil(PERIOD_YEARS) as usize;
        if sums.len() < periods {
            sums.resize(periods, 0);
            contributors.resize(periods, 0);
        }
        for contributor in contributors.iter_mut().take(periods) {
            *contributor += 1;
        }
        for &(year, count) in counts {
            let offset = (year - first_year) as u32;
            let p = (offset / PERIOD_YEARS) as usize;
            sums[p] += count as u64;
        }
    }

    let empty = contributors.is_empty();
    let mean = sums
        .iter()
        .zip(&contributors)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();
    PeriodProfile {
        cohort,
        mean_pubs_per_period: mean,
        contributing: contributors,
        empty,
    }
}

/// Author-venue distribution: share of TOP publications relative to the
/// author's whole conference output, folded into ten 10%-intervals. The
/// last bin is closed: a 100% ratio lands in [90, 100].
#[derive(Debug, Clone, PartialEq)]
pub struct VenueMixHistogram {
    pub area: Option<AreaIdx>,
    pub bin_counts: [u32; 10],
    /// Percentage of authors per bin; sums to 100 when any author counted.
    pub bin_pct: [f64; 10],
    pub author_count: u32,
    /// Authors skipped because they have no CS publications at all.
    pub excluded_no_cs: u32,
}

pub fn mix_bin(ratio_pct: f64) -> usize {
    ((ratio_pct / 10.0).floor() as usize).min(9)
}

/// Global venue-mix histogram over TOP-dataset authors.
pub fn venue_mix<'a>(members: impl Iterator<Item = &'a AuthorProfile>) -> VenueMixHistogram {
    venue_mix_binned(members, None)
}

fn venue_mix_binned<'a>(
    members: impl Iterator<Item = &'a AuthorProfile>,
    area: Option<AreaIdx>,
) -> VenueMixHistogram {
    let mut bin_counts = [0u32; 10];
    let mut excluded = 0u32;
    let mut total = 0u32;
    for profile in members {
        if profile.pubs_cs == 0 {
            excluded += 1;
            continue;
        }
        let ratio = 100.0 * profile.pubs_top as f64 / profile.pubs_cs as f64;
        bin_counts[mix_bin(ratio)] += 1;
        total += 1;
    }
    let mut bin_pct = [0.0; 10];
    if total > 0 {
        for (pct, &count) in bin_pct.iter_mut().zip(&bin_counts) {
            *pct = 100.0 * count as f64 / total as f64;
        }
    }
    VenueMixHistogram {
        area,
        bin_counts,
        bin_pct,
        author_count: total,
        excluded_no_cs: excluded,
    }
}

/// Per-area venue-mix histograms. Each TOP author is attributed to their
/// majority area; areas listed in `excluded_areas` are skipped entirely
/// (the reference analysis drops CBIO and WWW as too small).
pub fn venue_mix_per_area(
    table: &ProfileTable,
    excluded_areas: &[AreaIdx],
) -> Vec<VenueMixHistogram> {
    let mut buckets: Vec<Vec<&AuthorProfile>> = vec![Vec::new(); table.area_count];
    for profile in table.top_authors() {
        if let Some(area) = profile.majority_area() {
            buckets[area].push(profile);
        }
    }
    buckets
        .into_iter()
        .enumerate()
        .filter(|(area, _)| !excluded_areas.contains(area))
        .map(|(area, members)| venue_mix_binned(members.into_iter(), Some(area)))
        .collect()
}
