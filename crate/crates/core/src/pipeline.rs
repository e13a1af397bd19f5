//! End-to-end orchestration: corpus loading (with the record-file cache),
//! graph and profile preparation, report building and emission.
//!
//! Every analytics command reads from one cached intermediate record file
//! instead of re-parsing the XML; the cache key is the source digest plus
//! the year bounds, so a changed input or cutoff transparently re-ingests.

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

use crate::areas::{AreaAssignment, AreaSet, SetLabel};
use crate::careers::{
    build_profiles, career_length_distribution, cohort_members, period_profile, top_transitions,
    transition_matrix, venue_mix, venue_mix_per_area, CareerScope, Cohort, ProfileTable,
    EXPERIENCED_CAREER_YEARS,
};
use crate::config::RunConfig;
use crate::corpus::{Corpus, PublicationRecord};
use crate::dynamics::{
    compare_growth, growth_series, publications_per_year, stability_metrics, with_relative,
    AveragingConvention, GrowthSeries, VenueActivity, VenueStability,
};
use crate::error::{LensError, Result};
use crate::graph::{build_graph, collaboration_row, CoauthorshipGraph};
use crate::ingest::IngestOptions;
use crate::report::{emit_plot_data, fmt_f64, fmt_opt, MetricReport, Provenance};

/// The eight standard reports of a full run, in emission order.
pub const STANDARD_REPORTS: [&str; 8] = [
    "collab_top",
    "collab_nontop",
    "stability_top",
    "stability_nontop",
    "growth",
    "transitions",
    "careers",
    "venue_mix",
];

#[derive(Debug, Clone)]
pub struct WrittenReport {
    pub kind: String,
    pub path: PathBuf,
    pub digest: String,
}

/// Loads the corpus for a config, going through the record-file cache.
/// Returns the corpus together with the cache path used (if any).
pub fn load_corpus(config: &RunConfig) -> Result<(Corpus, Option<PathBuf>)> {
    let source_digest = crate::corpus::sha256_file(&config.xml_path)?;
    let cache_dir = config.cache_dir();
    let cache_path = cache_dir.join(format!(
        "records-{}-{}-{}.jsonl",
        &source_digest[..16.min(source_digest.len())],
        config.min_year,
        config.cutoff_year
    ));

    if cache_path.is_file() {
        match Corpus::read_records_file(&cache_path) {
            Ok(corpus)
                if corpus.source_digest == source_digest
                    && corpus.min_year == config.min_year
                    && corpus.cutoff_year == config.cutoff_year =>
            {
                return Ok((corpus, Some(cache_path)));
            }
            Ok(_) => {} // stale cache, re-ingest
            Err(e) => {
                eprintln!(
                    "warning: ignoring unreadable cache {}: {e}",
                    cache_path.display()
                );
            }
        }
    }

    let mut options = IngestOptions {
        min_year: config.min_year,
        cutoff_year: config.cutoff_year,
        ..IngestOptions::default()
    };
    if let Some(dtd) = config.effective_dtd() {
        options = options.with_dtd(&dtd)?;
    }
    let corpus = Corpus::ingest_xml(&config.xml_path, &options)?;
    std::fs::create_dir_all(&cache_dir)
        .map_err(|e| LensError::io_context(format!("creating {}", cache_dir.display()), e))?;
    corpus.write_records_file(&cache_path)?;
    Ok((corpus, Some(cache_path)))
}

#[derive(Debug, Clone)]
pub struct AnalyticsOptions {
    pub averaging: AveragingConvention,
    pub exclude_mix_areas: Vec<String>,
    pub top_k: usize,
    pub min_career_years: u32,
}

impl Default for AnalyticsOptions {
    fn default() -> Self {
        Self {
            averaging: AveragingConvention::TrimTrivial,
            exclude_mix_areas: vec!["CBIO".into(), "WWW".into()],
            top_k: 3,
            min_career_years: EXPERIENCED_CAREER_YEARS,
        }
    }
}

impl AnalyticsOptions {
    pub fn from_config(config: &RunConfig) -> Self {
        Self {
            averaging: config.averaging,
            exclude_mix_areas: config.exclude_mix_areas.clone(),
            top_k: config.top_k,
            min_career_years: EXPERIENCED_CAREER_YEARS,
        }
    }
}

/// Prepared analysis state: bound area sets, the three co-authorship
/// graphs and the author profiles. Everything in here is immutable; the
/// per-report methods only read.
pub struct Analytics {
    pub corpus: Arc<Corpus>,
    pub top_set: AreaSet,
    pub nontop_set: AreaSet,
    pub top: AreaAssignment,
    pub nontop: AreaAssignment,
    pub cs_graph: CoauthorshipGraph,
    pub top_graph: CoauthorshipGraph,
    pub nontop_graph: CoauthorshipGraph,
    pub profiles: ProfileTable,
    pub options: AnalyticsOptions,
    provenance: Provenance,
}

impl Analytics {
    pub fn prepare(
        corpus: Arc<Corpus>,
        top_set: AreaSet,
        nontop_set: AreaSet,
        options: AnalyticsOptions,
        provenance: Provenance,
    ) -> Result<Self> {
        let top = top_set.bind(&corpus.registry, false)?;
        let nontop = nontop_set.bind(&corpus.registry, false)?;
        for (area, key) in top.missing.iter().chain(nontop.missing.iter()) {
            eprintln!("warning: area {area}: venue key {key} not present in this corpus");
        }
        let cs_graph = build_graph(&corpus.records, "CS");
        let top_graph = build_graph(corpus.records_in(&top), "TOP");
        let nontop_graph = build_graph(corpus.records_in(&nontop), "NONTOP");
        let profiles = build_profiles(&corpus.records, &top);
        Ok(Self {
            corpus,
            top_set,
            nontop_set,
            top,
            nontop,
            cs_graph,
            top_graph,
            nontop_graph,
            profiles,
            options,
            provenance,
        })
    }

    fn assignment(&self, set: SetLabel) -> (&AreaSet, &AreaAssignment, &CoauthorshipGraph) {
        match set {
            SetLabel::Top => (&self.top_set, &self.top, &self.top_graph),
            SetLabel::NonTop => (&self.nontop_set, &self.nontop, &self.nontop_graph),
            SetLabel::Cs => unreachable!("CS is not an area set"),
        }
    }

    /// Collaboration-trends table for one set, column order mirroring the
    /// reference table.
    pub fn collab_report(&self, set: SetLabel) -> MetricReport {
        let (area_set, assignment, set_graph) = self.assignment(set);
        let kind = match set {
            SetLabel::Top => "collab_top",
            _ => "collab_nontop",
        };
        let mut report = MetricReport::new(
            kind,
            &[
                "area",
                "vertices",
                "authors_per_paper_first_year",
                "authors_per_paper_final_year",
                "coauthors_same_area_first_year",
                "coauthors_same_area_avg",
                "coauthors_in_set",
                "coauthors_in_cs",
                "singleton_pct",
                "clustering_coefficient",
                "first_year",
                "final_year",
                "flags",
            ],
            self.provenance.clone(),
        );

        let mut rows: Vec<(usize, Vec<String>)> = (0..area_set.areas.len())
            .into_par_iter()
            .map(|idx| {
                let area = &area_set.areas[idx];
                let records: Vec<&PublicationRecord> =
                    self.corpus.records_in_area(assignment, idx).collect();
                let graph = build_graph(records.iter().copied(), area.abbrev.clone());
                let row =
                    collaboration_row(&area.abbrev, &records, &graph, set_graph, &self.cs_graph);
                let mut flags = Vec::new();
                if row.single_year {
                    flags.push("single_year");
                }
                if row.clustering_degenerate {
                    flags.push("cc_degenerate");
                }
                (
                    idx,
                    vec![
                        row.area_abbrev.clone(),
                        row.vertex_count.to_string(),
                        fmt_f64(row.authors_per_paper_first_year),
                        fmt_f64(row.authors_per_paper_final_year),
                        fmt_f64(row.coauthors_in_area_first_year),
                        fmt_f64(row.coauthors_in_area_avg),
                        fmt_f64(row.coauthors_in_set),
                        fmt_f64(row.coauthors_in_cs),
                        fmt_f64(row.singleton_pct),
                        fmt_f64(row.clustering_coefficient),
                        row.first_year.to_string(),
                        row.final_year.to_string(),
                        flags.join("|"),
                    ],
                )
            })
            .collect();
        rows.sort_by_key(|&(idx, _)| idx);
        for (_, row) in rows {
            report.push_row(row);
        }
        report
    }

    /// Growth series for the whole corpus, both sets, and every area.
    /// Relative growth uses the area's own set as the corpus baseline.
    pub fn growth_report(&self) -> MetricReport {
        let mut report = MetricReport::new(
            "growth",
            &["scope", "year", "publications", "abs_growth", "rel_growth"],
            self.provenance.clone(),
        );
        for series in self.growth_series_all() {
            for point in &series.points {
                report.push_row(vec![
                    series.label.clone(),
                    point.year.to_string(),
                    point.publications.to_string(),
                    fmt_opt(point.abs_growth),
                    fmt_opt(point.rel_growth),
                ]);
            }
        }
        report
    }

    /// All growth series: CS, TOP, NONTOP, then per-area series with
    /// relative growth filled against their set baseline.
    pub fn growth_series_all(&self) -> Vec<GrowthSeries> {
        let cs = growth_series(&publications_per_year(&self.corpus.records), "CS");
        let top_base = growth_series(
            &publications_per_year(self.corpus.records_in(&self.top)),
            "TOP",
        );
        let nontop_base = growth_series(
            &publications_per_year(self.corpus.records_in(&self.nontop)),
            "NONTOP",
        );

        let mut out = vec![cs, top_base.clone(), nontop_base.clone()];
        for (set, assignment, base, prefix) in [
            (&self.top_set, &self.top, &top_base, ""),
            (&self.nontop_set, &self.nontop, &nontop_base, "NONTOP:"),
        ] {
            for (idx, area) in set.areas.iter().enumerate() {
                let counts = publications_per_year(self.corpus.records_in_area(assignment, idx));
                let mut series = growth_series(&counts, format!("{prefix}{}", area.abbrev));
                with_relative(&mut series, base);
                out.push(series);
            }
        }
        out
    }

    /// Per-area growth series of one set (used by `compare-growth`).
    fn area_series(&self, set: SetLabel) -> Vec<GrowthSeries> {
        let (area_set, assignment, _) = self.assignment(set);
        area_set
            .areas
            .iter()
            .enumerate()
            .map(|(idx, area)| {
                let counts = publications_per_year(self.corpus.records_in_area(assignment, idx));
                growth_series(&counts, area.abbrev.clone())
            })
            .collect()
    }

    pub fn compare_growth_report(&self) -> MetricReport {
        let comparison = compare_growth(
            &self.area_series(SetLabel::Top),
            &self.area_series(SetLabel::NonTop),
        );
        let mut report = MetricReport::new(
            "compare_growth",
            &["year", "mean_abs_top", "mean_abs_nontop", "comparison"],
            self.provenance.clone(),
        );
        report.add_summary(
            "share_nontop_higher",
            fmt_f64(comparison.share_nontop_higher),
        );
        report.add_summary("comparable_years", comparison.comparable_years.to_string());
        report.add_summary("ties", comparison.ties.to_string());
        report.add_summary("mean_abs_top", fmt_opt(comparison.mean_abs_top));
        report.add_summary("mean_abs_nontop", fmt_opt(comparison.mean_abs_nontop));
        for (year, top, nontop) in &comparison.per_year {
            let verdict = match (top, nontop) {
                (Some(t), Some(n)) if n > t => "nontop_higher",
                (Some(t), Some(n)) if n < t => "top_higher",
                (Some(_), Some(_)) => "tie",
                _ => "undefined",
            };
            report.push_row(vec![
                year.to_string(),
                fmt_opt(*top),
                fmt_opt(*nontop),
                verdict.to_string(),
            ]);
        }
        report
    }

    /// Experienced TOP authors (career >= 10 years in the TOP dataset).
    pub fn experienced_top_authors(&self) -> Vec<&crate::careers::AuthorProfile> {
        self.profiles
            .iter()
            .filter(|p| {
                p.career_length_top()
                    .is_some_and(|l| l >= self.options.min_career_years)
            })
            .collect()
    }

    pub fn transitions_report(&self) -> MetricReport {
        let members = self.experienced_top_authors();
        let matrix = transition_matrix(&members, self.top_set.area_count());
        let ranked = top_transitions(&matrix, self.options.top_k);
        let mut report = MetricReport::new(
            "transitions",
            &[
                "start_area",
                "start_support",
                "rank",
                "target_area",
                "probability",
            ],
            self.provenance.clone(),
        );
        report.add_summary("cohort_size", members.len().to_string());
        for (start, targets) in ranked {
            let abbrev = &self.top_set.areas[start].abbrev;
            if targets.is_empty() {
                report.push_row(vec![
                    abbrev.clone(),
                    matrix.support[start].to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                continue;
            }
            for (rank, (target, probability)) in targets.iter().enumerate() {
                report.push_row(vec![
                    abbrev.clone(),
                    matrix.support[start].to_string(),
                    (rank + 1).to_string(),
                    self.top_set.areas[*target].abbrev.clone(),
                    fmt_f64(*probability),
                ]);
            }
        }
        report
    }

    /// Career-length distributions for the CS corpus, the TOP set, and
    /// each TOP area.
    pub fn careers_report(&self) -> MetricReport {
        let mut report = MetricReport::new(
            "careers",
            &["scope", "career_length", "authors", "pct"],
            self.provenance.clone(),
        );
        let mut scopes: Vec<(String, CareerScope)> = vec![
            ("CS".into(), CareerScope::Cs),
            ("TOP".into(), CareerScope::Top),
        ];
        for (idx, area) in self.top_set.areas.iter().enumerate() {
            scopes.push((area.abbrev.clone(), CareerScope::Area(idx)));
        }
        for (label, scope) in scopes {
            let hist = career_length_distribution(self.profiles.iter(), scope);
            for &(length, authors, pct) in &hist.bins {
                report.push_row(vec![
                    label.clone(),
                    length.to_string(),
                    authors.to_string(),
                    fmt_f64(pct),
                ]);
            }
        }
        report
    }

    /// Venue-mix distribution; the standard report includes the per-area
    /// histograms.
    pub fn venue_mix_report(&self) -> MetricReport {
        self.venue_mix_report_scoped(true)
    }

    pub fn venue_mix_report_scoped(&self, per_area: bool) -> MetricReport {
        let mut report = MetricReport::new(
            "venue_mix",
            &["area", "bin_low", "bin_high", "authors", "pct"],
            self.provenance.clone(),
        );
        let mut histograms = vec![venue_mix(self.profiles.top_authors())];
        if per_area {
            let excluded: Vec<usize> = self
                .options
                .exclude_mix_areas
                .iter()
                .filter_map(|abbrev| self.top_set.area_by_abbrev(abbrev))
                .collect();
            histograms.extend(venue_mix_per_area(&self.profiles, &excluded));
        }
        for histogram in &histograms {
            let label = match histogram.area {
                None => "ALL".to_string(),
                Some(idx) => self.top_set.areas[idx].abbrev.clone(),
            };
            for bin in 0..10 {
                report.push_row(vec![
                    label.clone(),
                    (bin * 10).to_string(),
                    if bin == 9 {
                        "100".into()
                    } else {
                        ((bin + 1) * 10).to_string()
                    },
                    histogram.bin_counts[bin].to_string(),
                    fmt_f64(histogram.bin_pct[bin]),
                ]);
            }
        }
        report
    }

    /// Productivity per 5-year career period for the three cohorts.
    pub fn periods_report(&self) -> MetricReport {
        let mut report = MetricReport::new(
            "periods",
            &["cohort", "period", "mean_pubs", "contributing_authors"],
            self.provenance.clone(),
        );
        for cohort in [
            Cohort::SingleAreaTop,
            Cohort::MultiAreaTop,
            Cohort::TopAuthorsInCs,
        ] {
            let members = cohort_members(&self.profiles, cohort, self.options.min_career_years);
            let profile = period_profile(&members, cohort);
            if profile.empty {
                report.add_summary(format!("{}_empty", cohort.label()), "true");
            }
            for (i, (&mean, &n)) in profile
                .mean_pubs_per_period
                .iter()
                .zip(&profile.contributing)
                .enumerate()
            {
                report.push_row(vec![
                    cohort.label().to_string(),
                    (i + 1).to_string(),
                    fmt_f64(mean),
                    n.to_string(),
                ]);
            }
        }
        report
    }

    /// Population-stability rows for one set, grouped by area in config
    /// order.
    pub fn stability_report(&self, set: SetLabel) -> MetricReport {
        let (area_set, assignment, _) = self.assignment(set);
        let kind = match set {
            SetLabel::Top => "stability_top",
            _ => "stability_nontop",
        };
        let mut report = MetricReport::new(
            kind,
            &[
                "area",
                "conference",
                "first_year",
                "avg_newcomers",
                "avg_pure_newcomers",
                "avg_leavers",
                "active_years",
                "flags",
            ],
            self.provenance.clone(),
        );

        // (area order, venue order) pairs in config order, computed in
        // parallel, emitted in order.
        let mut tasks: Vec<(usize, usize)> = Vec::new();
        for (area_idx, _) in area_set.areas.iter().enumerate() {
            for venue_idx in 0..assignment.venues_of(area_idx).len() {
                tasks.push((area_idx, venue_idx));
            }
        }
        let mut rows: Vec<((usize, usize), Vec<String>)> = tasks
            .into_par_iter()
            .map(|(area_idx, venue_idx)| {
                let venue = assignment.venues_of(area_idx)[venue_idx];
                let activity = VenueActivity::from_records(venue, self.corpus.records_at(venue));
                let stability =
                    stability_metrics(&activity, &self.cs_graph, self.options.averaging);
                let row = self.stability_row(&area_set.areas[area_idx].abbrev, &stability);
                ((area_idx, venue_idx), row)
            })
            .collect();
        rows.sort_by_key(|&(key, _)| key);
        for (_, row) in rows {
            report.push_row(row);
        }
        report
    }

    fn stability_row(&self, area_abbrev: &str, stability: &VenueStability) -> Vec<String> {
        vec![
            area_abbrev.to_string(),
            self.corpus
                .registry
                .display_name(stability.venue)
                .to_string(),
            stability.first_year.to_string(),
            fmt_opt(stability.avg_newcomers),
            fmt_opt(stability.avg_pure_newcomers),
            fmt_opt(stability.avg_leavers),
            stability.years.len().to_string(),
            if stability.degenerate {
                "degenerate".into()
            } else {
                String::new()
            },
        ]
    }

    /// Per-venue stability for arbitrary callers (the oracle suite and the
    /// Python bindings reuse this).
    pub fn venue_stability(&self, venue: crate::venues::VenueId) -> VenueStability {
        let activity = VenueActivity::from_records(venue, self.corpus.records_at(venue));
        stability_metrics(&activity, &self.cs_graph, self.options.averaging)
    }

    /// The eight standard reports, in [`STANDARD_REPORTS`] order.
    pub fn all_reports(&self) -> Vec<MetricReport> {
        vec![
            self.collab_report(SetLabel::Top),
            self.collab_report(SetLabel::NonTop),
            self.stability_report(SetLabel::Top),
            self.stability_report(SetLabel::NonTop),
            self.growth_report(),
            self.transitions_report(),
            self.careers_report(),
            self.venue_mix_report(),
        ]
    }
}

/// Runs the whole pipeline for a config: load (or ingest) the corpus,
/// compute the eight standard reports, write them to the output directory.
/// Optional plot-data and JSON mirrors ride along. Nothing is written
/// until every report has been computed.
pub fn run_pipeline(config: &RunConfig) -> Result<Vec<WrittenReport>> {
    config.validate()?;
    let config_digest = config.digest()?;
    let (corpus, _cache) = load_corpus(config)?;
    let top_set = AreaSet::load(&config.top_areas)?;
    let nontop_set = AreaSet::load(&config.nontop_areas)?;
    let provenance = Provenance::new(config_digest, corpus.source_digest.clone());
    let analytics = Analytics::prepare(
        Arc::new(corpus),
        top_set,
        nontop_set,
        AnalyticsOptions::from_config(config),
        provenance,
    )?;

    let mut reports = analytics.all_reports();
    if config.emit_plot_data {
        reports.push(analytics.periods_report());
        reports.push(analytics.compare_growth_report());
        let plots: Vec<MetricReport> = reports.iter().filter_map(emit_plot_data).collect();
        reports.extend(plots);
    }

    write_reports(&reports, config)
}

/// Writes reports into the config's output directory (CSV always, JSON
/// mirror behind the flag). Atomic per file; a failure mid-run removes
/// everything this run already wrote, so the directory never holds a
/// partial report set.
pub fn write_reports(reports: &[MetricReport], config: &RunConfig) -> Result<Vec<WrittenReport>> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| LensError::io_context(format!("creating {}", config.out_dir.display()), e))?;
    let mut written = Vec::with_capacity(reports.len());
    let mut emitted_paths: Vec<PathBuf> = Vec::new();
    let mut try_write = |report: &MetricReport| -> Result<WrittenReport> {
        let path = config.out_dir.join(format!("{}.csv", report.kind));
        report.write_csv(&path)?;
        emitted_paths.push(path.clone());
        if config.emit_json {
            let json_path = config.out_dir.join(format!("{}.json", report.kind));
            report.write_json(&json_path)?;
            emitted_paths.push(json_path);
        }
        Ok(WrittenReport {
            kind: report.kind.clone(),
            path,
            digest: report.digest()?,
        })
    };
    for report in reports {
        match try_write(report) {
            Ok(w) => written.push(w),
            Err(e) => {
                for path in &emitted_paths {
                    let _ = std::fs::remove_file(path);
                }
                return Err(e);
            }
        }
    }
    Ok(written)
}
