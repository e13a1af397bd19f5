//! Python bindings: expose the corpus, the prepared analysis state and the
//! report builders to Python. Reports come back as lists of dicts keyed by
//! the CSV header, so the Python side sees exactly what the CLI emits.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use lens_core::areas::{AreaSet, SetLabel};
use lens_core::careers::{career_length_distribution, CareerScope};
use lens_core::corpus::{sha256_bytes, Corpus};
use lens_core::ingest::{normalize_author_name, IngestOptions};
use lens_core::pipeline::{write_reports, Analytics, AnalyticsOptions};
use lens_core::report::{emit_plot_data, MetricReport, Provenance};
use lens_core::LensError;

fn to_py_err(e: LensError) -> PyErr {
    match e {
        LensError::Io(_) | LensError::IoContext { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_set_label(set: &str) -> PyResult<SetLabel> {
    match set.to_ascii_lowercase().as_str() {
        "top" => Ok(SetLabel::Top),
        "nontop" | "non-top" => Ok(SetLabel::NonTop),
        other => Err(PyValueError::new_err(format!(
            "unknown set `{other}` (expected top or nontop)"
        ))),
    }
}

/// Report rows as list-of-dicts keyed by the CSV header.
fn rows_as_dicts(report: &MetricReport) -> Vec<HashMap<String, String>> {
    report
        .rows
        .iter()
        .map(|row| {
            report
                .header
                .iter()
                .cloned()
                .zip(row.iter().cloned())
                .collect()
        })
        .collect()
}

/// A resolved publication corpus (records, authors, canonical venues).
#[pyclass(name = "Corpus", module = "lens_py", frozen)]
struct PyCorpus {
    inner: Arc<Corpus>,
}

#[pymethods]
impl PyCorpus {
    /// Parse a DBLP XML dump (plain or gzipped). `dtd` defaults to a
    /// `dblp.dtd` file next to the XML when present.
    #[staticmethod]
    #[pyo3(signature = (xml_path, cutoff_year=2009, min_year=1970, dtd=None))]
    fn ingest_xml(
        xml_path: PathBuf,
        cutoff_year: i32,
        min_year: i32,
        dtd: Option<PathBuf>,
    ) -> PyResult<Self> {
        let mut options = IngestOptions {
            min_year,
            cutoff_year,
            ..IngestOptions::default()
        };
        let dtd = dtd.or_else(|| {
            let sibling = xml_path.with_file_name("dblp.dtd");
            sibling.is_file().then_some(sibling)
        });
        if let Some(dtd) = dtd {
            options = options.with_dtd(&dtd).map_err(to_py_err)?;
        }
        let corpus = Corpus::ingest_xml(&xml_path, &options).map_err(to_py_err)?;
        Ok(Self {
            inner: Arc::new(corpus),
        })
    }

    /// Load a corpus from an intermediate record file written by
    /// `write_records` or `lens ingest`.
    #[staticmethod]
    fn read_records(path: PathBuf) -> PyResult<Self> {
        let corpus = Corpus::read_records_file(&path).map_err(to_py_err)?;
        Ok(Self {
            inner: Arc::new(corpus),
        })
    }

    fn write_records(&self, path: PathBuf) -> PyResult<()> {
        self.inner.write_records_file(&path).map_err(to_py_err)
    }

    #[getter]
    fn num_records(&self) -> usize {
        self.inner.records.len()
    }

    #[getter]
    fn num_authors(&self) -> usize {
        self.inner.authors.len()
    }

    #[getter]
    fn venue_count(&self) -> usize {
        self.inner.registry.len()
    }

    #[getter]
    fn cutoff_year(&self) -> i32 {
        self.inner.cutoff_year
    }

    #[getter]
    fn source_digest(&self) -> String {
        self.inner.source_digest.clone()
    }

    /// Ingest and resolution counters as a dict.
    fn stats(&self) -> HashMap<String, u64> {
        let s = &self.inner.stats;
        HashMap::from([
            ("total_seen".into(), s.ingest.total_seen),
            ("admitted".into(), s.ingest.admitted),
            ("dropped_incomplete".into(), s.ingest.dropped_incomplete),
            ("dropped_pre1970".into(), s.ingest.dropped_pre1970),
            ("dropped_post_cutoff".into(), s.ingest.dropped_post_cutoff),
            ("dropped_kind".into(), s.ingest.dropped_kind),
            ("dropped_unresolved".into(), s.dropped_unresolved),
            ("dropped_duplicate_key".into(), s.dropped_duplicate_key),
            ("quarantined_venues".into(), s.quarantined_venues),
            ("resolved_records".into(), self.inner.records.len() as u64),
        ])
    }

    /// Resolve a raw venue token to its canonical key.
    fn resolve_venue(&self, token: &str) -> Option<String> {
        self.inner
            .registry
            .resolve(token)
            .map(|id| self.inner.registry.canonical_key(id).to_string())
    }

    /// (canonical_key, display_name) for every venue.
    fn venues(&self) -> Vec<(String, String)> {
        self.inner
            .registry
            .iter()
            .map(|(_, v)| (v.canonical_key.clone(), v.display_name.clone()))
            .collect()
    }

    /// Venues whose history merges several names:
    /// (canonical_key, display_name, [(name, first_year, last_year, events)]).
    #[allow(clippy::type_complexity)]
    fn merges(&self) -> Vec<(String, String, Vec<(String, i32, i32, u32)>)> {
        self.inner
            .registry
            .merges()
            .map(|(_, v)| {
                (
                    v.canonical_key.clone(),
                    v.display_name.clone(),
                    v.spans
                        .iter()
                        .map(|s| (s.name.clone(), s.first_year, s.last_year, s.event_count))
                        .collect(),
                )
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Corpus({} records, {} authors, {} venues, years {}-{})",
            self.inner.records.len(),
            self.inner.authors.len(),
            self.inner.registry.len(),
            self.inner.min_year,
            self.inner.cutoff_year
        )
    }
}

/// Prepared analysis: bound area sets, co-authorship graphs, author
/// profiles. Construction does the heavy lifting; the methods only read.
#[pyclass(name = "Analysis", module = "lens_py", frozen)]
struct PyAnalysis {
    inner: Analytics,
}

#[pymethods]
impl PyAnalysis {
    #[new]
    #[pyo3(signature = (corpus, top_areas, nontop_areas, top_k=3, averaging="trim_trivial", exclude_mix_areas=None))]
    fn new(
        corpus: &PyCorpus,
        top_areas: PathBuf,
        nontop_areas: PathBuf,
        top_k: usize,
        averaging: &str,
        exclude_mix_areas: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let top_set = AreaSet::load(&top_areas).map_err(to_py_err)?;
        let nontop_set = AreaSet::load(&nontop_areas).map_err(to_py_err)?;
        let averaging = match averaging {
            "trim_trivial" => lens_core::dynamics::AveragingConvention::TrimTrivial,
            "inclusive" => lens_core::dynamics::AveragingConvention::Inclusive,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown averaging `{other}` (expected trim_trivial or inclusive)"
                )))
            }
        };
        let options = AnalyticsOptions {
            averaging,
            exclude_mix_areas: exclude_mix_areas
                .unwrap_or_else(|| vec!["CBIO".into(), "WWW".into()]),
            top_k,
            ..AnalyticsOptions::default()
        };
        let config_digest = sha256_bytes(
            format!(
                "{}|{}|{:?}|{}|{:?}",
                lens_core::corpus::sha256_file(&top_areas).map_err(to_py_err)?,
                lens_core::corpus::sha256_file(&nontop_areas).map_err(to_py_err)?,
                averaging,
                top_k,
                options.exclude_mix_areas,
            )
            .as_bytes(),
        );
        let provenance = Provenance::new(config_digest, corpus.inner.source_digest.clone());
        let inner = Analytics::prepare(
            corpus.inner.clone(),
            top_set,
            nontop_set,
            options,
            provenance,
        )
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Vertex/edge/singleton counts and the mean local clustering
    /// coefficient for one of the three graphs ("cs", "top", "nontop").
    fn graph_summary(&self, py: Python<'_>, scope: &str) -> PyResult<Py<PyAny>> {
        let graph = match scope.to_ascii_lowercase().as_str() {
            "cs" => &self.inner.cs_graph,
            "top" => &self.inner.top_graph,
            "nontop" | "non-top" => &self.inner.nontop_graph,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown scope `{other}` (expected cs, top or nontop)"
                )))
            }
        };
        let clustering = graph.clustering_coefficient();
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("vertices", graph.vertex_count())?;
        dict.set_item("edges", graph.edge_count())?;
        dict.set_item("singletons", graph.singleton_count())?;
        dict.set_item("clustering", clustering.value)?;
        dict.set_item("clustering_degenerate", clustering.is_degenerate())?;
        Ok(dict.into())
    }

    /// Collaboration-trends rows for "top" or "nontop".
    fn collaboration(&self, set: &str) -> PyResult<Vec<HashMap<String, String>>> {
        Ok(rows_as_dicts(
            &self.inner.collab_report(parse_set_label(set)?),
        ))
    }

    /// Population-stability rows for "top" or "nontop".
    fn stability(&self, set: &str) -> PyResult<Vec<HashMap<String, String>>> {
        Ok(rows_as_dicts(
            &self.inner.stability_report(parse_set_label(set)?),
        ))
    }

    /// Growth series rows (scope, year, publications, abs, rel).
    fn growth(&self) -> Vec<HashMap<String, String>> {
        rows_as_dicts(&self.inner.growth_report())
    }

    /// TOP vs NONTOP growth comparison: per-year rows plus the summary.
    fn compare_growth(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = self.inner.compare_growth_report();
        let dict = pyo3::types::PyDict::new(py);
        for (key, value) in &report.summary {
            dict.set_item(key, value)?;
        }
        dict.set_item("per_year", rows_as_dicts(&report))?;
        Ok(dict.into())
    }

    /// Career-length distribution for "cs", "top" or a TOP-area
    /// abbreviation; (length, authors, pct) triples.
    fn career_lengths(&self, scope: &str) -> PyResult<Vec<(u32, u32, f64)>> {
        let career_scope = match scope.to_ascii_lowercase().as_str() {
            "cs" => CareerScope::Cs,
            "top" => CareerScope::Top,
            other => match self.inner.top_set.area_by_abbrev(other) {
                Some(idx) => CareerScope::Area(idx),
                None => {
                    return Err(PyValueError::new_err(format!(
                        "unknown career scope `{other}`"
                    )))
                }
            },
        };
        let hist = career_length_distribution(self.inner.profiles.iter(), career_scope);
        Ok(hist.bins)
    }

    /// Transition rankings: start abbrev -> list of (target abbrev,
    /// probability), plus per-area support.
    fn transitions(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = self.inner.transitions_report();
        let dict = pyo3::types::PyDict::new(py);
        for (key, value) in &report.summary {
            dict.set_item(key, value)?;
        }
        dict.set_item("rows", rows_as_dicts(&report))?;
        Ok(dict.into())
    }

    /// Venue-mix histogram rows; per-area histograms included on request.
    #[pyo3(signature = (per_area=false))]
    fn venue_mix(&self, per_area: bool) -> Vec<HashMap<String, String>> {
        rows_as_dicts(&self.inner.venue_mix_report_scoped(per_area))
    }

    /// Productivity-per-period rows for the three cohorts.
    fn periods(&self) -> Vec<HashMap<String, String>> {
        rows_as_dicts(&self.inner.periods_report())
    }

    /// The raw CSV text of any standard report kind.
    fn report_csv(&self, kind: &str) -> PyResult<String> {
        let report = self.report_by_kind(kind)?;
        let bytes = report.to_csv_bytes().map_err(to_py_err)?;
        Ok(String::from_utf8(bytes).expect("reports are UTF-8"))
    }

    /// Write the eight standard reports (CSV; JSON mirror and plot data
    /// optional) into a directory. Returns the written paths.
    #[pyo3(signature = (out_dir, json=false, plot_data=false))]
    fn write_reports(
        &self,
        out_dir: PathBuf,
        json: bool,
        plot_data: bool,
    ) -> PyResult<Vec<String>> {
        let mut reports = self.inner.all_reports();
        if plot_data {
            reports.push(self.inner.periods_report());
            reports.push(self.inner.compare_growth_report());
            let plots: Vec<MetricReport> = reports.iter().filter_map(emit_plot_data).collect();
            reports.extend(plots);
        }
        let config = lens_core::config::RunConfig {
            out_dir,
            emit_json: json,
            ..lens_core::config::RunConfig::default()
        };
        let written = write_reports(&reports, &config).map_err(to_py_err)?;
        Ok(written
            .into_iter()
            .map(|w| w.path.display().to_string())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Analysis(cs: {}v/{}e, top: {}v, nontop: {}v)",
            self.inner.cs_graph.vertex_count(),
            self.inner.cs_graph.edge_count(),
            self.inner.top_graph.vertex_count(),
            self.inner.nontop_graph.vertex_count(),
        )
    }
}

impl PyAnalysis {
    fn report_by_kind(&self, kind: &str) -> PyResult<MetricReport> {
        let report = match kind {
            "collab_top" => self.inner.collab_report(SetLabel::Top),
            "collab_nontop" => self.inner.collab_report(SetLabel::NonTop),
            "stability_top" => self.inner.stability_report(SetLabel::Top),
            "stability_nontop" => self.inner.stability_report(SetLabel::NonTop),
            "growth" => self.inner.growth_report(),
            "transitions" => self.inner.transitions_report(),
            "careers" => self.inner.careers_report(),
            "venue_mix" => self.inner.venue_mix_report(),
            "periods" => self.inner.periods_report(),
            "compare_growth" => self.inner.compare_growth_report(),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown report kind `{other}`"
                )))
            }
        };
        Ok(report)
    }
}

/// Canonical form of an author name (whitespace collapsed); raises
/// ValueError on an empty name.
#[pyfunction]
fn normalize_author(name: &str) -> PyResult<String> {
    normalize_author_name(name).ok_or_else(|| PyValueError::new_err("empty author name"))
}

#[pymodule]
fn lens_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_function(wrap_pyfunction!(normalize_author, m)?)?;
    m.add("STANDARD_REPORTS", lens_core::pipeline::STANDARD_REPORTS)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
