//! `lens` — DBLP community analytics front door.
//!
//! Typical flow: `lens --xml dblp.xml report-all` ingests the dump (cached
//! afterwards), computes every report and writes CSVs into the output
//! directory. Individual subcommands emit single reports.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lens_core::areas::SetLabel;
use lens_core::config::{RunConfig, RunConfigFile};
use lens_core::corpus::Corpus;
use lens_core::ingest::IngestOptions;
use lens_core::pipeline::{load_corpus, run_pipeline, write_reports, Analytics, AnalyticsOptions};
use lens_core::report::{emit_plot_data, MetricReport, Provenance};

#[derive(Parser)]
#[command(
    name = "lens",
    version,
    about = "Co-authorship and community analytics for DBLP"
)]
struct Cli {
    /// Path to dblp.xml (plain or gzipped)
    #[arg(long, global = true)]
    xml: Option<PathBuf>,

    /// Entity definitions; defaults to dblp.dtd next to the XML
    #[arg(long, global = true)]
    dtd: Option<PathBuf>,

    /// Last publication year admitted into the corpus
    #[arg(long, global = true)]
    cutoff_year: Option<i32>,

    /// TOML run configuration; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for reports (and the default cache location)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads for per-area/per-venue computations (0 = default)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Area config for the TOP set
    #[arg(long, global = true)]
    top_areas: Option<PathBuf>,

    /// Area config for the NONTOP set
    #[arg(long, global = true)]
    nontop_areas: Option<PathBuf>,

    /// Also write a JSON mirror of each report
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Top,
    Nontop,
}

impl From<SetArg> for SetLabel {
    fn from(value: SetArg) -> Self {
        match value {
            SetArg::Top => SetLabel::Top,
            SetArg::Nontop => SetLabel::NonTop,
        }
    }
}

#[derive(Args)]
struct OutArg {
    /// Output file (default: <out-dir>/<report>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the XML dump into the intermediate record file
    Ingest {
        /// Record file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Venue registry summary
    Venues {
        /// List every multi-name merge for audit
        #[arg(long)]
        print_merges: bool,
    },
    /// Collaboration-trends table for one set
    Collab {
        #[arg(long, value_enum)]
        set: SetArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Career-length distributions
    Careers {
        /// top = TOP set and its areas; cs = whole conference corpus
        #[arg(long, default_value = "top")]
        scope: String,
        #[command(flatten)]
        out: OutArg,
        /// Also write productivity-per-period profiles to this file
        #[arg(long)]
        periods: Option<PathBuf>,
    },
    /// Area transition matrix (top-k targets per start area)
    Transitions {
        #[arg(long, default_value_t = 3)]
        top_k: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Author-venue distribution in 10% intervals
    VenueMix {
        /// Add per-area histograms (majority-voting assignment)
        #[arg(long)]
        per_area: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Publication growth series (absolute and relative)
    Growth {
        /// Restrict to one scope: cs, top, nontop, an area abbreviation,
        /// or nontop:<abbrev>
        #[arg(long)]
        scope: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// TOP vs NONTOP absolute-growth comparison
    CompareGrowth {
        #[command(flatten)]
        out: OutArg,
    },
    /// Population stability per venue
    Stability {
        #[arg(long, value_enum)]
        set: SetArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run everything: the eight standard reports
    ReportAll {
        /// Additionally emit tidy (x, series, y) files for each figure
        #[arg(long)]
        plot_data: bool,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        RunConfigFile::load(path)?.apply_to(&mut config);
    }
    if let Some(xml) = &cli.xml {
        config.xml_path = xml.clone();
    }
    if let Some(dtd) = &cli.dtd {
        config.dtd_path = Some(dtd.clone());
    }
    if let Some(cutoff) = cli.cutoff_year {
        config.cutoff_year = cutoff;
    }
    if let Some(out_dir) = &cli.out_dir {
        config.out_dir = out_dir.clone();
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    if let Some(top) = &cli.top_areas {
        config.top_areas = top.clone();
    }
    if let Some(nontop) = &cli.nontop_areas {
        config.nontop_areas = nontop.clone();
    }
    if cli.json {
        config.emit_json = true;
    }
    if config.xml_path.as_os_str().is_empty() {
        bail!("no XML input: pass --xml or set xml_path in the config file");
    }
    Ok(config)
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = build_config(&cli)?;
    if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build_global()
            .ok();
    }

    match &cli.command {
        Command::Ingest { out } => {
            config.validate()?;
            let mut options = IngestOptions {
                min_year: config.min_year,
                cutoff_year: config.cutoff_year,
                ..IngestOptions::default()
            };
            if let Some(dtd) = config.effective_dtd() {
                options = options.with_dtd(&dtd)?;
            }
            let corpus = Corpus::ingest_xml(&config.xml_path, &options)?;
            corpus.write_records_file(out)?;
            let s = &corpus.stats;
            println!(
                "seen {} records: admitted {}, incomplete {}, pre-{} {}, post-{} {}, other kinds {}",
                s.ingest.total_seen,
                s.ingest.admitted,
                s.ingest.dropped_incomplete,
                config.min_year,
                s.ingest.dropped_pre1970,
                config.cutoff_year,
                s.ingest.dropped_post_cutoff,
                s.ingest.dropped_kind,
            );
            println!(
                "resolved {} records into {} venues ({} unresolved, {} duplicate keys, {} quarantined tokens)",
                corpus.records.len(),
                corpus.registry.len(),
                s.dropped_unresolved,
                s.dropped_duplicate_key,
                s.quarantined_venues,
            );
            println!("records written to {}", out.display());
        }
        Command::Venues { print_merges } => {
            config.validate()?;
            let (corpus, _) = load_corpus(&config)?;
            println!("{} canonical venues", corpus.registry.len());
            if *print_merges {
                for (_, venue) in corpus.registry.merges() {
                    println!("{} => {}", venue.canonical_key, venue.display_name);
                    for span in &venue.spans {
                        println!(
                            "    {} ({}-{}, {} events)",
                            span.name, span.first_year, span.last_year, span.event_count
                        );
                    }
                }
            }
        }
        Command::ReportAll { plot_data } => {
            let mut config = config;
            config.emit_plot_data = *plot_data;
            let written = run_pipeline(&config)?;
            for report in &written {
                println!("{}  {}", report.digest, report.path.display());
            }
        }
        command => {
            // Single-report commands share the prepared analytics state.
            config.validate()?;
            let mut options = AnalyticsOptions::from_config(&config);
            if let Command::Transitions { top_k, .. } = command {
                options.top_k = *top_k;
            }
            let config_digest = config.digest()?;
            let (corpus, _) = load_corpus(&config)?;
            let top_set = lens_core::areas::AreaSet::load(&config.top_areas)?;
            let nontop_set = lens_core::areas::AreaSet::load(&config.nontop_areas)?;
            let provenance = Provenance::new(config_digest, corpus.source_digest.clone());
            let analytics =
                Analytics::prepare(Arc::new(corpus), top_set, nontop_set, options, provenance)?;

            let (mut reports, out_override): (Vec<MetricReport>, Option<PathBuf>) = match command {
                Command::Collab { set, out } => (
                    vec![analytics.collab_report((*set).into())],
                    out.out.clone(),
                ),
                Command::Careers {
                    scope,
                    out,
                    periods,
                } => {
                    let mut report = analytics.careers_report();
                    match scope.to_ascii_lowercase().as_str() {
                        "cs" => report.rows.retain(|r| r[0] == "CS"),
                        "top" => report.rows.retain(|r| r[0] != "CS"),
                        other => bail!("unknown careers scope `{other}` (expected top or cs)"),
                    }
                    if let Some(path) = periods {
                        let periods_report = analytics.periods_report();
                        periods_report.write_csv(path)?;
                        println!("{}", path.display());
                    }
                    (vec![report], out.out.clone())
                }
                Command::Transitions { out, .. } => {
                    (vec![analytics.transitions_report()], out.out.clone())
                }
                Command::VenueMix { per_area, out } => (
                    vec![analytics.venue_mix_report_scoped(*per_area)],
                    out.out.clone(),
                ),
                Command::Growth { scope, out } => {
                    let mut report = analytics.growth_report();
                    if let Some(scope) = scope {
                        let want = scope.to_ascii_uppercase();
                        report.rows.retain(|r| r[0].to_ascii_uppercase() == want);
                        if report.rows.is_empty() {
                            bail!("no growth series matches scope `{scope}`");
                        }
                    }
                    (vec![report], out.out.clone())
                }
                Command::CompareGrowth { out } => {
                    (vec![analytics.compare_growth_report()], out.out.clone())
                }
                Command::Stability { set, out } => (
                    vec![analytics.stability_report((*set).into())],
                    out.out.clone(),
                ),
                Command::Ingest { .. } | Command::Venues { .. } | Command::ReportAll { .. } => {
                    unreachable!("handled above")
                }
            };

            if config.emit_plot_data {
                let plots: Vec<MetricReport> = reports.iter().filter_map(emit_plot_data).collect();
                reports.extend(plots);
            }

            match out_override {
                Some(path) => {
                    let report = reports.first().context("no report produced")?;
                    report.write_csv(&path)?;
                    if config.emit_json {
                        report.write_json(&path.with_extension("json"))?;
                    }
                    println!("{}", path.display());
                }
                None => {
                    for report in write_reports(&reports, &config)? {
                        println!("{}  {}", report.digest, report.path.display());
                    }
                }
            }
        }
    }
    Ok(())
}
