//! Run configuration: paths, year bounds and analysis knobs.
//!
//! A config can come from a TOML file (`--config`), with CLI flags layered
//! on top. Everything that influences report *content* enters the config
//! digest; purely operational settings (output directory, job count) do
//! not, so the same analysis on the same input always carries the same
//! digest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{sha256_bytes, sha256_file};
use crate::dynamics::AveragingConvention;
use crate::error::{LensError, Result};
use crate::ingest::{DEFAULT_CUTOFF_YEAR, DEFAULT_MIN_YEAR};

/// Environment variable naming the cache directory for intermediate record
/// files.
pub const CACHE_DIR_ENV: &str = "LENS_CACHE_DIR";

pub const DEFAULT_TOP_CONFIG: &str = "configs/top.toml";
pub const DEFAULT_NONTOP_CONFIG: &str = "configs/nontop.toml";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub xml_path: PathBuf,
    /// Entity declarations; defaults to `dblp.dtd` next to the XML when
    /// that file exists.
    pub dtd_path: Option<PathBuf>,
    pub min_year: i32,
    pub cutoff_year: i32,
    pub top_areas: PathBuf,
    pub nontop_areas: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides `$LENS_CACHE_DIR`; default is `<out_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
    pub averaging: AveragingConvention,
    /// Area abbreviations skipped in the per-area venue-mix report.
    pub exclude_mix_areas: Vec<String>,
    pub top_k: usize,
    /// Rayon worker threads; 0 keeps the library default.
    pub jobs: usize,
    pub emit_json: bool,
    pub emit_plot_data: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            xml_path: PathBuf::new(),
            dtd_path: None,
            min_year: DEFAULT_MIN_YEAR,
            cutoff_year: DEFAULT_CUTOFF_YEAR,
            top_areas: PathBuf::from(DEFAULT_TOP_CONFIG),
            nontop_areas: PathBuf::from(DEFAULT_NONTOP_CONFIG),
            out_dir: PathBuf::from("out"),
            cache_dir: None,
            averaging: AveragingConvention::TrimTrivial,
            exclude_mix_areas: vec!["CBIO".into(), "WWW".into()],
            top_k: 3,
            jobs: 0,
            emit_json: false,
            emit_plot_data: false,
        }
    }
}

/// Optional-field mirror of [`RunConfig`] for `--config` files.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub xml_path: Option<PathBuf>,
    pub dtd_path: Option<PathBuf>,
    pub min_year: Option<i32>,
    pub cutoff_year: Option<i32>,
    pub top_areas: Option<PathBuf>,
    pub nontop_areas: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub averaging: Option<AveragingConvention>,
    pub exclude_mix_areas: Option<Vec<String>>,
    pub top_k: Option<usize>,
    pub jobs: Option<usize>,
    pub emit_json: Option<bool>,
    pub emit_plot_data: Option<bool>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LensError::io_context(format!("reading {}", path.display()), e))?;
        toml::from_str(&text).map_err(|e| LensError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_to(self, config: &mut RunConfig) {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    config.$field = v;
                }
            };
        }
        take!(xml_path);
        take!(min_year);
        take!(cutoff_year);
        take!(top_areas);
        take!(nontop_areas);
        take!(out_dir);
        take!(averaging);
        take!(exclude_mix_areas);
        take!(top_k);
        take!(jobs);
        take!(emit_json);
        take!(emit_plot_data);
        if self.dtd_path.is_some() {
            config.dtd_path = self.dtd_path;
        }
        if self.cache_dir.is_some() {
            config.cache_dir = self.cache_dir;
        }
    }
}

#[derive(Serialize)]
struct DigestView<'a> {
    min_year: i32,
    cutoff_year: i32,
    top_areas_digest: &'a str,
    nontop_areas_digest: &'a str,
    averaging: AveragingConvention,
    exclude_mix_areas: &'a [String],
    top_k: usize,
}

impl RunConfig {
    /// Validates paths and year bounds; fails before any computation
    /// starts. Does not create directories.
    pub fn validate(&self) -> Result<()> {
        if self.cutoff_year < self.min_year {
            return Err(LensError::Config(format!(
                "cutoff year {} below minimum year {}",
                self.cutoff_year, self.min_year
            )));
        }
        if self.min_year < 1970 {
            return Err(LensError::Config(format!(
                "minimum year {} below the 1970 corpus floor",
                self.min_year
            )));
        }
        for (label, path) in [
            ("xml", &self.xml_path),
            ("top areas config", &self.top_areas),
            ("nontop areas config", &self.nontop_areas),
        ] {
            if !path.is_file() {
                return Err(LensError::Config(format!(
                    "{label} path {} does not exist",
                    path.display()
                )));
            }
        }
        if let Some(dtd) = &self.dtd_path {
            if !dtd.is_file() {
                return Err(LensError::Config(format!(
                    "dtd path {} does not exist",
                    dtd.display()
                )));
            }
        }
        Ok(())
    }

    /// The DTD actually in effect: explicit path, or `dblp.dtd` next to the
    /// XML when present.
    pub fn effective_dtd(&self) -> Option<PathBuf> {
        if self.dtd_path.is_some() {
            return self.dtd_path.clone();
        }
        let sibling = self.xml_path.with_file_name("dblp.dtd");
        sibling.is_file().then_some(sibling)
    }

    pub fn cache_dir(&self) -> PathBuf {
        if let Some(dir) = &self.cache_dir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        self.out_dir.join("cache")
    }

    /// Digest over everything that affects report content: year bounds,
    /// area config file contents, averaging convention, exclusions, top-k.
    pub fn digest(&self) -> Result<String> {
        let top_digest = sha256_file(&self.top_areas)?;
        let nontop_digest = sha256_file(&self.nontop_areas)?;
        let view = DigestView {
            min_year: self.min_year,
            cutoff_year: self.cutoff_year,
            top_areas_digest: &top_digest,
            nontop_areas_digest: &nontop_digest,
            averaging: self.averaging,
            exclude_mix_areas: &self.exclude_mix_areas,
            top_k: self.top_k,
        };
        let canonical = serde_json::to_vec(&view)
            .map_err(|e| LensError::Config(format!("digesting config: {e}")))?;
        Ok(sha256_bytes(&canonical))
    }
}
