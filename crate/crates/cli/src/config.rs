//! Campaign configuration: a TOML file overlaid with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use chebcert::campaign::{Generator, Inequality};
use chebcert::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Values as read from a config file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub inequality: Option<String>,
    pub generator: Option<String>,
    pub dims: Option<Vec<usize>>,
    pub n_points: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub r_grid: Option<Vec<f64>>,
    pub lambda_grid: Option<Vec<f64>>,
    pub tolerances: Option<Tolerances>,
    pub output_format: Option<Format>,
    pub output_path: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Flag values win over file values.
    pub fn overlay(self, flags: FileConfig) -> FileConfig {
        FileConfig {
            inequality: flags.inequality.or(self.inequality),
            generator: flags.generator.or(self.generator),
            dims: flags.dims.or(self.dims),
            n_points: flags.n_points.or(self.n_points),
            trials: flags.trials.or(self.trials),
            seed: flags.seed.or(self.seed),
            r_grid: flags.r_grid.or(self.r_grid),
            lambda_grid: flags.lambda_grid.or(self.lambda_grid),
            tolerances: flags.tolerances.or(self.tolerances),
            output_format: flags.output_format.or(self.output_format),
            output_path: flags.output_path.or(self.output_path),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub const DEFAULT_R_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const MAX_DIM: usize = 16;

/// Validated campaign settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignConfig {
    #[serde(serialize_with = "as_name")]
    pub inequality: Inequality,
    #[serde(serialize_with = "as_name")]
    pub generator: Generator,
    pub dims: Vec<usize>,
    pub n_points: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub r_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Whether a mean grid was given explicitly rather than defaulted.
    #[serde(skip)]
    pub explicit_mean_grid: bool,
    pub tolerances: Tolerances,
    pub output_format: Format,
    pub output_path: Option<PathBuf>,
}

fn as_name<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl CampaignConfig {
    /// Resolves and validates. `default_generator` overrides the
    /// inequality's own generator when none is configured.
    pub fn resolve(
        raw: FileConfig,
        default_generator: Option<Generator>,
    ) -> Result<Self, ConfigError> {
        let bad = |msg: String| Err(ConfigError(msg));
        let inequality: Inequality = raw
            .inequality
            .as_deref()
            .unwrap_or("thm21")
            .parse()
            .map_err(|e| ConfigError(format!("{e}")))?;
        let generator = match raw.generator.as_deref() {
            Some(name) => name.parse().map_err(|e| ConfigError(format!("{e}")))?,
            None => default_generator.unwrap_or_else(|| inequality.default_generator()),
        };
        let explicit_mean_grid = raw.r_grid.is_some() || raw.lambda_grid.is_some();
        let cfg = CampaignConfig {
            inequality,
            generator,
            dims: raw.dims.unwrap_or_else(|| (1..=5).collect()),
            n_points: raw.n_points.unwrap_or_else(|| (2..=8).collect()),
            trials: raw.trials.unwrap_or(10),
            seed: raw.seed.unwrap_or(0),
            r_grid: raw.r_grid.unwrap_or_else(|| DEFAULT_R_GRID.to_vec()),
            lambda_grid: raw
                .lambda_grid
                .unwrap_or_else(|| DEFAULT_LAMBDA_GRID.to_vec()),
            explicit_mean_grid,
            tolerances: raw.tolerances.unwrap_or_default(),
            output_format: raw.output_format.unwrap_or(Format::Json),
            output_path: raw.output_path,
        };
        if cfg.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if cfg.dims.is_empty() || cfg.n_points.is_empty() {
            return bad("dims and n_points must be nonempty".into());
        }
        if let Some(d) = cfg.dims.iter().find(|&&d| d == 0 || d > MAX_DIM) {
            return bad(format!("dimension {d} outside 1..={MAX_DIM}"));
        }
        if cfg.n_points.contains(&0) {
            return bad("n_points entries must be positive".into());
        }
        if cfg.r_grid.is_empty() || cfg.lambda_grid.is_empty() {
            return bad("r_grid and lambda_grid must be nonempty".into());
        }
        if let Some(r) = cfg.r_grid.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
            return bad(format!("r = {r} outside [-1, 1]"));
        }
        if let Some(l) = cfg.lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return bad(format!("lambda = {l} outside [0, 1]"));
        }
        cfg.tolerances
            .validate()
            .map_err(|e| ConfigError(format!("tolerances: {e}")))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = CampaignConfig::resolve(FileConfig::default(), None).unwrap();
        assert_eq!(cfg.inequality, Inequality::Thm21);
        assert_eq!(cfg.generator, Generator::Scaled);
        assert_eq!(cfg.dims, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.n_points, vec![2, 3, 4, 5, 6, 7, 8]);
        assert!(!cfg.explicit_mean_grid);
    }

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig =
            toml::from_str("seed = 3\ntrials = 4\ninequality = \"cor22\"").unwrap();
        let flags = FileConfig {
            seed: Some(9),
            ..FileConfig::default()
        };
        let cfg = CampaignConfig::resolve(file.overlay(flags), None).unwrap();
        assert_eq!(
            (cfg.seed, cfg.trials, cfg.inequality),
            (9, 4, Inequality::Cor22)
        );
    }

    #[test]
    fn rejects_out_of_range() {
        let with = |f: FileConfig| CampaignConfig::resolve(f, None).is_err();
        assert!(with(FileConfig {
            r_grid: Some(vec![1.5]),
            ..Default::default()
        }));
        assert!(with(FileConfig {
            lambda_grid: Some(vec![-0.1]),
            ..Default::default()
        }));
        assert!(with(FileConfig {
            trials: Some(0),
            ..Default::default()
        }));
        assert!(with(FileConfig {
            dims: Some(vec![]),
            ..Default::default()
        }));
        assert!(with(FileConfig {
            inequality: Some("thm99".into()),
            ..Default::default()
        }));
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
