//! Run configuration: an optional JSON file overridden by command-line flags.

use std::path::{Path, PathBuf};

use cg_uncert::coarse::GhfFamily;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub u_max: Option<f64>,
    pub n: Option<usize>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub state: Option<String>,
    pub delta: Option<f64>,
    pub delta_p: Option<f64>,
    pub hbar: Option<f64>,
    pub alpha: Option<f64>,
    pub offset_x: Option<f64>,
    pub offset_p: Option<f64>,
    pub ghf_x: Option<String>,
    pub ghf_p: Option<String>,
    #[serde(default)]
    pub sweep: SweepFile,
    #[serde(default)]
    pub grid: GridFile,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|source| CliError::Config {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let f = i as f64 / n;
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// Fully resolved settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub state: String,
    pub delta: f64,
    pub delta_p: f64,
    pub hbar: f64,
    pub alpha: f64,
    pub offset_x: f64,
    pub offset_p: f64,
    pub ghf_x: GhfFamily,
    pub ghf_p: GhfFamily,
    pub sweep: Sweep,
    pub grid_u_max: f64,
    pub grid_n: usize,
    pub samples: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn positive(field: &'static str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Field {
            field,
            message: format!("must be positive and finite, got {v}"),
        })
    }
}

/// `rect` or `tgauss:a=<value>`.
pub fn parse_ghf(field: &'static str, s: &str) -> CliResult<GhfFamily> {
    if s == "rect" {
        return Ok(GhfFamily::Rectangle);
    }
    let bad = || CliError::Field {
        field,
        message: format!("expected `rect` or `tgauss:a=<number>`, got `{s}`"),
    };
    let a = s
        .strip_prefix("tgauss:a=")
        .ok_or_else(bad)?
        .parse::<f64>()
        .map_err(|_| bad())?;
    if !a.is_finite() {
        return Err(bad());
    }
    Ok(GhfFamily::TruncatedGaussian { a })
}

impl RunConfig {
    /// Merges flags over file values over defaults and validates the result.
    pub fn resolve(file: ConfigFile, flags: ConfigFile) -> CliResult<Self> {
        macro_rules! pick {
            ($($f:ident).+, $default:expr) => {
                flags.$($f).+.clone().or(file.$($f).+.clone()).unwrap_or($default)
            };
        }
        let sweep = Sweep {
            min: pick!(sweep.min, 0.01),
            max: pick!(sweep.max, 100.0),
            points: pick!(sweep.points, 200),
            log: pick!(sweep.log, true),
        };
        let ghf_x = pick!(ghf_x, "rect".to_string());
        let ghf_p = pick!(ghf_p, "rect".to_string());
        let cfg = Self {
            state: pick!(state, "gaussian:sigma=1".to_string()),
            delta: positive("delta", pick!(delta, 1.0))?,
            delta_p: positive("delta-p", pick!(delta_p, 1.0))?,
            hbar: positive("hbar", pick!(hbar, 1.0))?,
            alpha: pick!(alpha, 1.0),
            offset_x: pick!(offset_x, 0.0),
            offset_p: pick!(offset_p, 0.0),
            ghf_x: parse_ghf("ghf-x", &ghf_x)?,
            ghf_p: parse_ghf("ghf-p", &ghf_p)?,
            sweep,
            grid_u_max: pick!(grid.u_max, 1.0),
            grid_n: pick!(grid.n, 101),
            samples: pick!(samples, 1_000_000),
            seed: pick!(seed, 0),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format),
        };
        if !(0.5..=1.0).contains(&cfg.alpha) {
            return Err(CliError::Field {
                field: "alpha",
                message: format!("must lie in [0.5, 1], got {}", cfg.alpha),
            });
        }
        for (field, v) in [("offset-x", cfg.offset_x), ("offset-p", cfg.offset_p)] {
            if !v.is_finite() {
                return Err(CliError::Field {
                    field,
                    message: format!("must be finite, got {v}"),
                });
            }
        }
        if cfg.sweep.points == 0 {
            return Err(CliError::Field {
                field: "sweep-points",
                message: "must be at least 1".into(),
            });
        }
        let s = cfg.sweep;
        let lo_ok = if s.log { s.min > 0.0 } else { s.min >= 0.0 };
        if !(lo_ok && s.max >= s.min && s.max.is_finite()) {
            return Err(CliError::Field {
                field: "sweep-min",
                message: format!(
                    "sweep range [{}, {}] is invalid{}",
                    s.min,
                    s.max,
                    if s.log { " for log spacing" } else { "" }
                ),
            });
        }
        if cfg.grid_n == 0 {
            return Err(CliError::Field {
                field: "grid-n",
                message: "must be at least 1".into(),
            });
        }
        if !(cfg.grid_u_max >= 0.0 && cfg.grid_u_max.is_finite()) {
            return Err(CliError::Field {
                field: "grid-u-max",
                message: format!("must be finite and ≥ 0, got {}", cfg.grid_u_max),
            });
        }
        if cfg.samples == 0 {
            return Err(CliError::Field {
                field: "samples",
                message: "must be at least 1".into(),
            });
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"delta": 2.0, "sweep": {"points": 5}, "alpha": 0.75}"#)
                .unwrap();
        let flags = ConfigFile {
            delta: Some(3.0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(cfg.delta, 3.0);
        assert_eq!(cfg.sweep.points, 5);
        assert_eq!(cfg.alpha, 0.75);
        assert_eq!(cfg.hbar, 1.0);
    }

    #[test]
    fn unknown_config_field_is_named() {
        let e = serde_json::from_str::<ConfigFile>(r#"{"detla": 1}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("detla") && e.contains("line 1"), "{e}");
    }

    #[test]
    fn invalid_values() {
        let bad = |f: ConfigFile| {
            RunConfig::resolve(ConfigFile::default(), f)
                .unwrap_err()
                .to_string()
        };
        assert!(bad(ConfigFile {
            delta: Some(0.0),
            ..Default::default()
        })
        .contains("delta"));
        assert!(bad(ConfigFile {
            alpha: Some(0.3),
            ..Default::default()
        })
        .contains("alpha"));
        let sweep = SweepFile {
            min: Some(0.0),
            ..Default::default()
        };
        assert!(bad(ConfigFile {
            sweep,
            ..Default::default()
        })
        .contains("sweep"));
        assert!(bad(ConfigFile {
            ghf_x: Some("tri".into()),
            ..Default::default()
        })
        .contains("ghf-x"));
    }

    #[test]
    fn sweep_values() {
        let s = Sweep {
            min: 0.01,
            max: 100.0,
            points: 5,
            log: true,
        };
        let v = s.values();
        assert_eq!(v.len(), 5);
        assert!((v[2] - 1.0).abs() < 1e-15 && (v[4] - 100.0).abs() < 1e-12);
        let one = Sweep { points: 1, ..s };
        assert_eq!(one.values(), vec![0.01]);
        assert_eq!(
            parse_ghf("x", "tgauss:a=2.5").unwrap(),
            GhfFamily::TruncatedGaussian { a: 2.5 }
        );
    }
}
