//! TOML run configuration. Every field but `power_db` and `eta_db` has a
//! default; unknown keys are rejected.

use std::path::Path;

use ostbc_precoder::channel::{LinkConfig, Polarization};
use ostbc_precoder::montecarlo::{Averaging, ModePolicy, SweepConfig};
use ostbc_precoder::ostbc::CodeName;
use ostbc_precoder::precoder::LinkMode;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest power grid accepted from a range specification.
const MAX_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerGrid {
    List(Vec<f64>),
    Range { from: f64, to: f64, step: f64 },
}

impl PowerGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        match *self {
            PowerGrid::List(ref v) => Ok(v.clone()),
            PowerGrid::Range { from, to, step } => {
                if !(step > 0.0 && step.is_finite() && from.is_finite() && to.is_finite()) {
                    return Err(CliError::config(
                        "power_db",
                        "range needs finite `from`, `to` and a positive `step`",
                    ));
                }
                if to < from {
                    return Err(CliError::config("power_db", "range `to` is below `from`"));
                }
                let n = ((to - from) / step + 1e-9).floor() as usize + 1;
                if n > MAX_GRID {
                    return Err(CliError::config(
                        "power_db",
                        format!("range has {n} points (limit {MAX_GRID})"),
                    ));
                }
                Ok((0..n).map(|i| from + step * i as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTable {
    pub n_r: Option<usize>,
    pub n_path: Option<usize>,
    pub xpd_db: Option<f64>,
    pub spacing: Option<f64>,
}

impl LinkTable {
    fn resolve(&self, n_r: usize, n_path: usize) -> LinkTable {
        LinkTable {
            n_r: Some(self.n_r.unwrap_or(n_r)),
            n_path: Some(self.n_path.unwrap_or(n_path)),
            xpd_db: Some(self.xpd_db.unwrap_or(8.0)),
            spacing: Some(self.spacing.unwrap_or(0.5)),
        }
    }

    fn link(&self, n_t: usize) -> LinkConfig {
        let mut cfg = LinkConfig::new(
            n_t,
            self.n_r.unwrap_or_default(),
            self.n_path.unwrap_or_default(),
            self.xpd_db.unwrap_or_default(),
        );
        cfg.spacing = self.spacing.unwrap_or(cfg.spacing);
        cfg
    }
}

/// File contents. After [`FileConfig::resolve`] every optional field is set,
/// and serializing it gives a config that reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<String>,
    pub power_db: PowerGrid,
    pub eta_db: f64,
    pub rho_sr: Option<f64>,
    /// `"select"` or a fixed mode such as `"VV"`.
    pub mode: Option<String>,
    pub pr_mode: Option<String>,
    pub n_tilt: Option<usize>,
    pub n_channel: Option<usize>,
    pub n_noise: Option<usize>,
    pub n_corr_samples: Option<usize>,
    pub epsilon_reg: Option<f64>,
    pub seed: Option<u64>,
    pub average_rs: Option<bool>,
    /// `"linear"` or `"db"`.
    pub averaging: Option<String>,
    pub ber_channels: Option<usize>,
    #[serde(default)]
    pub sl: LinkTable,
    #[serde(default)]
    pub spl: LinkTable,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fills every omitted field with its default.
    pub fn resolve(&self) -> FileConfig {
        let base = SweepConfig::new(
            CodeName::C2,
            LinkConfig::new(2, 1, 1, 8.0),
            LinkConfig::new(2, 1, 1, 8.0),
            Vec::new(),
            0.0,
        );
        FileConfig {
            code: Some(self.code.clone().unwrap_or_else(|| "C2".into())),
            power_db: self.power_db.clone(),
            eta_db: self.eta_db,
            rho_sr: Some(self.rho_sr.unwrap_or(base.rho_sr)),
            mode: Some(self.mode.clone().unwrap_or_else(|| "select".into())),
            pr_mode: Some(
                self.pr_mode
                    .clone()
                    .unwrap_or_else(|| base.pr_mode.to_string()),
            ),
            n_tilt: Some(self.n_tilt.unwrap_or(base.n_tilt)),
            n_channel: Some(self.n_channel.unwrap_or(base.n_channel)),
            n_noise: Some(self.n_noise.unwrap_or(base.n_noise)),
            n_corr_samples: Some(self.n_corr_samples.unwrap_or(base.n_corr_samples)),
            epsilon_reg: Some(self.epsilon_reg.unwrap_or(base.epsilon_reg)),
            seed: Some(self.seed.unwrap_or(base.seed)),
            average_rs: Some(self.average_rs.unwrap_or(base.average_rs)),
            averaging: Some(self.averaging.clone().unwrap_or_else(|| "linear".into())),
            ber_channels: Some(self.ber_channels.unwrap_or(base.ber_channels)),
            sl: self.sl.resolve(1, 2),
            spl: self.spl.resolve(2, 1),
        }
    }

    /// Validated sweep configuration; call on a resolved config.
    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        let code: CodeName = self
            .code
            .as_deref()
            .unwrap_or("C2")
            .parse()
            .map_err(|e| CliError::config("code", e))?;
        let policy = match self.mode.as_deref().unwrap_or("select") {
            "select" => ModePolicy::SelectBest,
            m => ModePolicy::Fixed(
                m.parse::<LinkMode>()
                    .map_err(|e| CliError::config("mode", e))?,
            ),
        };
        let pr_mode: Polarization = self
            .pr_mode
            .as_deref()
            .unwrap_or("V")
            .parse()
            .map_err(|e| CliError::config("pr_mode", e))?;
        let averaging = match self.averaging.as_deref().unwrap_or("linear") {
            "linear" => Averaging::Linear,
            "db" => Averaging::Db,
            other => {
                return Err(CliError::config(
                    "averaging",
                    format!("`{other}` is not `linear` or `db`"),
                ))
            }
        };

        for (key, table) in [("sl", &self.sl), ("spl", &self.spl)] {
            table
                .link(1)
                .validate()
                .map_err(|e| CliError::config(key, e))?;
        }
        let mut cfg = SweepConfig::new(
            code,
            self.sl.link(0),
            self.spl.link(0),
            self.power_db.points()?,
            self.eta_db,
        );
        let d = cfg.clone();
        cfg.rho_sr = self.rho_sr.unwrap_or(d.rho_sr);
        cfg.n_tilt = self.n_tilt.unwrap_or(d.n_tilt);
        cfg.n_channel = self.n_channel.unwrap_or(d.n_channel);
        cfg.n_noise = self.n_noise.unwrap_or(d.n_noise);
        cfg.n_corr_samples = self.n_corr_samples.unwrap_or(d.n_corr_samples);
        cfg.epsilon_reg = self.epsilon_reg.unwrap_or(d.epsilon_reg);
        cfg.seed = self.seed.unwrap_or(d.seed);
        cfg.average_rs = self.average_rs.unwrap_or(d.average_rs);
        cfg.ber_channels = self.ber_channels.unwrap_or(d.ber_channels);
        cfg.policy = policy;
        cfg.pr_mode = pr_mode;
        cfg.averaging = averaging;
        cfg.validate().map_err(CliError::from_core)?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }
}

/// Reads, resolves and validates a config file. `seed` overrides the file.
pub fn parse_config(path: &Path, seed: Option<u64>) -> Result<(FileConfig, SweepConfig), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut file = FileConfig::from_toml(&text)?.resolve();
    if seed.is_some() {
        file.seed = seed;
    }
    let cfg = file.sweep_config()?;
    Ok((file, cfg))
}
