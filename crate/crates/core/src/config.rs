//! Run configuration: flat `key = value` text with dotted keys.

use std::path::Path;

use thiserror::Error;

use crate::mlp::Activation;
use crate::partitioning::MembershipRule;
use crate::svr::Kernel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("malformed config line {line}: `{text}`")]
    Malformed { line: usize, text: String },
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegressorKind {
    #[default]
    Svr,
    Mlp,
}

impl std::fmt::Display for RegressorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegressorKind::Svr => "svr",
            RegressorKind::Mlp => "mlp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelKind {
    #[default]
    Linear,
    Polynomial,
    Rbf,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Rbf => "rbf",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrConfig {
    pub cost: f64,
    pub epsilon: f64,
    pub kernel: KernelKind,
    /// `None` selects `1 / (n_features · var(X))` from the training inputs.
    pub gamma: Option<f64>,
    pub degree: u32,
    pub coef0: f64,
    pub kkt_tol: f64,
    pub max_passes: usize,
    pub seed: Option<u64>,
}

impl SvrConfig {
    /// Concrete kernel given the gamma to use when none was configured.
    pub fn kernel_with(&self, scale_gamma: f64) -> Kernel {
        let gamma = self.gamma.unwrap_or(scale_gamma);
        match self.kernel {
            KernelKind::Linear => Kernel::Linear,
            KernelKind::Rbf => Kernel::Rbf { gamma },
            KernelKind::Polynomial => Kernel::Polynomial {
                degree: self.degree,
                gamma,
                coef0: self.coef0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// `None` sizes the hidden layer like the input layer.
    pub hidden: Option<usize>,
    pub activation: Activation,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub margin_d: f64,
    pub clusters: Option<usize>,
    pub fuzziness: f64,
    pub fcm_tol: f64,
    pub fcm_max_iter: usize,
    pub fcm_rule: MembershipRule,
    pub fcm_seed: Option<u64>,
    pub seed: u64,
    pub train_fraction: f64,
    pub regressor: RegressorKind,
    pub svr: SvrConfig,
    pub mlp: MlpConfig,
    /// Raw `(key, value)` pairs in the order they were applied.
    pub supplied: Vec<(String, String)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            margin_d: 0.0,
            clusters: None,
            fuzziness: 2.0,
            fcm_tol: 1e-5,
            fcm_max_iter: 300,
            fcm_rule: MembershipRule::Literal,
            fcm_seed: None,
            seed: 42,
            train_fraction: 0.8,
            regressor: RegressorKind::Svr,
            svr: SvrConfig {
                cost: 1.0,
                epsilon: 0.1,
                kernel: KernelKind::Linear,
                gamma: None,
                degree: 3,
                coef0: 0.0,
                kkt_tol: 1e-3,
                max_passes: 1000,
                seed: None,
            },
            mlp: MlpConfig {
                learning_rate: 0.05,
                epochs: 2000,
                hidden: None,
                activation: Activation::Identity,
                seed: None,
            },
            supplied: Vec::new(),
        }
    }
}

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "margin_d",
    "clusters",
    "seed",
    "train_fraction",
    "regressor",
    "fcm.p",
    "fcm.tol",
    "fcm.max_iter",
    "fcm.rule",
    "fcm.seed",
    "svr.C",
    "svr.epsilon",
    "svr.kernel",
    "svr.gamma",
    "svr.degree",
    "svr.coef0",
    "svr.kkt_tol",
    "svr.max_passes",
    "svr.seed",
    "mlp.lr",
    "mlp.epochs",
    "mlp.hidden",
    "mlp.activation",
    "mlp.seed",
];

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(key, value, "cannot parse"))
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be a positive number"))
    }
}

fn auto_or<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>, ConfigError> {
    match value {
        "auto" | "scale" => Ok(None),
        _ => parse(key, value).map(Some),
    }
}

fn show_opt<T: std::fmt::Display>(v: &Option<T>, none: &str) -> String {
    v.as_ref().map_or_else(|| none.to_string(), T::to_string)
}

impl RunConfig {
    pub fn fcm_seed(&self) -> u64 {
        self.fcm_seed.unwrap_or(self.seed)
    }

    pub fn svr_seed(&self) -> u64 {
        self.svr.seed.unwrap_or(self.seed)
    }

    pub fn mlp_seed(&self) -> u64 {
        self.mlp.seed.unwrap_or(self.seed)
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "margin_d" => {
                let d: f64 = parse(key, v)?;
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(invalid(key, v, "must be a non-negative number"));
                }
                self.margin_d = d;
            }
            "clusters" => {
                let c: Option<usize> = auto_or(key, v)?;
                if c.is_some_and(|c| c < 2) {
                    return Err(invalid(key, v, "must be at least 2"));
                }
                self.clusters = c;
            }
            "seed" => self.seed = parse(key, v)?,
            "train_fraction" => {
                let f: f64 = parse(key, v)?;
                if !(f > 0.0 && f < 1.0) {
                    return Err(invalid(key, v, "must lie in (0, 1)"));
                }
                self.train_fraction = f;
            }
            "regressor" => {
                self.regressor = match v {
                    "svr" => RegressorKind::Svr,
                    "mlp" => RegressorKind::Mlp,
                    _ => return Err(invalid(key, v, "expected svr or mlp")),
                }
            }
            "fcm.p" => {
                let p: f64 = parse(key, v)?;
                if !(p > 1.0 && p.is_finite()) {
                    return Err(invalid(key, v, "must exceed 1"));
                }
                self.fuzziness = p;
            }
            "fcm.tol" => self.fcm_tol = positive(key, v)?,
            "fcm.max_iter" => self.fcm_max_iter = parse(key, v)?,
            "fcm.rule" => self.fcm_rule = v.parse().map_err(|e: String| invalid(key, v, e))?,
            "fcm.seed" => self.fcm_seed = Some(parse(key, v)?),
            "svr.C" => self.svr.cost = positive(key, v)?,
            "svr.epsilon" => {
                let e: f64 = parse(key, v)?;
                if !(e >= 0.0 && e.is_finite()) {
                    return Err(invalid(key, v, "must be non-negative"));
                }
                self.svr.epsilon = e;
            }
            "svr.kernel" => {
                self.svr.kernel = match v {
                    "linear" => KernelKind::Linear,
                    "polynomial" | "poly" => KernelKind::Polynomial,
                    "rbf" => KernelKind::Rbf,
                    _ => return Err(invalid(key, v, "expected linear, polynomial or rbf")),
                }
            }
            "svr.gamma" => {
                let g: Option<f64> = auto_or(key, v)?;
                if g.is_some_and(|g| !(g > 0.0 && g.is_finite())) {
                    return Err(invalid(key, v, "must be positive"));
                }
                self.svr.gamma = g;
            }
            "svr.degree" => {
                let d: u32 = parse(key, v)?;
                if d < 1 {
                    return Err(invalid(key, v, "must be at least 1"));
                }
                self.svr.degree = d;
            }
            "svr.coef0" => self.svr.coef0 = parse(key, v)?,
            "svr.kkt_tol" => self.svr.kkt_tol = positive(key, v)?,
            "svr.max_passes" => self.svr.max_passes = parse(key, v)?,
            "svr.seed" => self.svr.seed = Some(parse(key, v)?),
            "mlp.lr" => self.mlp.learning_rate = positive(key, v)?,
            "mlp.epochs" => {
                let e: usize = parse(key, v)?;
                if e < 1 {
                    return Err(invalid(key, v, "must be at least 1"));
                }
                self.mlp.epochs = e;
            }
            "mlp.hidden" => {
                let h: Option<usize> = auto_or(key, v)?;
                if h == Some(0) {
                    return Err(invalid(key, v, "must be at least 1"));
                }
                self.mlp.hidden = h;
            }
            "mlp.activation" => {
                self.mlp.activation = v.parse().map_err(|e: String| invalid(key, v, e))?;
            }
            "mlp.seed" => self.mlp.seed = Some(parse(key, v)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        self.supplied.push((key.to_string(), v.to_string()));
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_text(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed {
                line: 0,
                text: assignment.to_string(),
            })?;
        self.set(key.trim(), value)
    }

    fn canonical(&self, key: &str) -> String {
        match key {
            "margin_d" => self.margin_d.to_string(),
            "clusters" => show_opt(&self.clusters, "auto"),
            "seed" => self.seed.to_string(),
            "train_fraction" => self.train_fraction.to_string(),
            "regressor" => self.regressor.to_string(),
            "fcm.p" => self.fuzziness.to_string(),
            "fcm.tol" => self.fcm_tol.to_string(),
            "fcm.max_iter" => self.fcm_max_iter.to_string(),
            "fcm.rule" => self.fcm_rule.to_string(),
            "fcm.seed" => self.fcm_seed().to_string(),
            "svr.C" => self.svr.cost.to_string(),
            "svr.epsilon" => self.svr.epsilon.to_string(),
            "svr.kernel" => self.svr.kernel.to_string(),
            "svr.gamma" => show_opt(&self.svr.gamma, "scale"),
            "svr.degree" => self.svr.degree.to_string(),
            "svr.coef0" => self.svr.coef0.to_string(),
            "svr.kkt_tol" => self.svr.kkt_tol.to_string(),
            "svr.max_passes" => self.svr.max_passes.to_string(),
            "svr.seed" => self.svr_seed().to_string(),
            "mlp.lr" => self.mlp.learning_rate.to_string(),
            "mlp.epochs" => self.mlp.epochs.to_string(),
            "mlp.hidden" => show_opt(&self.mlp.hidden, "auto"),
            "mlp.activation" => self.mlp.activation.to_string(),
            "mlp.seed" => self.mlp_seed().to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Every key with its effective value. Keys that were set explicitly
    /// echo the text they were given.
    pub fn entries(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|&key| {
                let value = self
                    .supplied
                    .iter()
                    .rev()
                    .find(|(k, _)| k == key)
                    .map_or_else(|| self.canonical(key), |(_, v)| v.clone());
                (key.to_string(), value)
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
