//! Flat `key=value` configuration. Values from the file are applied first,
//! then command-line flags, so flags win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use svdd_core::dataio::{Spacing, DEFAULT_THRESHOLD};
use svdd_core::kernels::{KernelSpec, DEFAULT_WIDTH};

use crate::CliError;

pub const DEFAULT_COST: f64 = 0.05;
pub const DEFAULT_BINS: usize = 10;

/// Every key the file format accepts.
pub const KEYS: &[&str] = &[
    "out",
    "seed",
    "input",
    "prepared",
    "target",
    "threshold",
    "spacing",
    "bins",
    "wells",
    "rows",
    "skew",
    "features",
    "relief_k",
    "kernel",
    "width",
    "degree",
    "offset",
    "cost",
    "max_passes",
    "svm_cost",
    "classifiers",
    "test_wells",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Svdd,
    Svm,
    NaiveBayes,
    Discriminant,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [Self::Svdd, Self::Svm, Self::NaiveBayes, Self::Discriminant];

    pub fn name(self) -> &'static str {
        match self {
            Self::Svdd => "svdd",
            Self::Svm => "svm",
            Self::NaiveBayes => "naive_bayes",
            Self::Discriminant => "discriminant",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown classifier `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub out: PathBuf,
    pub seed: u64,
    /// Raw table read by `prepare`; defaults to `<out>/wells.csv`.
    pub input: Option<PathBuf>,
    /// Prepared table read by `features` and `run`; defaults to
    /// `<out>/prepared.csv`.
    pub prepared: Option<PathBuf>,
    pub target: String,
    pub threshold: f64,
    pub spacing: Spacing,
    pub bins: usize,
    pub wells: usize,
    pub rows: usize,
    pub skew: f64,
    pub features: usize,
    pub relief_k: usize,
    pub kernel: KernelSpec,
    pub cost: f64,
    /// SVDD solver budget; `None` keeps the library default.
    pub max_passes: Option<usize>,
    pub svm_cost: f64,
    pub classifiers: Vec<ClassifierKind>,
    /// `None` tests every well in turn.
    pub test_wells: Option<Vec<String>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            seed: 1,
            input: None,
            prepared: None,
            target: "SW".into(),
            threshold: DEFAULT_THRESHOLD,
            spacing: Spacing::Auto,
            bins: DEFAULT_BINS,
            wells: 4,
            rows: 500,
            skew: 0.97,
            features: 6,
            relief_k: svdd_core::relief::DEFAULT_K,
            kernel: KernelSpec::default(),
            cost: DEFAULT_COST,
            max_passes: None,
            svm_cost: svdd_core::baselines::DEFAULT_SVM_COST,
            classifiers: ClassifierKind::ALL.to_vec(),
            test_wells: None,
        }
    }
}

impl RunConfig {
    pub fn input_path(&self) -> PathBuf {
        self.input.clone().unwrap_or_else(|| self.out.join("wells.csv"))
    }

    pub fn prepared_path(&self) -> PathBuf {
        self.prepared.clone().unwrap_or_else(|| self.out.join("prepared.csv"))
    }

    /// Builds a config from ordered `(key, value)` pairs; later pairs
    /// override earlier ones.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, CliError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k) {
                return Err(CliError::Usage(format!("unknown configuration key `{k}`")));
            }
            map.insert(k, v);
        }
        let mut cfg = Self::default();
        for (&key, &value) in &map {
            match key {
                "out" => cfg.out = PathBuf::from(value),
                "seed" => cfg.seed = parse(key, value)?,
                "input" => cfg.input = Some(PathBuf::from(value)),
                "prepared" => cfg.prepared = Some(PathBuf::from(value)),
                "target" => cfg.target = value.to_string(),
                "threshold" => cfg.threshold = parse(key, value)?,
                "spacing" => {
                    cfg.spacing = if value.eq_ignore_ascii_case("auto") {
                        Spacing::Auto
                    } else {
                        Spacing::Fixed(parse(key, value)?)
                    }
                }
                "bins" => cfg.bins = parse(key, value)?,
                "wells" => cfg.wells = parse(key, value)?,
                "rows" => cfg.rows = parse(key, value)?,
                "skew" => cfg.skew = parse(key, value)?,
                "features" => cfg.features = parse(key, value)?,
                "relief_k" => cfg.relief_k = parse(key, value)?,
                "cost" => cfg.cost = parse(key, value)?,
                "max_passes" => cfg.max_passes = Some(parse(key, value)?),
                "svm_cost" => cfg.svm_cost = parse(key, value)?,
                "classifiers" => {
                    cfg.classifiers = split_list(value).map(str::parse).collect::<Result<_, _>>()?;
                }
                "test_wells" => {
                    cfg.test_wells = if value.eq_ignore_ascii_case("all") {
                        None
                    } else {
                        Some(split_list(value).map(String::from).collect())
                    };
                }
                // Kernel keys are combined below.
                _ => {}
            }
        }
        cfg.kernel = kernel_from(&map)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0,1), got {}", self.threshold));
        }
        if !(self.cost > 0.0 && self.cost <= 1.0) {
            return bad(format!("cost must lie in (0,1], got {}", self.cost));
        }
        if !(self.svm_cost > 0.0 && self.svm_cost.is_finite()) {
            return bad(format!("svm_cost must be positive, got {}", self.svm_cost));
        }
        if self.relief_k == 0 {
            return bad("relief_k must be at least 1".into());
        }
        if self.bins == 0 {
            return bad("bins must be at least 1".into());
        }
        if self.classifiers.is_empty() {
            return bad("no classifiers requested".into());
        }
        Ok(())
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad value for `{key}`: {value:?}")))
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn kernel_from(map: &BTreeMap<&str, &str>) -> Result<KernelSpec, CliError> {
    let get = |k: &str| map.get(k).copied();
    let family = get("kernel").unwrap_or("gaussian").to_ascii_lowercase();
    let width = get("width").map(|v| parse("width", v)).transpose()?.unwrap_or(DEFAULT_WIDTH);
    let spec = match family.as_str() {
        "gaussian" | "rbf" => KernelSpec::gaussian(width),
        "erbf" => KernelSpec::erbf(width),
        "polynomial" => KernelSpec::polynomial(
            get("degree").map(|v| parse("degree", v)).transpose()?.unwrap_or(3),
            get("offset").map(|v| parse("offset", v)).transpose()?.unwrap_or(1.0),
        ),
        other => return Err(CliError::Usage(format!("unknown kernel `{other}`"))),
    };
    Ok(spec?)
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}
