//! Kernel functions and Gram matrices.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::textfmt::{exact, parse_f64};

/// Width used by the reference experiments for both SVDD and the SVM
/// baseline.
pub const DEFAULT_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-‖x−y‖² / s²)`. Also serves as "RBF".
    Gaussian { width: f64 },
    /// `(x·y + c)^p` with `2 <= p <= 10`.
    Polynomial { degree: u32, offset: f64 },
    /// Exponential RBF, `exp(-‖x−y‖ / s)`.
    Erbf { width: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Gaussian { width: DEFAULT_WIDTH }
    }
}

impl KernelSpec {
    pub fn gaussian(width: f64) -> Result<Self> {
        Self::Gaussian { width }.validated()
    }

    pub fn erbf(width: f64) -> Result<Self> {
        Self::Erbf { width }.validated()
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        Self::Polynomial { degree, offset }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Gaussian { width } | Self::Erbf { width } if !(width > 0.0 && width.is_finite()) => Err(
                Error::InvalidConfig(format!("kernel width must be positive, got {width}")),
            ),
            Self::Polynomial { degree, .. } if !(2..=10).contains(&degree) => Err(Error::InvalidConfig(
                format!("polynomial degree must lie in 2..=10, got {degree}"),
            )),
            Self::Polynomial { offset, .. } if !(offset >= 0.0 && offset.is_finite()) => Err(
                Error::InvalidConfig(format!("polynomial offset must be >= 0, got {offset}")),
            ),
            ok => Ok(ok),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// Same as [`eval`](Self::eval) for callers that already checked
    /// dimensions.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Self::Gaussian { width } => (-sq_dist(x, y) / (width * width)).exp(),
            Self::Erbf { width } => (-sq_dist(x, y).sqrt() / width).exp(),
            Self::Polynomial { degree, offset } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (dot + offset).powi(degree as i32)
            }
        }
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Symmetric Gram matrix of the rows of `x`. Each unordered pair is
/// evaluated once and mirrored.
pub fn gram(spec: &KernelSpec, x: ArrayView2<f64>) -> Array2<f64> {
    let x = x.as_standard_layout();
    let n = x.nrows();
    let mut g = Array2::zeros((n, n));
    for i in 0..n {
        let xi = x.row(i);
        let xi = xi.as_slice().expect("standard layout");
        for j in i..n {
            let xj = x.row(j);
            let v = spec.eval_unchecked(xi, xj.as_slice().expect("standard layout"));
            g[[i, j]] = v;
            g[[j, i]] = v;
        }
    }
    g
}

impl fmt::Display for KernelSpec {
    /// Model-file form, e.g. `kernel=gaussian width=2.0000000000000000e0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Gaussian { width } => write!(f, "kernel=gaussian width={}", exact(width)),
            Self::Erbf { width } => write!(f, "kernel=erbf width={}", exact(width)),
            Self::Polynomial { degree, offset } => {
                write!(f, "kernel=polynomial degree={degree} offset={}", exact(offset))
            }
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut width = None;
        let mut degree = None;
        let mut offset = None;
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::ModelFormat(format!("bad kernel token {token:?}")))?;
            match key {
                "kernel" => family = Some(value.to_ascii_lowercase()),
                "width" => width = Some(parse_f64(value)?),
                "degree" => {
                    degree = Some(value.parse::<u32>().map_err(|_| {
                        Error::ModelFormat(format!("bad polynomial degree {value:?}"))
                    })?)
                }
                "offset" => offset = Some(parse_f64(value)?),
                _ => return Err(Error::ModelFormat(format!("unknown kernel key {key:?}"))),
            }
        }
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| Error::ModelFormat(format!("kernel spec lacks `{k}`")));
        let spec = match family.as_deref() {
            Some("gaussian" | "rbf") => Self::Gaussian { width: need(width, "width")? },
            Some("erbf") => Self::Erbf { width: need(width, "width")? },
            Some("polynomial") => Self::Polynomial {
                degree: degree.ok_or_else(|| Error::ModelFormat("kernel spec lacks `degree`".into()))?,
                offset: offset.unwrap_or(1.0),
            },
            other => return Err(Error::ModelFormat(format!("unknown kernel family {other:?}"))),
        };
        spec.validated()
    }
}
