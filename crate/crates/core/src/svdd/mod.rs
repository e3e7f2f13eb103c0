//! Support vector data description: a minimum-volume hypersphere in kernel
//! feature space around the target (minority) class.
//!
//! Training maximizes the dual
//!
//! ```text
//! L(α) = Σ_i α_i K(x_i, x_i) − Σ_ij α_i α_j K(x_i, x_j),   Σ α_i = 1,  0 <= α_i <= C
//! ```
//!
//! and the squared distance of a point to the (implicit) center is
//!
//! ```text
//! R²(x) = K(x, x) − 2 Σ_i α_i K(x_i, x) + Σ_ij α_i α_j K(x_i, x_j).
//! ```
//!
//! Points with `0 < α_i < C` lie on the sphere surface and fix the radius;
//! points at `α_i = C` are bounded outliers.

mod oracle;
mod solver;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::dataio::{Label, NormStats};
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};
use crate::textfmt::{exact, join_exact, parse_f64, parse_f64_list, ModelLines};

pub use oracle::{project_capped_simplex, solve_dual_bruteforce, ORACLE_MAX_POINTS};
pub use solver::dual_objective;

const MAGIC: &str = "SVDD-MODEL v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SvddTrainConfig {
    pub kernel: KernelSpec,
    /// Upper bound on each multiplier. Must satisfy `1/n <= C <= 1`.
    pub cost: f64,
    pub kkt_tol: f64,
    /// Budget in passes of `n` pair updates each; `None` means `10·n²`.
    pub max_passes: Option<usize>,
    /// Relative half-width of the BOUNDARY band around the radius.
    pub boundary_tol: f64,
}

impl Default for SvddTrainConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::default(),
            cost: 1.0,
            kkt_tol: 1e-6,
            max_passes: None,
            boundary_tol: 1e-7,
        }
    }
}

impl SvddTrainConfig {
    pub fn new(kernel: KernelSpec, cost: f64) -> Self {
        Self { kernel, cost, ..Default::default() }
    }
}

/// Where a point falls relative to the trained sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvddModel {
    /// Training vectors after normalization.
    x_train: Array2<f64>,
    alphas: Vec<f64>,
    kernel: KernelSpec,
    cost: f64,
    r2: f64,
    self_term: f64,
    norm: NormStats,
    kkt_tol: f64,
    boundary_tol: f64,
}

/// Trains on raw target vectors with no normalization.
pub fn train(x_target: ArrayView2<f64>, cfg: &SvddTrainConfig) -> Result<SvddModel> {
    train_normalized(x_target, NormStats::identity(x_target.ncols()), cfg)
}

/// Normalizes `x_target` with `norm`, trains, and keeps `norm` in the
/// model so later queries can be passed in raw units.
pub fn train_normalized(x_target: ArrayView2<f64>, norm: NormStats, cfg: &SvddTrainConfig) -> Result<SvddModel> {
    let n = x_target.nrows();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let kernel = cfg.kernel.validated()?;
    if !(cfg.kkt_tol > 0.0 && cfg.boundary_tol > 0.0) {
        return Err(Error::InvalidConfig("tolerances must be positive".into()));
    }
    if cfg.cost > 1.0 || cfg.cost.is_nan() {
        return Err(Error::InvalidConfig(format!("C must not exceed 1, got {}", cfg.cost)));
    }
    if cfg.cost * (n as f64) < 1.0 - 1e-12 {
        return Err(Error::InfeasibleCost { cost: cfg.cost, n });
    }
    let x = norm.apply(x_target)?;
    let k = gram(&kernel, x.view());
    let max_iter = cfg.max_passes.unwrap_or(10 * n * n).saturating_mul(n);
    let alphas = solver::solve(&k, cfg.cost, cfg.kkt_tol, max_iter)?;
    SvddModel::from_parts(x, alphas, kernel, cfg.cost, None, norm, cfg.kkt_tol, cfg.boundary_tol)
}

impl SvddModel {
    /// Assembles a model; computes the cached self term and, when `r2` is
    /// `None`, the radius from the support vectors.
    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        x_train: Array2<f64>,
        alphas: Vec<f64>,
        kernel: KernelSpec,
        cost: f64,
        r2: Option<f64>,
        norm: NormStats,
        kkt_tol: f64,
        boundary_tol: f64,
    ) -> Result<Self> {
        if alphas.len() != x_train.nrows() {
            return Err(Error::LengthMismatch(alphas.len(), x_train.nrows()));
        }
        if norm.dim() != x_train.ncols() {
            return Err(Error::DimensionMismatch { expected: x_train.ncols(), got: norm.dim() });
        }
        let x_train = x_train.as_standard_layout().into_owned();
        let k = gram(&kernel, x_train.view());
        let self_term = alphas
            .iter()
            .enumerate()
            .map(|(i, a)| a * alphas.iter().enumerate().map(|(j, b)| b * k[[i, j]]).sum::<f64>())
            .sum();
        let mut model = Self {
            x_train,
            alphas,
            kernel,
            cost,
            r2: 0.0,
            self_term,
            norm,
            kkt_tol,
            boundary_tol,
        };
        model.r2 = match r2 {
            Some(r2) => r2,
            None => model.radius_from_support_vectors(),
        };
        Ok(model)
    }

    /// Max R² over unbounded support vectors, or over every support vector
    /// when all of them sit at the bound.
    fn radius_from_support_vectors(&self) -> f64 {
        let unbounded = self.unbounded_indices();
        let pool = if unbounded.is_empty() { self.sv_indices() } else { unbounded };
        pool.into_iter()
            .map(|i| self.radius2_normalized(self.x_train.row(i)))
            .fold(0.0, f64::max)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn norm(&self) -> &NormStats {
        &self.norm
    }

    pub fn self_term(&self) -> f64 {
        self.self_term
    }

    pub fn kkt_tol(&self) -> f64 {
        self.kkt_tol
    }

    pub fn x_train(&self) -> ArrayView2<'_, f64> {
        self.x_train.view()
    }

    pub fn dim(&self) -> usize {
        self.x_train.ncols()
    }

    /// Indices with `α_i > kkt_tol`.
    pub fn sv_indices(&self) -> Vec<usize> {
        (0..self.alphas.len()).filter(|&i| self.alphas[i] > self.kkt_tol).collect()
    }

    /// Indices with `kkt_tol < α_i < C − kkt_tol`.
    pub fn unbounded_indices(&self) -> Vec<usize> {
        let upper = self.cost - self.kkt_tol;
        (0..self.alphas.len())
            .filter(|&i| self.alphas[i] > self.kkt_tol && self.alphas[i] < upper)
            .collect()
    }

    /// Dual objective of the stored multipliers.
    pub fn objective(&self) -> f64 {
        dual_objective(&gram(&self.kernel, self.x_train.view()), &self.alphas)
    }

    /// Squared feature-space distance of a raw-unit point to the center.
    pub fn radius2_of(&self, x: &[f64]) -> Result<f64> {
        let z = self.norm.apply_row(ArrayView1::from(x))?;
        Ok(self.radius2_normalized(ArrayView1::from(&z[..])))
    }

    /// `R²` of every stored training vector, in training order.
    pub fn training_radii(&self) -> Vec<f64> {
        self.x_train.rows().into_iter().map(|r| self.radius2_normalized(r)).collect()
    }

    fn radius2_normalized(&self, z: ArrayView1<f64>) -> f64 {
        let z = z.as_standard_layout();
        let z = z.as_slice().expect("standard layout");
        let mut cross = 0.0;
        for (i, &a) in self.alphas.iter().enumerate() {
            if a != 0.0 {
                let row = self.x_train.row(i);
                cross += a * self.kernel.eval_unchecked(row.as_slice().expect("standard layout"), z);
            }
        }
        self.kernel.eval_unchecked(z, z) - 2.0 * cross + self.self_term
    }

    pub fn decide(&self, x: &[f64]) -> Result<Region> {
        let rho = self.radius2_of(x)?;
        let band = self.boundary_tol * self.r2.max(1.0);
        Ok(if rho < self.r2 - band {
            Region::Inside
        } else if (rho - self.r2).abs() <= band {
            Region::Boundary
        } else {
            Region::Outside
        })
    }

    /// INSIDE → `Low` (target class); BOUNDARY and OUTSIDE → `High`.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        x.rows()
            .into_iter()
            .map(|row| {
                let row = row.to_vec();
                self.decide(&row).map(|r| match r {
                    Region::Inside => Label::Low,
                    Region::Boundary | Region::Outside => Label::High,
                })
            })
            .collect()
    }

    /// Versioned text form. Floats use 17 significant digits so loading
    /// reproduces the model bit for bit.
    pub fn to_text(&self) -> String {
        let mut s = format!("{MAGIC}\n{}\n", self.kernel);
        s += &format!("C={}\nr2={}\n", exact(self.cost), exact(self.r2));
        s += &format!("kkt_tol={}\nboundary_tol={}\n", exact(self.kkt_tol), exact(self.boundary_tol));
        s += &format!("norm_mean={}\nnorm_std={}\n", join_exact(&self.norm.mean), join_exact(&self.norm.std));
        for (a, row) in self.alphas.iter().zip(self.x_train.rows()) {
            s += &format!("alpha={} x={}\n", exact(*a), join_exact(&row.to_vec()));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ModelLines::new(text, MAGIC)?;
        let kernel: KernelSpec = lines
            .next_line()
            .ok_or_else(|| Error::ModelFormat("missing kernel line".into()))?
            .parse()?;
        let cost = lines.f64("C")?;
        let r2 = lines.f64("r2")?;
        let kkt_tol = lines.optional_f64("kkt_tol")?.unwrap_or(1e-6);
        let boundary_tol = lines.optional_f64("boundary_tol")?.unwrap_or(1e-7);
        let norm = NormStats { mean: lines.f64_list("norm_mean")?, std: lines.f64_list("norm_std")? };
        let d = norm.dim();
        let mut alphas = Vec::new();
        let mut flat = Vec::new();
        while let Some(line) = lines.next_line() {
            let (a, x) = line
                .strip_prefix("alpha=")
                .and_then(|rest| rest.split_once(" x="))
                .ok_or_else(|| Error::ModelFormat(format!("bad vector line {line:?}")))?;
            let x = parse_f64_list(x)?;
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.len() });
            }
            alphas.push(parse_f64(a)?);
            flat.extend(x);
        }
        let x_train = Array2::from_shape_vec((alphas.len(), d), flat)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        Self::from_parts(x_train, alphas, kernel, cost, Some(r2), norm, kkt_tol, boundary_tol)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}
