//! One-class classification of imbalanced well-log data with support vector
//! data description (SVDD).
//!
//! The minority class is described by a minimum-volume hypersphere in a
//! kernel feature space; anything outside the sphere is assigned to the
//! majority class. The crate covers the whole workflow:
//!
//! - [`dataio`]: CSV ingest, cleaning, uniform resampling, thresholding,
//!   leave-one-well-out splits, normalization and a synthetic generator.
//! - [`kernels`]: Gaussian, polynomial and exponential RBF kernels.
//! - [`svdd`]: dual training, the `R²(x)` score and the inside / boundary /
//!   outside rule.
//! - [`relief`]: Relief feature weights and top-k selection.
//! - [`baselines`]: naive Bayes, linear discriminant and C-SVM.
//! - [`eval`]: confusion counts, g-mean, timing and comparison reports.
//!
//! ```
//! use ndarray::array;
//! use svdd_core::kernels::KernelSpec;
//! use svdd_core::svdd::{self, Region, SvddTrainConfig};
//!
//! let target = array![[0.0, 0.0], [0.4, 0.1], [0.1, 0.5], [0.3, 0.3]];
//! let cfg = SvddTrainConfig::new(KernelSpec::gaussian(2.0)?, 1.0);
//! let model = svdd::train(target.view(), &cfg)?;
//!
//! assert_eq!(model.decide(&[0.2, 0.2])?, Region::Inside);
//! assert_eq!(model.decide(&[5.0, 5.0])?, Region::Outside);
//! # Ok::<(), svdd_core::Error>(())
//! ```

pub mod baselines;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod kernels;
pub mod relief;
pub mod svdd;
pub mod textfmt;

use ndarray::ArrayView2;

pub use dataio::Label;
pub use error::{Error, Result};

/// Common prediction surface of every trained model.
pub trait Classifier {
    fn predict_labels(&self, x: ArrayView2<f64>) -> Result<Vec<Label>>;
    fn to_text(&self) -> String;
}

impl Classifier for svdd::SvddModel {
    fn predict_labels(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        self.predict(x)
    }
    fn to_text(&self) -> String {
        svdd::SvddModel::to_text(self)
    }
}

impl Classifier for baselines::GnbModel {
    fn predict_labels(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        self.predict(x)
    }
    fn to_text(&self) -> String {
        baselines::GnbModel::to_text(self)
    }
}

impl Classifier for baselines::LdaModel {
    fn predict_labels(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        self.predict(x)
    }
    fn to_text(&self) -> String {
        baselines::LdaModel::to_text(self)
    }
}

impl Classifier for baselines::SvmModel {
    fn predict_labels(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        self.predict(x)
    }
    fn to_text(&self) -> String {
        baselines::SvmModel::to_text(self)
    }
}
