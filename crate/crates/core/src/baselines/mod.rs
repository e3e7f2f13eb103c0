//! Supervised two-class baselines: Gaussian naive Bayes, linear
//! discriminant and a soft-margin kernel SVM.
//!
//! All three break exact ties towards `High`, the majority class.

mod gnb;
mod lda;
mod svm;

use ndarray::ArrayView2;

use crate::dataio::Label;
use crate::error::{Error, Result};

pub use gnb::{GnbModel, VARIANCE_FLOOR};
pub use lda::{LdaModel, RIDGE_FRACTION};
pub use svm::{svm_dual_objective, SvmModel, DEFAULT_COST as DEFAULT_SVM_COST};

fn check_two_classes(x: ArrayView2<f64>, y: &[Label]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch(x.nrows(), y.len()));
    }
    if !y.contains(&Label::Low) || !y.contains(&Label::High) {
        return Err(Error::SingleClassInput);
    }
    Ok(())
}

fn class_rows(y: &[Label], label: Label) -> Vec<usize> {
    (0..y.len()).filter(|&i| y[i] == label).collect()
}
