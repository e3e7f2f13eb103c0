//! Ingest, clean, resample, label, split and synthesize well-log tables.

mod histogram;
mod norm;
mod synth;
mod table;

use std::fmt;

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

pub use histogram::{histogram, Histogram};
pub use norm::NormStats;
pub use synth::{gen_synthetic, SyntheticConfig};
pub use table::{
    drop_invalid, load_table, load_table_inferred, read_table, resample_uniform, Schema, Spacing,
    WellRow, WellTable, MISSING_SENTINEL,
};

/// Default saturation cut between the two classes.
pub const DEFAULT_THRESHOLD: f64 = 0.7;

/// Binary class of a row. `Low` (target below threshold) is the minority
/// class and the positive class for metrics; `High` is the majority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Low,
    High,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Low => "LOW",
            Label::High => "HIGH",
        })
    }
}

/// Feature matrix with one label and well id per row. Contains no missing
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub x: Array2<f64>,
    pub y: Vec<Label>,
    pub well_ids: Vec<String>,
    pub depths: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Distinct wells in row order.
    pub fn wells(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for w in &self.well_ids {
            if !out.contains(&w.as_str()) {
                out.push(w);
            }
        }
        out
    }

    pub fn count(&self, label: Label) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    pub fn rows(&self, idx: &[usize]) -> (Array2<f64>, Vec<Label>) {
        (self.x.select(Axis(0), idx), idx.iter().map(|&i| self.y[i]).collect())
    }

    /// Keeps only the given feature columns, in the given order.
    pub fn select_features(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.x.ncols()) {
            return Err(Error::DimensionMismatch {
                expected: self.x.ncols(),
                got: bad + 1,
            });
        }
        Ok(Self {
            x: self.x.select(Axis(1), cols),
            y: self.y.clone(),
            well_ids: self.well_ids.clone(),
            depths: self.depths.clone(),
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
        })
    }
}

/// Labels each row `High` when its target is at least `threshold`, `Low`
/// otherwise.
pub fn binarize_target(t: &WellTable, threshold: f64) -> Result<LabeledDataset> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must lie in (0,1), got {threshold}"
        )));
    }
    let d = t.feature_names.len();
    let mut x = Array2::zeros((t.len(), d));
    let mut y = Vec::with_capacity(t.len());
    for (i, row) in t.rows.iter().enumerate() {
        for (j, v) in row.features.iter().enumerate() {
            x[[i, j]] = v.ok_or_else(|| Error::MissingValue {
                row: i,
                column: t.feature_names[j].clone(),
            })?;
        }
        let target = row.target.ok_or_else(|| Error::MissingValue {
            row: i,
            column: t.target_name.clone(),
        })?;
        y.push(if target >= threshold { Label::High } else { Label::Low });
    }
    Ok(LabeledDataset {
        x,
        y,
        well_ids: t.rows.iter().map(|r| r.well.clone()).collect(),
        depths: t.rows.iter().map(|r| r.depth).collect(),
        feature_names: t.feature_names.clone(),
    })
}

/// Row partition for one leave-one-well-out round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub test_well: String,
    /// `Low` rows of every other well; the one-class training set.
    pub train_rows: Vec<usize>,
    /// `High` rows of the other wells plus every row of the test well.
    pub test_rows: Vec<usize>,
}

impl SplitPlan {
    /// All rows of the training wells, both classes. Supervised baselines
    /// train on these.
    pub fn supervised_rows(&self, d: &LabeledDataset) -> Vec<usize> {
        (0..d.len()).filter(|&i| d.well_ids[i] != self.test_well).collect()
    }
}

pub fn split_leave_one_well_out(d: &LabeledDataset, test_well: &str) -> Result<SplitPlan> {
    if !d.well_ids.iter().any(|w| w == test_well) {
        return Err(Error::UnknownWell(test_well.to_string()));
    }
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for (i, (well, &label)) in d.well_ids.iter().zip(&d.y).enumerate() {
        if well == test_well || label == Label::High {
            test_rows.push(i);
        } else {
            train_rows.push(i);
        }
    }
    if train_rows.is_empty() {
        return Err(Error::NoMinorityTrainingData(test_well.to_string()));
    }
    Ok(SplitPlan {
        test_well: test_well.to_string(),
        train_rows,
        test_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(targets: &[(&str, f64)]) -> WellTable {
        let rows = targets
            .iter()
            .enumerate()
            .map(|(i, &(w, t))| WellRow {
                well: w.into(),
                depth: i as f64,
                features: vec![Some(i as f64)],
                target: Some(t),
            })
            .collect();
        WellTable::new(vec!["GR".into()], "SW".into(), rows).unwrap()
    }

    #[test]
    fn threshold_is_inclusive_for_high() {
        let d = binarize_target(&table(&[("A", 0.7), ("A", 0.69), ("A", 0.0), ("A", 1.0)]), 0.7).unwrap();
        assert_eq!(d.y, vec![Label::High, Label::Low, Label::Low, Label::High]);
    }

    #[test]
    fn binarize_rejects_missing_target() {
        let mut t = table(&[("A", 0.7), ("A", 0.2)]);
        t.rows[1].target = None;
        assert!(matches!(binarize_target(&t, 0.7), Err(Error::MissingValue { row: 1, .. })));
    }

    fn four_wells() -> LabeledDataset {
        let mut targets = Vec::new();
        for w in ["A", "B", "C", "D"] {
            for k in 0..12 {
                targets.push((w, if k % 6 == 5 { 0.2 } else { 0.9 }));
            }
        }
        binarize_target(&table(&targets), 0.7).unwrap()
    }

    #[test]
    fn leave_one_well_out_shape() {
        let d = four_wells();
        let plan = split_leave_one_well_out(&d, "C").unwrap();
        assert_eq!(plan.train_rows.len(), 6);
        assert_eq!(plan.test_rows.len(), 30 + 12);
        assert!(plan.train_rows.iter().all(|&i| d.y[i] == Label::Low && d.well_ids[i] != "C"));
        assert!(plan.train_rows.iter().all(|i| !plan.test_rows.contains(i)));
        assert_eq!(plan.supervised_rows(&d).len(), 36);
    }

    #[test]
    fn unknown_well_and_no_minority() {
        let d = four_wells();
        assert!(matches!(split_leave_one_well_out(&d, "Z"), Err(Error::UnknownWell(_))));

        let t = table(&[("A", 0.9), ("A", 0.8), ("B", 0.1), ("B", 0.9)]);
        let d = binarize_target(&t, 0.7).unwrap();
        assert!(matches!(
            split_leave_one_well_out(&d, "B"),
            Err(Error::NoMinorityTrainingData(_))
        ));
    }
}
