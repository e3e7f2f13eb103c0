//! Imbalance-aware metrics, timing and the per-well comparison report.
//!
//! `Low` (the minority, target class) is the positive class throughout.

use std::fmt::Write as _;
use std::time::Instant;

use crate::dataio::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl ConfusionCounts {
    /// `tp / (tp + fn)`: accuracy on true `Low` rows.
    pub fn sensitivity(&self) -> Result<f64> {
        ratio(self.tp, self.tp + self.fn_, "LOW")
    }

    /// `tn / (tn + fp)`: accuracy on true `High` rows.
    pub fn specificity(&self) -> Result<f64> {
        ratio(self.tn, self.tn + self.fp, "HIGH")
    }

    /// Same counts with the other class taken as positive.
    pub fn swapped(&self) -> Self {
        Self { tp: self.tn, fn_: self.fp, tn: self.tp, fp: self.fn_ }
    }
}

fn ratio(num: usize, den: usize, class: &'static str) -> Result<f64> {
    if den == 0 {
        return Err(Error::UndefinedClassAccuracy(class));
    }
    Ok(num as f64 / den as f64)
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut c = ConfusionCounts::default();
    for (t, p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (Label::Low, Label::Low) => c.tp += 1,
            (Label::Low, Label::High) => c.fn_ += 1,
            (Label::High, Label::High) => c.tn += 1,
            (Label::High, Label::Low) => c.fp += 1,
        }
    }
    Ok(c)
}

/// Geometric mean of sensitivity and specificity.
pub fn g_mean(c: &ConfusionCounts) -> Result<f64> {
    Ok((c.sensitivity()? * c.specificity()?).sqrt())
}

/// Runs `task` and returns its result with the wall time in seconds,
/// rounded to milliseconds.
pub fn timed<T, E>(task: impl FnOnce() -> std::result::Result<T, E>) -> std::result::Result<(T, f64), E> {
    let start = Instant::now();
    let out = task()?;
    let secs = start.elapsed().as_secs_f64();
    Ok((out, (secs * 1e3).round() / 1e3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub sensitivity: f64,
    pub specificity: f64,
    pub g_mean: f64,
    pub train_seconds: f64,
    pub test_seconds: f64,
}

impl Scores {
    pub fn from_counts(c: &ConfusionCounts, train_seconds: f64, test_seconds: f64) -> Result<Self> {
        Ok(Self {
            sensitivity: c.sensitivity()?,
            specificity: c.specificity()?,
            g_mean: g_mean(c)?,
            train_seconds,
            test_seconds,
        })
    }
}

/// One classifier evaluated on one blind-test well. `scores` is `None`
/// when the run failed; such rows print as `NA`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub classifier: String,
    pub well: String,
    pub scores: Option<Scores>,
}

pub const REPORT_HEADER: &str = "classifier,well,sensitivity,specificity,g_mean,train_seconds,test_seconds";
pub const AVERAGE_WELL: &str = "average";

/// Report rows grouped by classifier (first-appearance order), each group
/// followed by its `average` row.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<RunRecord>,
}

pub fn compare_report(records: &[RunRecord]) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut classifiers: Vec<&str> = Vec::new();
    for r in records {
        if !classifiers.contains(&r.classifier.as_str()) {
            classifiers.push(&r.classifier);
        }
    }
    let mut rows = Vec::new();
    for name in classifiers {
        let group: Vec<&RunRecord> = records.iter().filter(|r| r.classifier == name).collect();
        rows.extend(group.iter().map(|r| (*r).clone()));
        let scores: Option<Vec<Scores>> = group.iter().map(|r| r.scores).collect();
        let average = scores.map(|s| {
            let mean = |f: fn(&Scores) -> f64| s.iter().map(f).sum::<f64>() / s.len() as f64;
            Scores {
                sensitivity: mean(|s| s.sensitivity),
                specificity: mean(|s| s.specificity),
                g_mean: mean(|s| s.g_mean),
                train_seconds: mean(|s| s.train_seconds),
                test_seconds: mean(|s| s.test_seconds),
            }
        });
        rows.push(RunRecord { classifier: name.to_string(), well: AVERAGE_WELL.into(), scores: average });
    }
    Ok(Report { rows })
}

impl Report {
    pub fn average(&self, classifier: &str) -> Option<&Scores> {
        self.rows
            .iter()
            .find(|r| r.classifier == classifier && r.well == AVERAGE_WELL)
            .and_then(|r| r.scores.as_ref())
    }

    /// Metrics with 4 decimals, times with 3.
    pub fn to_csv(&self) -> String {
        self.render(true)
    }

    /// CSV with the timing columns blanked, for determinism checks.
    pub fn to_csv_without_timing(&self) -> String {
        self.render(false)
    }

    fn render(&self, timing: bool) -> String {
        let mut s = format!("{REPORT_HEADER}\n");
        for r in &self.rows {
            let _ = write!(s, "{},{},", r.classifier, r.well);
            match &r.scores {
                Some(m) => {
                    let _ = write!(s, "{:.4},{:.4},{:.4},", m.sensitivity, m.specificity, m.g_mean);
                    if timing {
                        let _ = writeln!(s, "{:.3},{:.3}", m.train_seconds, m.test_seconds);
                    } else {
                        s.push_str(",\n");
                    }
                }
                None => s.push_str("NA,NA,NA,NA,NA\n"),
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(REPORT_HEADER) {
            return Err(Error::ModelFormat("report header mismatch".into()));
        }
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 7 {
                return Err(Error::ModelFormat(format!("report row has {} cells", cells.len())));
            }
            let scores = if cells[2] == "NA" {
                None
            } else {
                let f = |i: usize| crate::textfmt::parse_f64(cells[i]);
                Some(Scores {
                    sensitivity: f(2)?,
                    specificity: f(3)?,
                    g_mean: f(4)?,
                    train_seconds: f(5)?,
                    test_seconds: f(6)?,
                })
            };
            rows.push(RunRecord { classifier: cells[0].into(), well: cells[1].into(), scores });
        }
        Ok(Self { rows })
    }
}
