use std::io::Write;

use crate::error::{Error, Result};
use crate::textfmt::sig6;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `counts.len() + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `bin_low,bin_high,count` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_low,bin_high,count")?;
        for (k, c) in self.counts.iter().enumerate() {
            writeln!(out, "{},{},{}", sig6(self.edges[k]), sig6(self.edges[k + 1]), c)?;
        }
        Ok(())
    }
}

/// Equal-width histogram over `[min, max]`. Bins are half-open except the
/// last, which also holds the maximum. All-equal input collapses to a
/// single degenerate bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bin count must be positive".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Histogram {
            edges: vec![lo, hi],
            counts: vec![values.len()],
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + k as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0; bins];
    for &v in values {
        let k = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts })
}
