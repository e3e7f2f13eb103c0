//! Relief feature weighting for two-class data.
//!
//! Every instance is visited once in index order. For each one the nearest
//! hit (same class) and nearest miss (other class) are found by Euclidean
//! distance over min–max scaled features, and each feature's weight moves
//! by `(diff(miss) − diff(hit)) / n`.

use std::io::Write;

use ndarray::{Array2, ArrayView2};

use crate::dataio::Label;
use crate::error::{Error, Result};

/// Number of features kept by default.
pub const DEFAULT_K: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights {
    pub weights: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Instances visited.
    pub m_used: usize,
}

impl FeatureWeights {
    /// `feature,weight` rows sorted by descending weight.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "feature,weight")?;
        for i in rank(&self.weights) {
            writeln!(out, "{},{:.6}", self.feature_names[i], self.weights[i])?;
        }
        Ok(())
    }
}

pub fn relief_weights(x: ArrayView2<f64>, y: &[Label], feature_names: &[String]) -> Result<FeatureWeights> {
    let (n, d) = x.dim();
    if y.len() != n {
        return Err(Error::LengthMismatch(y.len(), n));
    }
    if feature_names.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: feature_names.len() });
    }
    if n < 2 || !y.contains(&Label::Low) || !y.contains(&Label::High) {
        return Err(Error::SingleClassInput);
    }
    let scaled = min_max_scale(x)?;

    let mut weights = vec![0.0; d];
    for i in 0..n {
        let row = scaled.row(i);
        let mut hit: Option<(usize, f64)> = None;
        let mut miss: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dist: f64 = row.iter().zip(scaled.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let slot = if y[j] == y[i] { &mut hit } else { &mut miss };
            // Strict comparison keeps the lowest index on ties.
            if slot.is_none_or(|(_, best)| dist < best) {
                *slot = Some((j, dist));
            }
        }
        let Some((miss, _)) = miss else { unreachable!("both classes present") };
        // An instance alone in its class has no hit; it only scores misses.
        let hit = hit.map(|(h, _)| h);
        for f in 0..d {
            let d_miss = (scaled[[i, f]] - scaled[[miss, f]]).abs();
            let d_hit = hit.map_or(0.0, |h| (scaled[[i, f]] - scaled[[h, f]]).abs());
            weights[f] += (d_miss - d_hit) / n as f64;
        }
    }
    Ok(FeatureWeights { weights, feature_names: feature_names.to_vec(), m_used: n })
}

/// Columns rescaled to [0,1]; constant columns become all zeros.
fn min_max_scale(x: ArrayView2<f64>) -> Result<Array2<f64>> {
    let mut out = x.to_owned();
    let mut any_varying = false;
    for mut col in out.columns_mut() {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            any_varying = true;
            col.mapv_inplace(|v| (v - lo) / (hi - lo));
        } else {
            col.fill(0.0);
        }
    }
    if !any_varying {
        return Err(Error::ConstantAllFeatures);
    }
    Ok(out)
}

/// Feature indices by descending weight, lower index first on ties.
fn rank(weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    idx
}

/// Indices of the `k` heaviest features, heaviest first.
pub fn select_top(w: &FeatureWeights, k: usize) -> Result<Vec<usize>> {
    let d = w.weights.len();
    if k == 0 || k > d {
        return Err(Error::InvalidK { k, d });
    }
    let mut idx = rank(&w.weights);
    idx.truncate(k);
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    fn weights(w: &[f64]) -> FeatureWeights {
        FeatureWeights { weights: w.to_vec(), feature_names: names(w.len()), m_used: 0 }
    }

    #[test]
    fn one_dimensional_hand_example() {
        // Contributions 0.8, 0.7, 0.7, 0.8.
        let x = array![[0.0], [0.1], [0.9], [1.0]];
        let y = [Label::Low, Label::Low, Label::High, Label::High];
        let w = relief_weights(x.view(), &y, &names(1)).unwrap();
        assert!((w.weights[0] - 0.75).abs() <= 1e-12);
        assert_eq!(w.m_used, 4);
    }

    #[test]
    fn constant_feature_weighs_zero() {
        let x = array![[0.0, 5.0], [0.2, 5.0], [0.8, 5.0], [1.0, 5.0], [0.1, 5.0]];
        let y = [Label::Low, Label::Low, Label::High, Label::High, Label::Low];
        let w = relief_weights(x.view(), &y, &names(2)).unwrap();
        assert_eq!(w.weights[1], 0.0);
        assert_eq!(select_top(&w, 1).unwrap(), vec![0]);
    }

    #[test]
    fn error_cases() {
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            relief_weights(x.view(), &[Label::Low, Label::Low], &names(1)),
            Err(Error::SingleClassInput)
        ));
        let c = array![[3.0], [3.0]];
        assert!(matches!(
            relief_weights(c.view(), &[Label::Low, Label::High], &names(1)),
            Err(Error::ConstantAllFeatures)
        ));
    }

    #[test]
    fn select_top_order_and_ties() {
        assert_eq!(select_top(&weights(&[0.3, 0.1, 0.2]), 2).unwrap(), vec![0, 2]);
        assert_eq!(select_top(&weights(&[0.5, 0.5, 0.5]), 1).unwrap(), vec![0]);
        assert!(matches!(select_top(&weights(&[0.1]), 0), Err(Error::InvalidK { .. })));
        assert!(matches!(select_top(&weights(&[0.1]), 2), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn csv_sorted_descending() {
        let mut w = weights(&[0.1, 0.3, -0.05]);
        w.feature_names = vec!["RT".into(), "GR".into(), "AI".into()];
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "feature,weight\nGR,0.300000\nRT,0.100000\nAI,-0.050000\n"
        );
    }

    proptest! {
        #[test]
        fn affine_rescaling_is_absorbed(
            data in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, any::<bool>()), 4..30),
            scale in prop_oneof![0.01f64..100.0, -100.0f64..-0.01],
            shift in -1e3f64..1e3,
        ) {
            let n = data.len();
            let mut y: Vec<Label> = data.iter().map(|t| if t.2 { Label::Low } else { Label::High }).collect();
            y[0] = Label::Low;
            y[1] = Label::High;
            let x = Array2::from_shape_fn((n, 2), |(i, j)| if j == 0 { data[i].0 } else { data[i].1 });
            let mut xt = x.clone();
            xt.column_mut(0).mapv_inplace(|v| scale * v + shift);
            let a = relief_weights(x.view(), &y, &names(2)).unwrap();
            let b = relief_weights(xt.view(), &y, &names(2)).unwrap();
            for f in 0..2 {
                prop_assert!((a.weights[f] - b.weights[f]).abs() <= 1e-12,
                    "feature {}: {} vs {}", f, a.weights[f], b.weights[f]);
            }
        }

        #[test]
        fn constant_feature_never_beats_positive_weight(
            data in prop::collection::vec((-10.0f64..10.0, any::<bool>()), 4..30),
        ) {
            let n = data.len();
            let mut y: Vec<Label> = data.iter().map(|t| if t.1 { Label::Low } else { Label::High }).collect();
            y[0] = Label::Low;
            y[1] = Label::High;
            let x = Array2::from_shape_fn((n, 2), |(i, j)| if j == 0 { 7.0 } else { data[i].0 });
            let w = relief_weights(x.view(), &y, &names(2)).unwrap();
            prop_assert_eq!(w.weights[0], 0.0);
            if w.weights[1] > 0.0 {
                prop_assert_eq!(select_top(&w, 1).unwrap(), vec![1]);
            }
        }
    }
}
