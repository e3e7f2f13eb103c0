use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::table::{WellRow, WellTable};
use crate::error::{Error, Result};

/// Log-like names and (center, scale) used to map the informative latent
/// coordinates onto physical-looking units.
const INFORMATIVE: [(&str, f64, f64); 4] = [
    ("GR", 75.0, 20.0),
    ("NPHI", 0.25, 0.06),
    ("RHOB", 2.35, 0.12),
    ("DT", 90.0, 12.0),
];
/// Pure-noise columns: (name, low, high) of a uniform draw.
const NOISE: [(&str, f64, f64); 2] = [("RT", 2.0, 50.0), ("AI", 5000.0, 9000.0)];

const MINORITY_SPREAD: f64 = 0.35;
const MAJORITY_SPREAD: f64 = 1.0;
const MAJORITY_SHIFT: f64 = 0.9;
const WELL_OFFSET_SPREAD: f64 = 0.1;
const DEPTH_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_wells: usize,
    pub rows_per_well: usize,
    /// Fraction of rows in the majority (`High`) class.
    pub skew: f64,
    /// Feature count; the last two are noise.
    pub d: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_wells: 4,
            rows_per_well: 500,
            skew: 0.97,
            d: 6,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        if !(self.skew > 0.0 && self.skew < 1.0) {
            return Err(Error::InvalidConfig(format!("skew must lie in (0,1), got {}", self.skew)));
        }
        if self.d < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 features, got {}", self.d)));
        }
        if self.n_wells == 0 || self.rows_per_well == 0 {
            return Err(Error::InvalidConfig("need at least one well and one row".into()));
        }
        Ok(())
    }

    pub fn feature_names(&self) -> Vec<String> {
        let informative = self.d - NOISE.len();
        (0..informative)
            .map(|k| match INFORMATIVE.get(k) {
                Some((name, ..)) => name.to_string(),
                None => format!("F{}", k + 1),
            })
            .chain(NOISE.iter().map(|(n, ..)| n.to_string()))
            .collect()
    }
}

fn well_name(k: usize) -> String {
    if k < 26 {
        char::from(b'A' + k as u8).to_string()
    } else {
        format!("W{}", k + 1)
    }
}

/// Seeded synthetic well logs with a compact minority cluster inside a
/// broader, shifted majority cloud. Targets below 0.7 mark the minority.
pub fn gen_synthetic(cfg: &SyntheticConfig) -> Result<WellTable> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let informative = cfg.d - NOISE.len();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let minority_per_well =
        ((cfg.rows_per_well as f64) * (1.0 - cfg.skew)).round() as usize;

    let mut rows = Vec::with_capacity(cfg.n_wells * cfg.rows_per_well);
    for w in 0..cfg.n_wells {
        let name = well_name(w);
        let offset: Vec<f64> = (0..informative)
            .map(|_| WELL_OFFSET_SPREAD * std_normal.sample(&mut rng))
            .collect();
        let mut is_minority = vec![false; cfg.rows_per_well];
        is_minority[..minority_per_well].iter_mut().for_each(|m| *m = true);
        is_minority.shuffle(&mut rng);
        let top = 1500.0 + 40.0 * w as f64;

        for (i, &minority) in is_minority.iter().enumerate() {
            let mut features = Vec::with_capacity(cfg.d);
            for (k, &shift_k) in offset.iter().enumerate() {
                let z = if minority {
                    shift_k + MINORITY_SPREAD * std_normal.sample(&mut rng)
                } else {
                    let shift = if k % 2 == 0 { MAJORITY_SHIFT } else { -MAJORITY_SHIFT };
                    shift_k + shift + MAJORITY_SPREAD * std_normal.sample(&mut rng)
                };
                let (center, scale) = INFORMATIVE.get(k).map_or((0.0, 1.0), |&(_, c, s)| (c, s));
                features.push(Some(center + scale * z));
            }
            for &(_, lo, hi) in &NOISE {
                features.push(Some(rng.random_range(lo..hi)));
            }
            let target = if minority {
                rng.random_range(0.05..0.65)
            } else {
                rng.random_range(0.72..1.0)
            };
            rows.push(WellRow {
                well: name.clone(),
                depth: top + i as f64 * DEPTH_STEP,
                features,
                target: Some((target * 1e4f64).round() / 1e4),
            });
        }
    }
    WellTable::new(cfg.feature_names(), "SW".into(), rows)
}
