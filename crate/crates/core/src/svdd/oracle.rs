//! Reference solver for small SVDD duals: projected-gradient ascent on the
//! capped simplex `{α : Σα = 1, 0 <= α <= C}`. Slow, but shares nothing
//! with the pairwise solver beyond the objective itself.

use ndarray::Array2;

use super::solver::dual_objective;
use crate::error::{Error, Result};

pub const ORACLE_MAX_POINTS: usize = 30;
const MAX_ITERATIONS: usize = 1_000_000;
/// Stop once the best objective has improved by less than this over a
/// whole window of iterations.
const STALL_WINDOW: usize = 20_000;
const STALL_GAIN: f64 = 1e-15;

/// Solves the SVDD dual by projected-gradient ascent from the uniform
/// start. The step `(1 + 1/(t+1)) / L` shrinks towards `1/L`, where `L`
/// bounds the gradient's Lipschitz constant. Returns the best iterate.
pub fn solve_dual_bruteforce(k: &Array2<f64>, cost: f64) -> Result<Vec<f64>> {
    let n = k.nrows();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::OracleScaleExceeded { n, max: ORACLE_MAX_POINTS });
    }
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if cost * (n as f64) < 1.0 - 1e-12 {
        return Err(Error::InfeasibleCost { cost, n });
    }
    let cost = cost.min(1.0);

    // Gershgorin bound on the largest eigenvalue of 2K.
    let lipschitz = (0..n)
        .map(|i| 2.0 * (0..n).map(|j| k[[i, j]].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut alpha = vec![1.0 / n as f64; n];
    let mut best = alpha.clone();
    let mut best_obj = dual_objective(k, &alpha);
    let mut window_start_obj = best_obj;
    let mut step_vec = vec![0.0; n];
    for t in 0..MAX_ITERATIONS {
        let eta = (1.0 + 1.0 / (t as f64 + 1.0)) / lipschitz;
        for i in 0..n {
            let cross: f64 = (0..n).map(|j| k[[i, j]] * alpha[j]).sum();
            step_vec[i] = alpha[i] + eta * (k[[i, i]] - 2.0 * cross);
        }
        let next = project_capped_simplex(&step_vec, cost);
        let moved = next
            .iter()
            .zip(&alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        alpha = next;
        let obj = dual_objective(k, &alpha);
        if obj > best_obj {
            best_obj = obj;
            best.clone_from(&alpha);
        }
        if moved == 0.0 {
            break;
        }
        if (t + 1) % STALL_WINDOW == 0 {
            if best_obj - window_start_obj < STALL_GAIN {
                break;
            }
            window_start_obj = best_obj;
        }
    }
    Ok(best)
}

/// Euclidean projection onto `{α : Σα = 1, 0 <= α_i <= cap}`: finds the
/// shift τ with `Σ clamp(v_i − τ, 0, cap) = 1` by scanning the sorted
/// breakpoints of that piecewise-linear function.
pub fn project_capped_simplex(v: &[f64], cap: f64) -> Vec<f64> {
    let mass = |tau: f64| -> f64 { v.iter().map(|&x| (x - tau).clamp(0.0, cap)).sum() };
    let mut breaks: Vec<f64> = v.iter().flat_map(|&x| [x, x - cap]).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // mass() is non-increasing in τ: n·cap at the lowest break, 0 at the
    // highest. Find adjacent breakpoints bracketing 1 and interpolate.
    let mut lo = breaks[0];
    let mut lo_mass = mass(lo);
    let mut tau = lo;
    for &hi in &breaks[1..] {
        let hi_mass = mass(hi);
        if hi_mass <= 1.0 {
            tau = if lo_mass == hi_mass {
                hi
            } else {
                lo + (lo_mass - 1.0) / (lo_mass - hi_mass) * (hi - lo)
            };
            break;
        }
        lo = hi;
        lo_mass = hi_mass;
    }
    v.iter().map(|&x| (x - tau).clamp(0.0, cap)).collect()
}
