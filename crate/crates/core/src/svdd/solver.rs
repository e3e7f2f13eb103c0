//! Pairwise ascent on the SVDD dual
//!
//! maximize  Σ α_i K_ii − Σ_ij α_i α_j K_ij
//! s.t.      Σ α_i = 1,  0 <= α_i <= C.
//!
//! Each step moves mass δ from one multiplier to another, so the simplex
//! constraint is preserved exactly up to rounding. The multiplier to grow is
//! the one with the largest gradient; its partner is the shrinkable
//! multiplier promising the largest objective gain `gap² / curvature`.
//! Picking the partner by gain instead of by smallest gradient avoids the
//! slow zigzag the purely first-order rule falls into on near-duplicate
//! points.

use ndarray::Array2;

use crate::error::{Error, Result};

const CURVATURE_FLOOR: f64 = 1e-12;

/// Returns the multipliers once the maximal violation is at most `tol`.
pub(crate) fn solve(k: &Array2<f64>, cost: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = k.nrows();
    let mut alphas = vec![1.0 / n as f64; n];
    let mut grad = full_gradient(k, &alphas);
    let mut iterations = 0;
    loop {
        let Some((up, down, violation)) = working_pair(k, &alphas, &grad, cost) else {
            return Ok(alphas);
        };
        if violation <= tol {
            // Drift in the incremental gradient could hide a violation.
            let fresh = full_gradient(k, &alphas);
            let fresh_violation = working_pair(k, &alphas, &fresh, cost).map_or(0.0, |p| p.2);
            grad = fresh;
            if fresh_violation <= tol {
                return Ok(alphas);
            }
            continue;
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, violation });
        }
        iterations += 1;

        let gap = grad[up] - grad[down];
        let curvature = k[[up, up]] + k[[down, down]] - 2.0 * k[[up, down]];
        let room_up = cost - alphas[up];
        let room_down = alphas[down];
        let mut step = if curvature > CURVATURE_FLOOR { gap / (2.0 * curvature) } else { f64::INFINITY };
        if step >= room_up || step >= room_down {
            step = room_up.min(room_down);
        }
        if step >= room_up {
            alphas[up] = cost;
        } else {
            alphas[up] += step;
        }
        if step >= room_down {
            alphas[down] = 0.0;
        } else {
            alphas[down] -= step;
        }
        for (i, g) in grad.iter_mut().enumerate() {
            *g -= 2.0 * step * (k[[i, up]] - k[[i, down]]);
        }
    }
}

/// `∂L/∂α_i = K_ii − 2 (Kα)_i`.
pub(crate) fn full_gradient(k: &Array2<f64>, alphas: &[f64]) -> Vec<f64> {
    (0..k.nrows())
        .map(|i| {
            let cross: f64 = alphas.iter().enumerate().map(|(j, a)| a * k[[i, j]]).sum();
            k[[i, i]] - 2.0 * cross
        })
        .collect()
}

/// `(up, down, violation)`, where `violation` is the largest gradient gap
/// between any growable and any shrinkable multiplier. `None` when no pair
/// can move. Ties go to the lowest index.
fn working_pair(k: &Array2<f64>, alphas: &[f64], grad: &[f64], cost: f64) -> Option<(usize, usize, f64)> {
    let mut up: Option<usize> = None;
    let mut min_down = f64::INFINITY;
    for i in 0..alphas.len() {
        if alphas[i] < cost && up.is_none_or(|u| grad[i] > grad[u]) {
            up = Some(i);
        }
        if alphas[i] > 0.0 {
            min_down = min_down.min(grad[i]);
        }
    }
    let up = up?;
    if min_down == f64::INFINITY {
        return None;
    }
    let mut down = None;
    let mut best_gain = f64::NEG_INFINITY;
    for j in 0..alphas.len() {
        if alphas[j] <= 0.0 || j == up || grad[j] >= grad[up] {
            continue;
        }
        let gap = grad[up] - grad[j];
        let curvature = (k[[up, up]] + k[[j, j]] - 2.0 * k[[up, j]]).max(CURVATURE_FLOOR);
        let gain = gap * gap / curvature;
        if gain > best_gain {
            best_gain = gain;
            down = Some(j);
        }
    }
    match down {
        Some(down) => Some((up, down, grad[up] - min_down)),
        None => Some((up, up, 0.0)),
    }
}

/// Dual objective `Σ α_i K_ii − αᵀKα`.
pub fn dual_objective(k: &Array2<f64>, alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut linear = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        linear += alphas[i] * k[[i, i]];
        let row: f64 = (0..n).map(|j| alphas[j] * k[[i, j]]).sum();
        quad += alphas[i] * row;
    }
    linear - quad
}
