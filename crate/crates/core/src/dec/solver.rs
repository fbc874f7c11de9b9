//! Jacobi-preconditioned conjugate gradients for the SPD Gram systems.

use serde::{Deserialize, Serialize};

use super::sparse::{dot, norm, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Target for `‖Ax − b‖ / ‖b‖`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Reports omit wall-clock timings when set. The solver itself is always
    /// sequential with fixed-order reductions.
    pub deterministic: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 200_000, deterministic: true }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `‖Ax − b‖ / ‖b‖` of the returned `x`.
    pub residual: f64,
}

pub fn solve_spd(a: &SparseMatrix, b: &[f64], cfg: &SolveConfig) -> Result<Solution> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::Invalid(format!(
            "solve_spd: matrix is {}x{}, right-hand side has {} entries",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(Solution { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }

    let inv_diag: Vec<f64> = a
        .diagonal_entries()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let target = cfg.tolerance * b_norm;

    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NonConvergence { iterations, residual: norm(&r) / b_norm });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        iterations += 1;

        if norm(&r) <= target {
            // the recurrence drifts from the true residual on ill-conditioned systems
            let true_r = true_residual(a, &x, b);
            let rel = norm(&true_r) / b_norm;
            if rel <= cfg.tolerance {
                return Ok(Solution { x, iterations, residual: rel });
            }
            r = true_r;
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    let rel = norm(&true_residual(a, &x, b)) / b_norm;
    Err(Error::NonConvergence { iterations, residual: rel })
}

fn true_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}
