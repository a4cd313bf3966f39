use alloc::vec;
use alloc::vec::Vec;

use super::{dot, norm, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Achieved `‖b - Ax‖ / ‖b‖`.
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn spd_solve(a: &CsrMatrix, b: &[f64], tol: f64, cap: usize) -> Result<Vec<f64>> {
    spd_solve_with_guess(a, b, vec![0.0; a.n], tol, cap).map(|o| o.x)
}

/// Jacobi-preconditioned conjugate gradients from `x0`. Converged when the true
/// relative residual `‖b - Ax‖ / ‖b‖` drops to `tol`.
pub fn spd_solve_with_guess(a: &CsrMatrix, b: &[f64], x0: Vec<f64>, tol: f64, cap: usize) -> Result<CgOutcome> {
    let n = a.n;
    assert_eq!(b.len(), n);
    assert_eq!(x0.len(), n);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgOutcome { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = x0;
    let mut r = a.mul_vec(&x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut rel = norm(&r) / bnorm;
    if rel <= tol {
        return Ok(CgOutcome { x, iterations: 0, residual: rel });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 1..=cap {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotConverged { iterations: it, residual: rel });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / bnorm;
        if rel <= tol {
            // guard against drift of the recursive residual
            let mut true_r = a.mul_vec(&x);
            true_r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
            let true_rel = norm(&true_r) / bnorm;
            if true_rel <= tol {
                return Ok(CgOutcome { x, iterations: it, residual: true_rel });
            }
            r = true_r;
            rel = true_rel;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged { iterations: cap, residual: rel })
}
