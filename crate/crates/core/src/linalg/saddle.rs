use alloc::vec;
use alloc::vec::Vec;

use super::dense::dependent_rows;
use super::{dot, norm, CsrMatrix, DenseMatrix, EnvelopeCholesky, LdltFactor};
use crate::error::{Error, Result};

/// Above this many unknowns (primal plus multipliers) the KKT system is solved
/// through the Schur complement of the constraint block instead of a dense
/// factorization.
pub const DENSE_KKT_LIMIT: usize = 1200;

const PIVOT_TOL: f64 = 1e-12;

/// Sparse constraint row as `(column, coefficient)` pairs.
pub type SparseRow = Vec<(usize, f64)>;

/// `[[K, Bᵀ], [B, 0]] (x; λ) = (f; g)` with `K` SPD and `B` of full row rank:
/// the optimality system of `min ½xᵀKx − fᵀx` subject to `Bx = g`.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub k: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constraints: Vec<SparseRow>,
    pub constraint_rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    /// `‖Kx + Bᵀλ − f‖ / max(‖f‖, ‖Bᵀλ‖)`.
    pub kkt_residual: f64,
    /// `max_i |(Bx − g)_i|`.
    pub constraint_residual: f64,
}

impl SaddleSystem {
    pub fn n(&self) -> usize {
        self.k.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    fn apply_b(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    fn apply_bt(&self, lambda: &[f64], out: &mut [f64]) {
        for (r, &l) in self.constraints.iter().zip(lambda) {
            for &(j, v) in r {
                out[j] += v * l;
            }
        }
    }

    fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n()];
        for &(j, v) in &self.constraints[i] {
            row[j] += v;
        }
        row
    }

    fn gram(&self) -> DenseMatrix {
        let m = self.m();
        let rows: Vec<Vec<f64>> = (0..m).map(|i| self.dense_row(i)).collect();
        let mut g = DenseMatrix::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let v = dot(&rows[i], &rows[j]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Residuals of a candidate solution.
    pub fn residuals(&self, x: &[f64], lambda: &[f64]) -> (f64, f64) {
        let mut r = self.k.mul_vec(x);
        let mut btl = vec![0.0; self.n()];
        self.apply_bt(lambda, &mut btl);
        for i in 0..self.n() {
            r[i] += btl[i] - self.rhs[i];
        }
        let scale = norm(&self.rhs).max(norm(&btl)).max(f64::MIN_POSITIVE);
        let c = self
            .apply_b(x)
            .iter()
            .zip(&self.constraint_rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        (norm(&r) / scale, c)
    }
}

pub fn saddle_solve(s: &SaddleSystem) -> Result<SaddleSolution> {
    let (n, m) = (s.n(), s.m());
    assert_eq!(s.rhs.len(), n);
    assert_eq!(s.constraint_rhs.len(), m);
    if s.constraints.iter().any(|r| r.iter().all(|&(_, v)| v == 0.0)) {
        let indices = (0..m).filter(|&i| s.constraints[i].iter().all(|&(_, v)| v == 0.0)).collect();
        return Err(Error::RankDeficient { indices });
    }
    if m > 0 {
        let dependent = dependent_rows(&s.gram(), PIVOT_TOL);
        if !dependent.is_empty() {
            return Err(Error::RankDeficient { indices: dependent });
        }
    }
    let (x, multipliers) = if n + m <= DENSE_KKT_LIMIT { dense_route(s)? } else { schur_route(s)? };
    let (kkt_residual, constraint_residual) = s.residuals(&x, &multipliers);
    Ok(SaddleSolution { x, multipliers, kkt_residual, constraint_residual })
}

fn dense_route(s: &SaddleSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, m) = (s.n(), s.m());
    let mut a = DenseMatrix::zeros(n + m);
    for i in 0..n {
        for (j, v) in s.k.row(i) {
            a[(i, j)] = v;
        }
    }
    for (r, row) in s.constraints.iter().enumerate() {
        for &(j, v) in row {
            a[(n + r, j)] += v;
            a[(j, n + r)] += v;
        }
    }
    let f = LdltFactor::factor(&a, PIVOT_TOL)?;
    let mut b: Vec<f64> = s.rhs.iter().chain(&s.constraint_rhs).copied().collect();
    let mut sol = f.solve(&b);
    // one step of iterative refinement
    let ax = a.mul_vec(&sol);
    b.iter_mut().zip(&ax).for_each(|(bi, ai)| *bi -= ai);
    let corr = f.solve(&b);
    sol.iter_mut().zip(&corr).for_each(|(s, c)| *s += c);
    let multipliers = sol.split_off(n);
    Ok((sol, multipliers))
}

fn schur_route(s: &SaddleSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = s.m();
    let chol = EnvelopeCholesky::factor(&s.k)?;
    let solve = |b: &[f64]| -> Result<Vec<f64>> { Ok(chol.solve_refined(&s.k, b)) };
    let x0 = solve(&s.rhs)?;
    if m == 0 {
        return Ok((x0, Vec::new()));
    }
    let w: Vec<Vec<f64>> = (0..m).map(|i| solve(&s.dense_row(i))).collect::<Result<_>>()?;
    let mut schur = DenseMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            schur[(i, j)] = s.constraints[i].iter().map(|&(c, v)| v * w[j][c]).sum();
        }
    }
    for i in 0..m {
        for j in 0..i {
            let v = 0.5 * (schur[(i, j)] + schur[(j, i)]);
            schur[(i, j)] = v;
            schur[(j, i)] = v;
        }
    }
    let bx0 = s.apply_b(&x0);
    let rhs: Vec<f64> = bx0.iter().zip(&s.constraint_rhs).map(|(a, g)| a - g).collect();
    let lambda = LdltFactor::factor(&schur, PIVOT_TOL)?.solve(&rhs);
    let mut x = x0;
    for (wi, &li) in w.iter().zip(&lambda) {
        x.iter_mut().zip(wi).for_each(|(xj, wj)| *xj -= li * wj);
    }
    let defect: Vec<f64> = s.constraint_rhs.iter().zip(s.apply_b(&x)).map(|(g, b)| g - b).collect();
    let mu = LdltFactor::factor(&s.gram(), PIVOT_TOL)?.solve(&defect);
    s.apply_bt(&mu, &mut x);
    Ok((x, lambda))
}
