use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::geometry::sqrt;

/// Square row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn swap_symmetric(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.n;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
        for i in 0..n {
            self.data.swap(i * n + a, i * n + b);
        }
    }

    /// Gaussian elimination with partial pivoting.
    pub fn solve_gaussian(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().partial_cmp(&a[j * n + k].abs()).unwrap())
                .unwrap();
            if a[p * n + k] == 0.0 {
                return Err(Error::SingularPivot { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
                x.swap(p, k);
            }
            for i in k + 1..n {
                let l = a[i * n + k] / a[k * n + k];
                if l != 0.0 {
                    for j in k..n {
                        a[i * n + j] -= l * a[k * n + j];
                    }
                    x[i] -= l * x[k];
                }
            }
        }
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k * n + j] * x[j]).sum();
            x[k] = (x[k] - s) / a[k * n + k];
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Copy)]
enum Pivot {
    One(f64),
    /// Symmetric 2x2 block `[[a, b], [b, c]]`; only stored on its first index.
    Two(f64, f64, f64),
    Second,
}

/// `P A Pᵀ = L D Lᵀ` with Bunch–Kaufman pivoting: `L` unit lower triangular,
/// `D` block diagonal with 1x1 and 2x2 blocks.
#[derive(Debug, Clone)]
pub struct LdltFactor {
    n: usize,
    /// Strictly lower part holds `L`.
    l: DenseMatrix,
    pivots: Vec<Pivot>,
    /// `perm[i]` is the original index placed at position `i`.
    perm: Vec<usize>,
}

impl LdltFactor {
    /// Factors a symmetric matrix. Pivots whose magnitude falls below
    /// `pivot_tol` times the largest entry are reported as breakdown.
    pub fn factor(a: &DenseMatrix, pivot_tol: f64) -> Result<Self> {
        let n = a.n;
        let alpha = (1.0 + sqrt(17.0)) / 8.0;
        let threshold = pivot_tol * a.max_abs().max(f64::MIN_POSITIVE);
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = vec![Pivot::One(0.0); n];
        let mut k = 0;
        while k < n {
            let akk = m[(k, k)].abs();
            let (mut lambda, mut r) = (0.0f64, k);
            for i in k + 1..n {
                if m[(i, k)].abs() > lambda {
                    lambda = m[(i, k)].abs();
                    r = i;
                }
            }
            let two_by_two = if akk >= alpha * lambda || lambda == 0.0 {
                false
            } else {
                let sigma = (k..n).filter(|&j| j != r).fold(0.0f64, |s, j| s.max(m[(j, r)].abs()));
                if akk * sigma >= alpha * lambda * lambda {
                    false
                } else if m[(r, r)].abs() >= alpha * sigma {
                    m.swap_symmetric(k, r);
                    perm.swap(k, r);
                    false
                } else {
                    m.swap_symmetric(k + 1, r);
                    perm.swap(k + 1, r);
                    true
                }
            };

            if !two_by_two {
                let d = m[(k, k)];
                if d.abs() <= threshold {
                    return Err(Error::SingularPivot { pivot: k });
                }
                for i in k + 1..n {
                    m[(i, k)] /= d;
                }
                for i in k + 1..n {
                    let li = m[(i, k)];
                    if li == 0.0 {
                        continue;
                    }
                    for j in k + 1..=i {
                        let v = m[(i, j)] - li * m[(j, k)] * d;
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
                pivots[k] = Pivot::One(d);
                k += 1;
            } else {
                let (a11, a21, a22) = (m[(k, k)], m[(k + 1, k)], m[(k + 1, k + 1)]);
                let det = a11 * a22 - a21 * a21;
                if det.abs() <= threshold * threshold {
                    return Err(Error::SingularPivot { pivot: k });
                }
                for i in k + 2..n {
                    let (c1, c2) = (m[(i, k)], m[(i, k + 1)]);
                    m[(i, k)] = (a22 * c1 - a21 * c2) / det;
                    m[(i, k + 1)] = (a11 * c2 - a21 * c1) / det;
                }
                for i in k + 2..n {
                    let (l1, l2) = (m[(i, k)], m[(i, k + 1)]);
                    for j in k + 2..=i {
                        // subtract L_i D L_jᵀ
                        let (m1, m2) = (m[(j, k)], m[(j, k + 1)]);
                        let w1 = a11 * m1 + a21 * m2;
                        let w2 = a21 * m1 + a22 * m2;
                        let v = m[(i, j)] - (l1 * w1 + l2 * w2);
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
                pivots[k] = Pivot::Two(a11, a21, a22);
                pivots[k + 1] = Pivot::Second;
                k += 2;
            }
        }
        Ok(LdltFactor { n, l: m, pivots, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L z = y
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                if !matches!((self.pivots[j], j + 1 == i), (Pivot::Two(..), true)) {
                    s -= self.l[(i, j)] * y[j];
                }
            }
            y[i] = s;
        }
        // D w = z
        let mut i = 0;
        while i < n {
            match self.pivots[i] {
                Pivot::One(d) => {
                    y[i] /= d;
                    i += 1;
                }
                Pivot::Two(a, b, c) => {
                    let det = a * c - b * b;
                    let (z1, z2) = (y[i], y[i + 1]);
                    y[i] = (c * z1 - b * z2) / det;
                    y[i + 1] = (a * z2 - b * z1) / det;
                    i += 2;
                }
                Pivot::Second => unreachable!(),
            }
        }
        // Lᵀ x = w
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                if !matches!((self.pivots[i], j == i + 1), (Pivot::Two(..), true)) {
                    s -= self.l[(j, i)] * y[j];
                }
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (pos, &orig) in self.perm.iter().enumerate() {
            x[orig] = y[pos];
        }
        x
    }

    /// Number of negative eigenvalues (inertia via Sylvester's law).
    pub fn negative_count(&self) -> usize {
        self.pivots
            .iter()
            .map(|p| match *p {
                Pivot::One(d) => usize::from(d < 0.0),
                Pivot::Two(a, b, c) => {
                    let det = a * c - b * b;
                    if det < 0.0 {
                        1
                    } else if a + c < 0.0 {
                        2
                    } else {
                        0
                    }
                }
                Pivot::Second => 0,
            })
            .sum()
    }
}

/// Greedy pivoted Cholesky of a Gram matrix. Returns the indices whose
/// remaining pivot falls below `tol` times the largest diagonal entry, i.e.
/// rows that depend linearly on the others.
pub fn dependent_rows(gram: &DenseMatrix, tol: f64) -> Vec<usize> {
    let n = gram.n;
    let dmax = (0..n).fold(0.0f64, |m, i| m.max(gram[(i, i)]));
    let mut g = gram.clone();
    let mut done = vec![false; n];
    let mut dependent = Vec::new();
    for _ in 0..n {
        // largest remaining diagonal
        let Some(p) = (0..n).filter(|&i| !done[i]).max_by(|&a, &b| g[(a, a)].partial_cmp(&g[(b, b)]).unwrap()) else {
            break;
        };
        if g[(p, p)] <= tol * dmax.max(f64::MIN_POSITIVE) {
            dependent.extend((0..n).filter(|&i| !done[i]));
            break;
        }
        done[p] = true;
        let d = g[(p, p)];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let gip = g[(i, p)];
            for j in 0..n {
                if !done[j] {
                    g[(i, j)] -= gip * g[(p, j)] / d;
                }
            }
        }
    }
    dependent.sort_unstable();
    dependent
}
