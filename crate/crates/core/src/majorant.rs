//! Guaranteed error majorant for broken fluxes, its constants and the
//! closed-form choice of the Young weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::{constraint_residuals, BrokenFluxField, ConstraintResiduals};
use crate::geometry::{sqrt, tanh, PI};
use crate::mesh::{DomainDecomposition, TriMesh};
use crate::problem::{EllipticProblem, ScalarFieldP1};
use crate::quadrature::{integrate, GAUSS7, MIDPOINT3};

/// Mean residuals above this mark the flux as not admissible.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;
pub const EPS_MIN: f64 = 1e-8;
pub const EPS_MAX: f64 = 1e8;

/// Constant of `‖w − {w}_γ‖_ω ≤ C ‖∇w‖_ω` for a square `ω` with side `γ` of length `h2`.
pub fn poincare_edge_constant(h2: f64) -> f64 {
    1.0 / sqrt(PI / h2 * tanh(PI / h2))
}

pub fn beta(c_k: f64, c_j: f64) -> f64 {
    sqrt(0.5 * (c_k * c_k + c_j * c_j))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorantConstants {
    /// Poincaré constant of each basic subdomain.
    pub c_p: Vec<f64>,
    pub c_p_max: f64,
    pub c_min: f64,
    pub e_max: usize,
    /// One per interface, in decomposition order.
    pub beta: Vec<f64>,
    /// Friedrichs constant of the whole domain.
    pub c_f: f64,
}

impl MajorantConstants {
    /// Constants for rectangular basic subdomains: `diam/π` per subdomain and
    /// the edge constant of the interface length on both sides of each interface.
    pub fn from_decomposition(decomp: &DomainDecomposition, problem: &EllipticProblem, c_f: f64) -> Result<Self> {
        if !(c_f > 0.0) {
            return Err(Error::InvalidArgument("Friedrichs constant must be positive".into()));
        }
        let c_p: Vec<f64> = decomp.outlines.iter().map(|r| r.diameter() / PI).collect();
        let c_p_max = c_p.iter().copied().fold(0.0, f64::max);
        let beta = decomp
            .interfaces
            .iter()
            .map(|g| {
                let c = poincare_edge_constant(g.length);
                beta(c, c)
            })
            .collect();
        Ok(MajorantConstants {
            c_p,
            c_p_max,
            c_min: problem.c_min,
            e_max: decomp.max_interfaces_per_subdomain().max(1),
            beta,
            c_f,
        })
    }

    /// Weights `(α1, α2, α3)` for Young parameters `eps`.
    pub fn alphas(&self, eps: [f64; 3]) -> Result<[f64; 3]> {
        let [e1, e2, e3] = eps;
        if !(e1 > 0.0 && e2 > 0.0 && e3 > 0.0) {
            return Err(Error::InvalidArgument("Young parameters must be positive".into()));
        }
        let e = self.e_max as f64;
        Ok([
            1.0 + e1 + e2,
            (1.0 + 1.0 / e1 + e3) * self.c_p_max * self.c_p_max / self.c_min,
            (1.0 + 1.0 / e2 + 1.0 / e3) * e / self.c_min,
        ])
    }

    /// `(T1, T2, T3)` of the unweighted sums.
    fn scaled(&self, s: [f64; 3]) -> [f64; 3] {
        [s[0], self.c_p_max * self.c_p_max / self.c_min * s[1], self.e_max as f64 / self.c_min * s[2]]
    }

    /// `α1 S1 + α2 S2 + α3 S3`.
    pub fn quadratic_majorant(&self, s: [f64; 3], eps: [f64; 3]) -> Result<f64> {
        let a = self.alphas(eps)?;
        Ok(a[0] * s[0] + a[1] * s[1] + a[2] * s[2])
    }

    /// `√S1 + (C_P,max √S2 + √E_max √S3) / √C_min`.
    pub fn three_term_bound(&self, s: [f64; 3]) -> f64 {
        sqrt(s[0]) + (self.c_p_max * sqrt(s[1]) + sqrt(self.e_max as f64) * sqrt(s[2])) / sqrt(self.c_min)
    }
}

/// Unweighted sums split by subdomain and interface; the interface parts
/// include `β²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantTerms {
    pub flux: Vec<f64>,
    pub equilibrium: Vec<f64>,
    pub jump: Vec<f64>,
}

impl MajorantTerms {
    pub fn sums(&self) -> [f64; 3] {
        [self.flux.iter().sum(), self.equilibrium.iter().sum(), self.jump.iter().sum()]
    }
}

pub fn majorant_terms(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    y: &BrokenFluxField,
    beta: &[f64],
) -> Result<MajorantTerms> {
    if beta.len() != decomp.interfaces.len() {
        return Err(Error::InvalidArgument("one beta per interface is required".into()));
    }
    let a_inv = problem.a_inv();
    let mut flux = vec![0.0; decomp.n_basic()];
    let mut equilibrium = vec![0.0; decomp.n_basic()];
    for (k, tris) in decomp.basic_triangles.iter().enumerate() {
        for &t in tris {
            let fv = problem.a.apply(v.gradient(mesh, t));
            let area = mesh.areas[t];
            for q in &MIDPOINT3 {
                let r = y.at_bary(t, &q.bary) - fv;
                flux[k] += q.weight * area * r.dot(a_inv.apply(r));
            }
            let d = y.divergence(mesh, t);
            equilibrium[k] += integrate(&GAUSS7, &mesh.corners(t), area, |x| {
                let r = d + (problem.source)(x);
                r * r
            });
        }
    }
    let jump = decomp
        .interfaces
        .iter()
        .zip(beta)
        .map(|(g, b)| {
            let s: f64 = g
                .edges
                .iter()
                .map(|e| {
                    let [ja, jb] = y.jump_at_ends(mesh, e);
                    e.length / 3.0 * (ja * ja + ja * jb + jb * jb)
                })
                .sum();
            b * b * s
        })
        .collect();
    Ok(MajorantTerms { flux, equilibrium, jump })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorantReport {
    /// Weighted contributions per basic subdomain.
    pub m1_parts: Vec<f64>,
    pub m2_parts: Vec<f64>,
    /// Weighted contributions per interface.
    pub m3_parts: Vec<f64>,
    pub m1_sq: f64,
    pub m2_sq: f64,
    pub m3_sq: f64,
    pub total_sq: f64,
    pub total: f64,
    pub eps: [f64; 3],
    pub alpha: [f64; 3],
    /// Unweighted sums `(S1, S2, S3)`.
    pub sums: [f64; 3],
    pub d11_bound: f64,
    pub residuals: ConstraintResiduals,
    /// The flux satisfies the mean constraints, so the bound is guaranteed.
    pub admissible: bool,
    pub energy_error: Option<f64>,
    pub i_eff: Option<f64>,
}

impl MajorantReport {
    pub fn from_terms(terms: &MajorantTerms, residuals: ConstraintResiduals, constants: &MajorantConstants, eps: [f64; 3]) -> Result<Self> {
        let alpha = constants.alphas(eps)?;
        let weigh = |parts: &[f64], a: f64| -> Vec<f64> { parts.iter().map(|p| a * p).collect() };
        let m1_parts = weigh(&terms.flux, alpha[0]);
        let m2_parts = weigh(&terms.equilibrium, alpha[1]);
        let m3_parts = weigh(&terms.jump, alpha[2]);
        let m1_sq: f64 = m1_parts.iter().sum();
        let m2_sq: f64 = m2_parts.iter().sum();
        let m3_sq: f64 = m3_parts.iter().sum();
        let total_sq = m1_sq + m2_sq + m3_sq;
        let sums = terms.sums();
        let admissible = residuals.max_abs() <= ADMISSIBILITY_TOL;
        Ok(MajorantReport {
            m1_parts,
            m2_parts,
            m3_parts,
            m1_sq,
            m2_sq,
            m3_sq,
            total_sq,
            total: sqrt(total_sq),
            eps,
            alpha,
            sums,
            d11_bound: constants.three_term_bound(sums),
            residuals,
            admissible,
            energy_error: None,
            i_eff: None,
        })
    }

    pub fn with_energy_error(mut self, error: f64) -> Result<Self> {
        self.i_eff = Some(efficiency_index(self.total, error)?);
        self.energy_error = Some(error);
        Ok(self)
    }
}

pub fn evaluate_majorant(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    y: &BrokenFluxField,
    constants: &MajorantConstants,
    eps: [f64; 3],
) -> Result<MajorantReport> {
    let terms = majorant_terms(mesh, decomp, problem, v, y, &constants.beta)?;
    let residuals = constraint_residuals(mesh, decomp, y, &*problem.source);
    MajorantReport::from_terms(&terms, residuals, constants, eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsOptimum {
    pub eps: [f64; 3],
    /// Majorant value at `eps`.
    pub value: f64,
    /// All terms vanish.
    pub zero: bool,
}

fn ratio_root(num: f64, den: f64) -> f64 {
    match (num > 0.0, den > 0.0) {
        (true, true) => sqrt(num / den).clamp(EPS_MIN, EPS_MAX),
        (true, false) => EPS_MAX,
        (false, true) => EPS_MIN,
        (false, false) => 1.0,
    }
}

/// Young parameters minimizing the quadratic majorant for the unweighted sums `s`.
pub fn optimize_eps(s: [f64; 3], constants: &MajorantConstants) -> Result<EpsOptimum> {
    if s.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidArgument("term sums must be nonnegative".into()));
    }
    let [t1, t2, t3] = constants.scaled(s);
    if t1 == 0.0 && t2 == 0.0 && t3 == 0.0 {
        return Ok(EpsOptimum { eps: [1.0; 3], value: 0.0, zero: true });
    }
    let eps = [ratio_root(t2, t1), ratio_root(t3, t1), ratio_root(t3, t2)];
    Ok(EpsOptimum { eps, value: constants.quadratic_majorant(s, eps)?, zero: false })
}

pub fn efficiency_index(majorant: f64, energy_error: f64) -> Result<f64> {
    if !(energy_error > 0.0) {
        return Err(Error::ZeroError);
    }
    Ok(majorant / energy_error)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineBound {
    pub bound: f64,
    pub flux_term: f64,
    pub residual_term: f64,
    /// `div y + f` vanished and only the flux term remains.
    pub hypercircle: bool,
}

/// `‖A∇v − y‖_{A⁻¹} + C_F ‖div y + f‖` for a globally normal-continuous `y`.
pub fn global_majorant_baseline(
    mesh: &TriMesh,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    y: &BrokenFluxField,
    c_f: f64,
) -> Result<BaselineBound> {
    let tol = 1e-10 * (1.0 + y.max_abs());
    let mut worst: Option<(usize, f64)> = None;
    for (e, edge) in mesh.edges.iter().enumerate() {
        let (t0, Some(t1)) = edge.triangles else { continue };
        let (_, _, n) = mesh.edge_geometry(t0, mesh.local_edge(t0, e));
        for &p in &edge.vertices {
            let jump = (y.at_vertex(mesh, t0, p) - y.at_vertex(mesh, t1, p)).dot(n).abs();
            if jump > tol && worst.map_or(true, |(_, w)| jump > w) {
                worst = Some((e, jump));
            }
        }
    }
    if let Some((e, jump)) = worst {
        let [a, b] = mesh.edges[e].vertices;
        let m = (mesh.vertices[a] + mesh.vertices[b]) * 0.5;
        return Err(Error::NonConformingFlux { edge: e, jump, x: m.x, y: m.y });
    }
    let a_inv = problem.a_inv();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for t in 0..mesh.n_triangles() {
        let fv = problem.a.apply(v.gradient(mesh, t));
        let area = mesh.areas[t];
        for q in &MIDPOINT3 {
            let r = y.at_bary(t, &q.bary) - fv;
            s1 += q.weight * area * r.dot(a_inv.apply(r));
        }
        let d = y.divergence(mesh, t);
        s2 += integrate(&GAUSS7, &mesh.corners(t), area, |x| {
            let r = d + (problem.source)(x);
            r * r
        });
    }
    let flux_term = sqrt(s1);
    let residual_term = sqrt(s2);
    let hypercircle = s2 < 1e-12;
    let bound = if hypercircle { flux_term } else { flux_term + c_f * residual_term };
    Ok(BaselineBound { bound, flux_term, residual_term, hypercircle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Mat2, Vec2};
    use crate::mesh::{build_lshape_mesh, Layout};
    use crate::problem::manufactured_lshape_problem;
    use alloc::sync::Arc;

    fn preset() -> MajorantConstants {
        MajorantConstants {
            c_p: vec![sqrt(2.0) / PI; 3],
            c_p_max: sqrt(2.0) / PI,
            c_min: 1.0,
            e_max: 2,
            beta: vec![poincare_edge_constant(1.0); 2],
            c_f: sqrt(2.0) / PI,
        }
    }

    #[test]
    fn edge_constant_values() {
        assert!((poincare_edge_constant(1.0) - 0.565244).abs() < 1e-6);
        assert!((poincare_edge_constant(2.0) - 0.8331426).abs() < 1e-6);
        let mut last = 0.0;
        for h in [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0] {
            let c = poincare_edge_constant(h);
            assert!(c > last);
            last = c;
        }
        assert!(poincare_edge_constant(1e-3) < 0.02);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(0.7, 0.7), 0.7);
        assert!((beta(3.0, 4.0) - sqrt(12.5)).abs() < 1e-15);
        assert_eq!(beta(3.0, 4.0), beta(4.0, 3.0));
        let p = manufactured_lshape_problem();
        let (_, decomp) = build_lshape_mesh(0.5).unwrap();
        let c = MajorantConstants::from_decomposition(&decomp, &p, sqrt(2.0) / PI).unwrap();
        for b in &c.beta {
            assert!((b - 1.0 / sqrt(PI * tanh(PI))).abs() < 1e-15);
        }
        assert!((c.c_p_max - sqrt(2.0) / PI).abs() < 1e-15);
        assert_eq!(c.e_max, 2);
        assert_eq!(c.c_min, 1.0);
    }

    #[test]
    fn alpha_values() {
        let c = preset();
        let a = c.alphas([1.0; 3]).unwrap();
        assert!((a[0] - 3.0).abs() < 1e-15);
        assert!((a[1] - 6.0 / (PI * PI)).abs() < 1e-15);
        assert!((a[1] - 0.607927).abs() < 1e-6);
        assert!((a[2] - 6.0).abs() < 1e-15);
        assert_eq!(c.alphas([2.0; 3]).unwrap()[0], 5.0);
        assert!(c.alphas([0.0, 1.0, 1.0]).is_err());
        let big = c.alphas([1e12, 1.0, 1.0]).unwrap();
        assert!(big[0] > 1e11 && (big[1] - 2.0 * 2.0 / (PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn optimizer_examples() {
        let c = MajorantConstants { c_p_max: 1.0, e_max: 1, ..preset() };
        assert_eq!(optimize_eps([2.0, 2.0, 2.0], &c).unwrap().eps, [1.0; 3]);
        let o = optimize_eps([1.0, 4.0, 9.0], &c).unwrap();
        assert!((o.eps[0] - 2.0).abs() < 1e-15 && (o.eps[1] - 3.0).abs() < 1e-15 && (o.eps[2] - 1.5).abs() < 1e-15);
        assert!((o.value - 36.0).abs() < 1e-12);
        let o = optimize_eps([1.0, 0.0, 0.0], &c).unwrap();
        assert_eq!(o.eps, [EPS_MIN, EPS_MIN, 1.0]);
        assert!((o.value - (1.0 + 2.0 * EPS_MIN)).abs() < 1e-15);
        let z = optimize_eps([0.0; 3], &c).unwrap();
        assert!(z.zero && z.value == 0.0 && z.eps == [1.0; 3]);
        assert!(optimize_eps([-1.0, 0.0, 0.0], &c).is_err());
    }

    #[test]
    fn single_square_constant_source() {
        let (mesh, decomp) = Layout::unit_square().decompose(0.25).unwrap();
        let p = EllipticProblem::new(Mat2::IDENTITY, Arc::new(|_| 1.0), Arc::new(|_| 0.0)).unwrap();
        let c = MajorantConstants { beta: vec![], ..preset() };
        let r = evaluate_majorant(&mesh, &decomp, &p, &ScalarFieldP1::zeros(&mesh), &BrokenFluxField::zeros(&mesh), &c, [1.0; 3]).unwrap();
        assert_eq!(r.m1_sq, 0.0);
        assert_eq!(r.m3_sq, 0.0);
        assert!((r.m2_sq - 6.0 / (PI * PI)).abs() < 1e-14);
        assert!(!r.admissible);
    }

    #[test]
    fn exact_flux_gives_zero() {
        let (mesh, decomp) = build_lshape_mesh(0.25).unwrap();
        let u = |x: crate::geometry::Point| x.x - 2.0 * x.y;
        let p = EllipticProblem::new(Mat2::IDENTITY, Arc::new(|_| 0.0), Arc::new(u)).unwrap();
        let v = ScalarFieldP1::interpolate(&mesh, u);
        let y = BrokenFluxField::flux_of(&mesh, &p.a, &v);
        let r = evaluate_majorant(&mesh, &decomp, &p, &v, &y, &preset(), [1.0; 3]).unwrap();
        assert!(r.total_sq < 1e-28 && r.admissible);
        let b = global_majorant_baseline(&mesh, &p, &v, &y, preset().c_f).unwrap();
        assert!(b.bound < 1e-14 && b.hypercircle);
        assert!(efficiency_index(r.total, 0.0).is_err());
        assert_eq!(efficiency_index(3.0, 1.0).unwrap(), 3.0);
    }

    #[test]
    fn breakdown_sums_and_quadratic_scaling() {
        let p = manufactured_lshape_problem();
        let (mesh, decomp) = build_lshape_mesh(0.25).unwrap();
        let v = ScalarFieldP1::interpolate(&mesh, |x| (p.dirichlet)(x) * 0.9);
        let y = crate::flux::average_gradient(&mesh, &decomp, &p.a, &v);
        let c = preset();
        let r = evaluate_majorant(&mesh, &decomp, &p, &v, &y, &c, [0.5, 2.0, 1.5]).unwrap();
        assert_eq!(r.m1_sq, r.m1_parts.iter().sum::<f64>());
        assert_eq!(r.m3_sq, r.m3_parts.iter().sum::<f64>());
        assert_eq!(r.total_sq, r.m1_sq + r.m2_sq + r.m3_sq);
        // M1 is quadratic in y − A∇v, M3 in y
        let fv = BrokenFluxField::flux_of(&mesh, &p.a, &v);
        let y2 = fv.combine(&y.combine(&fv, -1.0), 2.0);
        let r2 = evaluate_majorant(&mesh, &decomp, &p, &v, &y2, &c, [0.5, 2.0, 1.5]).unwrap();
        assert!((r2.m1_sq - 4.0 * r.m1_sq).abs() < 1e-12 * r.m1_sq.max(1.0));
        let r3 = evaluate_majorant(&mesh, &decomp, &p, &v, &y.scale(2.0), &c, [0.5, 2.0, 1.5]).unwrap();
        assert!((r3.m3_sq - 4.0 * r.m3_sq).abs() < 1e-12 * r.m3_sq.max(1.0));
    }

    #[test]
    fn baseline_rejects_broken_flux() {
        let p = manufactured_lshape_problem();
        let (mesh, decomp) = build_lshape_mesh(0.5).unwrap();
        let v = ScalarFieldP1::interpolate(&mesh, |x| x.x * x.x);
        let y = crate::flux::average_gradient(&mesh, &decomp, &p.a, &v);
        assert!(matches!(global_majorant_baseline(&mesh, &p, &v, &y, 0.45), Err(Error::NonConformingFlux { .. })));
        let c = BrokenFluxField::constant(&mesh, Vec2::new(1.0, 0.0));
        let b = global_majorant_baseline(&mesh, &p, &v, &c, 0.45).unwrap();
        assert!(!b.hypercircle && (b.bound - (b.flux_term + 0.45 * b.residual_term)).abs() < 1e-15);
    }
}
