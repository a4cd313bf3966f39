use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::field::BrokenFluxField;
use super::space::CorrectorSpace;
use crate::error::{Error, Result};
use crate::linalg::{saddle_solve, SaddleSystem, SparseRow, TripletBuilder};
use crate::mesh::{DomainDecomposition, TriMesh};
use crate::problem::{EllipticProblem, ScalarFieldP1};
use crate::quadrature::{integrate, map_point, GAUSS2_SEGMENT, GAUSS7, MIDPOINT3};

/// Weights of the three majorant terms and `β` per interface.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorWeights {
    pub alpha: [f64; 3],
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSet {
    /// Mean equilibration on every basic subdomain and mean zero jump on every interface.
    Global,
    /// Mean equilibration on one basic subdomain.
    Subdomain(usize),
}

#[derive(Debug, Clone)]
pub struct CorrectorSolution {
    pub coefficients: Vec<f64>,
    pub multipliers: Vec<f64>,
    /// The corrector `q` on the fine mesh.
    pub field: BrokenFluxField,
    pub kkt_residual: f64,
    pub constraint_residual: f64,
}

/// Quadratic form `cᵀKc + 2bᵀc` of the weighted majorant of `base + q` up to a
/// constant, and the constraint rows keeping `base + q` admissible.
pub fn assemble_corrector_system(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    base: &BrokenFluxField,
    space: &CorrectorSpace,
    weights: &CorrectorWeights,
    constraints: ConstraintSet,
) -> Result<(SaddleSystem, Vec<f64>)> {
    let [a1, a2, a3] = weights.alpha;
    if !(a1 > 0.0 && a2 > 0.0 && a3 > 0.0) {
        return Err(Error::InvalidArgument("term weights must be positive".into()));
    }
    if weights.beta.len() != decomp.interfaces.len() {
        return Err(Error::InvalidArgument("one beta per interface is required".into()));
    }
    let a_inv = problem.a_inv();
    let n = space.n_dofs();
    let mut kb = TripletBuilder::new(n);
    let mut b = vec![0.0; n];
    let mut div_rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); decomp.n_basic()];
    let mut div_rhs = vec![0.0; decomp.n_basic()];

    for t in 0..mesh.n_triangles() {
        let s = space.fine_to_host[t];
        let p = mesh.corners(t);
        let area = mesh.areas[t];
        let flux_v = problem.a.apply(v.gradient(mesh, t));
        for q in &MIDPOINT3 {
            let x = map_point(&p, &q.bary);
            let r0 = base.at_bary(t, &q.bary) - flux_v;
            let phi = space.basis_at(s, x);
            let w = a1 * q.weight * area;
            for (i, &(di, pi)) in phi.iter().enumerate() {
                let Some(di) = di else { continue };
                let api = a_inv.apply(pi);
                b[di] += w * api.dot(r0);
                for &(dj, pj) in &phi[i..] {
                    if let Some(dj) = dj {
                        kb.add_sym(di, dj, w * api.dot(pj));
                    }
                }
            }
        }
        let div = space.basis_divergence(s);
        let residual = base.divergence(mesh, t) * area + integrate(&GAUSS7, &p, area, &*problem.source);
        let k = decomp.tri_subdomain[t];
        div_rhs[k] += residual;
        for (i, &(di, ci)) in div.iter().enumerate() {
            let Some(di) = di else { continue };
            b[di] += a2 * ci * residual;
            *div_rows[k].entry(di).or_insert(0.0) += ci * area;
            for &(dj, cj) in &div[i..] {
                if let Some(dj) = dj {
                    kb.add_sym(di, dj, a2 * area * ci * cj);
                }
            }
        }
    }

    let mut jump_rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); decomp.interfaces.len()];
    let mut jump_rhs = vec![0.0; decomp.interfaces.len()];
    for (g, iface) in decomp.interfaces.iter().enumerate() {
        let w3 = a3 * weights.beta[g] * weights.beta[g];
        for e in &iface.edges {
            let ends = base.jump_at_ends(mesh, e);
            let (sk, sj) = (space.fine_to_host[e.tri_k], space.fine_to_host[e.tri_j]);
            for &(tq, wq) in &GAUSS2_SEGMENT {
                let x = e.a + (e.b - e.a) * tq;
                let j0 = ends[0] * (1.0 - tq) + ends[1] * tq;
                let wq = wq * e.length;
                jump_rhs[g] += wq * j0;
                let mut g_loc: [(Option<usize>, f64); 6] = [(None, 0.0); 6];
                for (slot, &(d, phi)) in space.basis_at(sk, x).iter().enumerate() {
                    g_loc[slot] = (d, phi.dot(e.normal));
                }
                for (slot, &(d, phi)) in space.basis_at(sj, x).iter().enumerate() {
                    g_loc[3 + slot] = (d, -phi.dot(e.normal));
                }
                for (i, &(di, gi)) in g_loc.iter().enumerate() {
                    let Some(di) = di else { continue };
                    b[di] += w3 * wq * gi * j0;
                    *jump_rows[g].entry(di).or_insert(0.0) += wq * gi;
                    for &(dj, gj) in &g_loc[i..] {
                        if let Some(dj) = dj {
                            kb.add_sym(di, dj, w3 * wq * gi * gj);
                        }
                    }
                }
            }
        }
    }

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |row: &BTreeMap<usize, f64>, scale: f64, value: f64| {
        let max = row.values().fold(0.0f64, |m, v| m.max(v.abs()));
        let r: SparseRow = row
            .iter()
            .filter(|(_, v)| v.abs() > 1e-12 * max)
            .map(|(&j, &v)| (j, v / scale))
            .collect();
        if !r.is_empty() {
            rows.push(r);
            rhs.push(-value / scale);
        }
    };
    match constraints {
        ConstraintSet::Global => {
            for k in 0..decomp.n_basic() {
                push(&div_rows[k], decomp.basic_area[k], div_rhs[k]);
            }
            for (g, iface) in decomp.interfaces.iter().enumerate() {
                push(&jump_rows[g], iface.length, jump_rhs[g]);
            }
        }
        ConstraintSet::Subdomain(k) => push(&div_rows[k], decomp.basic_area[k], div_rhs[k]),
    }
    let k = kb.build();
    let system = SaddleSystem { k, rhs: b.iter().map(|x| -x).collect(), constraints: rows, constraint_rhs: rhs };
    Ok((system, b))
}

fn solve_system(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    base: &BrokenFluxField,
    space: &CorrectorSpace,
    weights: &CorrectorWeights,
    constraints: ConstraintSet,
) -> Result<CorrectorSolution> {
    if space.n_dofs() == 0 {
        return Ok(CorrectorSolution {
            coefficients: Vec::new(),
            multipliers: Vec::new(),
            field: BrokenFluxField::zeros(mesh),
            kkt_residual: 0.0,
            constraint_residual: 0.0,
        });
    }
    let (system, _) = assemble_corrector_system(mesh, decomp, problem, v, base, space, weights, constraints)?;
    let sol = saddle_solve(&system)?;
    let field = space.field(mesh, &sol.x);
    Ok(CorrectorSolution {
        coefficients: sol.x,
        multipliers: sol.multipliers,
        field,
        kkt_residual: sol.kkt_residual,
        constraint_residual: sol.constraint_residual,
    })
}

/// Corrector `q` minimizing the weighted majorant of `ỹ + q` subject to mean
/// equilibration on every basic subdomain and mean zero normal jump on every
/// interface.
pub fn solve_corrector(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    y_tilde: &BrokenFluxField,
    space: &CorrectorSpace,
    weights: &CorrectorWeights,
) -> Result<CorrectorSolution> {
    solve_system(mesh, decomp, problem, v, y_tilde, space, weights, ConstraintSet::Global)
}

pub fn corrected_flux(y_tilde: &BrokenFluxField, q: &BrokenFluxField) -> BrokenFluxField {
    y_tilde.add(q)
}

/// One pass over the basic subdomains, each re-minimizing its own terms over
/// fine Raviart–Thomas fields with interface fluxes frozen. Returns `y`
/// unchanged when `space` is already the fine space.
pub fn improve_corrector_locally(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    v: &ScalarFieldP1,
    y: &BrokenFluxField,
    space: &CorrectorSpace,
    weights: &CorrectorWeights,
) -> Result<BrokenFluxField> {
    if space.is_fine() {
        return Ok(y.clone());
    }
    let mut y = y.clone();
    for k in 0..decomp.n_basic() {
        let local = CorrectorSpace::local(mesh, decomp, k);
        let sol = solve_system(mesh, decomp, problem, v, &y, &local, weights, ConstraintSet::Subdomain(k))?;
        y = y.add(&sol.field);
    }
    Ok(y)
}
