//! The elliptic model problem `-div(A∇u) = f` in `Ω`, `u = u_g` on `Γ`, its P1
//! discretization and exact-error evaluation.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{barycentric_gradients, cos, sin, Mat2, Point, Vec2, PI};
use crate::linalg::{spd_solve_with_guess, CsrMatrix, TripletBuilder, DEFAULT_TOL};
use crate::mesh::TriMesh;
use crate::quadrature::{map_point, GAUSS7, MIDPOINT3};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Vec2 + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad: VectorFn,
}

/// Constant SPD coefficient, source, Dirichlet datum, optionally the exact solution.
#[derive(Clone)]
pub struct EllipticProblem {
    pub a: Mat2,
    pub c_min: f64,
    pub c_max: f64,
    pub source: ScalarFn,
    pub dirichlet: ScalarFn,
    pub exact: Option<ExactSolution>,
}

impl core::fmt::Debug for EllipticProblem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EllipticProblem")
            .field("a", &self.a)
            .field("c_min", &self.c_min)
            .field("c_max", &self.c_max)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl EllipticProblem {
    pub fn new(a: Mat2, source: ScalarFn, dirichlet: ScalarFn) -> Result<Self> {
        if !a.is_symmetric() {
            return Err(Error::InvalidArgument("coefficient matrix must be symmetric".into()));
        }
        let (c_min, c_max) = a.sym_eigenvalues();
        if !(c_min > 0.0) {
            return Err(Error::InvalidArgument("coefficient matrix must be positive definite".into()));
        }
        Ok(EllipticProblem { a, c_min, c_max, source, dirichlet, exact: None })
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn a_inv(&self) -> Mat2 {
        self.a.inverse().expect("SPD coefficient is invertible")
    }
}

/// `u = (sin πx sin πy + ½(1 − cos πx)(1 − cos πy)) / π²` with `A = I`.
pub fn manufactured_lshape_problem() -> EllipticProblem {
    let u: ScalarFn = Arc::new(|p: Point| {
        let (x, y) = (PI * p.x, PI * p.y);
        (sin(x) * sin(y) + 0.5 * (1.0 - cos(x)) * (1.0 - cos(y))) / (PI * PI)
    });
    let grad: VectorFn = Arc::new(|p: Point| {
        let (x, y) = (PI * p.x, PI * p.y);
        Vec2::new(
            (cos(x) * sin(y) + 0.5 * sin(x) * (1.0 - cos(y))) / PI,
            (sin(x) * cos(y) + 0.5 * (1.0 - cos(x)) * sin(y)) / PI,
        )
    });
    let f: ScalarFn = Arc::new(|p: Point| {
        let (x, y) = (PI * p.x, PI * p.y);
        2.0 * sin(x) * sin(y) - 0.5 * (cos(x) * (1.0 - cos(y)) + (1.0 - cos(x)) * cos(y))
    });
    EllipticProblem::new(Mat2::IDENTITY, f, u.clone())
        .expect("identity is SPD")
        .with_exact(ExactSolution { u, grad })
}

/// Continuous piecewise-linear field given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFieldP1 {
    pub values: Vec<f64>,
}

impl ScalarFieldP1 {
    pub fn zeros(mesh: &TriMesh) -> Self {
        ScalarFieldP1 { values: vec![0.0; mesh.n_vertices()] }
    }

    pub fn constant(mesh: &TriMesh, c: f64) -> Self {
        ScalarFieldP1 { values: vec![c; mesh.n_vertices()] }
    }

    pub fn interpolate(mesh: &TriMesh, f: impl Fn(Point) -> f64) -> Self {
        ScalarFieldP1 { values: mesh.vertices.iter().map(|&p| f(p)).collect() }
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, mesh: &TriMesh, t: usize) -> Vec2 {
        let g = barycentric_gradients(&mesh.corners(t));
        let tri = mesh.triangles[t];
        g[0] * self.values[tri[0]] + g[1] * self.values[tri[1]] + g[2] * self.values[tri[2]]
    }
}

/// Stiffness matrix with entries `Σ_T ∫_T A∇φ_i·∇φ_j`.
pub fn assemble_stiffness(mesh: &TriMesh, a: &Mat2) -> Result<CsrMatrix> {
    let mut b = TripletBuilder::new(mesh.n_vertices());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.areas[t];
        if !(area > 0.0) {
            return Err(Error::DegenerateTriangle { triangle: t, area });
        }
        let g = barycentric_gradients(&mesh.corners(t));
        for i in 0..3 {
            let ag = a.apply(g[i]);
            for j in i..3 {
                b.add_sym(tri[i], tri[j], area * ag.dot(g[j]));
            }
        }
    }
    Ok(b.build())
}

/// Load vector `∫ f φ_i` with the edge-midpoint rule.
pub fn assemble_load(mesh: &TriMesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_vertices()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.corners(t);
        let area = mesh.areas[t];
        for q in &MIDPOINT3 {
            let fx = f(map_point(&p, &q.bary)) * q.weight * area;
            for i in 0..3 {
                load[tri[i]] += fx * q.bary[i];
            }
        }
    }
    load
}

/// Assembled matrix and right-hand side plus Dirichlet constraints.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// `(node, prescribed value)`
    pub constrained: Vec<(usize, f64)>,
}

impl LinearSystem {
    /// Global system of `problem` on `mesh`, Dirichlet data interpolated at the
    /// boundary nodes.
    pub fn assemble(mesh: &TriMesh, problem: &EllipticProblem) -> Result<Self> {
        let matrix = assemble_stiffness(mesh, &problem.a)?;
        let rhs = assemble_load(mesh, |p| (problem.source)(p));
        let constrained = mesh
            .boundary_vertices()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i, (problem.dirichlet)(mesh.vertices[i])))
            .collect();
        Ok(LinearSystem { matrix, rhs, constrained })
    }

    pub fn solve(&self) -> Result<ScalarFieldP1> {
        let (nodes, values): (Vec<usize>, Vec<f64>) = self.constrained.iter().copied().unzip();
        solve_dirichlet(self, &nodes, &values)
    }
}

/// Solves for the free nodes with the given boundary values eliminated
/// symmetrically.
pub fn solve_dirichlet(system: &LinearSystem, boundary_nodes: &[usize], boundary_values: &[f64]) -> Result<ScalarFieldP1> {
    let n = system.matrix.n;
    let mut values = vec![0.0; n];
    let mut fixed = vec![false; n];
    for (&i, &v) in boundary_nodes.iter().zip(boundary_values) {
        fixed[i] = true;
        values[i] = v;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    if free.is_empty() {
        return Ok(ScalarFieldP1 { values });
    }
    let (sub, coupling) = system.matrix.split(&free);
    let rhs: Vec<f64> = free
        .iter()
        .zip(&coupling)
        .map(|(&i, c)| system.rhs[i] - c.iter().map(|&(j, a)| a * values[j]).sum::<f64>())
        .collect();
    let out = spd_solve_with_guess(&sub, &rhs, vec![0.0; free.len()], DEFAULT_TOL, 10 * free.len().max(10))?;
    for (&i, x) in free.iter().zip(out.x) {
        values[i] = x;
    }
    Ok(ScalarFieldP1 { values })
}

/// `‖∇(u − v)‖_{A,Ω}` with the seven-point rule.
pub fn energy_error(mesh: &TriMesh, v: &ScalarFieldP1, problem: &EllipticProblem) -> Result<f64> {
    let exact = problem.exact.as_ref().ok_or(Error::MissingExactSolution)?;
    let mut sum = 0.0;
    for t in 0..mesh.n_triangles() {
        let gv = v.gradient(mesh, t);
        let p = mesh.corners(t);
        let area = mesh.areas[t];
        for q in &GAUSS7 {
            let d = (exact.grad)(map_point(&p, &q.bary)) - gv;
            sum += q.weight * area * problem.a.apply(d).dot(d);
        }
    }
    Ok(crate::geometry::sqrt(sum))
}

/// `‖∇(w − v)‖_{A,Ω}` between two discrete fields, exact for P1.
pub fn discrete_energy_distance(mesh: &TriMesh, a: &Mat2, w: &ScalarFieldP1, v: &ScalarFieldP1) -> f64 {
    let mut sum = 0.0;
    for t in 0..mesh.n_triangles() {
        let d = w.gradient(mesh, t) - v.gradient(mesh, t);
        sum += mesh.areas[t] * a.apply(d).dot(d);
    }
    crate::geometry::sqrt(sum)
}
