use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::space::CorrectorSpace;
use crate::geometry::{barycentric, barycentric_gradients, Mat2, Point, Vec2};
use crate::mesh::{DomainDecomposition, InterfaceEdge, TriMesh};
use crate::problem::ScalarFieldP1;
use crate::quadrature::{integrate, GAUSS7};

/// Vector field that is linear on every fine triangle, stored by its three
/// nodal values per triangle in the vertex order of `mesh.triangles[t]`.
///
/// Lowest-order Raviart–Thomas and continuous P1 fields are both linear on a
/// triangle, so sums of the two are represented exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenFluxField {
    pub values: Vec<[Vec2; 3]>,
}

impl BrokenFluxField {
    pub fn zeros(mesh: &TriMesh) -> Self {
        BrokenFluxField { values: vec![[Vec2::ZERO; 3]; mesh.n_triangles()] }
    }

    pub fn constant(mesh: &TriMesh, c: Vec2) -> Self {
        BrokenFluxField { values: vec![[c; 3]; mesh.n_triangles()] }
    }

    /// `A∇v` per triangle.
    pub fn flux_of(mesh: &TriMesh, a: &Mat2, v: &ScalarFieldP1) -> Self {
        BrokenFluxField {
            values: (0..mesh.n_triangles()).map(|t| [a.apply(v.gradient(mesh, t)); 3]).collect(),
        }
    }

    pub fn at_bary(&self, t: usize, l: &[f64; 3]) -> Vec2 {
        let y = &self.values[t];
        y[0] * l[0] + y[1] * l[1] + y[2] * l[2]
    }

    pub fn value(&self, mesh: &TriMesh, t: usize, x: Point) -> Vec2 {
        self.at_bary(t, &barycentric(&mesh.corners(t), x))
    }

    /// Value of the restriction to triangle `t` at its vertex `vertex`.
    pub fn at_vertex(&self, mesh: &TriMesh, t: usize, vertex: usize) -> Vec2 {
        let i = mesh.triangles[t].iter().position(|&w| w == vertex).expect("vertex of triangle");
        self.values[t][i]
    }

    pub fn divergence(&self, mesh: &TriMesh, t: usize) -> f64 {
        let g = barycentric_gradients(&mesh.corners(t));
        let y = &self.values[t];
        g[0].dot(y[0]) + g[1].dot(y[1]) + g[2].dot(y[2])
    }

    pub fn cell_average(&self, t: usize) -> Vec2 {
        let y = &self.values[t];
        (y[0] + y[1] + y[2]) * (1.0 / 3.0)
    }

    /// `(y_k − y_j)·n_kj` at the two endpoints of an interface edge.
    pub fn jump_at_ends(&self, mesh: &TriMesh, e: &InterfaceEdge) -> [f64; 2] {
        let [va, vb] = mesh.edges[e.edge].vertices;
        let (pa, pb) = if mesh.vertices[va] == e.a { (va, vb) } else { (vb, va) };
        let ja = (self.at_vertex(mesh, e.tri_k, pa) - self.at_vertex(mesh, e.tri_j, pa)).dot(e.normal);
        let jb = (self.at_vertex(mesh, e.tri_k, pb) - self.at_vertex(mesh, e.tri_j, pb)).dot(e.normal);
        [ja, jb]
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn combine(&self, other: &Self, s: f64) -> Self {
        BrokenFluxField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s])
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        BrokenFluxField { values: self.values.iter().map(|a| [a[0] * s, a[1] * s, a[2] * s]).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.x.abs().max(v.y.abs())).fold(0.0, f64::max)
    }
}

/// `ỹ`: per basic subdomain, nodal averages of `A∇v` over the fine triangles of
/// that subdomain touching the node.
pub fn average_gradient(mesh: &TriMesh, decomp: &DomainDecomposition, a: &Mat2, v: &ScalarFieldP1) -> BrokenFluxField {
    let identity: Vec<usize> = (0..mesh.n_triangles()).collect();
    average_over_host(mesh, a, v, mesh, &decomp.tri_subdomain, &identity)
}

/// Like [`average_gradient`], with the averaging patches formed by the
/// triangles of the corrector space instead of the fine triangles.
pub fn average_gradient_on(mesh: &TriMesh, a: &Mat2, v: &ScalarFieldP1, space: &CorrectorSpace) -> BrokenFluxField {
    average_over_host(mesh, a, v, &space.host, &space.host_subdomain, &space.fine_to_host)
}

fn average_over_host(
    mesh: &TriMesh,
    a: &Mat2,
    v: &ScalarFieldP1,
    host: &TriMesh,
    host_subdomain: &[usize],
    fine_to_host: &[usize],
) -> BrokenFluxField {
    let mut host_sum = vec![(Vec2::ZERO, 0.0); host.n_triangles()];
    for t in 0..mesh.n_triangles() {
        let s = fine_to_host[t];
        let w = mesh.areas[t];
        host_sum[s].0 = host_sum[s].0 + a.apply(v.gradient(mesh, t)) * w;
        host_sum[s].1 += w;
    }
    let mut nodal: BTreeMap<(usize, usize), (Vec2, f64)> = BTreeMap::new();
    for (s, tri) in host.triangles.iter().enumerate() {
        for &p in tri {
            let acc = nodal.entry((p, host_subdomain[s])).or_insert((Vec2::ZERO, 0.0));
            acc.0 = acc.0 + host_sum[s].0;
            acc.1 += host_sum[s].1;
        }
    }
    let host_values: Vec<[Vec2; 3]> = host
        .triangles
        .iter()
        .enumerate()
        .map(|(s, tri)| {
            tri.map(|p| {
                let (sum, w) = nodal[&(p, host_subdomain[s])];
                sum * (1.0 / w)
            })
        })
        .collect();
    let values = (0..mesh.n_triangles())
        .map(|t| {
            let s = fine_to_host[t];
            let hc = host.corners(s);
            let hv = &host_values[s];
            mesh.triangles[t].map(|p| {
                let l = barycentric(&hc, mesh.vertices[p]);
                hv[0] * l[0] + hv[1] * l[1] + hv[2] * l[2]
            })
        })
        .collect();
    BrokenFluxField { values }
}

/// Mean equilibration residual per basic subdomain and mean normal jump per interface.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintResiduals {
    pub subdomain: Vec<f64>,
    pub interface: Vec<f64>,
}

impl ConstraintResiduals {
    pub fn max_abs(&self) -> f64 {
        self.subdomain.iter().chain(&self.interface).fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `{div y + f}_{ω_k}` and `{(y_k − y_j)·n_kj}_{γ_kj}`.
pub fn constraint_residuals(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    y: &BrokenFluxField,
    f: &dyn Fn(Point) -> f64,
) -> ConstraintResiduals {
    let subdomain = decomp
        .basic_triangles
        .iter()
        .zip(&decomp.basic_area)
        .map(|(tris, &area)| {
            let total: f64 = tris
                .iter()
                .map(|&t| y.divergence(mesh, t) * mesh.areas[t] + integrate(&GAUSS7, &mesh.corners(t), mesh.areas[t], f))
                .sum();
            total / area
        })
        .collect();
    let interface = decomp
        .interfaces
        .iter()
        .map(|g| {
            let total: f64 = g
                .edges
                .iter()
                .map(|e| {
                    let [ja, jb] = y.jump_at_ends(mesh, e);
                    0.5 * e.length * (ja + jb)
                })
                .sum();
            total / g.length
        })
        .collect();
    ConstraintResiduals { subdomain, interface }
}
