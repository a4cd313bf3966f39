use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::field::BrokenFluxField;
use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};
use crate::mesh::{compatibility_check, CoarseMesh, DomainDecomposition, TriMesh, TriangleLocator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    /// Edge inside one basic subdomain.
    Interior,
    /// Diagonal splitting a polygonal coarse cell.
    Diagonal,
    Dirichlet,
    /// One of the two one-sided fluxes of an interface edge.
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofInfo {
    /// Edge of the host triangulation.
    pub edge: usize,
    /// Basic subdomain on whose side the flux lives.
    pub side: usize,
    pub kind: DofKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEntry {
    pub edge: usize,
    pub side: usize,
    pub coefficient: f64,
}

/// Lowest-order Raviart–Thomas fields on a host triangulation covering the
/// fine mesh, normal-continuous inside each basic subdomain and broken across
/// interfaces. A coefficient is the normal flux across its edge: outward for
/// boundary edges, along `n_kj` for interface edges, and outward from the
/// lower-numbered neighbour otherwise.
#[derive(Debug, Clone)]
pub struct CorrectorSpace {
    pub host: TriMesh,
    pub host_subdomain: Vec<usize>,
    /// Host triangle containing each fine triangle.
    pub fine_to_host: Vec<usize>,
    pub dofs: Vec<DofInfo>,
    tri_dofs: Vec<[Option<usize>; 3]>,
    tri_signs: Vec<[f64; 3]>,
    is_fine: bool,
}

impl CorrectorSpace {
    /// Raviart–Thomas space on the fine triangulation itself.
    pub fn fine(mesh: &TriMesh, decomp: &DomainDecomposition) -> Self {
        let identity = (0..mesh.n_triangles()).collect();
        let no_diag = vec![false; mesh.n_edges()];
        let mut s = Self::from_host(mesh.clone(), decomp.tri_subdomain.clone(), identity, &no_diag, |_| true);
        s.is_fine = true;
        s
    }

    /// Fine-mesh fields supported in basic subdomain `k` with zero normal flux
    /// on its interfaces.
    pub fn local(mesh: &TriMesh, decomp: &DomainDecomposition, k: usize) -> Self {
        let identity = (0..mesh.n_triangles()).collect();
        let no_diag = vec![false; mesh.n_edges()];
        let sub = &decomp.tri_subdomain;
        let keep = |e: usize| match mesh.edges[e].triangles {
            (t, None) => sub[t] == k,
            (t, Some(s)) => sub[t] == k && sub[s] == k,
        };
        Self::from_host(mesh.clone(), decomp.tri_subdomain.clone(), identity, &no_diag, keep)
    }

    /// Raviart–Thomas space on the coarse cells, polygons fanned into
    /// triangles from their first vertex.
    pub fn build(mesh: &TriMesh, decomp: &DomainDecomposition, coarse: &CoarseMesh) -> Result<Self> {
        let compat = compatibility_check(coarse);
        if !compat.satisfied {
            return Err(Error::Incompatible { deficit: -compat.slack });
        }
        let mut triangles = Vec::new();
        let mut host_subdomain = Vec::new();
        for cell in &coarse.cells {
            if cell.subdomain >= decomp.n_basic() {
                return Err(Error::InvalidArgument(format!("coarse cell in unknown subdomain {}", cell.subdomain)));
            }
            let v = &cell.vertices;
            for i in 1..v.len() - 1 {
                triangles.push([v[0], v[i], v[i + 1]]);
                host_subdomain.push(cell.subdomain);
            }
        }
        let host = TriMesh::from_triangles(coarse.vertices.clone(), triangles, coarse.spacing)?;
        let cell_edges: BTreeSet<[usize; 2]> = coarse.edges.iter().map(|e| e.vertices).collect();
        let diagonal: Vec<bool> = host
            .edges
            .iter()
            .map(|e| {
                let [a, b] = e.vertices;
                !cell_edges.contains(&[a.min(b), a.max(b)])
            })
            .collect();

        let corners: Vec<[Point; 3]> = (0..host.n_triangles()).map(|s| host.corners(s)).collect();
        let locator = TriangleLocator::new(&corners, coarse.spacing);
        let mut fine_to_host = Vec::with_capacity(mesh.n_triangles());
        for t in 0..mesh.n_triangles() {
            let s = locator
                .locate(&corners, mesh.centroid(t))
                .ok_or_else(|| Error::InvalidArgument(format!("fine triangle {t} is not covered by the coarse mesh")))?;
            if host_subdomain[s] != decomp.tri_subdomain[t] {
                return Err(Error::InvalidArgument(format!("coarse cell of fine triangle {t} lies in another subdomain")));
            }
            fine_to_host.push(s);
        }
        Ok(Self::from_host(host, host_subdomain, fine_to_host, &diagonal, |_| true))
    }

    fn from_host(
        host: TriMesh,
        host_subdomain: Vec<usize>,
        fine_to_host: Vec<usize>,
        diagonal: &[bool],
        keep: impl Fn(usize) -> bool,
    ) -> Self {
        let mut dofs = Vec::new();
        let mut tri_dofs = vec![[None; 3]; host.n_triangles()];
        let mut tri_signs = vec![[0.0; 3]; host.n_triangles()];
        let mut attach = |s: usize, e: usize, dof: usize, sign: f64| {
            let i = host.local_edge(s, e);
            tri_dofs[s][i] = Some(dof);
            tri_signs[s][i] = sign;
        };
        for (e, edge) in host.edges.iter().enumerate() {
            if !keep(e) {
                continue;
            }
            match edge.triangles {
                (s, None) => {
                    attach(s, e, dofs.len(), 1.0);
                    dofs.push(DofInfo { edge: e, side: host_subdomain[s], kind: DofKind::Dirichlet });
                }
                (s0, Some(s1)) if host_subdomain[s0] == host_subdomain[s1] => {
                    let (lo, hi) = (s0.min(s1), s0.max(s1));
                    attach(lo, e, dofs.len(), 1.0);
                    attach(hi, e, dofs.len(), -1.0);
                    let kind = if diagonal[e] { DofKind::Diagonal } else { DofKind::Interior };
                    dofs.push(DofInfo { edge: e, side: host_subdomain[s0], kind });
                }
                (s0, Some(s1)) => {
                    let (sk, sj) = if host_subdomain[s0] < host_subdomain[s1] { (s0, s1) } else { (s1, s0) };
                    attach(sk, e, dofs.len(), 1.0);
                    dofs.push(DofInfo { edge: e, side: host_subdomain[sk], kind: DofKind::Interface });
                    attach(sj, e, dofs.len(), -1.0);
                    dofs.push(DofInfo { edge: e, side: host_subdomain[sj], kind: DofKind::Interface });
                }
            }
        }
        CorrectorSpace { host, host_subdomain, fine_to_host, dofs, tri_dofs, tri_signs, is_fine: false }
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// Degrees of freedom on coarse cell edges.
    pub fn edge_dofs(&self) -> usize {
        self.dofs.iter().filter(|d| d.kind != DofKind::Diagonal).count()
    }

    pub fn diagonal_dofs(&self) -> usize {
        self.dofs.iter().filter(|d| d.kind == DofKind::Diagonal).count()
    }

    /// The host triangulation is the fine mesh.
    pub fn is_fine(&self) -> bool {
        self.is_fine
    }

    /// Degrees of freedom of host triangle `s` with their basis functions at `x`.
    pub fn basis_at(&self, s: usize, x: Point) -> [(Option<usize>, Vec2); 3] {
        let tri = self.host.triangles[s];
        let area = self.host.areas[s];
        core::array::from_fn(|i| {
            let e = self.host.edges[self.host.triangle_edges[s][i]].vertices;
            let len = self.host.vertices[e[0]].dist(self.host.vertices[e[1]]);
            let c = self.tri_signs[s][i] * len / (2.0 * area);
            (self.tri_dofs[s][i], (x - self.host.vertices[tri[i]]) * c)
        })
    }

    /// Constant divergence of each basis function of host triangle `s`.
    pub fn basis_divergence(&self, s: usize) -> [(Option<usize>, f64); 3] {
        let area = self.host.areas[s];
        core::array::from_fn(|i| {
            let e = self.host.edges[self.host.triangle_edges[s][i]].vertices;
            let len = self.host.vertices[e[0]].dist(self.host.vertices[e[1]]);
            (self.tri_dofs[s][i], self.tri_signs[s][i] * len / area)
        })
    }

    /// The field with the given coefficients, sampled on the fine mesh.
    pub fn field(&self, mesh: &TriMesh, coefficients: &[f64]) -> BrokenFluxField {
        let values = (0..mesh.n_triangles())
            .map(|t| {
                let s = self.fine_to_host[t];
                mesh.triangles[t].map(|p| {
                    self.basis_at(s, mesh.vertices[p])
                        .iter()
                        .filter_map(|&(d, phi)| d.map(|d| phi * coefficients[d]))
                        .fold(Vec2::ZERO, |acc, w| acc + w)
                })
            })
            .collect();
        BrokenFluxField { values }
    }

    /// `(edge, side, coefficient)` rows in degree-of-freedom order.
    pub fn coefficient_table(&self, coefficients: &[f64]) -> Vec<CoefficientEntry> {
        self.dofs
            .iter()
            .zip(coefficients)
            .map(|(d, &c)| CoefficientEntry { edge: d.edge, side: d.side, coefficient: c })
            .collect()
    }
}
