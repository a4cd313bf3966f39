//! Structured triangulations of rectilinear domains and their decomposition
//! into basic subdomains, overlapping subdomains, interfaces and coarse meshes.
//!
//! Every mesh here is built on a uniform grid whose cells are split along the
//! lower-left to upper-right diagonal. A [`Layout`] lists axis-aligned blocks;
//! each block is one basic subdomain, and overlapping subdomains are unions of
//! blocks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{floor, round, signed_area, sqrt, Point, Vec2};

/// Returns `1/h` when it is a positive integer (up to rounding noise).
pub fn divisions(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 1.0 && h.is_finite()) {
        return Err(Error::InvalidSpacing { h });
    }
    let n = round(1.0 / h);
    if (n * h - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpacing { h });
    }
    Ok(n as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Sorted vertex indices.
    pub vertices: [usize; 2],
    /// Adjacent triangles; the second is `None` on the boundary.
    pub triangles: (usize, Option<usize>),
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.1.is_none()
    }

    pub fn other_triangle(&self, t: usize) -> Option<usize> {
        match self.triangles {
            (a, Some(b)) if a == t => Some(b),
            (a, Some(_)) => Some(a),
            _ => None,
        }
    }
}

/// Conforming triangulation with edge adjacency.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[t][i]` is the edge opposite local vertex `i`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub boundary_edge: Vec<bool>,
    pub areas: Vec<f64>,
    /// Nominal grid spacing.
    pub h: f64,
}

impl TriMesh {
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, h: f64) -> Result<Self> {
        let mut areas = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let a = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(a > 0.0) {
                return Err(Error::DegenerateTriangle { triangle: t, area: a });
            }
            areas.push(a);
        }

        let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = if a < b { (a, b) } else { (b, a) };
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: [key.0, key.1], triangles: (t, None) });
                    edges.len() - 1
                });
                if edges[e].triangles.0 != t {
                    if edges[e].triangles.1.is_some() {
                        return Err(Error::InvalidArgument(format!(
                            "edge ({}, {}) shared by more than two triangles",
                            key.0, key.1
                        )));
                    }
                    edges[e].triangles.1 = Some(t);
                }
                triangle_edges[t][i] = e;
            }
        }
        let boundary_edge = edges.iter().map(Edge::is_boundary).collect();
        Ok(TriMesh { vertices, triangles, edges, triangle_edges, boundary_edge, areas, h })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn centroid(&self, t: usize) -> Point {
        let p = self.corners(t);
        Point::new((p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0)
    }

    /// Local index (0..3) of the edge `e` within triangle `t`.
    pub fn local_edge(&self, t: usize, e: usize) -> usize {
        self.triangle_edges[t].iter().position(|&x| x == e).expect("edge not on triangle")
    }

    /// Endpoints of local edge `i` of triangle `t`, in counter-clockwise order
    /// for that triangle, and its outward unit normal.
    pub fn edge_geometry(&self, t: usize, i: usize) -> (Point, Point, Vec2) {
        let tri = self.triangles[t];
        let a = self.vertices[tri[(i + 1) % 3]];
        let b = self.vertices[tri[(i + 2) % 3]];
        let d = b - a;
        (a, b, d.perp_cw().scale(1.0 / d.norm()))
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            on[e.vertices[0]] = true;
            on[e.vertices[1]] = true;
        }
        on
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        sqrt(self.width() * self.width() + self.height() * self.height())
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.x0 && p.x < self.x1 && p.y > self.y0 && p.y < self.y1
    }
}

/// Axis-aligned blocks (the basic subdomains) and the overlapping subdomains
/// built from them.
#[derive(Debug, Clone)]
pub struct Layout {
    pub blocks: Vec<Rect>,
    /// Index sets of blocks forming each overlapping subdomain.
    pub overlaps: Vec<Vec<usize>>,
}

impl Layout {
    /// The L-shaped domain `((0,1)x(0,2)) ∪ ((0,2)x(0,1))` with `ω1 = (0,1)x(1,2)`,
    /// `ω2 = (0,1)x(0,1)`, `ω3 = (1,2)x(0,1)` and `Ω1 = ω1 ∪ ω2`, `Ω2 = ω2 ∪ ω3`.
    pub fn lshape() -> Self {
        Layout {
            blocks: vec![
                Rect::new(0.0, 1.0, 1.0, 2.0),
                Rect::new(0.0, 0.0, 1.0, 1.0),
                Rect::new(1.0, 0.0, 2.0, 1.0),
            ],
            overlaps: vec![vec![0, 1], vec![1, 2]],
        }
    }

    /// `m x n` unit squares, one basic subdomain each. Overlapping subdomains are
    /// strips of two neighbouring columns (the whole domain when `m == 1`).
    pub fn rect_grid(m: usize, n: usize) -> Self {
        let mut blocks = Vec::with_capacity(m * n);
        for j in 0..n {
            for i in 0..m {
                blocks.push(Rect::new(i as f64, j as f64, (i + 1) as f64, (j + 1) as f64));
            }
        }
        let overlaps = if m == 1 {
            vec![(0..n).collect()]
        } else {
            (0..m - 1)
                .map(|c| (0..n).flat_map(|r| [r * m + c, r * m + c + 1]).collect())
                .collect()
        };
        Layout { blocks, overlaps }
    }

    /// A single block covering `(0,1)^2`, used where one overlapping subdomain
    /// equals the whole domain.
    pub fn unit_square() -> Self {
        Layout { blocks: vec![Rect::new(0.0, 0.0, 1.0, 1.0)], overlaps: vec![vec![0]] }
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = self.blocks[0];
        for b in &self.blocks[1..] {
            r.x0 = r.x0.min(b.x0);
            r.y0 = r.y0.min(b.y0);
            r.x1 = r.x1.max(b.x1);
            r.y1 = r.y1.max(b.y1);
        }
        r
    }

    fn block_of(&self, p: Point) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains_strictly(p))
    }

    /// Grid cells of size `spacing` with their owning block, in row-major order.
    fn cells(&self, spacing: f64) -> Vec<(i64, i64, usize)> {
        let bb = self.bounding_box();
        let nx = round(bb.width() / spacing) as i64;
        let ny = round(bb.height() / spacing) as i64;
        let mut out = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let c = Point::new(bb.x0 + (i as f64 + 0.5) * spacing, bb.y0 + (j as f64 + 0.5) * spacing);
                if let Some(b) = self.block_of(c) {
                    out.push((i, j, b));
                }
            }
        }
        out
    }

    /// Structured criss-cross triangulation with spacing `h`; returns the mesh and
    /// the owning block of every triangle.
    pub fn triangulate(&self, h: f64) -> Result<(TriMesh, Vec<usize>)> {
        divisions(h)?;
        for b in &self.blocks {
            for len in [b.width(), b.height()] {
                let k = len / h;
                if (k - round(k)).abs() > 1e-9 || round(k) < 1.0 {
                    return Err(Error::InvalidSpacing { h });
                }
            }
        }
        let bb = self.bounding_box();
        let cells = self.cells(h);
        let mut nodes: BTreeSet<(i64, i64)> = BTreeSet::new();
        for &(i, j, _) in &cells {
            for (di, dj) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
                nodes.insert((j + dj, i + di));
            }
        }
        let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut vertices = Vec::with_capacity(nodes.len());
        for &(j, i) in &nodes {
            index.insert((i, j), vertices.len());
            vertices.push(Point::new(bb.x0 + i as f64 * h, bb.y0 + j as f64 * h));
        }
        let mut triangles = Vec::with_capacity(2 * cells.len());
        let mut owner = Vec::with_capacity(2 * cells.len());
        for &(i, j, b) in &cells {
            let v00 = index[&(i, j)];
            let v10 = index[&(i + 1, j)];
            let v11 = index[&(i + 1, j + 1)];
            let v01 = index[&(i, j + 1)];
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
            owner.push(b);
            owner.push(b);
        }
        Ok((TriMesh::from_triangles(vertices, triangles, h)?, owner))
    }

    /// Coarse mesh of cells with spacing `spacing`, each inside one block.
    pub fn coarse_mesh(&self, spacing: f64, cell_type: CellType) -> Result<CoarseMesh> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidArgument(format!("coarse spacing {spacing} must be positive")));
        }
        let bb = self.bounding_box();
        let cells = self.cells(spacing);
        let mut nodes: BTreeSet<(i64, i64)> = BTreeSet::new();
        for &(i, j, _) in &cells {
            for (di, dj) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
                nodes.insert((j + dj, i + di));
            }
        }
        let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut vertices = Vec::with_capacity(nodes.len());
        for &(j, i) in &nodes {
            index.insert((i, j), vertices.len());
            vertices.push(Point::new(bb.x0 + i as f64 * spacing, bb.y0 + j as f64 * spacing));
        }
        let mut out = Vec::new();
        for &(i, j, b) in &cells {
            let v00 = index[&(i, j)];
            let v10 = index[&(i + 1, j)];
            let v11 = index[&(i + 1, j + 1)];
            let v01 = index[&(i, j + 1)];
            match cell_type {
                CellType::Quad => out.push(CoarseCell { vertices: vec![v00, v10, v11, v01], subdomain: b }),
                CellType::Triangle => {
                    out.push(CoarseCell { vertices: vec![v00, v10, v11], subdomain: b });
                    out.push(CoarseCell { vertices: vec![v00, v11, v01], subdomain: b });
                }
            }
        }
        CoarseMesh::new(vertices, out, spacing)
    }

    pub fn decompose(&self, h: f64) -> Result<(TriMesh, DomainDecomposition)> {
        let (mesh, owner) = self.triangulate(h)?;
        let decomp = DomainDecomposition::new(&mesh, owner, self.blocks.clone(), self.overlaps.clone())?;
        Ok((mesh, decomp))
    }
}

/// One fine edge of an interface, seen from the lower-indexed side.
#[derive(Debug, Clone)]
pub struct InterfaceEdge {
    pub edge: usize,
    /// Triangle on the `k` side and on the `j` side.
    pub tri_k: usize,
    pub tri_j: usize,
    /// Endpoints, counter-clockwise with respect to `tri_k`.
    pub a: Point,
    pub b: Point,
    /// Unit normal pointing from `ω_k` into `ω_j`.
    pub normal: Vec2,
    pub length: f64,
}

/// Shared boundary `γ_kj` of two basic subdomains, `k < j`.
#[derive(Debug, Clone)]
pub struct Interface {
    pub k: usize,
    pub j: usize,
    pub edges: Vec<InterfaceEdge>,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    /// Basic subdomain of every fine triangle.
    pub tri_subdomain: Vec<usize>,
    /// Fine triangles of each basic subdomain.
    pub basic_triangles: Vec<Vec<usize>>,
    pub basic_area: Vec<f64>,
    pub outlines: Vec<Rect>,
    /// Basic subdomains forming each overlapping subdomain.
    pub overlaps: Vec<Vec<usize>>,
    pub interfaces: Vec<Interface>,
    /// Fine boundary edges of `Γ` grouped by basic subdomain.
    pub dirichlet_edges: Vec<Vec<usize>>,
}

impl DomainDecomposition {
    pub fn new(
        mesh: &TriMesh,
        tri_subdomain: Vec<usize>,
        outlines: Vec<Rect>,
        overlaps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = outlines.len();
        if tri_subdomain.len() != mesh.n_triangles() {
            return Err(Error::InvalidArgument("one subdomain label per triangle required".into()));
        }
        let mut basic_triangles = vec![Vec::new(); n];
        let mut basic_area = vec![0.0; n];
        for (t, &k) in tri_subdomain.iter().enumerate() {
            if k >= n {
                return Err(Error::InvalidArgument(format!("subdomain label {k} out of range")));
            }
            basic_triangles[k].push(t);
            basic_area[k] += mesh.areas[t];
        }
        if basic_triangles.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("empty basic subdomain".into()));
        }
        for o in &overlaps {
            if o.is_empty() || o.iter().any(|&k| k >= n) {
                return Err(Error::InvalidArgument("bad overlapping subdomain index set".into()));
            }
        }
        let mut covered = vec![false; n];
        overlaps.iter().flatten().for_each(|&k| covered[k] = true);
        if covered.iter().any(|c| !c) {
            return Err(Error::InvalidArgument("overlapping subdomains do not cover the domain".into()));
        }

        let mut by_pair: BTreeMap<(usize, usize), Vec<InterfaceEdge>> = BTreeMap::new();
        let mut dirichlet_edges = vec![Vec::new(); n];
        for (e, edge) in mesh.edges.iter().enumerate() {
            match edge.triangles {
                (t, None) => dirichlet_edges[tri_subdomain[t]].push(e),
                (t0, Some(t1)) => {
                    let (s0, s1) = (tri_subdomain[t0], tri_subdomain[t1]);
                    if s0 == s1 {
                        continue;
                    }
                    let (k, j, tk, tj) = if s0 < s1 { (s0, s1, t0, t1) } else { (s1, s0, t1, t0) };
                    let (a, b, normal) = mesh.edge_geometry(tk, mesh.local_edge(tk, e));
                    by_pair.entry((k, j)).or_default().push(InterfaceEdge {
                        edge: e,
                        tri_k: tk,
                        tri_j: tj,
                        a,
                        b,
                        normal,
                        length: a.dist(b),
                    });
                }
            }
        }
        let interfaces = by_pair
            .into_iter()
            .map(|((k, j), edges)| {
                let length = edges.iter().map(|e| e.length).sum();
                Interface { k, j, edges, length }
            })
            .collect();

        Ok(DomainDecomposition {
            tri_subdomain,
            basic_triangles,
            basic_area,
            outlines,
            overlaps,
            interfaces,
            dirichlet_edges,
        })
    }

    pub fn n_basic(&self) -> usize {
        self.basic_triangles.len()
    }

    pub fn n_overlapping(&self) -> usize {
        self.overlaps.len()
    }

    /// Interfaces touching basic subdomain `k`.
    pub fn interfaces_of(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.interfaces.iter().enumerate().filter(move |(_, g)| g.k == k || g.j == k).map(|(i, _)| i)
    }

    /// Largest number of interfaces of a single basic subdomain.
    pub fn max_interfaces_per_subdomain(&self) -> usize {
        (0..self.n_basic()).map(|k| self.interfaces_of(k).count()).max().unwrap_or(0)
    }

    /// Triangles of overlapping subdomain `m`.
    pub fn overlap_triangles(&self, m: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.overlaps[m].iter().flat_map(|&k| self.basic_triangles[k].iter().copied()).collect();
        out.sort_unstable();
        out
    }

    /// Every interface lying on the boundary of some overlapping subdomain must be
    /// interior to another overlapping subdomain containing both of its sides.
    pub fn check_overlap_condition(&self) -> Result<()> {
        for g in &self.interfaces {
            let on_boundary = self
                .overlaps
                .iter()
                .any(|o| o.contains(&g.k) != o.contains(&g.j));
            let interior = self.overlaps.iter().any(|o| o.contains(&g.k) && o.contains(&g.j));
            if on_boundary && !interior {
                return Err(Error::OverlapCondition { k: g.k, j: g.j });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellType {
    Triangle,
    Quad,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseCell {
    /// Counter-clockwise coarse vertex indices, starting at the lower-left corner.
    pub vertices: Vec<usize>,
    pub subdomain: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseEdge {
    pub vertices: [usize; 2],
    pub cells: (usize, Option<usize>),
}

/// Coarse mesh `T_ω` carrying the flux corrector.
#[derive(Debug, Clone)]
pub struct CoarseMesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<CoarseCell>,
    pub edges: Vec<CoarseEdge>,
    pub spacing: f64,
}

/// Counts entering the compatibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoarseCounts {
    pub n_cells: usize,
    pub n_vertices: usize,
    pub n_faces: usize,
    pub n_dirichlet_faces: usize,
    /// Sum over cells of their edge counts (per-cell dimension of `Q_N`).
    pub dim_q: usize,
}

impl CoarseMesh {
    pub fn new(vertices: Vec<Point>, cells: Vec<CoarseCell>, spacing: f64) -> Result<Self> {
        let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<CoarseEdge> = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            let nv = cell.vertices.len();
            if nv < 3 {
                return Err(Error::InvalidArgument("coarse cell with fewer than 3 vertices".into()));
            }
            for i in 0..nv {
                let a = cell.vertices[i];
                let b = cell.vertices[(i + 1) % nv];
                let key = if a < b { (a, b) } else { (b, a) };
                match lookup.get(&key) {
                    Some(&e) => {
                        if edges[e].cells.1.is_some() {
                            return Err(Error::InvalidArgument("coarse edge shared by three cells".into()));
                        }
                        edges[e].cells.1 = Some(c);
                    }
                    None => {
                        lookup.insert(key, edges.len());
                        edges.push(CoarseEdge { vertices: [key.0, key.1], cells: (c, None) });
                    }
                }
            }
        }
        Ok(CoarseMesh { vertices, cells, edges, spacing })
    }

    pub fn counts(&self) -> CoarseCounts {
        CoarseCounts {
            n_cells: self.cells.len(),
            n_vertices: self.vertices.len(),
            n_faces: self.edges.len(),
            n_dirichlet_faces: self.edges.iter().filter(|e| e.cells.1.is_none()).count(),
            dim_q: self.cells.iter().map(|c| c.vertices.len()).sum(),
        }
    }

    /// Edge count shared by all cells, if uniform.
    pub fn uniform_edges_per_cell(&self) -> Option<usize> {
        let l = self.cells.first()?.vertices.len();
        self.cells.iter().all(|c| c.vertices.len() == l).then_some(l)
    }
}

/// Outcome of the compatibility check on a coarse mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Compatibility {
    pub satisfied: bool,
    /// `dim Q_N + N_fD - N - N_f`; the number of free parameters when positive.
    pub slack: i64,
}

/// `dim Q_N + N_fD >= N + N_f`.
pub fn compatibility_from_counts(c: &CoarseCounts) -> Compatibility {
    let slack = c.dim_q as i64 + c.n_dirichlet_faces as i64 - c.n_cells as i64 - c.n_faces as i64;
    Compatibility { satisfied: slack >= 0, slack }
}

pub fn compatibility_check(coarse: &CoarseMesh) -> Compatibility {
    compatibility_from_counts(&coarse.counts())
}

/// L-shaped preset with fine spacing `h`.
pub fn build_lshape_mesh(h: f64) -> Result<(TriMesh, DomainDecomposition)> {
    Layout::lshape().decompose(h)
}

/// `m x n` unit squares with fine spacing `h`; the coarse mesh consists of the
/// unit squares (quads) or their diagonal halves (triangles).
pub fn build_rect_grid_decomposition(
    m: usize,
    n: usize,
    h: f64,
    cell_type: CellType,
) -> Result<(TriMesh, DomainDecomposition, CoarseMesh)> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("grid size {m}x{n} must be positive")));
    }
    let layout = Layout::rect_grid(m, n);
    let (mesh, decomp) = layout.decompose(h)?;
    let coarse = layout.coarse_mesh(1.0, cell_type)?;
    Ok((mesh, decomp, coarse))
}

/// Locates points in a fixed set of triangles through a uniform bucket grid.
pub struct TriangleLocator {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl TriangleLocator {
    pub fn new(tris: &[[Point; 3]], cell: f64) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in tris.iter().flatten() {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let nx = libm::ceil((hi.x - lo.x) / cell).max(1.0) as usize;
        let ny = libm::ceil((hi.y - lo.y) / cell).max(1.0) as usize;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, p) in tris.iter().enumerate() {
            let (x0, x1) = (p.iter().map(|q| q.x).fold(f64::INFINITY, f64::min), p.iter().map(|q| q.x).fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (p.iter().map(|q| q.y).fold(f64::INFINITY, f64::min), p.iter().map(|q| q.y).fold(f64::NEG_INFINITY, f64::max));
            let i0 = (floor((x0 - lo.x) / cell) as usize).min(nx - 1);
            let i1 = (floor((x1 - lo.x) / cell) as usize).min(nx - 1);
            let j0 = (floor((y0 - lo.y) / cell) as usize).min(ny - 1);
            let j1 = (floor((y1 - lo.y) / cell) as usize).min(ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        TriangleLocator { origin: lo, cell, nx, ny, buckets }
    }

    pub fn locate(&self, tris: &[[Point; 3]], x: Point) -> Option<usize> {
        let i = floor((x.x - self.origin.x) / self.cell);
        let j = floor((x.y - self.origin.y) / self.cell);
        if i < 0.0 || j < 0.0 {
            return None;
        }
        let (i, j) = ((i as usize).min(self.nx - 1), (j as usize).min(self.ny - 1));
        self.buckets[j * self.nx + i].iter().copied().find(|&t| {
            let l = crate::geometry::barycentric(&tris[t], x);
            l.iter().all(|&v| v > -1e-12)
        })
    }
}
