//! Dense brute-force re-implementation of the whole estimator on a structured
//! L-shape mesh, sharing no code with the library beyond `std`.

use std::f64::consts::PI;

type V = [f64; 2];

fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1]]
}
fn dotv(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn cross(a: V, b: V) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn exact_u(p: V) -> f64 {
    let (x, y) = (PI * p[0], PI * p[1]);
    (x.sin() * y.sin() + 0.5 * (1.0 - x.cos()) * (1.0 - y.cos())) / (PI * PI)
}

fn exact_grad(p: V) -> V {
    let (x, y) = (PI * p[0], PI * p[1]);
    [
        (x.cos() * y.sin() + 0.5 * x.sin() * (1.0 - y.cos())) / PI,
        (x.sin() * y.cos() + 0.5 * (1.0 - x.cos()) * y.sin()) / PI,
    ]
}

fn source(p: V) -> f64 {
    let (x, y) = (PI * p[0], PI * p[1]);
    2.0 * x.sin() * y.sin() - 0.5 * (x.cos() * (1.0 - y.cos()) + (1.0 - x.cos()) * y.cos())
}

/// Dunavant degree-5 rule: barycentric points and weights.
fn dunavant5() -> Vec<([f64; 3], f64)> {
    let a1 = 0.059715871789770;
    let b1 = 0.470142064105115;
    let w1 = 0.132394152788506;
    let a2 = 0.797426985353087;
    let b2 = 0.101286507323456;
    let w2 = 0.125939180544827;
    vec![
        ([1.0 / 3.0; 3], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

fn at(p: &[V; 3], l: &[f64; 3]) -> V {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

/// Gaussian elimination with partial pivoting.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        assert!(a[c][c].abs() > 1e-13, "singular oracle system");
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub struct Tri {
    pub v: [usize; 3],
    pub sub: usize,
}

pub struct OracleMesh {
    pub pts: Vec<V>,
    pub tris: Vec<Tri>,
}

impl OracleMesh {
    /// Blocks: 0 = (0,1)×(1,2), 1 = (0,1)², 2 = (1,2)×(0,1).
    pub fn lshape(n: usize) -> Self {
        let h = 1.0 / n as f64;
        let mut pts = Vec::new();
        let mut id = std::collections::HashMap::new();
        let mut node = |i: usize, j: usize, pts: &mut Vec<V>| -> usize {
            *id.entry((i, j)).or_insert_with(|| {
                pts.push([i as f64 * h, j as f64 * h]);
                pts.len() - 1
            })
        };
        let mut tris = Vec::new();
        for (sub, (i0, j0)) in [(0usize, (0usize, n)), (1, (0, 0)), (2, (n, 0))] {
            for j in j0..j0 + n {
                for i in i0..i0 + n {
                    let a = node(i, j, &mut pts);
                    let b = node(i + 1, j, &mut pts);
                    let c = node(i + 1, j + 1, &mut pts);
                    let d = node(i, j + 1, &mut pts);
                    tris.push(Tri { v: [a, b, c], sub });
                    tris.push(Tri { v: [a, c, d], sub });
                }
            }
        }
        OracleMesh { pts, tris }
    }

    pub fn corners(&self, t: usize) -> [V; 3] {
        self.tris[t].v.map(|i| self.pts[i])
    }

    pub fn area(&self, t: usize) -> f64 {
        let p = self.corners(t);
        0.5 * cross(sub(p[1], p[0]), sub(p[2], p[0]))
    }

    pub fn centroid(&self, t: usize) -> V {
        let p = self.corners(t);
        [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
    }

    fn grads(&self, t: usize) -> [V; 3] {
        let p = self.corners(t);
        let two = 2.0 * self.area(t);
        [0, 1, 2].map(|i| {
            let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            [(a[1] - b[1]) / two, (b[0] - a[0]) / two]
        })
    }

    fn on_boundary(&self, v: usize) -> bool {
        let [x, y] = self.pts[v];
        let e = 1e-12;
        x < e || y < e || (x > 2.0 - e) || (y > 2.0 - e) || (x > 1.0 - e && y > 1.0 - e)
    }

    /// Edges as `(a, b, [(triangle, local)])`.
    fn edges(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut map: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
        for (t, tri) in self.tris.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri.v[i], tri.v[(i + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        map.into_iter().map(|((a, b), t)| (a, b, t)).collect()
    }
}

pub struct OracleResult {
    pub iterate: Vec<(V, f64)>,
    /// `(centroid, vertex position, value)` of the corrected flux.
    pub flux: Vec<(V, V, V)>,
    pub m1: [f64; 3],
    pub m2: [f64; 3],
    pub m3: [f64; 2],
    pub total_sq: f64,
    pub d11: f64,
    pub energy_error: f64,
    pub residuals: Vec<f64>,
}

pub fn run(n: usize, sweeps: usize) -> OracleResult {
    let m = OracleMesh::lshape(n);
    let np = m.pts.len();
    let nt = m.tris.len();
    let rule = dunavant5();

    // global stiffness and load
    let mut k = vec![vec![0.0; np]; np];
    let mut f = vec![0.0; np];
    for t in 0..nt {
        let g = m.grads(t);
        let area = m.area(t);
        let p = m.corners(t);
        for i in 0..3 {
            for j in 0..3 {
                k[m.tris[t].v[i]][m.tris[t].v[j]] += area * dotv(g[i], g[j]);
            }
        }
        // edge midpoint rule
        for e in 0..3 {
            let mut l = [0.5; 3];
            l[e] = 0.0;
            let fx = source(at(&p, &l)) * area / 3.0;
            for i in 0..3 {
                f[m.tris[t].v[i]] += fx * l[i];
            }
        }
    }

    // Schwarz: Ω1 = blocks {0,1}, Ω2 = blocks {1,2}, one solve per iteration
    let mut v: Vec<f64> = (0..np).map(|i| if m.on_boundary(i) { exact_u(m.pts[i]) } else { 0.0 }).collect();
    let overlaps = [[0usize, 1], [1, 2]];
    for it in 0..sweeps {
        let ov = overlaps[it % 2];
        let free: Vec<usize> = (0..np)
            .filter(|&i| {
                !m.on_boundary(i)
                    && m.tris.iter().filter(|t| t.v.contains(&i)).all(|t| ov.contains(&t.sub))
            })
            .collect();
        if free.is_empty() {
            continue;
        }
        let a: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| k[i][j]).collect()).collect();
        let b: Vec<f64> = free
            .iter()
            .map(|&i| f[i] - (0..np).filter(|j| !free.contains(j)).map(|j| k[i][j] * v[j]).sum::<f64>())
            .collect();
        let x = gauss(a, b);
        for (&i, xi) in free.iter().zip(x) {
            v[i] = xi;
        }
    }

    let grad_v: Vec<V> = (0..nt)
        .map(|t| {
            let g = m.grads(t);
            let w = m.tris[t].v;
            [0, 1].map(|c| g[0][c] * v[w[0]] + g[1][c] * v[w[1]] + g[2][c] * v[w[2]])
        })
        .collect();

    // averaged gradient per (vertex, block)
    let mut acc: std::collections::HashMap<(usize, usize), (V, f64)> = Default::default();
    for t in 0..nt {
        for &p in &m.tris[t].v {
            let e = acc.entry((p, m.tris[t].sub)).or_insert(([0.0; 2], 0.0));
            let a = m.area(t);
            e.0[0] += a * grad_v[t][0];
            e.0[1] += a * grad_v[t][1];
            e.1 += a;
        }
    }
    let ytil: Vec<[V; 3]> = (0..nt)
        .map(|t| {
            m.tris[t].v.map(|p| {
                let (s, w) = acc[&(p, m.tris[t].sub)];
                [s[0] / w, s[1] / w]
            })
        })
        .collect();

    // corrector: per triangle q = (a1, a2) + c x
    let np_q = 3 * nt;
    let q_at = |p: &[f64], t: usize, x: V| -> V { [p[3 * t] + p[3 * t + 2] * x[0], p[3 * t + 1] + p[3 * t + 2] * x[1]] };
    let y_at = |t: usize, l: &[f64; 3]| -> V {
        let y = &ytil[t];
        [0, 1].map(|c| l[0] * y[0][c] + l[1] * y[1][c] + l[2] * y[2][c])
    };
    let div_ytil = |t: usize| -> f64 {
        let g = m.grads(t);
        (0..3).map(|i| dotv(g[i], ytil[t][i])).sum()
    };

    let c_p = 2f64.sqrt() / PI;
    let e_max = 2.0;
    let alpha = [3.0, 3.0 * c_p * c_p, 3.0 * e_max];
    let beta = 1.0 / (PI * (PI).tanh()).sqrt();

    // interface edges: (a, b, tri in lower block, tri in upper block, normal lower→upper, interface id)
    let edges = m.edges();
    let mut iface = Vec::new();
    let mut continuity = Vec::new();
    for (a, b, ts) in &edges {
        if ts.len() != 2 {
            continue;
        }
        let (t0, t1) = (ts[0], ts[1]);
        let pa = m.pts[*a];
        let pb = m.pts[*b];
        let d = sub(pb, pa);
        let mut n = [d[1], -d[0]];
        let len = dotv(d, d).sqrt();
        n = [n[0] / len, n[1] / len];
        let (s0, s1) = (m.tris[t0].sub, m.tris[t1].sub);
        let (lo, hi) = if s0 < s1 { (t0, t1) } else { (t1, t0) };
        // orient the normal out of `lo`
        if dotv(sub(m.centroid(lo), pa), n) > 0.0 {
            n = [-n[0], -n[1]];
        }
        if s0 == s1 {
            continuity.push((pa, pb, lo, hi, n));
        } else {
            let id = if s0.min(s1) == 0 { 0 } else { 1 };
            iface.push((pa, pb, lo, hi, n, id));
        }
    }

    let objective = |p: &[f64]| -> f64 {
        let mut j = 0.0;
        for t in 0..nt {
            let pts = m.corners(t);
            let area = m.area(t);
            let dq = 2.0 * p[3 * t + 2];
            let dy = div_ytil(t);
            for (l, w) in &rule {
                let x = at(&pts, l);
                let yv = y_at(t, l);
                let q = q_at(p, t, x);
                let r = [yv[0] + q[0] - grad_v[t][0], yv[1] + q[1] - grad_v[t][1]];
                j += alpha[0] * w * area * dotv(r, r);
                let e = dy + dq + source(x);
                j += alpha[1] * w * area * e * e;
            }
        }
        for &(pa, pb, lo, hi, n, _) in &iface {
            let len = dotv(sub(pb, pa), sub(pb, pa)).sqrt();
            // Simpson's rule
            for (s, w) in [(0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)] {
                let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                let yl = bary_eval(&m, &ytil, lo, x);
                let yh = bary_eval(&m, &ytil, hi, x);
                let ql = q_at(p, lo, x);
                let qh = q_at(p, hi, x);
                let jump = dotv([yl[0] + ql[0] - yh[0] - qh[0], yl[1] + ql[1] - yh[1] - qh[1]], n);
                j += alpha[2] * beta * beta * w * len * jump * jump;
            }
        }
        j
    };

    // Hessian and gradient by polarization
    let zero = vec![0.0; np_q];
    let j0 = objective(&zero);
    let unit = |i: usize| {
        let mut e = vec![0.0; np_q];
        e[i] = 1.0;
        e
    };
    let ji: Vec<f64> = (0..np_q).map(|i| objective(&unit(i))).collect();
    let mut hess = vec![vec![0.0; np_q]; np_q];
    for i in 0..np_q {
        for j in i..np_q {
            let mut e = unit(i);
            e[j] += 1.0;
            let h = if i == j { objective(&e) - 2.0 * ji[i] + j0 } else { objective(&e) - ji[i] - ji[j] + j0 };
            hess[i][j] = h;
            hess[j][i] = h;
        }
    }
    let grad: Vec<f64> = (0..np_q).map(|i| ji[i] - j0 - 0.5 * hess[i][i]).collect();

    // linear constraints C p = d
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for &(pa, pb, lo, hi, n) in &continuity {
        let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
        let mut r = vec![0.0; np_q];
        r[3 * lo] += n[0];
        r[3 * lo + 1] += n[1];
        r[3 * lo + 2] += dotv(mid, n);
        r[3 * hi] -= n[0];
        r[3 * hi + 1] -= n[1];
        r[3 * hi + 2] -= dotv(mid, n);
        rows.push((r, 0.0));
    }
    for blk in 0..3 {
        let mut r = vec![0.0; np_q];
        let mut rhs = 0.0;
        for t in (0..nt).filter(|&t| m.tris[t].sub == blk) {
            let area = m.area(t);
            r[3 * t + 2] += 2.0 * area;
            let pts = m.corners(t);
            rhs -= div_ytil(t) * area + rule.iter().map(|(l, w)| w * area * source(at(&pts, l))).sum::<f64>();
        }
        rows.push((r, rhs));
    }
    for id in 0..2 {
        let mut r = vec![0.0; np_q];
        let mut rhs = 0.0;
        for &(pa, pb, lo, hi, n, g) in &iface {
            if g != id {
                continue;
            }
            let len = dotv(sub(pb, pa), sub(pb, pa)).sqrt();
            let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            r[3 * lo] += len * n[0];
            r[3 * lo + 1] += len * n[1];
            r[3 * lo + 2] += len * dotv(mid, n);
            r[3 * hi] -= len * n[0];
            r[3 * hi + 1] -= len * n[1];
            r[3 * hi + 2] -= len * dotv(mid, n);
            let yl = bary_eval(&m, &ytil, lo, mid);
            let yh = bary_eval(&m, &ytil, hi, mid);
            rhs -= len * dotv(sub(yl, yh), n);
        }
        rows.push((r, rhs));
    }
    let nc = rows.len();
    let size = np_q + nc;
    let mut kkt = vec![vec![0.0; size]; size];
    let mut rhs = vec![0.0; size];
    for i in 0..np_q {
        kkt[i][..np_q].copy_from_slice(&hess[i]);
        rhs[i] = -grad[i];
    }
    for (c, (r, d)) in rows.iter().enumerate() {
        for i in 0..np_q {
            kkt[np_q + c][i] = r[i];
            kkt[i][np_q + c] = r[i];
        }
        rhs[np_q + c] = *d;
    }
    let sol = gauss(kkt, rhs);
    let p = &sol[..np_q];

    // corrected flux y = ỹ + q
    let y = |t: usize, x: V| -> V {
        let a = bary_eval(&m, &ytil, t, x);
        let q = q_at(p, t, x);
        [a[0] + q[0], a[1] + q[1]]
    };
    let div_y = |t: usize| div_ytil(t) + 2.0 * p[3 * t + 2];

    let mut s1 = [0.0; 3];
    let mut s2 = [0.0; 3];
    let mut err2 = 0.0;
    for t in 0..nt {
        let pts = m.corners(t);
        let area = m.area(t);
        let blk = m.tris[t].sub;
        for (l, w) in &rule {
            let x = at(&pts, l);
            let r = sub(y(t, x), grad_v[t]);
            s1[blk] += w * area * dotv(r, r);
            let e = div_y(t) + source(x);
            s2[blk] += w * area * e * e;
            let d = sub(exact_grad(x), grad_v[t]);
            err2 += w * area * dotv(d, d);
        }
    }
    let mut s3 = [0.0; 2];
    for &(pa, pb, lo, hi, n, g) in &iface {
        let len = dotv(sub(pb, pa), sub(pb, pa)).sqrt();
        for (s, w) in [(0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)] {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let jump = dotv(sub(y(lo, x), y(hi, x)), n);
            s3[g] += beta * beta * w * len * jump * jump;
        }
    }
    let m1 = s1.map(|s| alpha[0] * s);
    let m2 = s2.map(|s| alpha[1] * s);
    let m3 = s3.map(|s| alpha[2] * s);
    let total_sq = m1.iter().chain(&m2).chain(&m3).sum();
    let d11 = s1.iter().sum::<f64>().sqrt() + c_p * s2.iter().sum::<f64>().sqrt() + e_max.sqrt() * s3.iter().sum::<f64>().sqrt();

    let residuals = rows.iter().map(|(r, d)| r.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - d).collect();
    let flux = (0..nt)
        .flat_map(|t| {
            let c = m.centroid(t);
            let pts = m.corners(t);
            let vals: Vec<(V, V, V)> = pts.iter().map(|&x| (c, x, y(t, x))).collect();
            vals
        })
        .collect();
    OracleResult {
        iterate: m.pts.iter().copied().zip(v).collect(),
        flux,
        m1,
        m2,
        m3,
        total_sq,
        d11,
        energy_error: err2.sqrt(),
        residuals,
    }
}

fn bary_eval(m: &OracleMesh, field: &[[V; 3]], t: usize, x: V) -> V {
    let p = m.corners(t);
    let two = 2.0 * m.area(t);
    let l1 = cross(sub(x, p[0]), sub(p[2], p[0])) / two;
    let l2 = cross(sub(p[1], p[0]), sub(x, p[0])) / two;
    let l = [1.0 - l1 - l2, l1, l2];
    [0, 1].map(|c| l[0] * field[t][0][c] + l[1] * field[t][1][c] + l[2] * field[t][2][c])
}
