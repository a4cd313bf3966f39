#![allow(dead_code)]

pub mod oracle;

use ddmcert_core::majorant::{optimize_eps, poincare_edge_constant, MajorantConstants, MajorantReport};
use ddmcert_core::mesh::{build_lshape_mesh, build_rect_grid_decomposition, compatibility_from_counts, CellType, Layout};
use ddmcert_core::pipeline::{guarantee_slack, run_experiment, Experiment, ExperimentConfig, Preset, Record, PRESET_FRIEDRICHS};
use ddmcert_core::problem::{discrete_energy_distance, manufactured_lshape_problem};
use ddmcert_core::schwarz::{contraction_estimate, run_schwarz, Schedule, SchwarzConfig, SchwarzSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

fn sci(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", s.join(", "))
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

pub fn experiment(h: f64, coarse_h: f64, sweeps: usize, record: Record) -> Experiment {
    let mut c = ExperimentConfig::new(Preset::LShape, h, sweeps);
    c.coarse_h = coarse_h;
    c.record = record;
    run_experiment(&c).expect("experiment failed")
}

pub struct MatrixRun {
    pub label: String,
    pub report: MajorantReport,
}

/// h ∈ {1/4, 1/8, 1/16}, H ∈ {h, 4h}, sweeps ∈ {2, 4, 8, 16}.
pub fn guarantee_matrix() -> Vec<MatrixRun> {
    let mut out = Vec::new();
    for h in [0.25, 0.125, 0.0625] {
        for coarse in [h, 4.0 * h] {
            let e = experiment(h, coarse, 16, Record::Sweeps(vec![2, 4, 8, 16]));
            for r in e.records {
                out.push(MatrixRun { label: format!("h={h} H={coarse} n={}", r.sweep), report: r.estimate.report });
            }
        }
    }
    out
}

pub fn criterion1(runs: &[MatrixRun]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for r in runs {
        let err = r.report.energy_error.unwrap();
        let s = guarantee_slack(r.report.total, err).min(guarantee_slack(r.report.d11_bound, err));
        worst = worst.min(s);
        if !(r.report.admissible && s >= -1e-9) {
            bad.push(r.label.clone());
        }
    }
    outcome(bad.is_empty(), format!("{} configs, min relative slack {worst:.3e}, violations {bad:?}", runs.len()))
}

pub fn criterion6(runs: &[MatrixRun]) -> Outcome {
    let worst = runs.iter().map(|r| r.report.residuals.max_abs()).fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max mean residual {worst:.3e} over {} configs", runs.len()))
}

pub fn criterion2() -> Outcome {
    let mut rows = Vec::new();
    for n in [4, 8, 16, 32] {
        let h = 1.0 / n as f64;
        let e = experiment(h, h, 16, Record::Final);
        let r = &e.records[0].estimate.report;
        rows.push((n, r.total_sq, r.i_eff.unwrap()));
    }
    let ieff_ok = rows.iter().all(|r| (2.0..=4.5).contains(&r.2));
    let factors: Vec<f64> = rows.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let fac_ok = factors.iter().all(|f| (3.2..=4.8).contains(f));
    let table: Vec<String> = rows.iter().map(|(n, m, i)| format!("1/{n}: M²={m:.3e} I={i:.2}")).collect();
    outcome(ieff_ok && fac_ok, format!("{}; factors {factors:.2?}", table.join(", ")))
}

pub fn criterion3() -> Outcome {
    let h = 1.0 / 64.0;
    let mut ok = true;
    let mut cells = Vec::new();
    for n in [4, 8, 16, 32] {
        let e = experiment(h, 1.0 / n as f64, 16, Record::Final);
        let r = &e.records[0].estimate.report;
        let i = r.i_eff.unwrap();
        let share = r.m2_sq / r.total_sq;
        ok &= i >= 10.0 && share >= 0.9;
        cells.push(format!("H=1/{n}: I={i:.2} M2²/M²={share:.3}"));
    }
    outcome(ok, cells.join(", "))
}

pub const TABLE3_H: f64 = 1.0 / 64.0;

pub fn table3_run() -> Experiment {
    experiment(TABLE3_H, TABLE3_H, 8, Record::Sweeps((2..=8).collect()))
}

pub fn criterion4(e: &Experiment) -> Outcome {
    let m: Vec<f64> = e.records.iter().map(|r| r.estimate.report.total_sq).collect();
    let monotone = m.windows(2).all(|w| w[1] < w[0]);
    let drop = m[0] / m[m.len() - 1];
    outcome(monotone && drop >= 100.0, format!("M² n=2..8 {}, drop {drop:.1}", sci(&m)))
}

pub fn criterion5(e: &Experiment) -> Outcome {
    let r = e.records.iter().find(|r| r.sweep == 3).expect("sweep 3 recorded");
    let parts = &r.estimate.report.m1_parts;
    let arg = (0..parts.len()).max_by(|&a, &b| parts[a].total_cmp(&parts[b])).unwrap();
    let updated: Vec<usize> = r.updated.iter().flat_map(|&m| e.decomp.overlaps[m].clone()).collect();
    let pass = !updated.contains(&arg) && arg == 2;
    outcome(pass, format!("n=3 M1² parts {}, argmax ω{}, just updated {updated:?}", sci(parts), arg + 1))
}

fn grid_min(f: &dyn Fn([f64; 3]) -> f64) -> f64 {
    let n = 60;
    let (mut lo, mut hi) = ([-8.0f64; 3], [8.0f64; 3]);
    let mut best = (f64::INFINITY, [0.0; 3]);
    for _ in 0..6 {
        let step: Vec<f64> = (0..3).map(|d| (hi[d] - lo[d]) / (n - 1) as f64).collect();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1], lo[2] + k as f64 * step[2]];
                    let v = f(l.map(|x| 10f64.powf(x)));
                    if v < best.0 {
                        best = (v, l);
                    }
                }
            }
        }
        for d in 0..3 {
            lo[d] = (best.1[d] - 2.0 * step[d]).max(-8.0);
            hi[d] = (best.1[d] + 2.0 * step[d]).min(8.0);
        }
    }
    best.0
}

pub fn criterion7() -> Outcome {
    let (_, decomp) = build_lshape_mesh(1.0).unwrap();
    let c = MajorantConstants::from_decomposition(&decomp, &manufactured_lshape_problem(), PRESET_FRIEDRICHS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worse_than_unit = 0;
    for _ in 0..100 {
        let s: [f64; 3] = [0; 3].map(|_| 10f64.powf(rng.gen_range(-6.0..1.0)));
        let opt = optimize_eps(s, &c).unwrap();
        let val = c.quadratic_majorant(s, opt.eps).unwrap();
        let grid = grid_min(&|e| c.quadratic_majorant(s, e).unwrap());
        worst = worst.max((val - grid) / grid);
        if val > c.quadratic_majorant(s, [1.0; 3]).unwrap() * (1.0 + 1e-14) {
            worse_than_unit += 1;
        }
    }
    outcome(
        worst <= 1e-6 && worse_than_unit == 0,
        format!("max (closed form − grid)/grid = {worst:.2e}, worse than ε=1: {worse_than_unit}"),
    )
}

pub fn criterion8() -> Outcome {
    let c = poincare_edge_constant(1.0);
    let c_ok = (c - 0.565244).abs() <= 1e-5;
    let coarse = Layout::lshape().coarse_mesh(1.0, CellType::Triangle).unwrap();
    let mut k = coarse.counts();
    k.n_dirichlet_faces = 0;
    let a0 = compatibility_from_counts(&k).satisfied;
    k.n_dirichlet_faces = 1;
    let a1 = compatibility_from_counts(&k).satisfied;
    let mut b_ok = true;
    for m in 1..=4 {
        for n in 1..=4 {
            let (_, _, g) = build_rect_grid_decomposition(m, n, 1.0, CellType::Triangle).unwrap();
            let mut k = g.counts();
            k.n_dirichlet_faces = 0;
            b_ok &= compatibility_from_counts(&k).satisfied == (m > 1 && n > 1);
        }
    }
    outcome(
        c_ok && !a0 && a1 && b_ok,
        format!("C(1)={c:.7}, (a) N_fD=0:{a0} N_fD=1:{a1}, (b) grid verdicts match: {b_ok}"),
    )
}

pub fn criterion9() -> Outcome {
    let problem = manufactured_lshape_problem();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [8, 16] {
        let (mesh, decomp) = build_lshape_mesh(1.0 / n as f64).unwrap();
        for schedule in [Schedule::Sweep, Schedule::Alternating] {
            let mut cfg = SchwarzConfig::new(decomp.n_overlapping(), 12);
            cfg.schedule = schedule;
            let u_h = SchwarzSolver::new(&mesh, &decomp, &problem, cfg.clone()).unwrap().discrete_solution().unwrap();
            let states = run_schwarz(&mesh, &decomp, &problem, cfg).unwrap();
            let errs: Vec<f64> = states.iter().map(|s| discrete_energy_distance(&mesh, &problem.a, &u_h, &s.iterate)).collect();
            let mono = errs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-13);
            let c = contraction_estimate(&errs, 1e-10 * errs[0]).unwrap();
            ok &= mono && c.rho < 1.0;
            parts.push(format!("h=1/{n} {schedule:?}: ρ={:.3} monotone={mono}", c.rho));
        }
    }
    outcome(ok, parts.join(", "))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

/// Library pipeline against the dense oracle on an L-shape with `1/h` cells per block side.
pub fn oracle_mismatch(n: usize, sweeps: usize) -> Vec<String> {
    let lib = experiment(1.0 / n as f64, 1.0 / n as f64, sweeps, Record::Final);
    let rec = &lib.records[0];
    let rep = &rec.estimate.report;
    let o = oracle::run(n, sweeps);
    let mut bad = Vec::new();
    let mut check = |what: String, a: f64, b: f64| {
        if !close(a, b) {
            bad.push(format!("{what}: lib {a:.15e} oracle {b:.15e}"));
        }
    };
    for (p, val) in &o.iterate {
        let i = lib.mesh.vertices.iter().position(|q| (q.x - p[0]).abs() + (q.y - p[1]).abs() < 1e-12).unwrap();
        check(format!("iterate at {p:?}"), rec.iterate.values[i], *val);
    }
    for k in 0..3 {
        check(format!("M1 ω{k}"), rep.m1_parts[k], o.m1[k]);
        check(format!("M2 ω{k}"), rep.m2_parts[k], o.m2[k]);
    }
    // both interfaces touch the middle block; order them by orientation
    let mut lib_m3: Vec<(bool, f64)> = lib
        .decomp
        .interfaces
        .iter()
        .zip(&rep.m3_parts)
        .map(|(g, v)| {
            let e = &g.edges[0];
            ((e.a.y - e.b.y).abs() < 1e-12, *v)
        })
        .collect();
    lib_m3.sort_by_key(|x| !x.0);
    check("M3 horizontal".into(), lib_m3[0].1, o.m3[0]);
    check("M3 vertical".into(), lib_m3[1].1, o.m3[1]);
    check("M⊕²".into(), rep.total_sq, o.total_sq);
    check("D11".into(), rep.d11_bound, o.d11);
    check("energy error".into(), rep.energy_error.unwrap(), o.energy_error);
    for (c, x, y) in &o.flux {
        let t = (0..lib.mesh.n_triangles())
            .find(|&t| {
                let p = lib.mesh.corners(t);
                let cx = (p[0].x + p[1].x + p[2].x) / 3.0;
                let cy = (p[0].y + p[1].y + p[2].y) / 3.0;
                (cx - c[0]).abs() + (cy - c[1]).abs() < 1e-12
            })
            .unwrap();
        let p = lib.mesh.corners(t);
        let i = (0..3).find(|&i| (p[i].x - x[0]).abs() + (p[i].y - x[1]).abs() < 1e-12).unwrap();
        let v = rec.estimate.flux.values[t][i];
        check(format!("flux x t{t} v{i}"), v.x, y[0]);
        check(format!("flux y t{t} v{i}"), v.y, y[1]);
    }
    let ores = o.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if ores > 1e-10 {
        bad.push(format!("oracle constraint residual {ores:.3e}"));
    }
    bad
}

pub fn criterion10() -> Outcome {
    let mut bad = oracle_mismatch(1, 2);
    bad.extend(oracle_mismatch(2, 3));
    let n = bad.len();
    bad.truncate(4);
    outcome(n == 0, if n == 0 { "h=1 and h=1/2 match to 1e-10".into() } else { format!("{n} mismatches: {bad:?}") })
}
