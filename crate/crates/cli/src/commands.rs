//! Subcommand drivers.

use std::fs;

use anyhow::anyhow;
use ddmcert_core::majorant::{optimize_eps, poincare_edge_constant, MajorantReport};
use ddmcert_core::pipeline::{guarantee_slack, run_experiment, Experiment, Record};
use ddmcert_core::problem::{discrete_energy_distance, manufactured_lshape_problem};
use ddmcert_core::schwarz::{run_schwarz, SchwarzConfig, SchwarzMode, SchwarzSolver};
use ddmcert_core::Error;

use crate::config::RunConfig;
use crate::output::{self, sci, spacing_label, HistoryRow, MarkdownTable};

/// Relative slack below which a bound counts as violated.
pub const GUARANTEE_TOL: f64 = 1e-9;
pub const ADMISSIBLE_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
    Guarantee(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Guarantee(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver failure: {e:#}"),
            Failure::Guarantee(s) => write!(f, "guarantee violated: {s}"),
        }
    }
}

fn lib_failure(e: Error) -> Failure {
    match e {
        Error::InvalidSpacing { .. } | Error::InvalidArgument(_) | Error::Incompatible { .. } => Failure::Config(e.into()),
        e => Failure::Solver(e.into()),
    }
}

fn io_failure(e: anyhow::Error) -> Failure {
    Failure::Solver(e)
}

pub fn experiment(cfg: &RunConfig, record: Record) -> Result<Experiment, Failure> {
    run_experiment(&cfg.experiment(record)).map_err(lib_failure)
}

/// Admissibility and both bounds.
pub fn verify(label: &str, r: &MajorantReport) -> Result<(), Failure> {
    if !r.admissible || r.residuals.max_abs() > ADMISSIBLE_TOL {
        return Err(Failure::Solver(anyhow!("{label}: flux not admissible (residual {:e})", r.residuals.max_abs())));
    }
    if let Some(err) = r.energy_error {
        for (name, b) in [("M⊕", r.total), ("D11", r.d11_bound)] {
            let s = guarantee_slack(b, err);
            if s < -GUARANTEE_TOL {
                return Err(Failure::Guarantee(format!("{label}: {name} = {b:e} < error {err:e}")));
            }
        }
    }
    Ok(())
}

fn prepare_out(cfg: &RunConfig) -> Result<(), Failure> {
    fs::create_dir_all(&cfg.out).map_err(|e| Failure::Config(anyhow!("cannot create {}: {e}", cfg.out.display())))
}

fn finish(cfg: &RunConfig, rows: &[HistoryRow], table: &MarkdownTable) -> Result<(), Failure> {
    output::write_history(&cfg.out.join("history.csv"), rows).map_err(io_failure)?;
    let md = table.render();
    output::write_text(&cfg.out.join("table.md"), &md).map_err(io_failure)?;
    print!("{md}");
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let e = experiment(cfg, Record::All)?;
    let mut rows = Vec::new();
    for r in &e.records {
        let rep = &r.estimate.report;
        rows.push(HistoryRow::new(cfg.h, cfg.coarse(), r.sweep, rep));
        if cfg.emit_fields {
            let vtk = output::vtk_string(&e.mesh, &r.iterate, &r.estimate.flux, &format!("ddmcert sweep {}", r.sweep));
            output::write_text(&cfg.out.join(format!("fields_sweep{}.vtk", r.sweep)), &vtk).map_err(io_failure)?;
        }
    }
    if let Some(last) = e.records.last() {
        let table = e.space.coefficient_table(&last.estimate.corrector.coefficients);
        output::write_coefficients(&cfg.out.join("corrector.csv"), &table).map_err(io_failure)?;
    }
    finish(cfg, &rows, &MarkdownTable::history(&format!("Run: h={}, H={}", spacing_label(cfg.h), spacing_label(cfg.coarse())), &rows))?;
    for r in &e.records {
        verify(&format!("sweep {}", r.sweep), &r.estimate.report)?;
    }
    Ok(())
}

fn final_rows(cfg: &RunConfig, pairs: &[(f64, f64)]) -> Result<Vec<HistoryRow>, Failure> {
    let mut rows = Vec::new();
    for &(h, coarse) in pairs {
        let mut c = cfg.clone();
        c.h = h;
        c.coarse_h = Some(coarse);
        let e = experiment(&c, Record::Final)?;
        let r = &e.records[0];
        verify(&format!("h={h} H={coarse}"), &r.estimate.report)?;
        rows.push(HistoryRow::new(h, coarse, r.sweep, &r.estimate.report));
    }
    Ok(rows)
}

pub fn table1(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let pairs: Vec<(f64, f64)> = [4, 8, 16, 32, 64].map(|n| (1.0 / n as f64, 1.0 / n as f64)).to_vec();
    let rows = final_rows(cfg, &pairs)?;
    finish(cfg, &rows, &MarkdownTable::history(&format!("Corrector on the fine mesh, {} iterations", cfg.sweeps), &rows))
}

pub fn table2(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let pairs: Vec<(f64, f64)> =
        [4, 8, 16, 32].iter().map(|&n| (cfg.h, 1.0 / n as f64)).filter(|&(h, c)| c >= h - 1e-15).collect();
    let rows = final_rows(cfg, &pairs)?;
    let title = format!("Corrector on coarse meshes, fine mesh h={}, {} iterations", spacing_label(cfg.h), cfg.sweeps);
    finish(cfg, &rows, &MarkdownTable::history(&title, &rows))
}

pub fn table3(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let mut c = cfg.clone();
    c.sweeps = 8;
    let e = experiment(&c, Record::Sweeps((2..=8).collect()))?;
    let mut rows = Vec::new();
    for r in &e.records {
        verify(&format!("sweep {}", r.sweep), &r.estimate.report)?;
        rows.push(HistoryRow::new(c.h, c.coarse(), r.sweep, &r.estimate.report));
    }
    finish(cfg, &rows, &MarkdownTable::history("Increasing number of iterations", &rows))
}

pub const TABLE4_SWEEPS: [usize; 5] = [2, 3, 4, 7, 8];

pub fn table4(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let mut c = cfg.clone();
    c.sweeps = 8;
    let e = experiment(&c, Record::Sweeps(TABLE4_SWEEPS.to_vec()))?;
    let nb = e.decomp.n_basic();
    let mut header = vec!["n".to_string()];
    header.extend((1..=nb).map(|k| format!("M1²(ω{k})")));
    header.extend((1..=nb).map(|k| format!("M2²(ω{k})")));
    let mut table = MarkdownTable { title: "Majorant terms from different basic subdomains".into(), header, rows: Vec::new() };
    let mut rows = Vec::new();
    for r in &e.records {
        let rep = &r.estimate.report;
        verify(&format!("sweep {}", r.sweep), rep)?;
        rows.push(HistoryRow::new(c.h, c.coarse(), r.sweep, rep));
        let mut line = vec![r.sweep.to_string()];
        line.extend(rep.m1_parts.iter().chain(&rep.m2_parts).map(|&x| sci(x)));
        table.rows.push(line);
    }
    finish(cfg, &rows, &table)
}

/// Invariant suite on a small preset; prints one line per check.
pub fn check(cfg: &RunConfig) -> Result<(), Failure> {
    prepare_out(cfg)?;
    let mut failed = Vec::new();
    let mut guarantee = Vec::new();
    let mut line = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failed.push(name.to_string());
        }
    };

    let c_edge = poincare_edge_constant(1.0);
    line("edge constant", (c_edge - 0.565244).abs() < 1e-5, format!("{c_edge:.7}"));

    let mut rows = Vec::new();
    for mode in [SchwarzMode::Multiplicative, SchwarzMode::Additive] {
        let mut c = cfg.clone();
        c.mode = mode;
        let e = experiment(&c, Record::All)?;
        for r in &e.records {
            let rep = &r.estimate.report;
            let label = format!("{mode:?} n={}", r.sweep);
            let sum = rep.m1_sq + rep.m2_sq + rep.m3_sq;
            let parts_ok = (sum - rep.total_sq).abs() <= 1e-12 * rep.total_sq.abs().max(f64::MIN_POSITIVE);
            let opt = optimize_eps(rep.sums, &e.constants).map_err(lib_failure)?;
            let opt_ok = opt.value <= rep.total_sq * (1.0 + 1e-12);
            line(&format!("{label} parts"), parts_ok && opt_ok, format!("M⊕²={} ε-opt {}", sci(rep.total_sq), sci(opt.value)));
            match verify(&label, rep) {
                Ok(()) => line(&format!("{label} bound"), true, format!("I_eff={:.3}", rep.i_eff.unwrap_or(f64::NAN))),
                Err(Failure::Guarantee(s)) => guarantee.push(s),
                Err(f) => line(&format!("{label} bound"), false, f.to_string()),
            }
            rows.push(HistoryRow::new(c.h, c.coarse(), r.sweep, rep));
        }
        if mode == SchwarzMode::Multiplicative {
            let problem = manufactured_lshape_problem();
            let mut sc = SchwarzConfig::new(e.decomp.n_overlapping(), cfg.sweeps);
            sc.schedule = cfg.schedule;
            let u_h = SchwarzSolver::new(&e.mesh, &e.decomp, &problem, sc.clone())
                .and_then(|s| s.discrete_solution())
                .map_err(lib_failure)?;
            let states = run_schwarz(&e.mesh, &e.decomp, &problem, sc).map_err(lib_failure)?;
            let d: Vec<f64> = states.iter().map(|s| discrete_energy_distance(&e.mesh, &problem.a, &u_h, &s.iterate)).collect();
            let mono = d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14);
            line("discrete error monotone", mono, format!("{} → {}", sci(d[0]), sci(d[d.len() - 1])));
        }
    }
    for g in &guarantee {
        println!("FAIL {g}");
    }
    finish(cfg, &rows, &MarkdownTable::history("Invariant suite", &rows))?;
    if !guarantee.is_empty() {
        return Err(Failure::Guarantee(guarantee.join("; ")));
    }
    if !failed.is_empty() {
        return Err(Failure::Solver(anyhow!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}
