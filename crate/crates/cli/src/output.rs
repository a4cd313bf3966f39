//! CSV, markdown and legacy VTK writers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::Result;
use ddmcert_core::flux::{BrokenFluxField, CoefficientEntry};
use ddmcert_core::majorant::MajorantReport;
use ddmcert_core::mesh::TriMesh;
use ddmcert_core::problem::ScalarFieldP1;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub h: f64,
    pub coarse_h: f64,
    pub sweep: usize,
    pub m1_sq: f64,
    pub m2_sq: f64,
    pub m3_sq: f64,
    pub total_sq: f64,
    pub error: f64,
    pub i_eff: f64,
}

impl HistoryRow {
    pub fn new(h: f64, coarse_h: f64, sweep: usize, r: &MajorantReport) -> Self {
        HistoryRow {
            h,
            coarse_h,
            sweep,
            m1_sq: r.m1_sq,
            m2_sq: r.m2_sq,
            m3_sq: r.m3_sq,
            total_sq: r.total_sq,
            error: r.energy_error.unwrap_or(f64::NAN),
            i_eff: r.i_eff.unwrap_or(f64::NAN),
        }
    }
}

pub const HISTORY_HEADER: [&str; 9] = ["h", "H", "sweep", "M1_sq", "M2_sq", "M3_sq", "Mplus_sq", "error", "I_eff"];

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?)
}

pub fn write_history(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(HISTORY_HEADER)?;
    for r in rows {
        w.write_record([
            r.h.to_string(),
            r.coarse_h.to_string(),
            r.sweep.to_string(),
            r.m1_sq.to_string(),
            r.m2_sq.to_string(),
            r.m3_sq.to_string(),
            r.total_sq.to_string(),
            r.error.to_string(),
            r.i_eff.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients(path: &Path, entries: &[CoefficientEntry]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["edge", "side", "coefficient"])?;
    for e in entries {
        w.write_record([e.edge.to_string(), e.side.to_string(), e.coefficient.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Three significant digits, `1.23e-4`.
pub fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

/// `1/n` when `x` is the reciprocal of an integer.
pub fn spacing_label(x: f64) -> String {
    let n = (1.0 / x).round();
    if n >= 1.0 && (1.0 / n - x).abs() < 1e-12 {
        if n == 1.0 { "1".into() } else { format!("1/{n}") }
    } else {
        x.to_string()
    }
}

pub struct MarkdownTable {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl MarkdownTable {
    pub fn render(&self) -> String {
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "{}\n", self.title);
        }
        let _ = writeln!(s, "| {} |", self.header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.header.len()));
        for r in &self.rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
        s
    }

    pub fn history(title: &str, rows: &[HistoryRow]) -> Self {
        MarkdownTable {
            title: title.into(),
            header: ["h", "H", "n", "M1²", "M2²", "M3²", "M⊕²", "error", "I_eff"].map(String::from).to_vec(),
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        spacing_label(r.h),
                        spacing_label(r.coarse_h),
                        r.sweep.to_string(),
                        sci(r.m1_sq),
                        sci(r.m2_sq),
                        sci(r.m3_sq),
                        sci(r.total_sq),
                        sci(r.error),
                        format!("{:.2}", r.i_eff),
                    ]
                })
                .collect(),
        }
    }
}

/// Legacy ASCII VTK 2.0: the iterate as point data, the flux and `∇v` as cell averages.
pub fn vtk_string(mesh: &TriMesh, v: &ScalarFieldP1, flux: &BrokenFluxField, title: &str) -> String {
    let nt = mesh.n_triangles();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 2.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{} {} 0", p.x, p.y);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default", mesh.vertices.len());
    for x in &v.values {
        let _ = writeln!(s, "{x}");
    }
    let _ = writeln!(s, "CELL_DATA {nt}\nVECTORS flux double");
    for t in 0..nt {
        let y = flux.cell_average(t);
        let _ = writeln!(s, "{} {} 0", y.x, y.y);
    }
    s.push_str("VECTORS grad_u double\n");
    for t in 0..nt {
        let g = v.gradient(mesh, t);
        let _ = writeln!(s, "{} {} 0", g.x, g.y);
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
