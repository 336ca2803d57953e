//! CSV reports. Each file starts with `# key=value` comment lines echoing
//! the resolved configuration, then a header row. Floats are written in
//! shortest round-trip decimal form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::analysis::EstimateReport;
use crate::error::Result;
use crate::resonance::counting::CountingReport;
use crate::resonance::table::TriadTable;
use crate::solver::{OmegaRow, TrajectoryRecord, UniquenessReport};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:?}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

/// A table with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row does not match the schema");
        self.rows.push(row);
    }
}

/// Writes `comments` as `# ` lines followed by the CSV table.
pub fn emit_report(report: &Report, comments: &[String], path: &Path) -> Result<()> {
    let mut file = File::create(path)?;
    for c in comments {
        writeln!(file, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

pub const TRAJECTORY_COLUMNS: [&str; 4] = ["t", "l2", "h1", "residual"];

/// Columns `t, l2, h1, residual`; `h1` is `||grad u||_{L^2}`.
pub fn trajectory_report(rec: &TrajectoryRecord) -> Report {
    let mut r = Report::new(&TRAJECTORY_COLUMNS);
    for i in 0..rec.times.len() {
        r.push(vec![rec.times[i].into(), rec.l2[i].into(), rec.h1[i].into(), rec.residual[i].into()]);
    }
    r
}

pub const TRIAD_COLUMNS: [&str; 16] = [
    "k1", "k2", "k3", "m1", "m2", "m3", "n1", "n2", "n3", "s1", "s2", "s3", "coeff_re", "coeff_im", "phase_rate",
    "resonant",
];

/// One row per stored interaction `(k, s1) + (m, s2) -> (n, s3)`.
pub fn triad_report(table: &TriadTable) -> Report {
    let mut r = Report::new(&TRIAD_COLUMNS);
    for t in table.triads() {
        let mut row: Vec<Cell> = Vec::with_capacity(16);
        for v in [t.k, t.m, t.n] {
            row.extend(v.0.iter().map(|c| Cell::I(*c)));
        }
        for s in [t.s1, t.s2, t.s3] {
            row.push(Cell::I(s.sign()));
        }
        row.push(t.coeff.re.into());
        row.push(t.coeff.im.into());
        row.push(t.phase_rate.value.into());
        row.push(Cell::I(t.phase_rate.exactly_zero as i64));
        r.push(row);
    }
    r
}

pub fn counting_report(reports: &[CountingReport]) -> Report {
    let mut r = Report::new(&[
        "shell",
        "search_radius",
        "sup",
        "sup_over_2i",
        "argmax_n1",
        "argmax_n2",
        "argmax_n3",
        "planar",
        "one_flat",
        "generic",
        "certificate_failures",
    ]);
    for c in reports {
        r.push(vec![
            Cell::I(c.shell.0 as i64),
            Cell::I(c.search_radius as i64),
            c.sup_value.into(),
            c.normalized().into(),
            Cell::I(c.argmax_n.0[0]),
            Cell::I(c.argmax_n.0[1]),
            Cell::I(c.argmax_n.0[2]),
            Cell::I(c.cases.planar as i64),
            Cell::I(c.cases.one_flat as i64),
            Cell::I(c.cases.generic as i64),
            Cell::I(c.cases.certificate_failures as i64),
        ]);
    }
    r
}

/// One row per sample: `estimate, radius, seed, sample, ratio`.
pub fn estimate_report(reports: &[EstimateReport]) -> Report {
    let mut r = Report::new(&["estimate", "radius", "seed", "sample", "ratio"]);
    for e in reports {
        for (j, x) in e.ratios.iter().enumerate() {
            r.push(vec![
                e.estimate.as_str().into(),
                Cell::I(e.radius as i64),
                Cell::I(e.seed as i64),
                Cell::I(j as i64),
                (*x).into(),
            ]);
        }
    }
    r
}

pub fn omega_report(rows: &[OmegaRow]) -> Report {
    let mut r = Report::new(&["omega", "dt", "difference"]);
    for row in rows {
        r.push(vec![row.omega.into(), row.dt.into(), row.difference.into()]);
    }
    r
}

pub fn uniqueness_report(rep: &UniquenessReport) -> Report {
    let mut r = Report::new(&["t", "w_l2", "energy_rate", "energy_rate_fd", "bound", "identity_defect"]);
    for s in &rep.samples {
        r.push(vec![
            s.t.into(),
            s.w_l2.into(),
            s.energy_rate.into(),
            s.energy_rate_fd.into(),
            s.bound.into(),
            s.identity_defect.into(),
        ]);
    }
    r
}
