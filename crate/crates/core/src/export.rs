//! Plain CSV tables and JSON sidecars.
//!
//! Numbers are written with 17 significant digits in exponent form, which
//! round-trips every `f64` and does not depend on the locale.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::decoherence::DecayCurveRow;
use crate::probe::RevivalTrace;
use crate::protocol::FringeSample;
use crate::wigner::PhaseSpaceGrid;

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let file = fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)?;
        w.flush()
    }
}

/// `x,p,W`, one line per grid point, x outer.
pub fn grid_table(g: &PhaseSpaceGrid) -> Table {
    let mut t = Table::new(&["x", "p", "W"]);
    for i in 0..g.spec.nx {
        for j in 0..g.spec.np {
            t.push(vec![g.spec.x(i), g.spec.p(j), g.value(i, j)]);
        }
    }
    t
}

/// `theta1,theta2,P`.
pub fn fringe_table(scan: &[FringeSample]) -> Table {
    let mut t = Table::new(&["theta1", "theta2", "P"]);
    for s in scan {
        t.push(vec![s.theta1, s.theta2, s.p]);
    }
    t
}

/// `kappa_t,coherence_factor,purity,negativity_volume`.
pub fn decay_table(rows: &[DecayCurveRow]) -> Table {
    let mut t = Table::new(&["kappa_t", "coherence_factor", "purity", "negativity_volume"]);
    for r in rows {
        t.push(vec![
            r.kappa_t,
            r.coherence_factor,
            r.purity,
            r.negativity_volume,
        ]);
    }
    t
}

/// `gt,P_gg,P_ge`.
pub fn trace_table(trace: &RevivalTrace) -> Table {
    let mut t = Table::new(&["gt", "P_gg", "P_ge"]);
    for (&time, &p) in trace.times.iter().zip(&trace.p_gg) {
        t.push(vec![trace.g * time, p, 1.0 - p]);
    }
    t
}

/// `foo.csv` -> `foo.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::GridSpec;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            -0.0,
            1.0 / 3.0,
            6.02214076e23,
            -2.5e-310,
            std::f64::consts::PI,
        ] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let g = PhaseSpaceGrid {
            spec: GridSpec::square(1.0, 2),
            values: vec![1.0, 2.0, 3.0, 4.0],
            state_label: "t".into(),
        };
        let text = grid_table(&g).to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,p,W");
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[2],
            "-1.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0"
        );
    }

    #[test]
    fn files_and_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("scan.csv");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 2.0]);
        t.save(&csv).unwrap();
        let json = sidecar_path(&csv);
        assert_eq!(json.file_name().unwrap(), "scan.json");
        write_json(&json, &serde_json::json!({"alpha": 1.0})).unwrap();
        let back: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(back["alpha"], 1.0);
        assert_eq!(fs::read_to_string(&csv).unwrap(), t.to_csv_string());
    }
}
