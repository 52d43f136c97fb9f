use std::fs;
use std::path::Path;

use super::DiagnosticsRecord;

pub const CSV_HEADER: &str = "step,t,dt,max_phi_t,min_phi_t,osc_phi,max_lap,maxQ,f,D,f_fd,M,residual,b";

fn fields(r: &DiagnosticsRecord) -> [f64; 13] {
    [r.t, r.dt, r.max_phi_t, r.min_phi_t, r.osc_phi, r.max_lap, r.max_q, r.f, r.d, r.f_fd, r.m, r.residual, r.b]
}

/// One data line, newline included, 17 significant digits.
pub fn render_row(r: &DiagnosticsRecord) -> String {
    let mut out = r.step.to_string();
    for v in fields(r) {
        out.push_str(&format!(",{v:.16e}"));
    }
    out.push('\n');
    out
}

/// One header line plus one line per record.
pub fn render_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&render_row(r));
    }
    out
}

pub fn write_csv(path: &Path, records: &[DiagnosticsRecord]) -> std::io::Result<()> {
    fs::write(path, render_csv(records))
}

pub fn parse_csv(text: &str) -> Result<Vec<DiagnosticsRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 14 {
                return Err(format!("expected 14 columns, got {}", cols.len()));
            }
            let step = cols[0].parse::<u64>().map_err(|e| e.to_string())?;
            let v = cols[1..]
                .iter()
                .map(|c| c.parse::<f64>().map_err(|e| format!("{c}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DiagnosticsRecord {
                step,
                t: v[0],
                dt: v[1],
                max_phi_t: v[2],
                min_phi_t: v[3],
                osc_phi: v[4],
                max_lap: v[5],
                max_q: v[6],
                f: v[7],
                d: v[8],
                f_fd: v[9],
                m: v[10],
                residual: v[11],
                b: v[12],
            })
        })
        .collect()
}
