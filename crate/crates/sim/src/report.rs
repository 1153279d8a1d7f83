//! Closed-form complexity report for a list of constellation sizes.

use anyhow::Result;
use sisodet::{predicted_counts, ComplexityEstimate, DetectorKind};

use crate::csv::CsvTable;

pub fn run_complexity(
    orders: &[usize],
    receive_antennas: usize,
) -> Result<Vec<ComplexityEstimate>> {
    let mut out = Vec::new();
    for &m in orders {
        for kind in DetectorKind::ALL {
            out.push(predicted_counts(kind, m, receive_antennas)?);
        }
    }
    Ok(out)
}

pub fn complexity_csv(rows: &[ComplexityEstimate]) -> String {
    let mut t = CsvTable::new(&["kind", "M", "Nr", "metrics", "muls", "adds"]);
    for r in rows {
        t.row(vec![
            r.kind.name().to_string(),
            r.order.to_string(),
            r.receive_antennas.to_string(),
            r.metrics.to_string(),
            r.real_muls.to_string(),
            r.real_adds.to_string(),
        ]);
    }
    t.finish()
}

pub fn complexity_table(rows: &[ComplexityEstimate]) -> String {
    let mut out = format!(
        "{:<10} {:>6} {:>3} {:>14} {:>16} {:>16}\n",
        "detector", "M", "Nr", "metrics", "real mults", "real adds"
    );
    out.push_str(&"-".repeat(70));
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>6} {:>3} {:>14} {:>16} {:>16}\n",
            r.kind.name(),
            r.order,
            r.receive_antennas,
            r.metrics,
            r.real_muls,
            r.real_adds
        ));
    }
    out
}
