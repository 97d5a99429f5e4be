//! Per-iteration metrics as CSV.
//!
//! Floats use Rust's shortest round-trip formatting, so parsing a written
//! file gives back the exact rows.

use std::path::Path;

use psls::MetricsRow;

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "iter,sign_change_frac,convolutions,wall_ms";

pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.iteration, r.sign_change_frac, r.convolutions, r.wall_ms
        ));
    }
    out
}

pub fn write_metrics(rows: &[MetricsRow], path: &Path) -> CliResult<()> {
    std::fs::write(path, to_csv(rows)).map_err(|e| CliError::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<MetricsRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(HEADER) => {}
        other => return Err(format!("bad header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let bad = |what: &str| format!("line {}: bad {what} in {line:?}", i + 2);
            if f.len() != 4 {
                return Err(bad("column count"));
            }
            Ok(MetricsRow {
                iteration: f[0].parse().map_err(|_| bad("iter"))?,
                sign_change_frac: f[1].parse().map_err(|_| bad("sign_change_frac"))?,
                convolutions: f[2].parse().map_err(|_| bad("convolutions"))?,
                wall_ms: f[3].parse().map_err(|_| bad("wall_ms"))?,
            })
        })
        .collect()
}

pub fn read_metrics(path: &Path) -> CliResult<Vec<MetricsRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&text).map_err(|d| CliError::format(path, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_run_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{HEADER}\n"));
    }

    #[test]
    fn three_rows_four_lines() {
        let rows: Vec<MetricsRow> = (1..=3)
            .map(|i| MetricsRow {
                iteration: i,
                sign_change_frac: 0.25 / i as f64,
                convolutions: 2 + 2 * i as u64,
                wall_ms: 1.5,
            })
            .collect();
        let text = to_csv(&rows);
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().nth(1), Some("1,0.25,4,1.5"));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(raw in prop::collection::vec((0.0f64..1.0, 0u64..1_000_000, 0.0f64..1e4), 0..20)) {
            let rows: Vec<MetricsRow> = raw
                .iter()
                .enumerate()
                .map(|(i, &(s, c, w))| MetricsRow { iteration: i + 1, sign_change_frac: s, convolutions: c, wall_ms: w })
                .collect();
            prop_assert_eq!(parse_csv(&to_csv(&rows)).unwrap(), rows);
        }
    }
}
