//! Solver traces as CSV.
//!
//! Header `iter,objective,normalized_error,psnr,primal_residual,dual_residual`,
//! one row per record, LF line endings, no quoting. Floats use Rust's
//! shortest round-trip formatting (`1` for 1.0, `inf` for infinity).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use tvadal_core::TraceRecord;

pub const HEADER: &str = "iter,objective,normalized_error,psnr,primal_residual,dual_residual";

pub fn format_trace_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iter, r.objective, r.normalized_error, r.psnr, r.primal_residual, r.dual_residual
        );
    }
    out
}

pub fn write_trace_csv(records: &[TraceRecord], path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, format_trace_csv(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iter: usize) -> TraceRecord {
        TraceRecord {
            iter,
            objective: 1.5,
            normalized_error: 0.2,
            psnr: 22.1,
            primal_residual: 1.0,
            dual_residual: 0.0,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        assert_eq!(format_trace_csv(&[]), format!("{HEADER}\n"));
    }

    #[test]
    fn one_record() {
        assert_eq!(format_trace_csv(&[rec(0)]), format!("{HEADER}\n0,1.5,0.2,22.1,1,0\n"));
    }

    #[test]
    fn two_records_three_lines() {
        let s = format_trace_csv(&[rec(1), rec(2)]);
        assert_eq!(s.lines().count(), 3);
        assert!(!s.contains('\r'));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("trace.csv");
        assert!(write_trace_csv(&[rec(1)], path).is_err());
    }
}
