use std::io::Write;
use std::time::Duration;

use serde::Serializer;

use super::Solution;
use crate::error::Result;
use crate::scalar::Scalar;

/// Writes `index,u` rows with a header.
pub fn write_solution_csv<T: Scalar, W: Write>(u: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "u"])?;
    for (i, v) in u.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| crate::Error::io("<csv>", e))?;
    Ok(())
}

/// Key-value summary of a solve (iterations, residual, gradient, bounds) as JSON.
pub fn diagnostics_json<T: Scalar>(sol: &Solution<T>) -> String {
    let d = &sol.diagnostics;
    let v = serde_json::json!({
        "iterations": sol.iterations,
        "converged": sol.converged,
        "final_residual": sol.final_residual.as_f64(),
        "elapsed_secs": sol.elapsed.as_secs_f64(),
        "max_gradient": d.max_gradient.as_f64(),
        "min_u": d.min_u.as_f64(),
        "max_u": d.max_u.as_f64(),
        "isolated_vertices": d.isolated,
    });
    serde_json::to_string_pretty(&v).expect("json values serialize")
}

pub(super) fn duration_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}
