use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

/// A finished experiment: one CSV table and a JSON summary.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Map<String, Value>,
    /// Experiment-level failure (exit status 1); the files are still written.
    pub failed: bool,
}

impl Report {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(header: I) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn set<V: Into<Value>>(&mut self, key: &str, value: V) {
        self.summary.insert(key.to_string(), value.into());
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names `prefix_0 … prefix_{n−1}`.
pub fn columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}_{k}")).collect()
}

pub fn cells(v: &[f64]) -> Vec<String> {
    v.iter().map(|&x| num(x)).collect()
}

/// JSON summary with the experiment name, library version and resolved config.
pub fn summary_json(experiment: &str, config: &Value, status: &str, extra: &Map<String, Value>) -> Value {
    let mut v = json!({
        "experiment": experiment,
        "version": koba_core::VERSION,
        "status": status,
        "config": config,
    });
    let obj = v.as_object_mut().expect("object literal");
    for (k, x) in extra {
        obj.insert(k.clone(), x.clone());
    }
    v
}

/// Writes the CSV to `out` and the summary beside it with extension `.json`,
/// or the CSV to stdout and the summary to stderr.
pub fn emit(report: &Report, summary: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(summary).expect("JSON values serialize");
    match out {
        Some(path) => {
            write_csv(std::fs::File::create(path)?, report)?;
            std::fs::write(path.with_extension("json"), text + "\n")
        }
        None => {
            write_csv(std::io::stdout().lock(), report)?;
            writeln!(std::io::stderr().lock(), "{text}")
        }
    }
}

fn write_csv<W: Write>(w: W, report: &Report) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&report.header)?;
    for row in &report.rows {
        csv.write_record(row)?;
    }
    csv.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [1.0 / 3.0, std::f64::consts::LN_2, 1e-300, -2.5e17, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0 / std::f64::consts::LN_2), "1.4426950408889634e0");
    }

    #[test]
    fn files_are_written_side_by_side() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        let mut r = Report::new(["a", "b"]);
        r.row(vec![num(1.0), "x".into()]);
        let s = summary_json("dini", &json!({}), "ok", &r.summary);
        emit(&r, &s, Some(&out)).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "a,b\n1.0000000000000000e0,x\n");
        let j: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
        assert_eq!(j["version"], koba_core::VERSION);
    }
}
