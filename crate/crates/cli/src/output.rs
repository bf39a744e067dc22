//! CSV and JSON emission.

use std::fmt::Write as _;

use hetbell::montecarlo::{RunConfig, TableRow};
use serde::Serialize;
use serde_json::{Map, Value};

pub const CSV_HEADER: &str = "rounds,x_rate,z_rate,merged_rate,ineff,kq,n_1q,n_2q,\
x_ci_lo,x_ci_hi,z_ci_lo,z_ci_hi,merged_ci_lo,merged_ci_hi";

/// A row flattened to the CSV column names.
#[derive(Debug, Clone, Serialize)]
pub struct FlatRow {
    pub rounds: usize,
    pub x_rate: f64,
    pub z_rate: f64,
    pub merged_rate: f64,
    pub ineff: f64,
    pub kq: f64,
    pub n_1q: f64,
    pub n_2q: f64,
    pub x_ci_lo: f64,
    pub x_ci_hi: f64,
    pub z_ci_lo: f64,
    pub z_ci_hi: f64,
    pub merged_ci_lo: f64,
    pub merged_ci_hi: f64,
}

impl From<&TableRow> for FlatRow {
    fn from(r: &TableRow) -> Self {
        FlatRow {
            rounds: r.rounds,
            x_rate: r.x_rate,
            z_rate: r.z_rate,
            merged_rate: r.merged_rate,
            ineff: r.ineff,
            kq: r.kq,
            n_1q: r.n_1q,
            n_2q: r.n_2q,
            x_ci_lo: r.x_ci.lo,
            x_ci_hi: r.x_ci.hi,
            z_ci_lo: r.z_ci.lo,
            z_ci_hi: r.z_ci.hi,
            merged_ci_lo: r.merged_ci.lo,
            merged_ci_hi: r.merged_ci.hi,
        }
    }
}

impl FlatRow {
    fn csv_line(&self) -> String {
        let v = [
            self.x_rate,
            self.z_rate,
            self.merged_rate,
            self.ineff,
            self.kq,
            self.n_1q,
            self.n_2q,
            self.x_ci_lo,
            self.x_ci_hi,
            self.z_ci_lo,
            self.z_ci_hi,
            self.merged_ci_lo,
            self.merged_ci_hi,
        ];
        let mut s = self.rounds.to_string();
        for x in v {
            let _ = write!(s, ",{x}");
        }
        s
    }
}

/// Ordered `key=value` pairs describing how a result was produced.
#[derive(Debug, Clone, Default)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, k: &str, v: impl ToString) {
        self.0.push((k.to_string(), v.to_string()));
    }

    /// Everything needed to rerun `cfg` except the rounds value.
    pub fn for_config(cfg: &RunConfig, seed_source: &str) -> Self {
        let mut m = Metadata::default();
        m.push("tool", concat!("hetbell ", env!("CARGO_PKG_VERSION")));
        m.push("scheme", cfg.scheme);
        m.push("code-a", cfg.code_a);
        m.push("code-b", cfg.code_b);
        m.push("p", cfg.p);
        m.push("trials", cfg.trials);
        m.push("seed", cfg.seed);
        m.push("seed-source", seed_source);
        m.push("postselect", kebab(&cfg.postselect));
        m.push("basis-order", kebab(&cfg.basis_order));
        m.push("measurement-noise", kebab(&cfg.measurement_noise));
        let w = cfg.source.weights();
        m.push("source-weights", format!("{} {} {} {}", w[0], w[1], w[2], w[3]));
        m.push("kq-budget-steane", cfg.kq_budget_steane);
        m.push("kq-budget-surface", cfg.kq_budget_surface);
        m
    }

    fn comment_block(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    fn to_json(&self) -> Value {
        Value::Object(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect::<Map<_, _>>(),
        )
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

pub fn rows_csv(meta: &Metadata, rows: &[TableRow]) -> String {
    let mut out = meta.comment_block();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&FlatRow::from(r).csv_line());
        out.push('\n');
    }
    out
}

pub fn rows_json(meta: &Metadata, rows: &[TableRow]) -> String {
    let rows: Vec<FlatRow> = rows.iter().map(FlatRow::from).collect();
    let doc = serde_json::json!({ "metadata": meta.to_json(), "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hetbell::montecarlo::{Interval, TableRow};

    fn row() -> TableRow {
        TableRow {
            rounds: 2,
            trials: 10,
            x_rate: 0.1,
            z_rate: 0.2,
            merged_rate: 0.25,
            ineff: 6.5,
            kq: 10.0,
            n_1q: 3.0,
            n_2q: 4.0,
            x_ci: Interval { lo: 0.01, hi: 0.3 },
            z_ci: Interval { lo: 0.02, hi: 0.4 },
            merged_ci: Interval { lo: 0.03, hi: 0.5 },
        }
    }

    #[test]
    fn csv_layout() {
        let mut m = Metadata::default();
        m.push("seed", 7);
        let text = rows_csv(&m, &[row()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=7");
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2], "2,0.1,0.2,0.25,6.5,10,3,4,0.01,0.3,0.02,0.4,0.03,0.5");
    }

    #[test]
    fn json_uses_csv_names() {
        let text = rows_json(&Metadata::default(), &[row()]);
        let v: Value = serde_json::from_str(&text).unwrap();
        let obj = v["rows"][0].as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = CSV_HEADER.split(',').collect();
        let mut got = keys.clone();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }
}
