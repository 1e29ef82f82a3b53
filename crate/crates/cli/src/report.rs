use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// Where the expected value of a row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A bound or identity stated with the construction.
    StatedBound,
    /// Computed by an independent oracle or a closed form worked out here.
    Derived,
    /// Holds by construction or by elementary algebra.
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: String,
    /// The module invariant the row exercises.
    pub check: String,
    pub source: Provenance,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub config: Value,
    pub rows: Vec<Row>,
    pub data: Value,
    pub pass: bool,
}

impl Report {
    pub fn new(scenario: &str, config: Value) -> Self {
        Report { schema: SCHEMA, scenario: scenario.to_string(), config, rows: Vec::new(), data: Value::Null, pass: true }
    }

    /// Records `value ≤ bound`.
    pub fn at_most(&mut self, name: &str, check: &str, source: Provenance, value: f64, bound: f64) {
        self.push(name, check, source, value, bound, value <= bound);
    }

    /// Records a boolean outcome as `1 ≤ 1` or `0 ≤ 1`.
    pub fn holds(&mut self, name: &str, check: &str, source: Provenance, ok: bool) {
        self.push(name, check, source, if ok { 1.0 } else { 0.0 }, 1.0, ok);
    }

    fn push(&mut self, name: &str, check: &str, source: Provenance, value: f64, bound: f64, pass: bool) {
        self.pass &= pass;
        self.rows.push(Row { name: name.to_string(), check: check.to_string(), source, value, bound, pass });
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut r in other.rows {
            r.name = format!("{prefix}/{}", r.name);
            self.pass &= r.pass;
            self.rows.push(r);
        }
        if let Value::Object(m) = &mut self.data {
            m.insert(prefix.to_string(), other.data);
        }
    }

    /// Pretty JSON with sorted keys inside `config` and `data`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
