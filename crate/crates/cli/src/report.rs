//! Report documents: structure, number rendering, self-validation, text and JSON output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use jointeig::rng::RNG_ALGORITHM_ID;
use jointeig::{Ket, C64};
use serde::Serialize;
use serde_json::Value;

/// Bumped whenever the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Allowed deviation of a probability column sum from 1.
pub const SUM_TOL: f64 = 1e-9;
/// Magnitudes below this render as 0.
pub const SNAP_TOL: f64 = 1e-12;

/// Rounds to 12 significant digits, snapping tiny values and −0 to 0.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x.abs() < SNAP_TOL {
        return 0.0;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map(Value::Number).unwrap_or(Value::Null)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

pub fn complex_text(z: C64) -> String {
    let re = round12(z.re);
    let im = round12(z.im);
    let fmt = |x: f64| num(x).to_string();
    match (re == 0.0, im == 0.0) {
        (_, true) => fmt(re),
        (true, false) => format!("{}i", fmt(im)),
        (false, false) if im > 0.0 => format!("{}+{}i", fmt(re), fmt(im)),
        (false, false) => format!("{}{}i", fmt(re), fmt(im)),
    }
}

/// Nonzero amplitudes as `c|label⟩` terms joined by spaces.
pub fn ket_text(k: &Ket) -> String {
    let n = k.nparticles();
    let terms: Vec<String> = k
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| round12(a.re) != 0.0 || round12(a.im) != 0.0)
        .map(|(i, a)| format!("({})|{}>", complex_text(*a), Ket::basis_label(i, n)))
        .collect();
    terms.join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityCheck {
    pub column: String,
    pub sum_to_one: bool,
    /// Columns that partition the rows; each partition sums to 1 separately.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub group_by: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<ProbabilityCheck>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), probability: None }
    }

    /// Values in `column` must lie in [0, 1]; with `sum_to_one` they must also sum to 1.
    pub fn probabilities(mut self, column: &str, sum_to_one: bool) -> Self {
        self.probability = Some(ProbabilityCheck { column: column.into(), sum_to_one, group_by: Vec::new() });
        self
    }

    pub fn grouped_by(mut self, columns: &[&str]) -> Self {
        if let Some(p) = self.probability.as_mut() {
            p.group_by = columns.iter().map(|c| c.to_string()).collect();
        }
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn column_index(&self, name: &str) -> Result<usize, String> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| format!("table {}: no column {name}", self.name))
    }

    pub fn validate(&self) -> Result<(), String> {
        let Some(check) = &self.probability else { return Ok(()) };
        let col = self.column_index(&check.column)?;
        let keys: Vec<usize> = check.group_by.iter().map(|g| self.column_index(g)).collect::<Result<_, _>>()?;
        let mut sums: BTreeMap<String, f64> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            let p = row[col].as_f64().ok_or_else(|| format!("table {}: row {r} has no probability", self.name))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("table {}: row {r} probability {p} outside [0, 1]", self.name));
            }
            let key = keys.iter().map(|&k| row[k].to_string()).collect::<Vec<_>>().join("/");
            *sums.entry(key).or_default() += p;
        }
        if check.sum_to_one {
            for (key, s) in &sums {
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(format!("table {} group '{key}': probabilities sum to {s}", self.name));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefusalSection {
    pub semantics: String,
    pub reason: String,
    pub attempted_observables: Vec<String>,
    pub counterexample_note: String,
    pub counterexample: Table,
    pub order_dependence: BTreeMap<String, Value>,
    pub nearest_experiment_note: String,
    pub nearest_experiment: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub artifact_version: String,
    pub rng_algorithm: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantics: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    pub diagnostics: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<RefusalSection>,
}

impl ReportDocument {
    pub fn new(scenario: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.into(),
            rng_algorithm: RNG_ALGORITHM_ID.into(),
            scenario: scenario.into(),
            semantics: None,
            parameters: BTreeMap::new(),
            tables: Vec::new(),
            diagnostics: BTreeMap::new(),
            refusal: None,
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.parameters.insert(key.into(), value);
    }

    pub fn diag(&mut self, key: &str, value: Value) {
        self.diagnostics.insert(key.into(), value);
    }

    pub fn validate(&self) -> Result<(), String> {
        for t in &self.tables {
            t.validate()?;
        }
        if let Some(r) = &self.refusal {
            r.counterexample.validate()?;
            r.nearest_experiment.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        if let Some(sem) = &self.semantics {
            let _ = writeln!(out, "semantics: {sem}");
        }
        let _ = writeln!(out, "artifact version: {}", self.artifact_version);
        let _ = writeln!(out, "schema version: {}", self.schema_version);
        let _ = writeln!(out, "rng: {}", self.rng_algorithm);
        section_map(&mut out, "parameters", &self.parameters);
        for t in &self.tables {
            render_table(&mut out, t, "");
        }
        section_map(&mut out, "diagnostics", &self.diagnostics);
        if let Some(r) = &self.refusal {
            let _ = writeln!(out, "\nrefusal ({})", r.semantics);
            let _ = writeln!(out, "  reason: {}", r.reason);
            let _ = writeln!(out, "  attempted observables: {}", r.attempted_observables.join("; "));
            let _ = writeln!(out, "  counterexample: {}", r.counterexample_note);
            render_table(&mut out, &r.counterexample, "  ");
            let _ = writeln!(out, "\n  order dependence");
            for (k, v) in &r.order_dependence {
                let _ = writeln!(out, "    {k}: {}", cell_text(v));
            }
            let _ = writeln!(out, "\n  nearest experiment: {}", r.nearest_experiment_note);
            render_table(&mut out, &r.nearest_experiment, "  ");
        }
        out
    }
}

pub fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(cell_text).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn section_map(out: &mut String, title: &str, map: &BTreeMap<String, Value>) {
    if map.is_empty() {
        return;
    }
    let _ = writeln!(out, "\n{title}");
    for (k, v) in map {
        let _ = writeln!(out, "  {k}: {}", cell_text(v));
    }
}

fn render_table(out: &mut String, t: &Table, indent: &str) {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect();
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|c| cells.iter().map(|r| r[c].chars().count()).chain([t.columns[c].chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "\n{indent}table {}", t.name);
    let _ = writeln!(out, "{indent}  {}", line(t.columns.iter().map(|s| s.as_str()).collect()));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{indent}  {}", line(rule.iter().map(|s| s.as_str()).collect()));
    for row in &cells {
        let _ = writeln!(out, "{indent}  {}", line(row.iter().map(|s| s.as_str()).collect()));
    }
}
