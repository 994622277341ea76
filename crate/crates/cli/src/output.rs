use ptau::report::ResidualReport;
use ptau::xc::float_to_string;
use ptau::XComplex;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A sequence table with its provenance and checks.
#[derive(Debug, Default)]
pub struct Report {
    pub params: BTreeMap<String, String>,
    pub method: String,
    pub digits: u32,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub residuals: BTreeMap<String, f64>,
    pub agreement: BTreeMap<String, Agreement>,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub max_relative_gap: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

pub fn num(z: &XComplex, digits: u32) -> [Value; 2] {
    [Value::String(float_to_string(&z.re, digits as usize)), Value::String(float_to_string(&z.im, digits as usize))]
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

impl Report {
    pub fn new(method: &str, digits: u32, columns: &[&str]) -> Self {
        Self {
            method: method.into(),
            digits,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            converged: true,
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    pub fn row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Keeps the worst value per identity name.
    pub fn absorb(&mut self, rep: &ResidualReport) {
        for it in &rep.items {
            let e = self.residuals.entry(it.name.clone()).or_insert(0.0);
            if !(it.value <= *e) {
                *e = it.value;
            }
        }
    }

    pub fn disagreements(&self) -> Vec<String> {
        self.agreement
            .iter()
            .filter(|(_, a)| !a.agrees)
            .map(|(m, a)| format!("{m}: {:.2e} > {:.0e}", a.max_relative_gap, a.tolerance))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> =
            self.rows.iter().map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>())).collect();
        let residuals: Map<String, Value> = self.residuals.iter().map(|(k, v)| (k.clone(), finite(*v))).collect();
        let mut diag = json!({ "residuals": residuals, "converged": self.converged });
        if !self.agreement.is_empty() {
            let ag: Map<String, Value> = self
                .agreement
                .iter()
                .map(|(k, a)| {
                    (k.clone(), json!({ "max_relative_gap": finite(a.max_relative_gap), "tolerance": a.tolerance, "agrees": a.agrees }))
                })
                .collect();
            diag["agreement"] = Value::Object(ag);
        }
        json!({
            "meta": { "params": self.params, "method": self.method, "digits": self.digits },
            "rows": rows,
            "diagnostics": diag,
        })
    }

    fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    /// Short human summary of the diagnostics block.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.residuals {
            s.push_str(&format!("residual {k}: {v:.2e}\n"));
        }
        for (k, a) in &self.agreement {
            s.push_str(&format!(
                "agreement {k}: {:.2e} (tol {:.0e}) {}\n",
                a.max_relative_gap,
                a.tolerance,
                if a.agrees { "ok" } else { "FAIL" }
            ));
        }
        s.push_str(&format!("converged: {}\n", self.converged));
        s
    }

    pub fn write(&self, format: Format, output: Option<&Path>) -> std::io::Result<()> {
        let bytes = match format {
            Format::Json => {
                let mut b = serde_json::to_vec_pretty(&self.to_json()).map_err(std::io::Error::other)?;
                b.push(b'\n');
                b
            }
            Format::Csv => {
                eprint!("{}", self.summary());
                self.to_csv()?
            }
        };
        match output {
            Some(p) => std::fs::write(p, bytes),
            None => std::io::stdout().lock().write_all(&bytes),
        }
    }
}
