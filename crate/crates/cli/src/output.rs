use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use finplane::verify::Tolerances;
use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL: &str = "finplane";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run parameters recorded at the top of every output file.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub q: String,
    pub delta: String,
    pub a: String,
    pub a_rule: String,
    pub tolerances: Tolerances,
}

impl Provenance {
    pub fn comment_lines(&self) -> Vec<String> {
        let tol = serde_json::to_value(self.tolerances).expect("plain struct");
        let tol: Vec<String> = tol
            .as_object()
            .expect("struct serializes to object")
            .iter()
            .map(|(k, v)| format!("{k}={}", num(v.as_f64().unwrap_or(f64::NAN))))
            .collect();
        vec![
            format!("# {} {} {}", self.tool, self.version, self.command),
            format!("# q={} delta={} a={} aRule={}", self.q, self.delta, self.a, self.a_rule),
            format!("# tolerances: {}", tol.join(" ")),
        ]
    }
}

/// Twelve significant digits, plain decimal notation.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{}", rounded + 0.0)
}

fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_csv(out: Option<&Path>, prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = open(out)?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for r in rows {
        csv.write_record(r)?;
    }
    csv.flush()?;
    Ok(())
}

/// Serializes `body` with a `provenance` field added at the top level.
pub fn write_json<T: Serialize>(out: Option<&Path>, prov: &Provenance, body: &T) -> Result<()> {
    let mut obj = match serde_json::to_value(body)? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("results".into(), other);
            m
        }
    };
    obj.insert("provenance".into(), serde_json::to_value(prov)?);
    let mut w = open(out)?;
    serde_json::to_writer_pretty(&mut w, &Value::Object(obj))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
