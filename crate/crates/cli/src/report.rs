//! Report envelopes and output sinks.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use hypergrass::Field;

use crate::{Common, Failure};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

enum Body {
    Empty,
    Json(Value),
    Csv(Vec<u8>),
}

pub struct Output {
    pub format: Format,
    path: Option<PathBuf>,
    timing: bool,
    meta: Map<String, Value>,
    body: Body,
}

impl Output {
    pub fn new(c: &Common) -> Output {
        Output {
            format: c.format,
            path: c.out.clone(),
            timing: c.timing,
            meta: Map::new(),
            body: Body::Empty,
        }
    }

    pub fn meta_plain(&mut self, command: &str) {
        self.meta.insert(
            "schema".into(),
            json!(format!("hypergrass/{command}/v{SCHEMA_VERSION}")),
        );
        self.meta
            .insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        self.meta.insert("command".into(), json!(command));
    }

    pub fn meta(&mut self, command: &str, f: &Field, seed: Option<u64>, cap: Option<u64>) {
        self.meta_plain(command);
        self.meta.insert("field".into(), json!(f.spec()));
        self.meta.insert("seed".into(), json!(seed));
        self.meta.insert("cap".into(), json!(cap));
    }

    pub fn json(&mut self, v: Value) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Err(Failure::Input("this command only writes JSON".into()));
        }
        self.body = Body::Json(v);
        Ok(())
    }

    pub fn csv(&mut self, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Internal(e.to_string());
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(&r).map_err(io)?;
        }
        self.body = Body::Csv(
            w.into_inner()
                .map_err(|e| Failure::Internal(e.to_string()))?,
        );
        Ok(())
    }

    pub fn flush(&mut self, elapsed: Duration) -> Result<(), Failure> {
        let bytes = match std::mem::replace(&mut self.body, Body::Empty) {
            Body::Empty => return Ok(()),
            Body::Csv(b) => b,
            Body::Json(v) => {
                let mut env = self.meta.clone();
                if self.timing {
                    env.insert("wall_time_s".into(), json!(elapsed.as_secs_f64()));
                }
                env.insert("result".into(), v);
                let mut s = serde_json::to_string_pretty(&Value::Object(env)).unwrap();
                s.push('\n');
                s.into_bytes()
            }
        };
        let res = match &self.path {
            Some(p) => std::fs::write(p, &bytes),
            None => std::io::stdout().write_all(&bytes),
        };
        res.map_err(|e| Failure::Input(format!("cannot write output: {e}")))
    }
}
