//! Result serialisation shared by the CLI and the demo.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::TailEstimate;

pub const SCHEMA: &str = "sirtail-v1";

pub const CSV_HEADER: [&str; 7] = ["theta", "p_hat", "stderr", "n", "scaled_unbounded", "scaled_bounded", "h_used"];

/// Reals that may be infinite or NaN, written as `"inf"`, `"-inf"` or `"nan"`
/// in JSON.
pub mod ext_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("expected a number, 'inf', '-inf' or 'nan', got '{other}'"))),
            },
        }
    }

    /// The same for `Option<f64>`.
    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema: &'a str,
    config: &'a C,
    result: &'a R,
}

/// `{"schema": "sirtail-v1", "config": …, "result": …}`.
pub fn to_json<C: Serialize, R: Serialize>(config: &C, result: &R) -> Result<String> {
    serde_json::to_string_pretty(&Envelope { schema: SCHEMA, config, result })
        .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("CSV output failed: {e}"))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Tail estimates as CSV, preceded by a `# sirtail-v1 config=<json>` line.
pub fn write_tail_csv<W: Write, C: Serialize>(out: W, config: &C, rows: &[TailEstimate]) -> Result<()> {
    let mut out = out;
    let cfg = serde_json::to_string(config).map_err(csv_err)?;
    writeln!(out, "# {SCHEMA} config={cfg}").map_err(csv_err)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.theta.to_string(),
            r.p_hat.to_string(),
            r.stderr.to_string(),
            r.n.to_string(),
            r.scaled_unbounded.to_string(),
            fmt_opt(r.scaled_bounded),
            r.h_used.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}
