//! Report envelope and plot tables.

use std::fs;
use std::path::Path;

use delay_margin::walton_marshall::CrossingEvent;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys are sorted (serde_json maps are ordered), so the text form is a
/// function of the contents alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical input and effective configuration.
    pub fingerprint: String,
    pub input: Value,
    pub config: Value,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(
        command: &str,
        input: Value,
        config: Value,
        result: Value,
        warnings: Vec<String>,
    ) -> Self {
        let canonical =
            json!({ "version": VERSION, "command": command, "input": input, "config": config });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        let fingerprint = digest.iter().map(|b| format!("{b:02x}")).collect();
        Report {
            version: VERSION.into(),
            command: command.into(),
            fingerprint,
            input,
            config,
            result,
            warnings,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct EventRow {
    lambda_re: f64,
    lambda_im: f64,
    omega: f64,
    h: f64,
    direction: i8,
    degenerate: bool,
}

#[derive(Serialize)]
struct NormRow {
    omega: f64,
    norm: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

/// Tables for external plotting.
#[derive(Debug, Default)]
pub struct Tables {
    pub events: Option<Vec<CrossingEvent>>,
    pub norm_grid: Option<Vec<(f64, f64)>>,
}

impl Tables {
    pub fn write(&self, dir: &Path) -> Result<(), String> {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        if let Some(ev) = &self.events {
            write_rows(
                &dir.join("events.csv"),
                ev.iter().map(|e| EventRow {
                    lambda_re: e.lambda.re,
                    lambda_im: e.lambda.im,
                    omega: e.omega,
                    h: e.h,
                    direction: e.direction,
                    degenerate: e.degenerate,
                }),
            )?;
        }
        if let Some(g) = &self.norm_grid {
            write_rows(
                &dir.join("norm_grid.csv"),
                g.iter().map(|&(omega, norm)| NormRow { omega, norm }),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trips() {
        let r = Report::new(
            "margin",
            json!({"p": [0.1, 1e-17]}),
            json!({"tol": 1e-9}),
            json!({"margin": 0.7853981633974483, "inf": null}),
            vec!["note".into()],
        );
        let text = r.to_text();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn fingerprint_tracks_config() {
        let a = Report::new(
            "margin",
            json!({}),
            json!({"tol": 1e-9}),
            Value::Null,
            vec![],
        );
        let b = Report::new(
            "margin",
            json!({}),
            json!({"tol": 1e-8}),
            Value::Null,
            vec![],
        );
        assert_eq!(a.fingerprint.len(), 64);
        assert_ne!(a.fingerprint, b.fingerprint);
    }
}
