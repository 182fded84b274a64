//! Units, tolerance overrides, run metadata and writers.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chanent::io::fmt_f64;
use chanent::tol;
use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum LogBase {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    /// Converts a quantity computed in nats.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        }
    }
}

/// Named tolerances for one command, overridable with `--tol k=v,...`.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn new(defaults: &[(&str, f64)], overrides: Option<&str>) -> CliResult<Self> {
        let mut map: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let known: Vec<String> = map.keys().cloned().collect();
        for item in overrides.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("tolerance \"{item}\" is not of the form key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("tolerance \"{k}\" has non-numeric value \"{v}\"")))?;
            match map.get_mut(k.trim()) {
                Some(slot) => *slot = v,
                None => {
                    return Err(CliError::input(format!(
                        "unknown tolerance \"{k}\" for this command (known: {})",
                        if known.is_empty() { "none".to_string() } else { known.join(", ") }
                    )))
                }
            }
        }
        // fixed numerical thresholds, recorded but not overridable
        map.insert("eps_eig".into(), tol::EPS_EIG);
        map.insert("cptp".into(), tol::CPTP);
        Ok(Self(map))
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub log_base: LogBase,
    pub tolerances: Tolerances,
    /// Command-specific settings such as dimensions and trial counts.
    pub settings: BTreeMap<String, String>,
}

impl Meta {
    pub fn new(command: &str, seed: u64, log_base: LogBase, tolerances: Tolerances) -> Self {
        Self {
            tool: "chanent",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            log_base,
            tolerances,
            settings: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.settings.insert(key.to_string(), value.to_string());
    }

    /// Single `#`-prefixed line of `key=value` pairs.
    fn csv_comment(&self) -> String {
        let mut parts = vec![
            format!("tool={}", self.tool),
            format!("version={}", self.version),
            format!("command={}", self.command),
            format!("seed={}", self.seed),
            format!("log_base={}", self.log_base.tag()),
        ];
        parts.extend(self.tolerances.0.iter().map(|(k, v)| format!("tol.{k}={v:e}")));
        parts.extend(self.settings.iter().map(|(k, v)| format!("{k}={v}")));
        format!("# {}\n", parts.join(" "))
    }
}

/// Table with a metadata comment line and a fixed header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, meta: &Meta) -> CliResult<Vec<u8>> {
        let mut buf = meta.csv_comment().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }
}

pub fn num(x: f64) -> String {
    fmt_f64(x)
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Writes to `--out` when given, standard output otherwise.
pub fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
