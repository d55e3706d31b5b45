//! Report emission. One CSV row per (algorithm, scenario, event, metric);
//! the JSON form carries the same rows plus the scenario header. Wall-clock
//! readings live only in the `wall_ms` and `mkps` columns so deterministic
//! output can be compared with those columns masked.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const CSV_HEADER: &str = "algo,scenario,event,metric,value,sample_n,std_error,wall_ms,mkps";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub algo: String,
    pub scenario: String,
    /// Which script event produced the row, e.g. "e3:remove" or "final".
    pub event: String,
    pub metric: String,
    pub value: f64,
    pub sample_n: Option<u64>,
    pub std_error: Option<f64>,
    pub wall_ms: Option<f64>,
    pub mkps: Option<f64>,
}

impl MetricRow {
    pub fn new(
        algo: impl Into<String>,
        scenario: impl Into<String>,
        event: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Self {
        MetricRow {
            algo: algo.into(),
            scenario: scenario.into(),
            event: event.into(),
            metric: metric.into(),
            value,
            sample_n: None,
            std_error: None,
            wall_ms: None,
            mkps: None,
        }
    }

    pub fn with_sample(mut self, n: u64, std_error: f64) -> Self {
        self.sample_n = Some(n);
        self.std_error = Some(std_error);
        self
    }

    pub fn with_wall_ms(mut self, wall_ms: f64) -> Self {
        self.wall_ms = Some(wall_ms);
        self
    }

    pub fn with_mkps(mut self, mkps: f64) -> Self {
        self.mkps = Some(mkps);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub algorithm: String,
    pub scenario: String,
    pub seed: u64,
    pub a: Option<u32>,
    pub w: Option<u32>,
    pub rows: Vec<MetricRow>,
}

impl ScenarioReport {
    pub fn new(algorithm: impl Into<String>, scenario: impl Into<String>, seed: u64) -> Self {
        ScenarioReport {
            algorithm: algorithm.into(),
            scenario: scenario.into(),
            seed,
            a: None,
            w: None,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, event: impl Into<String>, metric: impl Into<String>, value: f64) -> &mut MetricRow {
        let row = MetricRow::new(
            self.algorithm.clone(),
            self.scenario.clone(),
            event,
            metric,
            value,
        );
        self.rows.push(row);
        self.rows.last_mut().expect("just pushed")
    }

    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), Error> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer
                .serialize(row)
                .map_err(|e| Error::CorruptState(format!("csv write failed: {e}")))?;
        }
        writer
            .flush()
            .map_err(|e| Error::CorruptState(format!("csv flush failed: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, Error> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::CorruptState(format!("csv not utf-8: {e}")))
    }

    pub fn to_json_string(&self) -> Result<String, Error> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::CorruptState(format!("json write failed: {e}")))
    }
}
