use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::manifest::write_atomic;
use crate::analysis::{Mode, SweepRecord};
use crate::detection::CoincidenceHistogram;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

fn to_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, TableError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| TableError::Invalid(e.to_string()))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, TableError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(TableError::from))
        .collect()
}

/// One row of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    pub value: f64,
}

pub fn write_curve(path: &Path, x: &[f64], y: &[f64]) -> Result<(), TableError> {
    let rows: Vec<CurveRow> = x
        .iter()
        .zip(y)
        .map(|(&x, &value)| CurveRow { x, value })
        .collect();
    Ok(write_atomic(path, &to_bytes(&rows)?)?)
}

pub fn read_curve(path: &Path) -> Result<(Vec<f64>, Vec<f64>), TableError> {
    let rows: Vec<CurveRow> = read_rows(path)?;
    Ok(rows.iter().map(|r| (r.x, r.value)).unzip())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct HistogramRow {
    delay_ns: f64,
    counts: u64,
}

/// Bin centres in ns and counts.
pub fn write_histogram(path: &Path, hist: &CoincidenceHistogram) -> Result<(), TableError> {
    let rows: Vec<HistogramRow> = hist
        .bin_centers()
        .iter()
        .zip(&hist.counts)
        .map(|(&t, &counts)| HistogramRow {
            delay_ns: t * 1e9,
            counts,
        })
        .collect();
    Ok(write_atomic(path, &to_bytes(&rows)?)?)
}

/// Reads `delay_ns, counts`; bin width is the mean centre spacing. Trigger
/// count and duration are not stored and come back as zero.
pub fn read_histogram(path: &Path) -> Result<CoincidenceHistogram, TableError> {
    let rows: Vec<HistogramRow> = read_rows(path)?;
    if rows.len() < 2 {
        return Err(TableError::Invalid(format!(
            "{} rows; need at least 2",
            rows.len()
        )));
    }
    if rows.windows(2).any(|w| !(w[1].delay_ns > w[0].delay_ns)) {
        return Err(TableError::Invalid(
            "delay_ns must be strictly increasing".into(),
        ));
    }
    let n = rows.len();
    let width = (rows[n - 1].delay_ns - rows[0].delay_ns) / (n - 1) as f64 * 1e-9;
    Ok(CoincidenceHistogram {
        bin_width_s: width,
        window_s: width * n as f64,
        start_s: rows[0].delay_ns * 1e-9 - 0.5 * width,
        duration_s: 0.0,
        counts: rows.iter().map(|r| r.counts).collect(),
        n_triggers: 0,
    })
}

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub pump_mw: f64,
    pub temp_c: f64,
    pub od: f64,
    pub rate_pairs_s: f64,
    pub linewidth_khz: f64,
    pub sbr: f64,
    pub brightness_pairs_s_mhz: f64,
    pub s_product: f64,
    pub background_per_bin: f64,
    pub r_t: f64,
    pub r_s: f64,
    pub mode: Mode,
    pub seed: u64,
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        Self {
            pump_mw: r.op.pump_mw,
            temp_c: r.op.temp_c,
            od: r.op.od_measured,
            rate_pairs_s: r.generation_rate,
            linewidth_khz: r.linewidth_hz * 1e-3,
            sbr: r.sbr,
            brightness_pairs_s_mhz: r.brightness,
            s_product: r.s_product,
            background_per_bin: r.background_per_bin,
            r_t: r.r_t,
            r_s: r.r_s,
            mode: r.mode,
            seed: r.seed,
        }
    }
}

pub fn write_sweep(path: &Path, records: &[SweepRecord]) -> Result<(), TableError> {
    let rows: Vec<SweepRow> = records.iter().map(SweepRow::from).collect();
    Ok(write_atomic(path, &to_bytes(&rows)?)?)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, TableError> {
    read_rows(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    AntiStokes,
    Stokes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct EventRow {
    channel: Channel,
    time_s: f64,
}

/// Both timestamp streams in one table, anti-Stokes first.
pub fn write_events(path: &Path, anti_stokes: &[f64], stokes: &[f64]) -> Result<(), TableError> {
    let rows: Vec<EventRow> = anti_stokes
        .iter()
        .map(|&t| EventRow {
            channel: Channel::AntiStokes,
            time_s: t,
        })
        .chain(stokes.iter().map(|&t| EventRow {
            channel: Channel::Stokes,
            time_s: t,
        }))
        .collect();
    Ok(write_atomic(path, &to_bytes(&rows)?)?)
}

pub fn read_events(path: &Path) -> Result<(Vec<f64>, Vec<f64>), TableError> {
    let rows: Vec<EventRow> = read_rows(path)?;
    let mut a = Vec::new();
    let mut s = Vec::new();
    for r in rows {
        match r.channel {
            Channel::AntiStokes => a.push(r.time_s),
            Channel::Stokes => s.push(r.time_s),
        }
    }
    Ok((a, s))
}
