//! Sweep files, power-sample lists and model files.
//!
//! Native sweep layout (UTF-8, one record per line):
//!
//! ```text
//! # distance_m=0.2
//! # p_tx_linear=1.0
//! # label=20cm
//! freq_hz,s21_re,s21_im
//! 2.4e11,1.2e-3,-4.5e-4
//! ```
//!
//! Header lines and the column-name line are optional. Other `#` lines are
//! comments.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::received_power_from_s21;
use crate::error::{Error, Result};
use crate::mixture::MixtureModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFormat {
    #[default]
    Native,
}

impl FromStr for SweepFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "native" | "csv" => Ok(SweepFormat::Native),
            other => Err(Error::domain(format!("unknown sweep format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub freq_hz: f64,
    pub s21_re: f64,
    pub s21_im: f64,
}

impl SweepRecord {
    pub fn new(freq_hz: f64, s21_re: f64, s21_im: f64) -> Result<Self> {
        if !(freq_hz > 0.0 && freq_hz.is_finite()) {
            return Err(Error::domain(format!("frequency must be finite and > 0, got {freq_hz}")));
        }
        if !(s21_re.is_finite() && s21_im.is_finite()) {
            return Err(Error::domain("S21 must be finite"));
        }
        Ok(Self { freq_hz, s21_re, s21_im })
    }

    pub fn s21(&self) -> Complex64 {
        Complex64::new(self.s21_re, self.s21_im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    records: Vec<SweepRecord>,
    distance_m: Option<f64>,
    p_tx_linear: f64,
    label: String,
}

impl Dataset {
    pub fn new(records: Vec<SweepRecord>, distance_m: Option<f64>, p_tx_linear: f64, label: impl Into<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::domain("a dataset needs at least one record"));
        }
        if let Some(i) = records.windows(2).position(|w| !(w[1].freq_hz > w[0].freq_hz)) {
            return Err(Error::Format {
                line: i + 2,
                message: format!(
                    "frequency {} does not increase past {}",
                    records[i + 1].freq_hz,
                    records[i].freq_hz
                ),
            });
        }
        if let Some(d) = distance_m {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::domain(format!("distance must be > 0, got {d}")));
            }
        }
        if !(p_tx_linear > 0.0 && p_tx_linear.is_finite()) {
            return Err(Error::domain(format!("p_tx_linear must be > 0, got {p_tx_linear}")));
        }
        Ok(Self {
            records,
            distance_m,
            p_tx_linear,
            label: label.into(),
        })
    }

    pub fn records(&self) -> &[SweepRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn distance_m(&self) -> Option<f64> {
        self.distance_m
    }

    pub fn p_tx_linear(&self) -> f64 {
        self.p_tx_linear
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSamples {
    pub values: Vec<f64>,
    pub source_label: String,
    /// Records skipped because |S21| was zero.
    pub dropped: usize,
}

fn parse_field(field: &str, name: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: cannot parse '{}' as a number", field.trim()),
    })
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Load(format!("{}: {e}", path.display())))
}

fn is_column_names(fields: &[&str]) -> bool {
    fields.iter().all(|f| f.parse::<f64>().is_err() && f.chars().next().is_some_and(|c| c.is_alphabetic()))
}

pub fn parse_sweep<R: BufRead>(reader: R, format: SweepFormat) -> Result<Dataset> {
    match format {
        SweepFormat::Native => parse_native(reader),
    }
}

fn parse_native<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut records = Vec::new();
    let mut distance_m = None;
    let mut p_tx_linear = 1.0;
    let mut label = String::new();
    let mut seen_data = false;
    let mut prev_freq: Option<f64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "distance_m" => distance_m = Some(parse_field(value, "distance_m", lineno)?),
                    "p_tx_linear" => p_tx_linear = parse_field(value, "p_tx_linear", lineno)?,
                    "label" => label = value.trim().to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let fields = split_fields(text);
        if !seen_data && records.is_empty() && is_column_names(&fields) {
            seen_data = true;
            continue;
        }
        seen_data = true;
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 3 fields (freq_hz,s21_re,s21_im), found {}", fields.len()),
            });
        }
        let freq = parse_field(fields[0], "freq_hz", lineno)?;
        let re = parse_field(fields[1], "s21_re", lineno)?;
        let im = parse_field(fields[2], "s21_im", lineno)?;
        let record = SweepRecord::new(freq, re, im).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if let Some(p) = prev_freq {
            if !(freq > p) {
                return Err(Error::Format {
                    line: lineno,
                    message: format!("frequency {freq} does not increase past {p}"),
                });
            }
        }
        prev_freq = Some(freq);
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::domain("sweep file contains no records"));
    }
    Dataset::new(records, distance_m, p_tx_linear, label)
}

pub fn read_sweep(path: impl AsRef<Path>, format: SweepFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    parse_sweep(BufReader::new(file), format)
}

/// Writes `ds` in the native layout. Floats use the shortest exact
/// representation, so parsing the output returns identical records.
pub fn write_sweep<W: Write>(ds: &Dataset, mut out: W) -> Result<()> {
    if let Some(d) = ds.distance_m {
        writeln!(out, "# distance_m={d:e}")?;
    }
    writeln!(out, "# p_tx_linear={:e}", ds.p_tx_linear)?;
    if !ds.label.is_empty() {
        writeln!(out, "# label={}", ds.label)?;
    }
    writeln!(out, "freq_hz,s21_re,s21_im")?;
    for r in &ds.records {
        writeln!(out, "{:e},{:e},{:e}", r.freq_hz, r.s21_re, r.s21_im)?;
    }
    Ok(())
}

/// Keeps records with `f_lo <= freq <= f_hi`.
pub fn filter_band(ds: &Dataset, f_lo: f64, f_hi: f64) -> Result<Dataset> {
    if !(f_lo > 0.0 && f_lo < f_hi) {
        return Err(Error::domain(format!("band needs 0 < f_lo < f_hi, got [{f_lo}, {f_hi}]")));
    }
    let records: Vec<SweepRecord> = ds
        .records
        .iter()
        .filter(|r| r.freq_hz >= f_lo && r.freq_hz <= f_hi)
        .copied()
        .collect();
    if records.is_empty() {
        return Err(Error::EmptyBand { lo: f_lo, hi: f_hi });
    }
    Ok(Dataset {
        records,
        ..ds.clone()
    })
}

/// Linear received power |S21|²·P_tx per record. Zero-power records are
/// dropped and counted.
pub fn to_power_samples(ds: &Dataset) -> Result<PowerSamples> {
    let mut values = Vec::with_capacity(ds.len());
    let mut dropped = 0;
    for r in &ds.records {
        let p = received_power_from_s21(r.s21(), ds.p_tx_linear)?;
        if p > 0.0 {
            values.push(p);
        } else {
            dropped += 1;
        }
    }
    if values.is_empty() {
        return Err(Error::DegenerateData(format!(
            "all {} records have zero |S21|",
            ds.len()
        )));
    }
    Ok(PowerSamples {
        values,
        source_label: ds.label.clone(),
        dropped,
    })
}

/// Reads one sample per line; blank and `#` lines are skipped.
pub fn parse_power_list<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields = split_fields(text);
        if values.is_empty() && is_column_names(&fields) {
            continue;
        }
        if fields.len() != 1 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected one value per line, found {}", fields.len()),
            });
        }
        let v = parse_field(fields[0], "sample", idx + 1)?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("sample {v} is not finite"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::domain("sample file contains no values"));
    }
    Ok(values)
}

pub fn write_power_list<W: Write>(values: &[f64], mut out: W) -> Result<()> {
    for v in values {
        writeln!(out, "{v:e}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Sweep,
    PowerList,
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputKind::Sweep => "sweep",
            InputKind::PowerList => "power-list",
        })
    }
}

/// Classifies text by its first numeric row: 3 columns is a sweep, 1 is a
/// power list.
pub fn detect_kind(text: &str) -> Result<InputKind> {
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields = split_fields(t);
        if is_column_names(&fields) {
            continue;
        }
        return match fields.len() {
            3 => Ok(InputKind::Sweep),
            1 => Ok(InputKind::PowerList),
            n => Err(Error::Parse {
                line: idx + 1,
                message: format!("cannot tell input kind from a row with {n} columns"),
            }),
        };
    }
    Err(Error::domain("input contains no data rows"))
}

/// Loads samples from a sweep or power-list file.
pub fn load_samples(path: impl AsRef<Path>) -> Result<(PowerSamples, InputKind)> {
    load_samples_with_band(path, None)
}

/// Like [`load_samples`], restricting sweep records to `band` (Hz) first.
/// A band on a power-list input is a domain error.
pub fn load_samples_with_band(path: impl AsRef<Path>, band: Option<(f64, f64)>) -> Result<(PowerSamples, InputKind)> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let kind = detect_kind(&text)?;
    let samples = match kind {
        InputKind::Sweep => {
            let mut ds = parse_sweep(text.as_bytes(), SweepFormat::Native)?;
            if let Some((lo, hi)) = band {
                ds = filter_band(&ds, lo, hi)?;
            }
            to_power_samples(&ds)?
        }
        InputKind::PowerList if band.is_some() => {
            return Err(Error::domain("a frequency band only applies to sweep inputs"));
        }
        InputKind::PowerList => PowerSamples {
            values: parse_power_list(text.as_bytes())?,
            source_label: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            dropped: 0,
        },
    };
    Ok((samples, kind))
}

/// Parses a model document. A report document is accepted too; its `model`
/// field is used.
pub fn parse_model(text: &str) -> Result<MixtureModel> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Load(format!("not a JSON document: {e}")))?;
    let model_value = match value.get("model") {
        Some(inner) if value.get("family").is_none() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(model_value).map_err(|e| Error::Load(e.to_string()))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<MixtureModel> {
    parse_model(&read_text(path.as_ref())?)
}

pub fn model_to_json(model: &MixtureModel) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serializes");
    s.push('\n');
    s
}

pub fn write_model(model: &MixtureModel, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    out.write_all(model_to_json(model).as_bytes())?;
    out.flush()?;
    Ok(())
}
