//! The six-column sample schema and its file formats.
//!
//! A [`Sample`] is one device's view of one access point at one placement:
//! `RPi,SSID,Frequency,RSSI,Location,Label`. Learning code works on
//! [`LabeledSet`], a real-valued projection of the first five columns.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column names of the model features, in feature order.
pub const FEATURE_NAMES: [&str; 5] = ["RPi", "SSID", "Frequency", "RSSI", "Location"];
pub const N_FEATURES: usize = FEATURE_NAMES.len();
/// Index of the RSSI column inside a feature row.
pub const RSSI_FEATURE: usize = 3;

pub const LABEL_AUTHENTIC: u8 = 1;
pub const LABEL_UNAUTHORIZED: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sample {
    /// 1 for the login device, 2 for the mobile device.
    #[serde(rename = "RPi")]
    pub rpi: u8,
    #[serde(rename = "SSID")]
    pub ssid_code: u32,
    /// Channel centre in MHz.
    #[serde(rename = "Frequency")]
    pub frequency_mhz: u32,
    #[serde(rename = "RSSI")]
    pub rssi_dbm: i32,
    #[serde(rename = "Location")]
    pub location: u32,
    #[serde(rename = "Label")]
    pub label: u8,
}

impl Sample {
    pub fn features(&self) -> Vec<f64> {
        vec![
            f64::from(self.rpi),
            f64::from(self.ssid_code),
            f64::from(self.frequency_mhz),
            f64::from(self.rssi_dbm),
            f64::from(self.location),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.label > 1 {
            return Err(Error::Config(format!("label {} is not 0 or 1", self.label)));
        }
        if !(1..=2).contains(&self.rpi) {
            return Err(Error::Config(format!("RPi {} is not 1 or 2", self.rpi)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Self {
        Dataset { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// `(authentic, unauthorized)` row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|s| s.label == LABEL_AUTHENTIC).count();
        (pos, self.samples.len() - pos)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset::new(indices.iter().map(|&i| self.samples[i]).collect())
    }

    pub fn to_labeled(&self) -> LabeledSet {
        LabeledSet {
            rows: self.samples.iter().map(Sample::features).collect(),
            labels: self.labels(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.samples.is_empty() {
            w.write_record(["RPi", "SSID", "Frequency", "RSSI", "Location", "Label"])?;
        }
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let expected = ["RPi", "SSID", "Frequency", "RSSI", "Location", "Label"];
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Config(format!(
                "unexpected dataset header {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let mut samples = Vec::new();
        for row in r.deserialize() {
            let s: Sample = row?;
            s.validate()?;
            samples.push(s);
        }
        Ok(Dataset::new(samples))
    }

    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for s in &self.samples {
            serde_json::to_writer(&mut writer, s)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_jsonl<R: Read>(reader: R) -> Result<Dataset> {
        let mut samples = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let s: Sample = serde_json::from_str(&line)?;
            s.validate()?;
            samples.push(s);
        }
        Ok(Dataset::new(samples))
    }

    /// Loads a dataset, picking the format from the extension (`.jsonl` /
    /// `.json` for JSON lines, anything else is CSV).
    pub fn load(path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path)?;
        if is_jsonl(path) {
            Dataset::read_jsonl(file)
        } else {
            Dataset::read_csv(file)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        if is_jsonl(path) {
            self.write_jsonl(file)
        } else {
            self.write_csv(file)
        }
    }
}

fn is_jsonl(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json") | Some("ndjson")
    )
}

/// Real-valued feature rows with binary labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl LabeledSet {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Config(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(first) = rows.first() {
            let d = first.len();
            if let Some(bad) = rows.iter().find(|r| r.len() != d) {
                return Err(Error::Shape { expected: d, got: bad.len() });
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Config(format!("label {bad} is not 0 or 1")));
        }
        Ok(LabeledSet { rows, labels })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn concat(&self, other: &LabeledSet) -> LabeledSet {
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        out.labels.extend_from_slice(&other.labels);
        out
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.contains(&0) && self.labels.contains(&1)
    }
}

impl From<&Dataset> for LabeledSet {
    fn from(d: &Dataset) -> Self {
        d.to_labeled()
    }
}
