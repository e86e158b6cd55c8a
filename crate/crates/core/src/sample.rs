//! Censored observations, order statistics with concomitants, and CSV I/O.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use chrono::NaiveDate;
use rand::Rng;

use crate::distributions::HeavyTailModel;
use crate::error::{Error, Result};

/// One observed pair `(Z, δ)` with `Z = min(X, Y)` and `δ = 1{X <= Y}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredObservation {
    pub z: f64,
    pub delta: bool,
}

impl CensoredObservation {
    pub fn new(z: f64, delta: bool) -> Self {
        Self { z, delta }
    }

    /// Censors lifetime `x` by `y`.
    pub fn from_pair(x: f64, y: f64) -> Self {
        Self {
            z: x.min(y),
            delta: x <= y,
        }
    }
}

/// Ascending order statistics `Z_{1:n} <= ... <= Z_{n:n}` with their
/// concomitant indicators and the prefix counts of uncensored observations
/// taken from the top down.
#[derive(Debug, Clone)]
pub struct SortedCensoredSample {
    z: Vec<f64>,
    delta: Vec<bool>,
    // top_prefix[i] = number of uncensored among the i largest; top_prefix[0] = 0
    top_prefix: Vec<u32>,
    km_survivor: OnceLock<Vec<f64>>,
}

impl PartialEq for SortedCensoredSample {
    fn eq(&self, other: &Self) -> bool {
        self.z == other.z && self.delta == other.delta
    }
}

impl SortedCensoredSample {
    /// Sorts by `z`; within tied `z` uncensored observations come first.
    pub fn from_observations(sample: &[CensoredObservation]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((i, o)) = sample
            .iter()
            .enumerate()
            .find(|(_, o)| !(o.z.is_finite() && o.z > 0.0))
        {
            return Err(Error::domain(format!(
                "observation {i} has non-positive or non-finite z = {}",
                o.z
            )));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(|a, b| a.z.total_cmp(&b.z).then(b.delta.cmp(&a.delta)));
        let z = sorted.iter().map(|o| o.z).collect();
        let delta: Vec<bool> = sorted.iter().map(|o| o.delta).collect();
        let mut top_prefix = Vec::with_capacity(delta.len() + 1);
        top_prefix.push(0u32);
        let mut acc = 0u32;
        for &d in delta.iter().rev() {
            acc += d as u32;
            top_prefix.push(acc);
        }
        Ok(Self {
            z,
            delta,
            top_prefix,
            km_survivor: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_sorted(&self) -> &[f64] {
        &self.z
    }

    pub fn delta_concomitant(&self) -> &[bool] {
        &self.delta
    }

    /// `S_1, ..., S_n`: uncensored counts among the top `i` order statistics.
    pub fn top_delta_prefix(&self) -> &[u32] {
        &self.top_prefix[1..]
    }

    /// `S_i` with `S_0 = 0`.
    #[inline]
    pub fn top_uncensored(&self, i: usize) -> u32 {
        self.top_prefix[i]
    }

    /// `Z_{n-i:n}`, so `upper(0)` is the sample maximum.
    #[inline]
    pub fn upper(&self, i: usize) -> f64 {
        self.z[self.z.len() - 1 - i]
    }

    /// `δ_{[n-i:n]}`, concomitant of [`Self::upper`].
    #[inline]
    pub fn upper_delta(&self, i: usize) -> bool {
        self.delta[self.delta.len() - 1 - i]
    }

    pub fn observations(&self) -> Vec<CensoredObservation> {
        self.z
            .iter()
            .zip(&self.delta)
            .map(|(&z, &delta)| CensoredObservation { z, delta })
            .collect()
    }

    /// Kaplan–Meier survivor values `1 - F_n(Z_{i:n})`, computed once.
    pub(crate) fn km_survivor(&self) -> &[f64] {
        self.km_survivor
            .get_or_init(|| crate::estimators::km_survivor_values(self))
    }

    /// Same sample with every `z` multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("scale factor must be > 0, got {c}")));
        }
        let obs: Vec<_> = self
            .observations()
            .into_iter()
            .map(|o| CensoredObservation::new(o.z * c, o.delta))
            .collect();
        Self::from_observations(&obs)
    }
}

pub fn sort_with_concomitants(sample: &[CensoredObservation]) -> Result<SortedCensoredSample> {
    SortedCensoredSample::from_observations(sample)
}

/// Draws `n` pairs `(min(X, Y), 1{X <= Y})` with `X` from `rng_x` and `Y`
/// from `rng_y`.
pub fn generate_censored<RX: Rng + ?Sized, RY: Rng + ?Sized>(
    model_x: &HeavyTailModel,
    model_y: &HeavyTailModel,
    n: usize,
    rng_x: &mut RX,
    rng_y: &mut RY,
) -> Vec<CensoredObservation> {
    (0..n)
        .map(|_| CensoredObservation::from_pair(model_x.draw(rng_x), model_y.draw(rng_y)))
        .collect()
}

/// Uncensored sample from `model`: every indicator is 1.
pub fn generate_complete<R: Rng + ?Sized>(
    model: &HeavyTailModel,
    n: usize,
    rng: &mut R,
) -> Vec<CensoredObservation> {
    model
        .sample(rng, n)
        .into_iter()
        .map(|z| CensoredObservation::new(z, true))
        .collect()
}

fn parse_err(path: &str, line: usize, field: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str], label: &str) -> Result<()> {
    let header = rdr.headers()?.clone();
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(parse_err(
            label,
            1,
            "header",
            format!("expected `{}`, got `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Parses the `z,delta` format. `label` names the source in errors.
pub fn read_observations<R: Read>(input: R, label: &str) -> Result<Vec<CensoredObservation>> {
    let mut rdr = csv_reader(input);
    check_header(&mut rdr, &["z", "delta"], label)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(parse_err(
                label,
                line,
                "row",
                format!("expected 2 fields, got {}", rec.len()),
            ));
        }
        let z: f64 = rec[0]
            .parse()
            .map_err(|_| parse_err(label, line, "z", format!("`{}` is not a number", &rec[0])))?;
        if !(z.is_finite() && z > 0.0) {
            return Err(parse_err(
                label,
                line,
                "z",
                format!("must be positive and finite, got `{}`", &rec[0]),
            ));
        }
        let delta = match &rec[1] {
            "1" => true,
            "0" => false,
            other => {
                return Err(parse_err(
                    label,
                    line,
                    "delta",
                    format!("expected 0 or 1, got `{other}`"),
                ))
            }
        };
        out.push(CensoredObservation { z, delta });
    }
    Ok(out)
}

pub fn write_observations<W: Write>(out: W, sample: &[CensoredObservation]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["z", "delta"])?;
    for o in sample {
        wtr.write_record([o.z.to_string(), (o.delta as u8).to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CensoredObservation>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_observations(f, &path.display().to_string())
}

pub fn write_csv(path: impl AsRef<Path>, sample: &[CensoredObservation]) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_observations(f, sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VitalStatus {
    Dead,
    Alive,
}

/// Raw follow-up record: entry date, last-contact or death date, status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurvivalRecord {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub status: VitalStatus,
}

/// Survival time in days plus one, uncensored iff the subject died.
pub fn derive_survival(records: &[SurvivalRecord]) -> Result<Vec<CensoredObservation>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let days = (r.end - r.start).num_days();
            if days < 0 {
                return Err(Error::domain(format!(
                    "record {i}: end date {} precedes start date {}",
                    r.end, r.start
                )));
            }
            Ok(CensoredObservation::new(
                (days + 1) as f64,
                r.status == VitalStatus::Dead,
            ))
        })
        .collect()
}

/// Parses the `start,end,status` format (ISO-8601 dates, status `D` or `A`).
pub fn read_survival_records<R: Read>(input: R, label: &str) -> Result<Vec<SurvivalRecord>> {
    let mut rdr = csv_reader(input);
    check_header(&mut rdr, &["start", "end", "status"], label)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 3 {
            return Err(parse_err(
                label,
                line,
                "row",
                format!("expected 3 fields, got {}", rec.len()),
            ));
        }
        let date = |idx: usize, field: &str| {
            NaiveDate::parse_from_str(&rec[idx], "%Y-%m-%d").map_err(|_| {
                parse_err(
                    label,
                    line,
                    field,
                    format!("`{}` is not an ISO-8601 date", &rec[idx]),
                )
            })
        };
        let start = date(0, "start")?;
        let end = date(1, "end")?;
        let status = match &rec[2] {
            "D" => VitalStatus::Dead,
            "A" => VitalStatus::Alive,
            other => {
                return Err(parse_err(
                    label,
                    line,
                    "status",
                    format!("expected D or A, got `{other}`"),
                ))
            }
        };
        if end < start {
            return Err(parse_err(
                label,
                line,
                "end",
                format!("{end} precedes start {start}"),
            ));
        }
        out.push(SurvivalRecord { start, end, status });
    }
    Ok(out)
}

pub fn read_survival_csv(path: impl AsRef<Path>) -> Result<Vec<SurvivalRecord>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_survival_records(f, &path.display().to_string())
}
