//! Report shapes and serialization.
//!
//! JSON reports are single objects whose key order is the struct field
//! order below. Every floating-point value is emitted with 17 significant
//! digits (`{:.16e}`), enough for exact round trips, in both formats. CSV
//! reports carry the per-entity tables (assets, solutions, grid points,
//! rows); scalar metadata lives in the JSON form only.

use std::io::{self, Write};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

/// An f64 that serializes as a raw JSON number with full precision.
#[derive(Clone, Copy, Debug)]
pub struct Float(pub f64);

/// 17 significant digits: round-trip exact for every finite f64, and a
/// valid JSON number literal.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fmt_float(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Serialize)]
pub struct EstimateReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub mean: Vec<Float>,
    pub scatter: Vec<Vec<Float>>,
    /// Posterior-rule variance coefficient; absent when n <= k + 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Float>,
    /// Sample-rule variance coefficient 1/(n-1); absent when n <= k + 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Float>,
}

#[derive(Serialize)]
pub struct SolutionReport {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_return: Option<Float>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_variance: Option<Float>,
    pub weights: Vec<Float>,
    pub expected_return: Float,
    pub variance: Float,
}

#[derive(Serialize)]
pub struct OptimizeReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub solutions: Vec<SolutionReport>,
}

#[derive(Serialize)]
pub struct FrontierPoint {
    pub variance: Float,
    pub expected_return: Float,
}

#[derive(Serialize)]
pub struct FamilyReport {
    pub family: &'static str,
    pub r_gmv: Float,
    pub v_gmv: Float,
    pub slope: Float,
    pub curve: Vec<FrontierPoint>,
}

#[derive(Serialize)]
pub struct FrontierReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub grid_points: usize,
    pub families: Vec<FamilyReport>,
}

#[derive(Serialize)]
pub struct SampleReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub gamma: Float,
    pub draws: usize,
    pub seed: u64,
    pub labels: Vec<String>,
    pub weights: Vec<Float>,
    pub expected_return: Float,
    pub variance: Float,
    pub mc_mean: Float,
    /// Absent when only one draw was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_variance: Option<Float>,
    pub minimum: Float,
    pub maximum: Float,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Float>>,
}

#[derive(Serialize)]
pub struct IntervalRow {
    pub gamma: Float,
    pub expected_return: Float,
    pub variance: Float,
    pub lower: Float,
    pub upper: Float,
    pub width: Float,
}

#[derive(Serialize)]
pub struct IntervalReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub alpha: Float,
    pub draws: usize,
    pub seed: u64,
    pub rows: Vec<IntervalRow>,
}

#[derive(Serialize)]
pub struct CompareRow {
    pub k: usize,
    pub gamma: Float,
    pub bayes_return: Float,
    pub bayes_variance: Float,
    pub sample_return: Float,
    pub sample_variance: Float,
}

#[derive(Serialize)]
pub struct CompareReport {
    pub command: &'static str,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub rows: Vec<CompareRow>,
}

#[derive(Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub k: usize,
    pub k_over_n: Float,
    pub ratio: Float,
}

#[derive(Serialize)]
pub struct RatioReport {
    pub command: &'static str,
    pub kn_max: Float,
    pub rows: Vec<RatioRow>,
}

pub enum Report {
    Estimate(EstimateReport),
    Optimize(OptimizeReport),
    Frontier(FrontierReport),
    Sample(SampleReport),
    Interval(IntervalReport),
    Compare(CompareReport),
    Ratio(RatioReport),
}

impl Report {
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        let emit = |w: &mut W| match self {
            Report::Estimate(r) => serde_json::to_writer_pretty(w, r),
            Report::Optimize(r) => serde_json::to_writer_pretty(w, r),
            Report::Frontier(r) => serde_json::to_writer_pretty(w, r),
            Report::Sample(r) => serde_json::to_writer_pretty(w, r),
            Report::Interval(r) => serde_json::to_writer_pretty(w, r),
            Report::Compare(r) => serde_json::to_writer_pretty(w, r),
            Report::Ratio(r) => serde_json::to_writer_pretty(w, r),
        };
        emit(&mut w).map_err(|err| write_error(io::Error::from(err)))?;
        w.write_all(b"\n").map_err(write_error)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        match self {
            Report::Estimate(r) => estimate_csv(r, &mut wtr),
            Report::Optimize(r) => optimize_csv(r, &mut wtr),
            Report::Frontier(r) => frontier_csv(r, &mut wtr),
            Report::Sample(r) => sample_csv(r, &mut wtr),
            Report::Interval(r) => interval_csv(r, &mut wtr),
            Report::Compare(r) => compare_csv(r, &mut wtr),
            Report::Ratio(r) => ratio_csv(r, &mut wtr),
        }
        .and_then(|()| wtr.flush().map_err(csv::Error::from))
        .map_err(|err| write_error(io::Error::other(err)))
    }
}

fn write_error(source: io::Error) -> CliError {
    CliError::Io {
        context: "writing report".into(),
        source,
    }
}

type Wtr<'a, W> = &'a mut csv::Writer<W>;

fn estimate_csv<W: Write>(r: &EstimateReport, wtr: Wtr<W>) -> csv::Result<()> {
    let mut header = vec!["asset".to_string(), "mean".to_string()];
    header.extend(r.labels.iter().map(|l| format!("s_{l}")));
    wtr.write_record(&header)?;
    for (i, label) in r.labels.iter().enumerate() {
        let mut rec = vec![label.clone(), fmt_float(r.mean[i].0)];
        rec.extend(r.scatter[i].iter().map(|f| fmt_float(f.0)));
        wtr.write_record(&rec)?;
    }
    Ok(())
}

fn optimize_csv<W: Write>(r: &OptimizeReport, wtr: Wtr<W>) -> csv::Result<()> {
    let mut header = vec![
        "rule".to_string(),
        "gamma".into(),
        "target_return".into(),
        "target_variance".into(),
        "expected_return".into(),
        "variance".into(),
    ];
    header.extend(r.labels.iter().map(|l| format!("w_{l}")));
    wtr.write_record(&header)?;
    let opt = |f: &Option<Float>| f.map(|v| fmt_float(v.0)).unwrap_or_default();
    for sol in &r.solutions {
        let mut rec = vec![
            sol.rule.to_string(),
            opt(&sol.gamma),
            opt(&sol.target_return),
            opt(&sol.target_variance),
            fmt_float(sol.expected_return.0),
            fmt_float(sol.variance.0),
        ];
        rec.extend(sol.weights.iter().map(|f| fmt_float(f.0)));
        wtr.write_record(&rec)?;
    }
    Ok(())
}

fn frontier_csv<W: Write>(r: &FrontierReport, wtr: Wtr<W>) -> csv::Result<()> {
    wtr.write_record(["family", "variance", "expected_return"])?;
    for family in &r.families {
        for point in &family.curve {
            wtr.write_record([
                family.family.to_string(),
                fmt_float(point.variance.0),
                fmt_float(point.expected_return.0),
            ])?;
        }
    }
    Ok(())
}

fn sample_csv<W: Write>(r: &SampleReport, wtr: Wtr<W>) -> csv::Result<()> {
    if let Some(values) = &r.values {
        wtr.write_record(["draw", "value"])?;
        for (i, v) in values.iter().enumerate() {
            wtr.write_record([i.to_string(), fmt_float(v.0)])?;
        }
    } else {
        wtr.write_record([
            "gamma",
            "draws",
            "seed",
            "expected_return",
            "variance",
            "mc_mean",
            "mc_variance",
            "minimum",
            "maximum",
        ])?;
        wtr.write_record([
            fmt_float(r.gamma.0),
            r.draws.to_string(),
            r.seed.to_string(),
            fmt_float(r.expected_return.0),
            fmt_float(r.variance.0),
            fmt_float(r.mc_mean.0),
            r.mc_variance.map(|f| fmt_float(f.0)).unwrap_or_default(),
            fmt_float(r.minimum.0),
            fmt_float(r.maximum.0),
        ])?;
    }
    Ok(())
}

fn interval_csv<W: Write>(r: &IntervalReport, wtr: Wtr<W>) -> csv::Result<()> {
    wtr.write_record([
        "gamma",
        "expected_return",
        "variance",
        "lower",
        "upper",
        "width",
    ])?;
    for row in &r.rows {
        wtr.write_record([
            fmt_float(row.gamma.0),
            fmt_float(row.expected_return.0),
            fmt_float(row.variance.0),
            fmt_float(row.lower.0),
            fmt_float(row.upper.0),
            fmt_float(row.width.0),
        ])?;
    }
    Ok(())
}

fn compare_csv<W: Write>(r: &CompareReport, wtr: Wtr<W>) -> csv::Result<()> {
    wtr.write_record([
        "k",
        "gamma",
        "bayes_return",
        "bayes_variance",
        "sample_return",
        "sample_variance",
    ])?;
    for row in &r.rows {
        wtr.write_record([
            row.k.to_string(),
            fmt_float(row.gamma.0),
            fmt_float(row.bayes_return.0),
            fmt_float(row.bayes_variance.0),
            fmt_float(row.sample_return.0),
            fmt_float(row.sample_variance.0),
        ])?;
    }
    Ok(())
}

fn ratio_csv<W: Write>(r: &RatioReport, wtr: Wtr<W>) -> csv::Result<()> {
    wtr.write_record(["n", "k", "k_over_n", "ratio"])?;
    for row in &r.rows {
        wtr.write_record([
            row.n.to_string(),
            row.k.to_string(),
            fmt_float(row.k_over_n.0),
            fmt_float(row.ratio.0),
        ])?;
    }
    Ok(())
}
