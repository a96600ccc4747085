//! Per-seed regret curves and their mean/stderr summary, in memory and as CSV.

use std::io::{Read, Write};

use crate::error::{HarnessError, Result};
use crate::experiment::RunCurves;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryColumn {
    pub key: String,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Mean cumulative regret and its standard error per algorithm, per round.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub t: Vec<u64>,
    pub columns: Vec<SummaryColumn>,
}

/// Sample mean and standard error (`sd / sqrt(n)` with the `n - 1`
/// denominator); the error is 0 for a single value.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize(runs: &[RunCurves]) -> Summary {
    let horizon = runs.iter().map(|r| r.horizon()).max().unwrap_or(0);
    let t = (1..=horizon as u64).collect();
    let columns = runs
        .iter()
        .map(|run| {
            let mut mean = Vec::with_capacity(horizon);
            let mut stderr = Vec::with_capacity(horizon);
            let mut column = Vec::with_capacity(run.curves.len());
            for i in 0..horizon {
                column.clear();
                column.extend(run.curves.iter().map(|c| c[i]));
                let (m, s) = mean_stderr(&column);
                mean.push(m);
                stderr.push(s);
            }
            SummaryColumn {
                key: run.algorithm.key().to_string(),
                mean,
                stderr,
            }
        })
        .collect();
    Summary { t, columns }
}

impl Summary {
    pub fn column(&self, key: &str) -> Option<&SummaryColumn> {
        self.columns.iter().find(|c| c.key == key)
    }

    /// `t, <key>_mean, <key>_stderr, ...`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        for c in &self.columns {
            header.push(format!("{}_mean", c.key));
            header.push(format!("{}_stderr", c.key));
        }
        out.write_record(&header).map_err(csv_error)?;
        for (i, t) in self.t.iter().enumerate() {
            let mut row = vec![t.to_string()];
            for c in &self.columns {
                row.push(c.mean[i].to_string());
                row.push(c.stderr[i].to_string());
            }
            out.write_record(&row).map_err(csv_error)?;
        }
        out.flush().map_err(|e| HarnessError::io("summary", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.get(0) != Some("t") || header.len() < 3 || header.len() % 2 == 0 {
            return Err(HarnessError::Input(
                "summary header must be `t` followed by <key>_mean,<key>_stderr pairs".into(),
            ));
        }
        let mut columns = Vec::new();
        for pair in 0..(header.len() - 1) / 2 {
            let m = &header[1 + 2 * pair];
            let s = &header[2 + 2 * pair];
            let key = m
                .strip_suffix("_mean")
                .filter(|k| s.strip_suffix("_stderr") == Some(*k))
                .ok_or_else(|| HarnessError::Input(format!("columns `{m}`, `{s}` are not a mean/stderr pair")))?;
            columns.push(SummaryColumn {
                key: key.to_string(),
                mean: Vec::new(),
                stderr: Vec::new(),
            });
        }
        let mut t = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let field = |i: usize| -> Result<f64> {
                rec[i].parse::<f64>().map_err(|e| {
                    HarnessError::Input(format!("summary row {}: column {}: {e}", line + 2, i + 1))
                })
            };
            t.push(field(0)? as u64);
            for (k, c) in columns.iter_mut().enumerate() {
                c.mean.push(field(1 + 2 * k)?);
                c.stderr.push(field(2 + 2 * k)?);
            }
        }
        Ok(Summary { t, columns })
    }
}

fn csv_error(e: csv::Error) -> HarnessError {
    HarnessError::Input(format!("csv: {e}"))
}

/// `seed, t, cum_regret` for every seed of one algorithm.
pub fn write_per_seed<W: Write>(run: &RunCurves, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["seed", "t", "cum_regret"]).map_err(csv_error)?;
    for (seed, curve) in run.seeds.iter().zip(&run.curves) {
        for (i, v) in curve.iter().enumerate() {
            out.write_record(&[seed.to_string(), (i + 1).to_string(), v.to_string()])
                .map_err(csv_error)?;
        }
    }
    out.flush().map_err(|e| HarnessError::io("per-seed csv", e))?;
    Ok(())
}

/// Inverse of [`write_per_seed`]: curves grouped by seed in file order.
pub fn read_per_seed<R: Read>(r: R) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out: Vec<(u64, Vec<f64>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let parse_err = |e: String| HarnessError::Input(format!("per-seed csv: {e}"));
        let seed: u64 = rec[0].parse().map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?;
        let v: f64 = rec[2].parse().map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?;
        match out.last_mut() {
            Some((s, curve)) if *s == seed => curve.push(v),
            _ => out.push((seed, vec![v])),
        }
    }
    Ok(out)
}
