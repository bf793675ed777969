use std::path::Path;

use serde::Serialize;

use crate::record::RunRecord;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareTolerances {
    /// Relative tolerance for deterministic values.
    pub relative: f64,
    /// Allowed difference of two estimates in combined standard errors.
    pub sigmas: f64,
}

impl Default for CompareTolerances {
    fn default() -> Self {
        CompareTolerances { relative: 1e-12, sigmas: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDiff {
    pub field: String,
    pub a: String,
    pub b: String,
    /// Relative difference, or the difference in combined standard errors.
    pub diff: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub pass: bool,
    pub compared: usize,
    pub failures: Vec<String>,
    pub fields: Vec<FieldDiff>,
}

impl CompareReport {
    fn from_fields(fields: Vec<FieldDiff>) -> Self {
        let failures: Vec<String> = fields.iter().filter(|f| !f.pass).map(|f| f.field.clone()).collect();
        CompareReport { pass: failures.is_empty(), compared: fields.len(), failures, fields }
    }
}

fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn numeric(field: String, a: f64, b: f64, tol: &CompareTolerances) -> FieldDiff {
    let d = relative_diff(a, b);
    FieldDiff { field, a: a.to_string(), b: b.to_string(), diff: d, limit: tol.relative, pass: d <= tol.relative }
}

/// Compares the metrics of two run records of the same kind. Estimates with
/// standard errors are compared statistically, everything else relatively.
pub fn compare_records(a: &RunRecord, b: &RunRecord, tol: &CompareTolerances) -> Result<CompareReport, CliError> {
    if a.kind != b.kind {
        return Err(CliError::Usage(format!("cannot compare a {} record with a {} record", a.kind, b.kind)));
    }
    let mut fields = Vec::new();
    for m in &a.metrics {
        let Some(n) = b.metric(&m.name) else {
            fields.push(FieldDiff {
                field: m.name.clone(),
                a: m.value.to_string(),
                b: "missing".into(),
                diff: f64::INFINITY,
                limit: 0.0,
                pass: false,
            });
            continue;
        };
        match (m.stderr, n.stderr) {
            (Some(sa), Some(sb)) if sa > 0.0 || sb > 0.0 => {
                let se = (sa * sa + sb * sb).sqrt();
                let d = (m.value - n.value).abs() / se;
                fields.push(FieldDiff {
                    field: m.name.clone(),
                    a: m.value.to_string(),
                    b: n.value.to_string(),
                    diff: d,
                    limit: tol.sigmas,
                    pass: d <= tol.sigmas,
                });
            }
            _ => fields.push(numeric(m.name.clone(), m.value, n.value, tol)),
        }
    }
    for n in &b.metrics {
        if a.metric(&n.name).is_none() {
            fields.push(FieldDiff {
                field: n.name.clone(),
                a: "missing".into(),
                b: n.value.to_string(),
                diff: f64::INFINITY,
                limit: 0.0,
                pass: false,
            });
        }
    }
    Ok(CompareReport::from_fields(fields))
}

/// Cell-by-cell comparison of two CSV files with matching headers.
/// Numeric cells use the relative tolerance, others must be equal.
pub fn compare_csv(a: &Path, b: &Path, tol: &CompareTolerances) -> Result<CompareReport, CliError> {
    let read = |p: &Path| -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
        let mut r = csv::Reader::from_path(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        let header = r
            .headers()
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            rows.push(rec.iter().map(String::from).collect());
        }
        Ok((header, rows))
    };
    let (ha, ra) = read(a)?;
    let (hb, rb) = read(b)?;
    if ha != hb {
        return Err(CliError::Usage(format!("CSV headers differ: {ha:?} vs {hb:?}")));
    }
    let mut fields = Vec::new();
    if ra.len() != rb.len() {
        fields.push(FieldDiff {
            field: "rows".into(),
            a: ra.len().to_string(),
            b: rb.len().to_string(),
            diff: f64::INFINITY,
            limit: 0.0,
            pass: false,
        });
    }
    for (i, (x, y)) in ra.iter().zip(&rb).enumerate() {
        for (j, col) in ha.iter().enumerate() {
            let (u, v) = (&x[j], &y[j]);
            let name = format!("row {} {col}", i + 1);
            match (u.parse::<f64>(), v.parse::<f64>()) {
                (Ok(p), Ok(q)) => fields.push(numeric(name, p, q, tol)),
                _ => fields.push(FieldDiff {
                    field: name,
                    a: u.clone(),
                    b: v.clone(),
                    diff: if u == v { 0.0 } else { f64::INFINITY },
                    limit: 0.0,
                    pass: u == v,
                }),
            }
        }
    }
    Ok(CompareReport::from_fields(fields))
}
