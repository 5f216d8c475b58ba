use std::fmt::Write as _;
use std::path::Path;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::snapshot;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// 95% Student-t interval for the slope.
    pub slope_ci95: (f64, f64),
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_log_log(label: &str, x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::InvalidParams(format!("fit `{label}` needs at least 3 points")));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParams(format!("fit `{label}` needs positive finite data")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams(format!("fit `{label}` has degenerate abscissae")));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let dof = m - 2.0;
    let slope_stderr = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidParams(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(LogLogFit {
        label: label.to_string(),
        x: x.to_vec(),
        y: y.to_vec(),
        slope,
        intercept,
        slope_stderr,
        slope_ci95: (slope - t * slope_stderr, slope + t * slope_stderr),
        residual: (sse / m).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub inputs: Vec<(String, String)>,
    pub columns: Vec<String>,
    /// Series label and one value per column.
    pub rows: Vec<(String, Vec<f64>)>,
    pub fits: Vec<LogLogFit>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Labelled fields kept when the experiment was asked to retain them.
    pub fields: Vec<(String, ComplexField)>,
}

impl ExperimentReport {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, series: impl ToString, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push((series.to_string(), values));
    }

    pub fn check(&mut self, name: &str, measured: f64, expected: impl ToString, passed: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            measured,
            expected: expected.to_string(),
            passed,
        });
    }

    pub fn note(&mut self, text: impl ToString) {
        self.notes.push(text.to_string());
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn find_fit(&self, label: &str) -> Option<&LogLogFit> {
        self.fits.iter().find(|f| f.label == label)
    }

    /// Column values of every row in `series`.
    pub fn column(&self, series: &str, column: &str) -> Vec<f64> {
        let Some(j) = self.columns.iter().position(|c| c == column) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|(s, _)| s == series)
            .map(|(_, v)| v[j])
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("series,{}\n", self.columns.join(","));
        for (series, values) in &self.rows {
            out.push_str(series);
            for v in values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!("experiment: {}\n\n[inputs]\n", self.name);
        let width = self.inputs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "{k:<width$} = {v}");
        }
        if !self.fits.is_empty() {
            out.push_str("\n[fits]\n");
        }
        for f in &self.fits {
            let _ = writeln!(
                out,
                "{}: slope {:.6} (95% CI [{:.6}, {:.6}], stderr {:.3e}), intercept {:.6}, rms residual {:.3e}",
                f.label, f.slope, f.slope_ci95.0, f.slope_ci95.1, f.slope_stderr, f.intercept, f.residual
            );
            let _ = writeln!(out, "  x = {:?}", f.x);
            let _ = writeln!(out, "  y = {:?}", f.y);
        }
        if !self.checks.is_empty() {
            out.push_str("\n[checks]\n");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}: measured {:.6e}, expected {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.expected
            );
        }
        if !self.notes.is_empty() {
            out.push_str("\n[notes]\n");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    /// Writes `report.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv())?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }

    /// Writes every retained field as `<label>.fnls` into `dir`.
    pub fn write_fields(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (label, u) in &self.fields {
            snapshot::save(&dir.join(format!("{label}.fnls")), u)?;
        }
        Ok(())
    }
}
