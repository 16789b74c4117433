//! CSV time series and JSON reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use okidyn_core::dynamics::Trajectory;
use okidyn_core::regimes::{RegimeReport, Thresholds};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// 12 significant digits, dot decimal separator, no locale involvement.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float formatting round-trips");
    let magnitude = rounded.abs();
    if rounded == 0.0 || (1e-6..1e15).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(if n < 10 {
                format!("A{}{}", i + 1, j + 1)
            } else {
                format!("A{}_{}", i + 1, j + 1)
            });
        }
    }
    header.extend((1..=n).map(|j| format!("l{j}")));
    header.extend(
        ["b", "lambda", "r", "G", "W", "k", "dr_dt", "viable"]
            .iter()
            .map(|s| s.to_string()),
    );
    header
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    let n = traj.config.schedule.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trajectory_header(n))?;
    for p in &traj.points {
        let mut row = vec![format_number(p.t)];
        row.extend(p.tech.a().as_slice().iter().map(|&x| format_number(x)));
        row.extend(p.tech.l().iter().map(|&x| format_number(x)));
        row.extend([p.b, p.lambda, p.r, p.g, p.w, p.k, p.dr_dt].map(format_number));
        row.push(p.viable.to_string());
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Csv(csv::Error::from(e.into_error())))
}

/// One parsed row of `trajectory.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvPoint {
    pub t: f64,
    pub a: Vec<f64>,
    pub l: Vec<f64>,
    pub b: f64,
    pub lambda: f64,
    pub r: f64,
    pub g: f64,
    pub w: f64,
    pub k: f64,
    pub dr_dt: f64,
    pub viable: bool,
}

pub fn parse_trajectory_csv(bytes: &[u8]) -> Result<Vec<CsvPoint>> {
    let mut reader = csv::Reader::from_reader(bytes);
    let width = reader.headers()?.len();
    // t, n² + n coefficients, 8 trailing columns
    let coeffs = width.checked_sub(9).unwrap_or(0);
    let n = ((-1.0 + (1.0 + 4.0 * coeffs as f64).sqrt()) / 2.0).round() as usize;
    if n * n + n != coeffs {
        return Err(CliError::Validation(format!("unexpected trajectory header width {width}")));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| CliError::Validation(format!("bad number '{}'", &record[i])))
        };
        let tail = 1 + coeffs;
        out.push(CsvPoint {
            t: num(0)?,
            a: (1..1 + n * n).map(num).collect::<Result<_>>()?,
            l: (1 + n * n..tail).map(num).collect::<Result<_>>()?,
            b: num(tail)?,
            lambda: num(tail + 1)?,
            r: num(tail + 2)?,
            g: num(tail + 3)?,
            w: num(tail + 4)?,
            k: num(tail + 5)?,
            dr_dt: num(tail + 6)?,
            viable: &record[tail + 7] == "true",
        });
    }
    Ok(out)
}

/// `beta,t,r,viable` rows for every run of a sweep.
pub fn sweep_csv(runs: &[Trajectory]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["beta", "t", "r", "viable"])?;
    for traj in runs {
        let beta = format_number(traj.config.beta);
        for p in &traj.points {
            w.write_record([
                beta.clone(),
                format_number(p.t),
                format_number(p.r),
                p.viable.to_string(),
            ])?;
        }
    }
    w.into_inner()
        .map_err(|e| CliError::Csv(csv::Error::from(e.into_error())))
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Contents of `thresholds.json`, rounded to four decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsFile {
    pub beta: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub t_k_min: f64,
    pub t_k_max: f64,
}

impl ThresholdsFile {
    pub fn new(beta: f64, th: &Thresholds) -> Self {
        Self {
            beta,
            k_min: round4(th.k_min),
            k_max: round4(th.k_max),
            beta_min: round4(th.beta_min),
            beta_max: round4(th.beta_max),
            t_k_min: round4(th.t_k_min),
            t_k_max: round4(th.t_k_max),
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report types serialize");
    out.push(b'\n');
    out
}

pub fn reports_json(reports: &[RegimeReport]) -> Vec<u8> {
    to_json(reports)
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    let io = |source| CliError::Write {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut f = fs::File::create(&path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use okidyn_core::dynamics::{simulate, SimConfig};

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.95), "0.95");
        assert_eq!(format_number(1.0 / 19.0), "0.0526315789474");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(10.0), "10");
        assert_eq!(format_number(-0.039166666666666666), "-0.0391666666667");
        assert_eq!(format_number(1.234e-9), "1.234e-9");
    }

    #[test]
    fn header_matches_schema() {
        assert_eq!(
            trajectory_header(2).join(","),
            "t,A11,A12,A21,A22,l1,l2,b,lambda,r,G,W,k,dr_dt,viable"
        );
    }

    #[test]
    fn csv_round_trip() {
        let traj = simulate(&SimConfig::table1().with_beta(4.5)).unwrap();
        let rows = parse_trajectory_csv(&trajectory_csv(&traj).unwrap()).unwrap();
        assert_eq!(rows.len(), traj.points.len());
        let close = |a: f64, b: f64| (a - b).abs() <= 5e-12 * b.abs().max(1e-300);
        for (row, p) in rows.iter().zip(&traj.points) {
            assert!(close(row.lambda, p.lambda) && close(row.r, p.r) && close(row.k, p.k));
            assert!(close(row.g, p.g) && close(row.dr_dt, p.dr_dt) && close(row.b, p.b));
            assert!(close(row.a[3], p.tech.a()[(1, 1)]) && close(row.l[1], p.tech.l()[1]));
            assert_eq!(row.viable, p.viable);
        }
        assert!(rows.iter().any(|r| !r.viable));
    }

    #[test]
    fn thresholds_rounded() {
        let th = Thresholds {
            k_min: 0.263157894,
            k_max: 0.36166985,
            t_k_min: 0.0,
            t_k_max: 10.0,
            beta_min: 2.76495258,
            beta_max: 3.8000000001,
        };
        let f = ThresholdsFile::new(3.3, &th);
        assert_eq!(f.beta_min, 2.765);
        assert_eq!(f.beta_max, 3.8);
        assert_eq!(f.k_min, 0.2632);
    }
}
