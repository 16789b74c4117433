use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use okidyn_core::dynamics::{self, SimConfig, Trajectory, WageMode};
use okidyn_core::regimes::{self, RegimeReport, Thresholds, DEFAULT_BOUNDARY_TOL};
use rayon::prelude::*;

use crate::config;
use crate::error::{CliError, Result};
use crate::output::{self, ThresholdsFile};
use crate::plot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    Sweep,
    Thresholds,
    Classify,
}

/// `start:stop:count`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl BetaGrid {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + i as f64 * step
                }
            })
            .collect()
    }
}

impl FromStr for BetaGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("beta grid '{s}' must look like start:stop:count"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}' in beta grid"));
        let count = n
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("bad count '{n}' in beta grid"))?;
        Ok(Self {
            start: num(a)?,
            stop: num(b)?,
            count,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub beta_grid: Option<BetaGrid>,
    pub beta: Option<f64>,
    pub wage_mode: Option<WageMode>,
    pub plot: bool,
}

impl RunManifest {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(CliError::Validation(m));
        match (self.command, self.beta_grid) {
            (Command::Sweep, None) => return invalid("sweep requires --beta-grid".into()),
            (Command::Sweep, Some(g)) => {
                if g.count < 2 {
                    return invalid(format!("beta grid needs at least 2 points, got {}", g.count));
                }
                if !(g.start < g.stop) || !g.start.is_finite() || !g.stop.is_finite() {
                    return invalid(format!("beta grid start {} must be below stop {}", g.start, g.stop));
                }
                if g.start < 0.0 {
                    return invalid("beta grid must be nonnegative".into());
                }
            }
            (_, Some(_)) => return invalid("--beta-grid is only valid for sweep".into()),
            (_, None) => {}
        }
        Ok(())
    }

    fn load(&self) -> Result<SimConfig> {
        let mut cfg = config::load_config(&self.config_path)?;
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if let Some(mode) = self.wage_mode {
            cfg.wage_mode = mode;
        }
        cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(cfg)
    }
}

pub fn run(manifest: &RunManifest, out: &mut dyn Write) -> Result<()> {
    manifest.validate()?;
    let cfg = manifest.load()?;
    match manifest.command {
        Command::Simulate => simulate(manifest, &cfg, out),
        Command::Sweep => sweep(manifest, &cfg, out),
        Command::Thresholds => thresholds(manifest, &cfg, out),
        Command::Classify => classify(manifest, &cfg, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) {
    let _ = out.write_fmt(text);
    let _ = out.write_all(b"\n");
}

pub fn report_summary(report: &RegimeReport) -> String {
    let mut s = format!(
        "beta = {}  regime = {}\n  k in [{:.6}, {:.6}]  beta_min = {:.4}  beta_max = {:.4}",
        report.beta, report.regime, report.k_min, report.k_max, report.beta_min, report.beta_max
    );
    if let Some(t_c) = report.t_c {
        s.push_str(&format!("\n  turning point t_c = {t_c:.6}"));
    }
    for w in &report.warnings {
        s.push_str(&format!("\n  warning: {w}"));
    }
    s
}

fn simulate(m: &RunManifest, cfg: &SimConfig, out: &mut dyn Write) -> Result<()> {
    let traj = dynamics::simulate(cfg)?;
    output::write_file(&m.output_dir, "trajectory.csv", &output::trajectory_csv(&traj)?)?;
    if m.plot {
        output::write_file(&m.output_dir, "trajectory.svg", plot::trajectory_svg(&traj).as_bytes())?;
    }
    let report = regimes::classify(&traj, DEFAULT_BOUNDARY_TOL)?;
    let last = traj.last().expect("trajectory has points");
    say(out, format_args!(
        "simulated {} points, r(0) = {:.6}, r(T) = {:.6}",
        traj.points.len(),
        traj.points[0].r,
        last.r
    ));
    say(out, format_args!("{}", report_summary(&report)));
    Ok(())
}

fn run_one(cfg: &SimConfig) -> Result<(Trajectory, RegimeReport)> {
    let traj = dynamics::simulate(cfg)?;
    let report = regimes::classify(&traj, DEFAULT_BOUNDARY_TOL)?;
    Ok((traj, report))
}

fn sweep(m: &RunManifest, cfg: &SimConfig, out: &mut dyn Write) -> Result<()> {
    let grid = m.beta_grid.expect("validated");
    let results: Vec<(Trajectory, RegimeReport)> = grid
        .values()
        .into_par_iter()
        .map(|beta| run_one(&cfg.with_beta(beta)))
        .collect::<Result<_>>()?;
    let (runs, reports): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    output::write_file(&m.output_dir, "sweep.csv", &output::sweep_csv(&runs)?)?;
    output::write_file(&m.output_dir, "regimes.json", &output::reports_json(&reports))?;
    if m.plot {
        let th = regimes::thresholds(&dynamics::simulate(cfg)?)?;
        output::write_file(&m.output_dir, "sweep.svg", plot::sweep_svg(&runs, &reports, &th).as_bytes())?;
    }
    for r in &reports {
        let tc = r.t_c.map(|t| format!("  t_c = {t:.4}")).unwrap_or_default();
        say(out, format_args!("beta = {:<8.4} {}{}", r.beta, r.regime, tc));
    }
    Ok(())
}

pub fn table2(th: &Thresholds) -> String {
    format!(
        "{:<28}{:<30}{}\n{:<28}{:<30}{}\n{:<28}{:<30}{}\n{:<28}{:<30}{}",
        "beta range",
        "behaviour of r(t)",
        "dominant mechanism",
        format!("beta < {:.4}", th.beta_min),
        "monotonically increasing",
        "technology effect",
        format!("{:.4} < beta < {:.4}", th.beta_min, th.beta_max),
        "increasing then decreasing",
        "technology -> wage transition",
        format!("beta > {:.4}", th.beta_max),
        "monotonically decreasing",
        "wage effect",
    )
}

fn thresholds(m: &RunManifest, cfg: &SimConfig, out: &mut dyn Write) -> Result<()> {
    let traj = dynamics::simulate(cfg)?;
    let th = regimes::thresholds(&traj)?;
    let file = ThresholdsFile::new(cfg.beta, &th);
    output::write_file(&m.output_dir, "thresholds.json", &output::to_json(&file))?;
    say(out, format_args!(
        "k_min = {:.4} (t = {:.4})  k_max = {:.4} (t = {:.4})",
        file.k_min, file.t_k_min, file.k_max, file.t_k_max
    ));
    say(out, format_args!("{}", table2(&th)));
    Ok(())
}

fn classify(m: &RunManifest, cfg: &SimConfig, out: &mut dyn Write) -> Result<()> {
    let (_, report) = run_one(cfg)?;
    output::write_file(&m.output_dir, "regime.json", &output::to_json(&report))?;
    say(out, format_args!("{}", report_summary(&report)));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: BetaGrid = "2.0:4.5:3".parse().unwrap();
        assert_eq!(g.values(), vec![2.0, 3.25, 4.5]);
        assert!("2:4".parse::<BetaGrid>().is_err());
        assert!("a:4:3".parse::<BetaGrid>().is_err());
    }

    fn manifest(command: Command, grid: Option<&str>) -> RunManifest {
        RunManifest {
            command,
            config_path: "x.json".into(),
            output_dir: "out".into(),
            beta_grid: grid.map(|g| g.parse().unwrap()),
            beta: None,
            wage_mode: None,
            plot: false,
        }
    }

    #[test]
    fn manifest_rules() {
        assert!(manifest(Command::Sweep, Some("1:2:3")).validate().is_ok());
        assert!(manifest(Command::Sweep, None).validate().is_err());
        assert!(manifest(Command::Sweep, Some("1:2:1")).validate().is_err());
        assert!(manifest(Command::Sweep, Some("2:1:3")).validate().is_err());
        assert!(manifest(Command::Simulate, Some("1:2:3")).validate().is_err());
        assert!(manifest(Command::Classify, None).validate().is_ok());
    }
}
