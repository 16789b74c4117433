//! Regime classification of profit-rate trajectories.
//!
//! With `k_min`, `k_max` the extremes of `k(t)` on `[0, T]`, the critical
//! elasticities are `β_min = 1/k_max` and `β_max = 1/k_min`. Below `β_min` the
//! profit rate rises throughout, above `β_max` it falls throughout, and in
//! between it peaks once at `t_c` where `β·k(t_c) = 1` (when `k` is monotone).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, Trajectory};
use crate::{Error, Result};

/// Extremes are taken from a re-simulation at `dt / REFINEMENT`.
pub const REFINEMENT: usize = 10;
/// Relative distance of `β` to a threshold below which the regime is
/// reported as [`Regime::Boundary`].
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-3;
/// Target for `|1 − β·k(t_c)|`.
pub const ROOT_TOL: f64 = 1e-8;
/// `|1 − β·k|` at or below this counts as an exact root on the grid.
const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    TechnologyDominated,
    HumpShaped,
    WageDominated,
    Boundary,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::TechnologyDominated => "technology_dominated",
            Regime::HumpShaped => "hump_shaped",
            Regime::WageDominated => "wage_dominated",
            Regime::Boundary => "boundary",
        })
    }
}

/// Observed sign sequence of a series, zeros ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    Rising,
    RiseThenFall,
    Falling,
    Flat,
    Other { sign_changes: usize },
}

impl SignPattern {
    pub fn of(values: &[f64]) -> Self {
        let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let signs: Vec<bool> = values
            .iter()
            .filter(|x| x.abs() > 1e-14 * scale)
            .map(|&x| x > 0.0)
            .collect();
        let Some(&first) = signs.first() else {
            return SignPattern::Flat;
        };
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        match (changes, first) {
            (0, true) => SignPattern::Rising,
            (0, false) => SignPattern::Falling,
            (1, true) => SignPattern::RiseThenFall,
            (sign_changes, _) => SignPattern::Other { sign_changes },
        }
    }

    fn consistent_with(self, regime: Regime) -> bool {
        match (regime, self) {
            (_, SignPattern::Flat) => true,
            (Regime::TechnologyDominated, p) => p == SignPattern::Rising,
            (Regime::HumpShaped, p) => p == SignPattern::RiseThenFall,
            (Regime::WageDominated, p) => p == SignPattern::Falling,
            (Regime::Boundary, p) => !matches!(p, SignPattern::Other { .. }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KExtremes {
    pub k_min: f64,
    pub k_max: f64,
    pub t_k_min: f64,
    pub t_k_max: f64,
}

/// Extremes of the sampled `k(t)`. An interior grid extremum is refined by
/// the vertex of the parabola through it and its two neighbours.
pub fn k_extremes(traj: &Trajectory) -> Result<KExtremes> {
    let t = traj.times();
    let k = traj.series(|p| p.k);
    if k.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let argmin = (0..k.len()).fold(0, |best, i| if k[i] < k[best] { i } else { best });
    let argmax = (0..k.len()).fold(0, |best, i| if k[i] > k[best] { i } else { best });
    let (t_k_min, k_min) = refine_extremum(&t, &k, argmin);
    let (t_k_max, k_max) = refine_extremum(&t, &k, argmax);
    Ok(KExtremes {
        k_min: k_min.min(k[argmin]),
        k_max: k_max.max(k[argmax]),
        t_k_min,
        t_k_max,
    })
}

fn refine_extremum(t: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= y.len() {
        return (t[i], y[i]);
    }
    let (x0, x1, x2) = (t[i - 1], t[i], t[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    // Newton form: y0 + d1 (x − x0) + d2 (x − x0)(x − x1)
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = ((y2 - y1) / (x2 - x1) - d1) / (x2 - x0);
    if d2 == 0.0 {
        return (x1, y1);
    }
    let xv = 0.5 * (x0 + x1) - d1 / (2.0 * d2);
    if !(x0..=x2).contains(&xv) {
        return (x1, y1);
    }
    (xv, y0 + d1 * (xv - x0) + d2 * (xv - x0) * (xv - x1))
}

/// `(β_min, β_max) = (1/k_max, 1/k_min)`.
pub fn critical_elasticities(k_min: f64, k_max: f64) -> Result<(f64, f64)> {
    if !(k_min > 0.0 && k_max > 0.0) {
        return Err(Error::NonPositiveK { k_min, k_max });
    }
    if k_min > k_max {
        return Err(Error::Invalid(format!("k_min {k_min} exceeds k_max {k_max}")));
    }
    Ok((1.0 / k_max, 1.0 / k_min))
}

/// Regime for `β` against the band `(β_min, β_max)`.
pub fn regime_for(beta: f64, beta_min: f64, beta_max: f64, tol_boundary: f64) -> Regime {
    let near = |threshold: f64| (beta - threshold).abs() <= tol_boundary * threshold;
    if near(beta_min) || near(beta_max) {
        Regime::Boundary
    } else if beta < beta_min {
        Regime::TechnologyDominated
    } else if beta > beta_max {
        Regime::WageDominated
    } else {
        Regime::HumpShaped
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::DimensionMismatch { expected: n, found: y.len() });
        }
        if n < 2 {
            return Err(Error::Invalid("interpolation needs two points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("abscissae must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = delta[0];
        slopes[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                // weighted harmonic mean keeps each piece monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Ok(Self { x, y, slopes })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub t_c: f64,
    /// Number of roots of `1 − β·k(t)` found on the grid; more than one means
    /// the uniqueness premise failed and `t_c` is the first.
    pub crossings: usize,
    /// Root sits on the first or last grid point.
    pub at_boundary: bool,
}

/// First root of `1 − β·k(t)`: grid scan for a sign change, then bisection
/// on a monotone cubic through the sampled `k(t)`.
pub fn turning_point(traj: &Trajectory, beta: f64) -> Result<TurningPoint> {
    let t = traj.times();
    let k = traj.series(|p| p.k);
    if k.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let f: Vec<f64> = k.iter().map(|kk| 1.0 - beta * kk).collect();
    let last = f.len() - 1;

    let mut roots: Vec<(usize, bool)> = Vec::new(); // (index, exact at grid point)
    let mut prev_sign: Option<bool> = None;
    let mut in_zero = false;
    for (i, &fi) in f.iter().enumerate() {
        if fi.abs() <= ZERO_TOL {
            if !in_zero {
                roots.push((i, true));
            }
            in_zero = true;
            continue;
        }
        let sign = fi > 0.0;
        if !in_zero && prev_sign.is_some_and(|s| s != sign) {
            roots.push((i - 1, false));
        }
        in_zero = false;
        prev_sign = Some(sign);
    }

    let Some(&(i, exact)) = roots.first() else {
        return Err(Error::NoSignChange { beta });
    };
    let crossings = roots.len();
    if exact {
        return Ok(TurningPoint {
            t_c: t[i],
            crossings,
            at_boundary: i == 0 || i == last,
        });
    }

    let interp = MonotoneCubic::new(t.clone(), k)?;
    let g = |x: f64| 1.0 - beta * interp.eval(x);
    let (mut lo, mut hi) = (t[i], t[i + 1]);
    let lo_positive = g(lo) > 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() < 1e-3 * ROOT_TOL || hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if (gm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TurningPoint {
        t_c: mid,
        crossings,
        at_boundary: false,
    })
}

/// Critical elasticities for a trajectory, read off a re-simulation at
/// `dt / REFINEMENT`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub k_min: f64,
    pub k_max: f64,
    pub t_k_min: f64,
    pub t_k_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

pub fn thresholds(traj: &Trajectory) -> Result<Thresholds> {
    let refined = refine(traj)?;
    thresholds_from(&refined)
}

fn refine(traj: &Trajectory) -> Result<Trajectory> {
    dynamics::simulate(&traj.config.with_dt(traj.config.dt / REFINEMENT as f64))
}

fn thresholds_from(traj: &Trajectory) -> Result<Thresholds> {
    let ex = k_extremes(traj)?;
    let (beta_min, beta_max) = critical_elasticities(ex.k_min, ex.k_max)?;
    Ok(Thresholds {
        k_min: ex.k_min,
        k_max: ex.k_max,
        t_k_min: ex.t_k_min,
        t_k_max: ex.t_k_max,
        beta_min,
        beta_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub beta: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub t_k_min: f64,
    pub t_k_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub regime: Regime,
    pub t_c: Option<f64>,
    /// Roots of `1 − β·k(t)` on the horizon (hump-shaped runs only).
    pub crossings: usize,
    /// Sign pattern of the recorded `dr/dt` series.
    pub observed: SignPattern,
    pub warnings: Vec<String>,
}

/// Classifies a trajectory by its own `β`.
///
/// Thresholds and `t_c` come from a refined re-simulation; the regime is then
/// checked against the sign pattern of `dr/dt` on the trajectory's own grid
/// and any disagreement is listed in `warnings`.
pub fn classify(traj: &Trajectory, tol_boundary: f64) -> Result<RegimeReport> {
    if traj.points.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let refined = refine(traj)?;
    let th = thresholds_from(&refined)?;
    let beta = traj.config.beta;
    let regime = regime_for(beta, th.beta_min, th.beta_max, tol_boundary);
    let mut warnings = Vec::new();

    let (t_c, crossings) = if regime == Regime::HumpShaped {
        let tp = turning_point(&refined, beta)?;
        if tp.crossings > 1 {
            warnings.push(format!(
                "1 - beta*k(t) changes sign {} times; t_c is the first root",
                tp.crossings
            ));
        }
        (Some(tp.t_c), tp.crossings)
    } else {
        (None, 0)
    };

    let observed = SignPattern::of(&traj.series(|p| p.dr_dt));
    if !observed.consistent_with(regime) {
        warnings.push(format!("regime {regime} disagrees with observed dr/dt pattern {observed:?}"));
    }
    if observed == SignPattern::Flat {
        warnings.push("dr/dt vanishes on the whole horizon (no technical change)".into());
    }
    if !traj.all_viable() {
        warnings.push("trajectory contains non-viable points (lambda >= 1)".into());
    }

    Ok(RegimeReport {
        beta,
        k_min: th.k_min,
        k_max: th.k_max,
        t_k_min: th.t_k_min,
        t_k_max: th.t_k_max,
        beta_min: th.beta_min,
        beta_max: th.beta_max,
        regime,
        t_c,
        crossings,
        observed,
        warnings,
    })
}
