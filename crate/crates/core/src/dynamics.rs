//! Coupled simulation of technology diffusion, wage growth and the Perron
//! root.
//!
//! The rate of change of `λ` splits into a technology effect
//! `G = Σ ∂λ/∂a_ij·ȧ_ij + Σ ∂λ/∂l_j·l̇_j ≤ 0` and a wage effect
//! `W = ∂λ/∂b·ḃ ≥ 0`. Under the default wage law `ḃ = −β·(b/λ)·G` this gives
//! `dλ/dt = G·(1 − β·k)` with `k = (b/λ)·∂λ/∂b`, so the profit rate rises
//! exactly while `β·k < 1`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::diffusion::DiffusionSchedule;
use crate::economy::{self, TechnologyState, WageState};
use crate::perron::{self, PerronTriple, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::{Error, Result, SquareMatrix};

/// How the real wage responds to productivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WageMode {
    /// `ḃ = −β·(b/λ)·G`: wages track the technology-driven change of `λ`.
    #[default]
    Differential,
    /// `b(t) = b₀·(λ₀/λ(t))^β` with `λ(t)` the Perron root at `b(t)` itself:
    /// wages track the total change of `λ`.
    #[serde(alias = "closed-form")]
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub schedule: DiffusionSchedule,
    pub b0: f64,
    pub beta: f64,
    /// Horizon `T`.
    pub horizon: f64,
    pub dt: f64,
    pub wage_mode: WageMode,
    /// Eigen-residual tolerance for every Perron solve.
    pub tol: f64,
}

impl SimConfig {
    /// The two-sector reference experiment: `b₀ = 0.5`, `β = 3.3`, `T = 10`,
    /// `dt = 0.1`.
    pub fn table1() -> Self {
        Self {
            schedule: DiffusionSchedule::table1(),
            b0: 0.5,
            beta: 3.3,
            horizon: 10.0,
            dt: 0.1,
            wage_mode: WageMode::Differential,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            beta,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive, got {x}")))
            }
        };
        positive("b0", self.b0)?;
        positive("T", self.horizon)?;
        positive("dt", self.dt)?;
        positive("tol", self.tol)?;
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Invalid(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if self.dt >= self.horizon {
            return Err(Error::Invalid(format!(
                "dt ({}) must be smaller than T ({})",
                self.dt, self.horizon
            )));
        }
        Ok(())
    }

    /// Grid times `0, dt, 2dt, …, T`; the last step is shortened if `dt`
    /// does not divide `T`.
    pub fn grid(&self) -> Vec<f64> {
        let steps = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        let mut out: Vec<f64> = (0..steps).map(|i| i as f64 * self.dt).collect();
        out.push(self.horizon);
        out
    }
}

/// State and diagnostics at one grid time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub tech: TechnologyState,
    pub b: f64,
    pub lambda: f64,
    pub r: f64,
    /// Technology effect `G`.
    pub g: f64,
    /// Wage effect `W`.
    pub w: f64,
    pub k: f64,
    pub dr_dt: f64,
    /// `λ < 1`.
    pub viable: bool,
}

impl TrajectoryPoint {
    /// `dλ/dt = G + W`.
    pub fn dlambda_dt(&self) -> f64 {
        self.g + self.w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub config: SimConfig,
}

impl Trajectory {
    pub fn series(&self, f: impl Fn(&TrajectoryPoint) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.series(|p| p.t)
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn all_viable(&self) -> bool {
        self.points.iter().all(|p| p.viable)
    }
}

/// `G = Σ v_i u_j·ȧ_ij + Σ b(Σv)u_j·l̇_j`.
pub fn technology_effect(
    tech: &TechnologyState,
    wage: &WageState,
    triple: &PerronTriple,
    da: &SquareMatrix,
    dl: &[f64],
) -> Result<f64> {
    if dl.len() != tech.dim() {
        return Err(Error::DimensionMismatch {
            expected: tech.dim(),
            found: dl.len(),
        });
    }
    let from_inputs = perron::dlambda_direction(triple, da)?;
    let from_labor: f64 = economy::dlambda_dl(wage, triple)
        .iter()
        .zip(dl)
        .map(|(s, r)| s * r)
        .sum();
    Ok(from_inputs + from_labor)
}

/// `ḃ = −β·(b/λ)·G`.
pub fn wage_rhs(b: f64, beta: f64, lambda: f64, g: f64) -> f64 {
    -beta * b / lambda * g
}

/// `b₀·(λ₀/λ_t)^β`.
pub fn closed_form_wage(b0: f64, beta: f64, lambda0: f64, lambda_t: f64) -> f64 {
    b0 * (lambda0 / lambda_t).powf(beta)
}

/// Everything the integrator and the recorder need at one `(t, state)`.
struct Snapshot {
    tech: TechnologyState,
    b: f64,
    triple: PerronTriple,
    g: f64,
    k: f64,
    w: f64,
    follower_rates: Vec<f64>,
    db_dt: f64,
}

struct Simulator<'a> {
    config: &'a SimConfig,
    lambda0: f64,
    /// Last Perron triple, used to warm-start the next solve.
    last: RefCell<Option<PerronTriple>>,
}

impl<'a> Simulator<'a> {
    fn perron(&self, m: &SquareMatrix) -> Result<PerronTriple> {
        let mut last = self.last.borrow_mut();
        let triple = perron::spectral_radius_from(m, self.config.tol, DEFAULT_MAX_ITER, last.as_ref())?;
        *last = Some(triple.clone());
        Ok(triple)
    }

    /// Real wage consistent with `b = b₀·(λ₀/λ(b))^β` for the technique at
    /// hand. The left side increases and the right side decreases in `b`, so
    /// the root is unique and lies in `(0, b₀·(λ₀/ρ(A))^β]`.
    fn closed_form_b(&self, tech: &TechnologyState) -> Result<f64> {
        let cfg = self.config;
        if cfg.beta == 0.0 {
            return Ok(cfg.b0);
        }
        let lambda_at = |b: f64| -> Result<PerronTriple> {
            self.perron(&economy::augmented_matrix(tech, &WageState { b, beta: cfg.beta }))
        };
        let h = |b: f64, lambda: f64| b - closed_form_wage(cfg.b0, cfg.beta, self.lambda0, lambda);

        let mut lo = 0.0;
        let mut hi = closed_form_wage(cfg.b0, cfg.beta, self.lambda0, self.perron(tech.a())?.lambda());
        let mut b = cfg.b0.clamp(lo, hi);
        for _ in 0..200 {
            let triple = lambda_at(b)?;
            let value = h(b, triple.lambda());
            if value.abs() <= 1e-15 * b.max(1e-300) {
                return Ok(b);
            }
            if value > 0.0 {
                hi = b;
            } else {
                lo = b;
            }
            // d/db of b₀(λ₀/λ)^β is −β·(rhs/λ)·∂λ/∂b
            let rhs = b - value;
            let slope =
                1.0 + cfg.beta * rhs / triple.lambda() * economy::dlambda_db(tech, &triple);
            let newton = b - value / slope;
            b = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * hi {
                return Ok(b);
            }
        }
        Ok(b)
    }

    fn snapshot(&self, t: f64, state: &[f64]) -> Result<Snapshot> {
        let cfg = self.config;
        let schedule = &cfg.schedule;
        let nf = schedule.followers().len();
        let followers = &state[..nf];
        let tech = schedule.technology_at(t, followers)?;
        let b = match cfg.wage_mode {
            WageMode::Differential => state[nf],
            WageMode::ClosedForm => self.closed_form_b(&tech)?,
        };
        let wage = WageState { b, beta: cfg.beta };
        let triple = self.perron(&economy::augmented_matrix(&tech, &wage))?;
        let (da, dl) = schedule.rates_at(t, followers)?;
        let follower_rates = schedule.follower_derivatives(t, followers)?;
        let g = technology_effect(&tech, &wage, &triple, &da, &dl)?;
        let k = economy::k_sensitivity(&tech, &wage, &triple);
        let (w, db_dt) = match cfg.wage_mode {
            WageMode::Differential => {
                let db = wage_rhs(b, cfg.beta, triple.lambda(), g);
                (economy::dlambda_db(&tech, &triple) * db, db)
            }
            WageMode::ClosedForm => {
                // ḃ = −β·(b/λ)·(G + W) and W = ∂λ/∂b·ḃ
                let w = -cfg.beta * k * g / (1.0 + cfg.beta * k);
                (w, -cfg.beta * b / triple.lambda() * (g + w))
            }
        };
        Ok(Snapshot {
            tech,
            b,
            triple,
            g,
            k,
            w,
            follower_rates,
            db_dt,
        })
    }

    fn derivative(&self, t: f64, state: &[f64]) -> Result<Vec<f64>> {
        let snap = self.snapshot(t, state)?;
        let mut d = snap.follower_rates;
        if self.config.wage_mode == WageMode::Differential {
            d.push(snap.db_dt);
        }
        Ok(d)
    }

    fn rk4_step(&self, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
        let axpy = |a: f64, x: &[f64]| -> Vec<f64> { y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect() };
        let k1 = self.derivative(t, y)?;
        let k2 = self.derivative(t + 0.5 * h, &axpy(0.5 * h, &k1))?;
        let k3 = self.derivative(t + 0.5 * h, &axpy(0.5 * h, &k2))?;
        let k4 = self.derivative(t + h, &axpy(h, &k3))?;
        Ok(y.iter()
            .enumerate()
            .map(|(i, yi)| yi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    fn record(&self, t: f64, state: &[f64]) -> Result<TrajectoryPoint> {
        let snap = self.snapshot(t, state)?;
        let lambda = snap.triple.lambda();
        let dlambda = snap.g + snap.w;
        Ok(TrajectoryPoint {
            t,
            tech: snap.tech,
            b: snap.b,
            lambda,
            r: 1.0 / lambda - 1.0,
            g: snap.g,
            w: snap.w,
            k: snap.k,
            dr_dt: -dlambda / (lambda * lambda),
            viable: lambda < 1.0,
        })
    }
}

/// Fixed-step RK4 over `[0, T]`.
///
/// The state vector holds the follower coefficients and, in
/// [`WageMode::Differential`], the real wage. Innovator coefficients are
/// evaluated in closed form at every stage and each stage solves a fresh
/// Perron problem. Points with `λ ≥ 1` are flagged, not fatal; a failed
/// Perron solve aborts with the offending time.
pub fn simulate(config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    let schedule = &config.schedule;
    let tech0 = schedule.technology_at(0.0, &schedule.initial_follower_state())?;
    let triple0 = perron::spectral_radius(
        &economy::augmented_matrix(&tech0, &WageState { b: config.b0, beta: config.beta }),
        config.tol,
        DEFAULT_MAX_ITER,
    )
    .map_err(|e| at(0.0, e))?;
    economy::profit_rate(triple0.lambda())?;

    let sim = Simulator {
        config,
        lambda0: triple0.lambda(),
        last: RefCell::new(Some(triple0.clone())),
    };
    let mut state = schedule.initial_follower_state();
    if config.wage_mode == WageMode::Differential {
        state.push(config.b0);
    }

    let grid = config.grid();
    let mut points = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        points.push(sim.record(t, &state).map_err(|e| at(t, e))?);
        if let Some(&next) = grid.get(i + 1) {
            state = sim.rk4_step(t, &state, next - t).map_err(|e| at(t, e))?;
        }
    }
    Ok(Trajectory {
        points,
        config: config.clone(),
    })
}

fn at(t: f64, e: Error) -> Error {
    match e {
        Error::AtTime { .. } => e,
        other => Error::AtTime {
            t,
            source: Box::new(other),
        },
    }
}

/// Largest gap over interior points between the central difference of the
/// `λ` series and the recorded `dλ/dt = G + W`.
pub fn decomposition_residual(traj: &Trajectory) -> f64 {
    traj.points
        .windows(3)
        .map(|w| {
            let numeric = (w[2].lambda - w[0].lambda) / (w[2].t - w[0].t);
            (numeric - w[1].dlambda_dt()).abs()
        })
        .fold(0.0, f64::max)
}
