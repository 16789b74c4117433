//! Technology adoption paths.
//!
//! Innovator coefficients close their gap to the frontier exponentially,
//! `x(t) = x* + (x⁰ − x*)·e^(−κt)`. Follower coefficients move at a rate
//! scaled by how far their leader has already travelled,
//! `ẋ = −κ·(x − x*)·g(t)` with `g(t) = (x⁰_lead − x_lead(t)) / (x⁰_lead − x*_lead)`,
//! so a follower is frozen at `t = 0` and speeds up as the innovator
//! completes adoption. Everything else stays constant.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::economy::TechnologyState;
use crate::{Error, Result, SquareMatrix};

/// A technical coefficient: input-matrix entry or labor entry (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coefficient {
    A(usize, usize),
    L(usize),
}

impl fmt::Display for Coefficient {
    /// 1-based names: `A11`, `A12`, `l2`. Indices past 9 use a comma, `A10,3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coefficient::A(i, j) if i < 9 && j < 9 => write!(f, "A{}{}", i + 1, j + 1),
            Coefficient::A(i, j) => write!(f, "A{},{}", i + 1, j + 1),
            Coefficient::L(j) => write!(f, "l{}", j + 1),
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown coefficient '{s}' (expected e.g. A11, A2,3 or l1)"));
        let index = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(bad()),
            }
        };
        if let Some(rest) = s.strip_prefix('A') {
            if let Some((i, j)) = rest.split_once(',') {
                return Ok(Coefficient::A(index(i)?, index(j)?));
            }
            let digits: Vec<char> = rest.chars().collect();
            if digits.len() == 2 && digits.iter().all(char::is_ascii_digit) {
                return Ok(Coefficient::A(
                    index(&digits[0].to_string())?,
                    index(&digits[1].to_string())?,
                ));
            }
            return Err(bad());
        }
        if let Some(rest) = s.strip_prefix('l').or_else(|| s.strip_prefix('L')) {
            return Ok(Coefficient::L(index(rest)?));
        }
        Err(bad())
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathKind {
    Innovator,
    /// Driven by the normalized gap closure of `leader`, which must be an
    /// innovator path.
    Follower { leader: Coefficient },
    Constant,
}

impl PathKind {
    fn name(&self) -> &'static str {
        match self {
            PathKind::Innovator => "innovator",
            PathKind::Follower { .. } => "follower",
            PathKind::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPath {
    pub initial: f64,
    pub frontier: f64,
    pub kappa: f64,
    pub kind: PathKind,
}

impl CoefficientPath {
    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            frontier: value,
            kappa: 0.0,
            kind: PathKind::Constant,
        }
    }

    pub fn innovator(initial: f64, frontier: f64, kappa: f64) -> Self {
        Self {
            initial,
            frontier,
            kappa,
            kind: PathKind::Innovator,
        }
    }

    pub fn follower(initial: f64, frontier: f64, kappa: f64, leader: Coefficient) -> Self {
        Self {
            initial,
            frontier,
            kappa,
            kind: PathKind::Follower { leader },
        }
    }

    fn validate(&self, id: Coefficient) -> Result<()> {
        let fail = |msg: String| Err(Error::Invalid(format!("path {id}: {msg}")));
        if !(self.initial.is_finite() && self.frontier.is_finite()) {
            return fail("coefficients must be finite".into());
        }
        if self.frontier < 0.0 {
            return fail(format!("frontier {} is negative", self.frontier));
        }
        if self.frontier > self.initial {
            return fail(format!(
                "frontier {} exceeds initial value {}",
                self.frontier, self.initial
            ));
        }
        match self.kind {
            PathKind::Constant if self.frontier != self.initial => {
                fail("constant path must have frontier == initial".into())
            }
            PathKind::Constant => Ok(()),
            _ if !(self.kappa > 0.0 && self.kappa.is_finite()) => {
                fail(format!("adoption speed must be positive, got {}", self.kappa))
            }
            _ => Ok(()),
        }
    }

    fn expect_innovator(&self) -> Result<()> {
        match self.kind {
            PathKind::Innovator => Ok(()),
            other => Err(Error::WrongKind {
                expected: "innovator",
                found: other.name(),
            }),
        }
    }
}

/// `x* + (x⁰ − x*)·e^(−κt)`.
pub fn innovator_value(path: &CoefficientPath, t: f64) -> Result<f64> {
    path.expect_innovator()?;
    Ok(path.frontier + (path.initial - path.frontier) * (-path.kappa * t).exp())
}

/// Time derivative of [`innovator_value`].
pub fn innovator_rate(path: &CoefficientPath, t: f64) -> Result<f64> {
    path.expect_innovator()?;
    Ok(-path.kappa * (path.initial - path.frontier) * (-path.kappa * t).exp())
}

/// Share of the innovator's gap already closed, `1 − e^(−κt)` ∈ [0, 1].
pub fn gap_factor(innovator: &CoefficientPath, t: f64) -> Result<f64> {
    innovator.expect_innovator()?;
    if innovator.initial == innovator.frontier {
        return Err(Error::DegenerateGap);
    }
    Ok(-(-innovator.kappa * t).exp_m1())
}

/// `−κ·(current − frontier)·gap`.
pub fn follower_rhs(current: f64, path: &CoefficientPath, gap: f64) -> f64 {
    -path.kappa * (current - path.frontier) * gap
}

/// One path per technical coefficient of an `n`-sector economy.
///
/// Follower values are not stored here: they are integrated by the caller
/// and passed in as a state vector ordered like [`DiffusionSchedule::followers`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSchedule {
    n: usize,
    paths: BTreeMap<Coefficient, CoefficientPath>,
    followers: Vec<Coefficient>,
}

impl DiffusionSchedule {
    /// Validates that every `A` and `l` entry has exactly one path and that
    /// each follower is led by an innovator.
    pub fn new(n: usize, paths: BTreeMap<Coefficient, CoefficientPath>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("schedule needs at least two sectors".into()));
        }
        let expected = all_coefficients(n);
        if let Some(extra) = paths.keys().find(|c| !in_range(**c, n)) {
            return Err(Error::Invalid(format!("coefficient {extra} outside a {n}-sector economy")));
        }
        if let Some(missing) = expected.iter().find(|c| !paths.contains_key(c)) {
            return Err(Error::Invalid(format!("no path for coefficient {missing}")));
        }
        for (id, path) in &paths {
            path.validate(*id)?;
            if let PathKind::Follower { leader } = path.kind {
                match paths.get(&leader) {
                    Some(p) if p.kind == PathKind::Innovator => {}
                    _ => {
                        return Err(Error::Invalid(format!(
                            "follower {id} must be led by an innovator path, {leader} is not one"
                        )))
                    }
                }
            }
        }
        let followers = paths
            .iter()
            .filter(|(_, p)| matches!(p.kind, PathKind::Follower { .. }))
            .map(|(id, _)| *id)
            .collect();
        Ok(Self {
            n,
            paths,
            followers,
        })
    }

    /// Every coefficient constant at its value in `(a0, l0)`.
    pub fn constant(a0: &SquareMatrix, l0: &[f64]) -> Result<Self> {
        let n = a0.dim();
        if l0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: l0.len(),
            });
        }
        let paths = all_coefficients(n)
            .into_iter()
            .map(|c| {
                let value = match c {
                    Coefficient::A(i, j) => a0[(i, j)],
                    Coefficient::L(j) => l0[j],
                };
                (c, CoefficientPath::constant(value))
            })
            .collect();
        Self::new(n, paths)
    }

    /// Returns a copy with one path replaced.
    pub fn with_path(&self, id: Coefficient, path: CoefficientPath) -> Result<Self> {
        let mut paths = self.paths.clone();
        paths.insert(id, path);
        Self::new(self.n, paths)
    }

    /// Two sectors: sector 1 innovates in `A11` and `l1`, sector 2 follows
    /// in `A22` and `l2`, cross inputs stay fixed. Speed `κ = 0.5`.
    pub fn table1() -> Self {
        let a0 = SquareMatrix::new2([[0.5, 0.2], [0.3, 0.4]]);
        let kappa = 0.5;
        Self::constant(&a0, &[0.2, 0.3])
            .and_then(|s| s.with_path(Coefficient::A(0, 0), CoefficientPath::innovator(0.5, 0.4, kappa)))
            .and_then(|s| s.with_path(Coefficient::L(0), CoefficientPath::innovator(0.2, 0.15, kappa)))
            .and_then(|s| {
                s.with_path(
                    Coefficient::A(1, 1),
                    CoefficientPath::follower(0.4, 0.32, kappa, Coefficient::A(0, 0)),
                )
            })
            .and_then(|s| {
                s.with_path(
                    Coefficient::L(1),
                    CoefficientPath::follower(0.3, 0.24, kappa, Coefficient::L(0)),
                )
            })
            .expect("built-in schedule is valid")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn path(&self, id: Coefficient) -> Option<&CoefficientPath> {
        self.paths.get(&id)
    }

    pub fn paths(&self) -> impl Iterator<Item = (Coefficient, &CoefficientPath)> {
        self.paths.iter().map(|(c, p)| (*c, p))
    }

    /// Follower coefficients, in state-vector order.
    pub fn followers(&self) -> &[Coefficient] {
        &self.followers
    }

    pub fn initial_follower_state(&self) -> Vec<f64> {
        self.followers.iter().map(|c| self.paths[c].initial).collect()
    }

    /// True when no coefficient ever moves.
    pub fn is_constant(&self) -> bool {
        self.paths
            .values()
            .all(|p| p.kind == PathKind::Constant || p.initial == p.frontier)
    }

    /// Gap closure of the innovator leading a follower; a leader with no gap
    /// counts as fully adopted.
    fn leader_gap(&self, leader: Coefficient, t: f64) -> Result<f64> {
        match gap_factor(&self.paths[&leader], t) {
            Err(Error::DegenerateGap) => Ok(1.0),
            other => other,
        }
    }

    fn check_state(&self, followers: &[f64]) -> Result<()> {
        if followers.len() != self.followers.len() {
            return Err(Error::DimensionMismatch {
                expected: self.followers.len(),
                found: followers.len(),
            });
        }
        Ok(())
    }

    fn value(&self, id: Coefficient, t: f64, followers: &[f64]) -> Result<f64> {
        let path = &self.paths[&id];
        match path.kind {
            PathKind::Constant => Ok(path.initial),
            PathKind::Innovator => innovator_value(path, t),
            PathKind::Follower { .. } => {
                let k = self.followers.binary_search(&id).expect("follower index");
                Ok(followers[k])
            }
        }
    }

    /// `A(t)`, `l(t)` from closed forms and the integrated follower values.
    pub fn technology_at(&self, t: f64, followers: &[f64]) -> Result<TechnologyState> {
        self.check_state(followers)?;
        let mut a = SquareMatrix::zeros(self.n);
        let mut l = vec![0.0; self.n];
        for &id in self.paths.keys() {
            let x = self.value(id, t, followers)?;
            match id {
                Coefficient::A(i, j) => a[(i, j)] = x,
                Coefficient::L(j) => l[j] = x,
            }
        }
        TechnologyState::new(a, l)
    }

    /// Time derivatives of the follower state.
    pub fn follower_derivatives(&self, t: f64, followers: &[f64]) -> Result<Vec<f64>> {
        self.check_state(followers)?;
        self.followers
            .iter()
            .zip(followers)
            .map(|(id, &x)| {
                let path = &self.paths[id];
                let PathKind::Follower { leader } = path.kind else {
                    unreachable!("follower list holds followers only")
                };
                Ok(follower_rhs(x, path, self.leader_gap(leader, t)?))
            })
            .collect()
    }

    /// `dA/dt` and `dl/dt` for every coefficient.
    pub fn rates_at(&self, t: f64, followers: &[f64]) -> Result<(SquareMatrix, Vec<f64>)> {
        let follower_rates = self.follower_derivatives(t, followers)?;
        let mut da = SquareMatrix::zeros(self.n);
        let mut dl = vec![0.0; self.n];
        for (&id, path) in &self.paths {
            let rate = match path.kind {
                PathKind::Constant => 0.0,
                PathKind::Innovator => innovator_rate(path, t)?,
                PathKind::Follower { .. } => {
                    follower_rates[self.followers.binary_search(&id).expect("follower index")]
                }
            };
            match id {
                Coefficient::A(i, j) => da[(i, j)] = rate,
                Coefficient::L(j) => dl[j] = rate,
            }
        }
        Ok((da, dl))
    }
}

fn all_coefficients(n: usize) -> Vec<Coefficient> {
    let mut out: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| Coefficient::A(i, j)))
        .collect();
    out.extend((0..n).map(Coefficient::L));
    out
}

fn in_range(c: Coefficient, n: usize) -> bool {
    match c {
        Coefficient::A(i, j) => i < n && j < n,
        Coefficient::L(j) => j < n,
    }
}
