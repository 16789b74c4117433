//! Perron–Frobenius analysis of small nonnegative matrices.
//!
//! For an irreducible nonnegative `M` the spectral radius `λ` is a simple
//! eigenvalue with strictly positive right and left eigenvectors `u`, `v`.
//! Under the normalization `Σu = 1`, `vᵀu = 1` the first-order change of `λ`
//! along a perturbation `dM` is `vᵀ·dM·u`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SquareMatrix};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Perron root with its right (`u`) and left (`v`) eigenvectors, normalized
/// so that `Σu = 1` and `vᵀu = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronTriple {
    lambda: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PerronTriple {
    /// Builds a triple from eigenvectors of any positive scale and
    /// renormalizes them.
    pub fn new(lambda: f64, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Invalid(format!("Perron root must be positive, got {lambda}")));
        }
        if u.iter().chain(&v).any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Invalid("Perron vectors must be strictly positive".into()));
        }
        Ok(Self::normalized(lambda, u, v))
    }

    fn normalized(lambda: f64, mut u: Vec<f64>, mut v: Vec<f64>) -> Self {
        let su: f64 = u.iter().sum();
        u.iter_mut().for_each(|x| *x /= su);
        let vu = dot(&v, &u);
        v.iter_mut().for_each(|x| *x /= vu);
        Self { lambda, u, v }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `max(‖Mu − λu‖∞, ‖vᵀM − λvᵀ‖∞)` with both vectors scaled to unit sum.
    pub fn residual(&self, m: &SquareMatrix) -> f64 {
        let sv: f64 = self.v.iter().sum();
        let v: Vec<f64> = self.v.iter().map(|x| x / sv).collect();
        eigen_residual(m, self.lambda, &self.u, &v)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn eigen_residual(m: &SquareMatrix, lambda: f64, u: &[f64], v: &[f64]) -> f64 {
    let mu = m.mul_vec(u);
    let vm = m.vec_mul(v);
    let right = mu
        .iter()
        .zip(u)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max);
    let left = vm
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max);
    right.max(left)
}

/// Perron root and vectors of `m` by simultaneous power iteration on `M`
/// and `Mᵀ`.
///
/// Irreducibility is checked up front. The iteration runs on `M + sI` with
/// `s > 0`, which has the same eigenvectors and is primitive, so periodic
/// and nearly periodic matrices converge too. Convergence is declared when
/// the eigen-residual of both vectors drops below `tol`, with `λ` taken as
/// `vᵀMu / vᵀu`.
pub fn spectral_radius(m: &SquareMatrix, tol: f64, max_iter: usize) -> Result<PerronTriple> {
    spectral_radius_from(m, tol, max_iter, None)
}

/// [`spectral_radius`] started from the vectors of `guess` (typically the
/// triple of a nearby matrix) instead of the uniform vector.
pub fn spectral_radius_from(
    m: &SquareMatrix,
    tol: f64,
    max_iter: usize,
    guess: Option<&PerronTriple>,
) -> Result<PerronTriple> {
    let n = m.dim();
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !m.is_finite() || !m.is_nonnegative() {
        return Err(Error::Invalid("matrix must be finite and nonnegative".into()));
    }
    if !m.is_irreducible() {
        return Err(Error::NotIrreducible);
    }

    // half the mean row sum, a rough λ/2: damps eigenvalues near −λ and
    // other peripheral ones without slowing the dominant mode much
    let shift = 0.5 * m.as_slice().iter().sum::<f64>() / n as f64;

    let (mut u, mut v) = match guess {
        Some(g) if g.dim() == n => {
            let sv: f64 = g.v.iter().sum();
            (g.u.clone(), g.v.iter().map(|x| x / sv).collect())
        }
        _ => (vec![1.0 / n as f64; n], vec![1.0 / n as f64; n]),
    };
    let mut mu = vec![0.0; n];
    let mut vm = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for _ in 0..max_iter {
        for (i, row) in m.rows().enumerate() {
            mu[i] = dot(row, &u);
        }
        vm.iter_mut().for_each(|x| *x = 0.0);
        for (vi, row) in v.iter().zip(m.rows()) {
            for (o, a) in vm.iter_mut().zip(row) {
                *o += vi * a;
            }
        }
        let lambda = dot(&v, &mu) / dot(&v, &u);
        residual = 0.0;
        for i in 0..n {
            residual = residual
                .max((mu[i] - lambda * u[i]).abs())
                .max((vm[i] - lambda * v[i]).abs());
        }
        if residual < tol {
            return Ok(PerronTriple::normalized(lambda, u, v));
        }

        let mut su = 0.0;
        let mut sv = 0.0;
        for i in 0..n {
            u[i] = mu[i] + shift * u[i];
            v[i] = vm[i] + shift * v[i];
            su += u[i];
            sv += v[i];
        }
        u.iter_mut().for_each(|x| *x /= su);
        v.iter_mut().for_each(|x| *x /= sv);
    }

    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// [`spectral_radius`] with the default tolerance and iteration cap.
pub fn perron(m: &SquareMatrix) -> Result<PerronTriple> {
    spectral_radius(m, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// `∂λ/∂a_ij = v_i·u_j` for every entry.
pub fn dlambda_da(triple: &PerronTriple) -> SquareMatrix {
    let n = triple.dim();
    let mut out = SquareMatrix::zeros(n);
    for (i, vi) in triple.v.iter().enumerate() {
        for (j, uj) in triple.u.iter().enumerate() {
            out[(i, j)] = vi * uj;
        }
    }
    out
}

/// First-order change of `λ` along `dM`: `vᵀ·dM·u`.
pub fn dlambda_direction(triple: &PerronTriple, dm: &SquareMatrix) -> Result<f64> {
    if dm.dim() != triple.dim() {
        return Err(Error::DimensionMismatch {
            expected: triple.dim(),
            found: dm.dim(),
        });
    }
    Ok(dot(&dm.vec_mul(&triple.v), &triple.u))
}
