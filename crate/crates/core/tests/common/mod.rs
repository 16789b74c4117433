#![allow(dead_code)]

use nalgebra::DMatrix;
use okidyn_core::economy::{self, TechnologyState, WageState};
use okidyn_core::perron;
use okidyn_core::SquareMatrix;
use rand::Rng;

/// Spectral radius from nalgebra's Schur-based eigenvalues.
pub fn dense_spectral_radius(m: &SquareMatrix) -> f64 {
    let n = m.dim();
    DMatrix::from_row_slice(n, n, m.as_slice())
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Nonnegative matrix with a guaranteed Hamiltonian cycle (hence
/// irreducible) and roughly a third of the other entries zeroed.
pub fn random_irreducible<R: Rng>(rng: &mut R, n: usize, scale: f64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.65) {
                m[(i, j)] = rng.gen_range(0.0..scale);
            }
        }
        m[(i, (i + 1) % n)] = rng.gen_range(0.1 * scale..scale);
    }
    m
}

pub struct Economy {
    pub tech: TechnologyState,
    pub wage: WageState,
}

/// Random economy with `λ < 1`.
pub fn random_viable_economy<R: Rng>(rng: &mut R, n: usize) -> Economy {
    loop {
        let a = random_irreducible(rng, n, 0.6 / n as f64);
        let l: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.4)).collect();
        let b = rng.gen_range(0.1..1.0);
        let tech = TechnologyState::new(a, l).unwrap();
        let wage = WageState::new(b, 1.0).unwrap();
        let lambda = perron::perron(&economy::augmented_matrix(&tech, &wage)).unwrap().lambda();
        if lambda < 0.98 {
            return Economy { tech, wage };
        }
    }
}

pub fn lambda_of(tech: &TechnologyState, wage: &WageState) -> f64 {
    perron::perron(&economy::augmented_matrix(tech, wage)).unwrap().lambda()
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs()
}
