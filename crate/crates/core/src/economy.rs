//! Production techniques, the augmented input matrix and production prices.
//!
//! The real wage is a scalar `b` applied to a uniform consumption basket, so
//! the wage block of the augmented matrix is `b·(1 lᵀ)`: every row receives
//! `b·l_j` in column `j`.

use serde::{Deserialize, Serialize};

use crate::perron::{self, PerronTriple};
use crate::{Error, Result, SquareMatrix};

/// Material input matrix `A` and direct labor vector `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyState {
    a: SquareMatrix,
    l: Vec<f64>,
}

impl TechnologyState {
    pub fn new(a: SquareMatrix, l: Vec<f64>) -> Result<Self> {
        if a.dim() < 2 {
            return Err(Error::Invalid("economy needs at least two sectors".into()));
        }
        if l.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: l.len(),
            });
        }
        if !a.is_finite() || !a.is_nonnegative() {
            return Err(Error::Invalid("input coefficients must be finite and nonnegative".into()));
        }
        if l.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Invalid("labor coefficients must be positive".into()));
        }
        if !a.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        Ok(Self { a, l })
    }

    pub fn a(&self) -> &SquareMatrix {
        &self.a
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Direction of the wage block, `1 lᵀ`.
    pub fn wage_direction(&self) -> SquareMatrix {
        let n = self.dim();
        let mut d = SquareMatrix::zeros(n);
        for i in 0..n {
            for (j, lj) in self.l.iter().enumerate() {
                d[(i, j)] = *lj;
            }
        }
        d
    }
}

/// Scalar real wage `b` and wage elasticity `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WageState {
    pub b: f64,
    pub beta: f64,
}

impl WageState {
    pub fn new(b: f64, beta: f64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Invalid(format!("real wage must be nonnegative, got {b}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Invalid(format!("wage elasticity must be nonnegative, got {beta}")));
        }
        Ok(Self { b, beta })
    }
}

/// Production prices normalized to `Σp = 1`, money wage and profit rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSystem {
    pub p: Vec<f64>,
    pub w: f64,
    pub r: f64,
    pub lambda: f64,
}

/// `M = A + b·(1 lᵀ)`.
pub fn augmented_matrix(tech: &TechnologyState, wage: &WageState) -> SquareMatrix {
    let mut m = tech.a.clone();
    let n = tech.dim();
    for i in 0..n {
        for (j, lj) in tech.l.iter().enumerate() {
            m[(i, j)] += wage.b * lj;
        }
    }
    m
}

/// Uniform profit rate `1/λ − 1`; `λ ≥ 1` leaves no surplus.
pub fn profit_rate(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Invalid(format!("spectral radius must be positive, got {lambda}")));
    }
    if lambda >= 1.0 {
        return Err(Error::NonViable { lambda });
    }
    Ok(1.0 / lambda - 1.0)
}

pub fn price_system(tech: &TechnologyState, wage: &WageState) -> Result<PriceSystem> {
    let triple = perron::perron(&augmented_matrix(tech, wage))?;
    prices_from_triple(wage, &triple)
}

/// Prices from an already computed Perron triple of the augmented matrix.
pub fn prices_from_triple(wage: &WageState, triple: &PerronTriple) -> Result<PriceSystem> {
    let lambda = triple.lambda();
    let r = profit_rate(lambda)?;
    let sv: f64 = triple.v().iter().sum();
    let p: Vec<f64> = triple.v().iter().map(|x| x / sv).collect();
    let w = wage.b * p.iter().sum::<f64>();
    Ok(PriceSystem { p, w, r, lambda })
}

/// Per sector: does the new technique lower unit cost `Σ_i p_i a_ij + w l_j`
/// at the given prices? Strict inequality, so an unchanged technique fails.
pub fn cost_criterion_satisfied(
    old: &TechnologyState,
    new: &TechnologyState,
    prices: &PriceSystem,
) -> Result<Vec<bool>> {
    let n = old.dim();
    for found in [new.dim(), prices.p.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let old_cost = unit_costs(old, prices);
    let new_cost = unit_costs(new, prices);
    Ok(new_cost.iter().zip(&old_cost).map(|(nc, oc)| nc < oc).collect())
}

/// `pA + w·l`, column by column.
pub fn unit_costs(tech: &TechnologyState, prices: &PriceSystem) -> Vec<f64> {
    tech.a
        .vec_mul(&prices.p)
        .into_iter()
        .zip(&tech.l)
        .map(|(c, lj)| c + prices.w * lj)
        .collect()
}

/// `∂λ/∂b = vᵀ(1 lᵀ)u = (Σv)(l·u)`.
pub fn dlambda_db(tech: &TechnologyState, triple: &PerronTriple) -> f64 {
    let sv: f64 = triple.v().iter().sum();
    let lu: f64 = tech.l.iter().zip(triple.u()).map(|(a, b)| a * b).sum();
    sv * lu
}

/// `∂λ/∂l_j = b·(Σv)·u_j`.
pub fn dlambda_dl(wage: &WageState, triple: &PerronTriple) -> Vec<f64> {
    let sv: f64 = triple.v().iter().sum();
    triple.u().iter().map(|uj| wage.b * sv * uj).collect()
}

/// Wage sensitivity `k = (b/λ)·∂λ/∂b`. `triple` must belong to the augmented
/// matrix of `(tech, wage)`.
pub fn k_sensitivity(tech: &TechnologyState, wage: &WageState, triple: &PerronTriple) -> f64 {
    wage.b / triple.lambda() * dlambda_db(tech, triple)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> (TechnologyState, WageState) {
        let tech = TechnologyState::new(
            SquareMatrix::new2([[0.5, 0.2], [0.3, 0.4]]),
            vec![0.2, 0.3],
        )
        .unwrap();
        (tech, WageState::new(0.5, 3.3).unwrap())
    }

    #[test]
    fn augmented_table1() {
        let (tech, wage) = table1();
        let m = augmented_matrix(&tech, &wage);
        let expect = [0.6, 0.35, 0.4, 0.55];
        for (x, e) in m.as_slice().iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
        let zero = WageState::new(0.0, 0.0).unwrap();
        assert_eq!(augmented_matrix(&tech, &zero), *tech.a());
    }

    #[test]
    fn zero_input_matrix_is_rejected() {
        let err = TechnologyState::new(SquareMatrix::zeros(2), vec![0.2, 0.3]).unwrap_err();
        assert_eq!(err, Error::NotIrreducible);
    }

    #[test]
    fn invalid_states() {
        let a = SquareMatrix::new2([[0.5, 0.2], [0.3, 0.4]]);
        assert!(TechnologyState::new(a.clone(), vec![0.2, 0.0]).is_err());
        assert!(TechnologyState::new(a, vec![0.2]).is_err());
        assert!(WageState::new(-0.1, 1.0).is_err());
        assert!(WageState::new(0.5, -1.0).is_err());
    }

    #[test]
    fn profit_rates() {
        assert!((profit_rate(0.95).unwrap() - 1.0 / 19.0).abs() < 1e-15);
        assert_eq!(profit_rate(0.5).unwrap(), 1.0);
        assert_eq!(profit_rate(1.0), Err(Error::NonViable { lambda: 1.0 }));
        assert!(profit_rate(0.0).is_err());
    }

    #[test]
    fn prices_table1() {
        let (tech, wage) = table1();
        let ps = price_system(&tech, &wage).unwrap();
        assert!((ps.p[0] - 8.0 / 15.0).abs() < 1e-11);
        assert!((ps.p[1] - 7.0 / 15.0).abs() < 1e-11);
        assert!((ps.r - 1.0 / 19.0).abs() < 1e-11);
        assert_eq!(ps.w, wage.b * ps.p.iter().sum::<f64>());
        assert_eq!(ps.r, 1.0 / ps.lambda - 1.0);
    }

    #[test]
    fn symmetric_prices() {
        let tech = TechnologyState::new(
            SquareMatrix::new2([[0.3, 0.1], [0.1, 0.3]]),
            vec![0.2, 0.2],
        )
        .unwrap();
        let ps = price_system(&tech, &WageState::new(0.5, 0.0).unwrap()).unwrap();
        assert!((ps.p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_viable_prices() {
        let tech = TechnologyState::new(
            SquareMatrix::new2([[0.8, 0.3], [0.3, 0.8]]),
            vec![0.2, 0.2],
        )
        .unwrap();
        let err = price_system(&tech, &WageState::new(0.5, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonViable { .. }));
    }

    #[test]
    fn cost_criterion_table1_innovation() {
        let (old, _) = table1();
        // unnormalized p = (16/15, 14/15) with w = b·Σp = 1
        let prices = PriceSystem {
            p: vec![16.0 / 15.0, 14.0 / 15.0],
            w: 1.0,
            r: 1.0 / 19.0,
            lambda: 0.95,
        };
        let old_cost = unit_costs(&old, &prices);
        assert!((old_cost[0] - 1.013_333_333_333).abs() < 1e-9);

        let new = TechnologyState::new(
            SquareMatrix::new2([[0.4, 0.2], [0.3, 0.4]]),
            vec![0.15, 0.3],
        )
        .unwrap();
        let new_cost = unit_costs(&new, &prices);
        assert!((new_cost[0] - 0.856_666_666_667).abs() < 1e-9);
        assert_eq!(cost_criterion_satisfied(&old, &new, &prices).unwrap(), vec![true, false]);

        assert_eq!(cost_criterion_satisfied(&old, &old, &prices).unwrap(), vec![false, false]);

        let worse = TechnologyState::new(
            SquareMatrix::new2([[0.5, 0.2], [0.3, 0.4]]),
            vec![0.2, 0.31],
        )
        .unwrap();
        assert_eq!(cost_criterion_satisfied(&old, &worse, &prices).unwrap(), vec![false, false]);
    }

    #[test]
    fn cost_criterion_dimension_mismatch() {
        let (old, wage) = table1();
        let mut prices = price_system(&old, &wage).unwrap();
        prices.p.push(0.1);
        assert!(matches!(
            cost_criterion_satisfied(&old, &old, &prices),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn k_table1() {
        let (tech, wage) = table1();
        let triple = perron::perron(&augmented_matrix(&tech, &wage)).unwrap();
        assert!((dlambda_db(&tech, &triple) - 0.5).abs() < 1e-11);
        assert!((k_sensitivity(&tech, &wage, &triple) - 5.0 / 19.0).abs() < 1e-11);
    }

    #[test]
    fn k_vanishes_with_wage() {
        let (tech, _) = table1();
        let mut last = f64::INFINITY;
        for b in [1e-2, 1e-4, 1e-6] {
            let wage = WageState::new(b, 1.0).unwrap();
            let triple = perron::perron(&augmented_matrix(&tech, &wage)).unwrap();
            let k = k_sensitivity(&tech, &wage, &triple);
            assert!(k > 0.0 && k < last);
            last = k;
        }
        assert!(last < 1e-5);
    }
}
