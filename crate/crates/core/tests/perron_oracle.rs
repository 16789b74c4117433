mod common;

use common::{dense_spectral_radius, random_irreducible, rel_err};
use okidyn_core::perron::{self, dlambda_da, PerronTriple};
use okidyn_core::SquareMatrix;
use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};

const FD_STEP: f64 = 1e-6;

fn matrix_strategy() -> impl Strategy<Value = SquareMatrix> {
    (2usize..=5, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = StdRng::seed_from_u64(seed);
        random_irreducible(&mut rng, n, 1.0)
    })
}

#[test]
fn two_by_two_matches_characteristic_polynomial() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let m = random_irreducible(&mut rng, 2, 1.0);
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let root = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let lambda = perron::perron(&m).unwrap().lambda();
        assert!(rel_err(root, lambda) < 1e-10, "{m:?}: {root} vs {lambda}");
    }
}

#[test]
fn periodic_matrix_converges() {
    let m = SquareMatrix::from_rows(&[
        vec![0.0, 2.0, 0.0],
        vec![0.0, 0.0, 0.5],
        vec![3.0, 0.0, 0.0],
    ])
    .unwrap();
    let t = perron::perron(&m).unwrap();
    assert!((t.lambda() - 3.0_f64.cbrt()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn matches_dense_eigensolver(m in matrix_strategy()) {
        let t = perron::perron(&m).unwrap();
        let dense = dense_spectral_radius(&m);
        prop_assert!(rel_err(dense, t.lambda()) < 1e-10, "{} vs {}", dense, t.lambda());
        prop_assert!(t.u().iter().chain(t.v()).all(|&x| x > 0.0));
        let su: f64 = t.u().iter().sum();
        let vu: f64 = t.u().iter().zip(t.v()).map(|(a, b)| a * b).sum();
        prop_assert!((su - 1.0).abs() < 1e-14 && (vu - 1.0).abs() < 1e-14);
        prop_assert!(t.residual(&m) < perron::DEFAULT_TOL);
    }

    #[test]
    fn strictly_increasing_in_every_entry(
        m in matrix_strategy(),
        pick in any::<prop::sample::Index>(),
        delta in prop::sample::select(vec![1e-3, 1e-2]),
    ) {
        let n = m.dim();
        let idx = pick.index(n * n);
        let mut bumped = m.clone();
        bumped[(idx / n, idx % n)] += delta;
        let before = perron::perron(&m).unwrap().lambda();
        let after = perron::perron(&bumped).unwrap().lambda();
        prop_assert!(after > before);
    }

    #[test]
    fn sensitivities_match_finite_differences(m in matrix_strategy()) {
        let n = m.dim();
        let t = perron::perron(&m).unwrap();
        let d = dlambda_da(&t);
        for i in 0..n {
            for j in 0..n {
                let mut up = m.clone();
                let mut down = m.clone();
                up[(i, j)] += FD_STEP;
                down[(i, j)] = (down[(i, j)] - FD_STEP).max(0.0);
                let h = up[(i, j)] - down[(i, j)];
                let fd = (perron::perron(&up).unwrap().lambda()
                    - perron::perron(&down).unwrap().lambda()) / h;
                prop_assert!(rel_err(d[(i, j)], fd) < 1e-4, "({i},{j}) {} vs {fd}", d[(i, j)]);
            }
        }
    }

    #[test]
    fn normalization_does_not_change_sensitivities(
        m in matrix_strategy(),
        cu in 0.01f64..100.0,
        cv in 0.01f64..100.0,
    ) {
        let t = perron::perron(&m).unwrap();
        let scaled = PerronTriple::new(
            t.lambda(),
            t.u().iter().map(|x| x * cu).collect(),
            t.v().iter().map(|x| x * cv).collect(),
        ).unwrap();
        let (a, b) = (dlambda_da(&t), dlambda_da(&scaled));
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
