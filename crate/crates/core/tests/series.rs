mod common;

use std::collections::BTreeMap;

use lvdarboux::algebra::{int, Rational};
use lvdarboux::series::{eigen_series, resonant_series_integral, DiagonalField, ExponentVector};
use lvdarboux::{LVSystem, Resonance};
use num_traits::Zero;
use proptest::prelude::*;

fn res(l: i64, m: i64, n: i64) -> Resonance {
    Resonance::new(l, m, n).unwrap()
}

#[test]
fn integrals_match_dense_oracle() {
    for r in [res(1, -1, 1), res(2, -1, 1), res(1, -2, 1)] {
        let [l, m, n] = r.eigenvalues();
        for seed in 0..10 {
            let sys = common::random_system(r, seed);
            for rho in [[int(-m), int(l), int(0)], [int(0), int(n), int(-m)]] {
                let got = resonant_series_integral(&sys, &rho, 4).unwrap();
                let (u, obs) = common::dense_oracle(&sys, &rho, 4);
                assert_eq!(got.u, u, "{r} seed {seed}");
                assert_eq!(got.obstructions.into_iter().collect::<BTreeMap<_, _>>(), obs);
            }
        }
    }
}

#[test]
fn linearization_matches_dense_oracle() {
    for seed in 0..5 {
        let sys = common::random_system(res(1, -2, 1), 100 + seed);
        let field = DiagonalField::from_system(&sys);
        for m in 0..3 {
            let rho = ExponentVector::unit(m).as_rationals();
            let got = eigen_series(&field, &rho, 4);
            let (u, obs) = common::dense_oracle(&sys, &rho, 4);
            assert_eq!(got.u, u);
            assert_eq!(got.obstructions.into_iter().collect::<BTreeMap<_, _>>(), obs);
        }
    }
}

#[test]
fn higher_order_runs_extend_lower_ones() {
    let sys = common::random_system(res(2, -1, 1), 7);
    let rho = [int(1), int(2), int(0)];
    let lo = resonant_series_integral(&sys, &rho, 4).unwrap();
    let hi = resonant_series_integral(&sys, &rho, 7).unwrap();
    assert_eq!(hi.u.truncate(4), lo.u);
    let hi_obs: Vec<_> = hi.obstructions.iter().filter(|(i, _)| i.degree() <= 4).cloned().collect();
    assert_eq!(hi_obs, lo.obstructions);
}

fn reversed(i: &ExponentVector) -> ExponentVector {
    ExponentVector([i.0[2], i.0[1], i.0[0]])
}

#[test]
fn dual_transform_mirrors_linearization() {
    for seed in 0..5 {
        let sys = common::random_system(res(1, -2, 1), 200 + seed);
        let dual = sys.dual_transform();
        assert_eq!(dual.dual_transform(), sys);
        let (f, g) = (DiagonalField::from_system(&sys), DiagonalField::from_system(&dual));
        for m in 0..3 {
            let a = eigen_series(&f, &ExponentVector::unit(m).as_rationals(), 5);
            let b = eigen_series(&g, &ExponentVector::unit(2 - m).as_rationals(), 5);
            for (i, c) in a.u.terms() {
                assert_eq!(b.u.coeff(&reversed(i)), *c);
            }
            assert_eq!(a.u.num_terms(), b.u.num_terms());
            let ob: BTreeMap<_, _> = b.obstructions.into_iter().collect();
            for (i, c) in &a.obstructions {
                assert_eq!(ob[&reversed(i)], *c);
            }
        }
    }
}

fn det(m: &[Vec<Rational>]) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut d = Rational::zero();
    for c in 0..m.len() {
        let minor: Vec<Vec<Rational>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect()).collect();
        let t = &m[0][c] * det(&minor);
        d = if c % 2 == 0 { d + t } else { d - t };
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn independence_agrees_with_determinant(entries in prop::array::uniform9(-4i64..=4)) {
        let a: [[Rational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| int(entries[3 * i + j])));
        let sys = LVSystem::new(res(1, -1, 1), a.clone());
        let lambda = [1, -1, 1];
        let mut rows: Vec<Vec<Rational>> =
            (0..3).map(|i| vec![int(lambda[i]), a[i][0].clone(), a[i][1].clone(), a[i][2].clone()]).collect();
        // div(x Λ_x, y Λ_y, z Λ_z) = Σλ + Σ_j (a_jj + Σ_i a_ij) x_j
        let mut div = vec![int(1)];
        for j in 0..3 {
            div.push(&a[j][j] + (0..3).map(|i| a[i][j].clone()).sum::<Rational>());
        }
        rows.push(div);
        prop_assert_eq!(sys.independence_check(), !det(&rows).is_zero());
    }

    #[test]
    fn prefix_stability(seed in 0u64..10_000) {
        let sys = common::random_system(res(1, -1, 1), seed);
        let f = DiagonalField::from_system(&sys);
        let rho = [int(1), int(1), int(0)];
        let lo = eigen_series(&f, &rho, 3);
        let hi = eigen_series(&f, &rho, 5);
        prop_assert_eq!(hi.u.truncate(3), lo.u);
    }
}

#[test]
fn zero_system_has_trivial_series() {
    let sys = LVSystem::zero(res(1, -2, 1));
    let r = resonant_series_integral(&sys, &[int(2), int(1), int(0)], 8).unwrap();
    assert_eq!(r.u.num_terms(), 1);
    assert!(r.is_obstruction_free());
}
