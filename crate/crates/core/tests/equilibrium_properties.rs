mod common;

use biorth_core::asymptotics::make_predictor;
use biorth_core::equilibrium::{
    combined_potential, nikishin_matrix, solve_equilibrium, solve_equilibrium_from, EquilibriumSolution,
    Initialization, InteractionMatrix,
};
use biorth_core::measures::Interval;
use biorth_core::polyzeros::{moment_distance, MomentSource};
use biorth_core::ExtComplex;
use common::{raw_points, system, SystemSpec};
use proptest::prelude::*;

const P: u32 = 64;
const CELLS: usize = 128;
const TOL: f64 = 1e-10;

fn intervals(spec: &SystemSpec) -> Vec<Interval> {
    spec.intervals().iter().map(|&(a, b)| Interval::from_f64(a, b, P).unwrap()).collect()
}

fn solve(ivs: &[Interval]) -> EquilibriumSolution {
    solve_equilibrium(ivs, &nikishin_matrix(ivs.len()).unwrap(), CELLS, TOL, 2000).unwrap()
}

fn largest_gap(a: &EquilibriumSolution, b: &EquilibriumSolution) -> f64 {
    a.lambdas.iter().zip(&b.lambdas).map(|(x, y)| moment_distance(x, y, 12)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solutions_are_normalised_and_energy_descends(spec in system(1..=3)) {
        let sol = solve(&intervals(&spec));
        prop_assert!(sol.residual <= TOL);
        for l in &sol.lambdas {
            prop_assert!((l.mass() - 1.0).abs() < 1e-12);
            prop_assert!(l.masses().iter().all(|&w| w >= 0.0));
        }
        for w in sol.energy_log.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
        let m = sol.m();
        for j in 0..m {
            let tail: f64 = sol.omega_prime[j..].iter().sum();
            prop_assert!((sol.omega_cum[j] - tail).abs() < 1e-12);
        }
    }

    #[test]
    fn initialisation_and_order_do_not_matter(spec in system(2..=3)) {
        let ivs = intervals(&spec);
        let c = nikishin_matrix(ivs.len()).unwrap();
        let a = solve_equilibrium_from(&ivs, &c, CELLS, TOL, 2000, Initialization::Arcsine).unwrap();
        let u = solve_equilibrium_from(&ivs, &c, CELLS, TOL, 2000, Initialization::Uniform).unwrap();
        prop_assert!(largest_gap(&a, &u) <= 10.0 * TOL);
        let mut rev = ivs.clone();
        rev.reverse();
        let r = solve(&rev).reversed();
        prop_assert!(largest_gap(&a, &r) <= 10.0 * TOL);
        for (x, y) in a.omega_prime.iter().zip(&r.omega_prime) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    /// `W_k - ω'_k < 0` away from `Δ_k`, and the two-step combination decays for `k > j + 1`.
    #[test]
    fn combined_potentials_drop_off_their_support(spec in system(2..=3), raw in raw_points(10)) {
        let ivs = intervals(&spec);
        let sol = solve(&ivs);
        let c = nikishin_matrix(ivs.len()).unwrap();
        let pred = make_predictor(sol.clone()).unwrap();
        let m = sol.m();
        for k in 1..=m {
            let (a, b) = spec.intervals()[k - 1];
            for &(re, im) in &raw {
                let dx = if re < a { a - re } else if re > b { re - b } else { 0.0 };
                if dx.hypot(im) < 0.2 {
                    continue;
                }
                let z = ExtComplex::from_f64(re, im, P);
                prop_assert!(combined_potential(&sol, &c, k, &z) < sol.omega_prime[k - 1]);
            }
        }
        for z in spec.probes(&raw, 0.2, P) {
            for j in 0..m {
                for k in j + 2..=m {
                    let (v, flag) = pred.form_ratio_prediction(j, k, &z).unwrap();
                    prop_assert!(v < 1.0 && flag == Some(true));
                }
            }
        }
    }
}

#[test]
fn nikishin_matrices_are_positive_definite_and_others_are_not() {
    for m in 1..=6 {
        let c = nikishin_matrix(m).unwrap();
        assert!(c.eigenvalues().iter().all(|&e| e > 0.0));
    }
    assert!(InteractionMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).is_err());
    assert!(InteractionMatrix::new(vec![vec![1.0, 0.3], vec![0.2, 1.0]]).is_err());
}

#[test]
fn document_roundtrip() {
    let sol = solve(&[Interval::from_f64(0.0, 1.0, P).unwrap(), Interval::from_f64(2.0, 3.0, P).unwrap()]);
    let text = serde_json::to_string(&sol.to_document()).unwrap();
    let back = EquilibriumSolution::from_document(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.omega_prime, sol.omega_prime);
    assert_eq!(largest_gap(&sol, &back), 0.0);
    assert_eq!(back.lambdas[0].hull(), sol.lambdas[0].hull());
}
