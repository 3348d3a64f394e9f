mod common;

use biorth_core::asymptotics::{make_predictor, AsymptoticPredictor};
use biorth_core::equilibrium::{nikishin_matrix, solve_equilibrium};
use biorth_core::measures::Interval;
use biorth_core::ExtComplex;
use common::{raw_points, system, SystemSpec};
use proptest::prelude::*;

const P: u32 = 64;

fn predictor(spec: &SystemSpec, cells: usize) -> AsymptoticPredictor {
    let ivs: Vec<Interval> = spec.intervals().iter().map(|&(a, b)| Interval::from_f64(a, b, P).unwrap()).collect();
    let c = nikishin_matrix(ivs.len()).unwrap();
    make_predictor(solve_equilibrium(&ivs, &c, cells, 1e-10, 2000).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constants_solve_their_linear_system(spec in system(1..=4)) {
        let p = predictor(&spec, 64);
        let m = p.m();
        let w = &p.equilibrium().omega_prime;
        let g = |k: usize| if k == 0 || k > m { 0.0 } else { p.gammas[k - 1] };
        let scale = w.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        for k in 1..=m {
            prop_assert!((2.0 * g(k) - g(k - 1) - g(k + 1) - 2.0 * w[k - 1]).abs() <= 1e-12 * scale);
            let kappa = (g(k) - 0.5 * (g(k - 1) + g(k + 1))).exp();
            prop_assert!((p.kappas[k - 1] - kappa).abs() <= 1e-12 * kappa);
            // Products of κ from k to m give the leading-constant growth exp(ω_k).
            let growth = p.leading_growth_prediction(k);
            prop_assert!((growth.ln() - p.equilibrium().omega_cum[k - 1]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn branch_moduli_telescope(spec in system(1..=3), raw in raw_points(8)) {
        let p = predictor(&spec, 64);
        let m = p.m();
        for z in spec.probes(&raw, 0.1, P) {
            let lf1 = p.log_abs_f(1, &z);
            let sum: f64 = (1..=m).map(|v| p.log_abs_f(v, &z) - p.log_abs_f(v + 1, &z)).sum();
            prop_assert!((lf1 - sum).abs() <= 1e-12 * (1.0 + lf1.abs()));
            prop_assert_eq!(p.f_ratio_modulus(m, &z).unwrap(), p.nth_root_prediction(m, &z).unwrap());
        }
    }

    /// `|F_k|² = |F_{k-1} F_{k+1}|` on the support of each component.
    #[test]
    fn boundary_condition_holds_on_the_supports(spec in system(1..=3)) {
        let p = predictor(&spec, 256);
        for (k, &(a, b)) in spec.intervals().iter().enumerate() {
            let k = k + 1;
            for i in 1..20 {
                let x = a + (b - a) * i as f64 / 20.0;
                let z = ExtComplex::from_f64(x, 0.0, P);
                let e = 2.0 * p.log_abs_f(k, &z) - p.log_abs_f(k - 1, &z) - p.log_abs_f(k + 1, &z);
                prop_assert!(e.abs() < 1e-4, "k={} x={} {:e}", k, x, e);
            }
        }
    }
}
