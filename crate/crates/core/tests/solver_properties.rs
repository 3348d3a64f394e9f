mod common;

use std::sync::Arc;

use biorth_core::ext::tolerance;
use biorth_core::hp_solver::{biorthogonality_matrix, HpSolver};
use biorth_core::measures::IntervalMeasure;
use biorth_core::nikishin::make_system;
use biorth_core::polyzeros::interlaces;
use biorth_core::{ExtComplex, ExtReal};
use common::{raw_points, system};
use proptest::prelude::*;

const P: u32 = 192;
const NODES: usize = 24;
const TOP: usize = 8;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn polynomials_and_zeros_have_the_expected_structure(spec in system(1..=3)) {
        let sys = spec.build(NODES, P);
        let m = sys.m();
        let solver = HpSolver::new(sys.clone(), TOP);
        let sols = solver.solve_many(&(0..=TOP).collect::<Vec<_>>()).unwrap();
        let tol = tolerance(P, 1, 2).to_f64();
        let gap = tolerance(P, 1, 4);
        for (n, sol) in sols.iter().enumerate() {
            let last = sol.a(m);
            prop_assert_eq!(last.degree(), n);
            let lead = last.leading();
            prop_assert!((&lead - sol.leading_sign() as f64).abs().to_f64() < 1e-50);
            prop_assert_eq!(sol.leading_sign(), if m % 2 == 0 { 1 } else { -1 });
            for j in 0..m {
                prop_assert!(n == 0 || sol.a(j).is_zero() || sol.a(j).degree() < n);
            }
            let d = sol.diagnostics();
            prop_assert!(d.orthogonality <= tol, "n={} orthogonality {:e}", n, d.orthogonality);
            prop_assert!(d.expansion <= tol, "n={} expansion {:e}", n, d.expansion);
            // The first omitted condition is far from satisfied: its residual
            // stands well clear of the rounding floor of the imposed ones.
            prop_assert!(n == 0 || d.next_row > 1e6 * d.orthogonality.max(1e-300), "n={} next row {:e}", n, d.next_row);
            for j in 1..=m {
                let z = sol.zeros(j);
                prop_assert_eq!(z.len(), n);
                prop_assert!(z.iter().all(|x| sys.interval(j).contains_open(x)));
                prop_assert!(z.windows(2).all(|p| &p[1] - &p[0] > gap));
                if n > 0 && n < TOP {
                    prop_assert!(interlaces(z, sols[n + 1].zeros(j)).unwrap(), "n={} j={}", n, j);
                }
            }
        }
    }

    /// `A_{n,j+1} / (Q_{n,j+1} Q_{n,j})` keeps one sign across `Δ_{j+1}`.
    #[test]
    fn varying_weights_keep_their_sign(spec in system(2..=3), n in 1usize..=TOP) {
        let sys = spec.build(NODES, P);
        let sol = HpSolver::new(sys.clone(), n).solve(n).unwrap();
        for j in 0..sys.m() {
            let iv = sys.interval(j + 1);
            let signs: Vec<i32> = (1..100)
                .map(|i| iv.from_unit(&ExtReal::from_f64(-1.0 + i as f64 / 50.0, P)))
                .filter(|x| sol.zeros(j + 1).iter().all(|r| (x - r).abs().to_f64() > 1e-12))
                .map(|x| sol.varying_weight(j, &x).unwrap().signum_i())
                .collect();
            prop_assert!(!signs.is_empty() && signs.iter().all(|&s| s == signs[0] && s != 0), "j={}", j);
        }
    }

    /// `A_{n,j}(z)/Q_{n,j}(z) = ∫ A_{n,j+1}(x) / ((z - x) Q_{n,j}(x)) dσ_{j+1}(x)`.
    #[test]
    fn normalised_forms_are_cauchy_transforms(spec in system(2..=3), n in 1usize..=TOP, raw in raw_points(6)) {
        let sys = spec.build(NODES, P);
        let sol = HpSolver::new(sys.clone(), n).solve(n).unwrap();
        let tol = tolerance(P, 1, 2).to_f64();
        for z in spec.probes(&raw, 0.3, P) {
            for j in 0..sys.m() {
                let lhs = &sol.eval_form(j, &z).unwrap() / &sol.eval_qnj(j, &z);
                let mu = sys.measure(j + 1);
                let mut rhs = ExtComplex::zero(P);
                let mut scale = ExtReal::zero(P);
                for ((x, w), a) in mu.nodes().iter().zip(mu.weights()).zip(sol.node_values(j + 1)) {
                    let den = &z.sub_real(x).scale(&sol.eval_qnj_real(j, x));
                    let t = &ExtComplex::from_real(w * a) / den;
                    scale += &t.abs();
                    rhs += &t;
                }
                let r = (&(&lhs - &rhs).abs() / &scale).to_f64();
                prop_assert!(r <= tol, "j={} residual {:e}", j, r);
            }
        }
    }

    #[test]
    fn form_identity_holds_off_the_supports(spec in system(2..=3), n in 0usize..=TOP, raw in raw_points(8)) {
        let sys = spec.build(NODES, P);
        let sol = HpSolver::new(sys.clone(), n).solve(n).unwrap();
        let tol = tolerance(P, 1, 2).to_f64();
        for z in spec.probes(&raw, 0.2, P) {
            for j in 0..sys.m() {
                let (res, scale) = sol.form_identity_check(j, &z).unwrap();
                prop_assert!((&res / &scale).to_f64() <= tol);
                // The defining combination cancels heavily; compare on the same scale.
                let chain = sol.eval_form(j, &z).unwrap();
                let direct = sol.eval_form_direct(j, &z).unwrap();
                let d = (&(&chain - &direct).abs() / &scale).to_f64();
                prop_assert!(d <= tol, "j={} chain vs direct {:e}", j, d);
            }
        }
    }

    #[test]
    fn leading_constants_telescope(spec in system(1..=3), n in 1usize..=TOP) {
        let sys = spec.build(NODES, P);
        let sol = HpSolver::new(sys.clone(), n).solve(n).unwrap();
        let k = sol.leading_constants();
        let kap = sol.kappas();
        for i in 0..k.len() {
            let prod = kap[i..].iter().fold(ExtReal::one(P), |acc, x| &acc * x);
            prop_assert!((&(&prod - &k[i]) / &k[i]).abs().to_f64() < 1e-45);
        }
    }
}

#[test]
fn biorthogonality_on_a_small_three_level_system() {
    let sys = Arc::new(
        make_system(vec![
            IntervalMeasure::lebesgue(0.0, 1.0, NODES, P).unwrap(),
            IntervalMeasure::lebesgue(1.5, 2.5, NODES, P).unwrap(),
            IntervalMeasure::lebesgue(-1.0, 0.8, NODES, P).unwrap(),
        ])
        .unwrap(),
    );
    let solver = HpSolver::new(sys.clone(), TOP);
    let ns: Vec<usize> = (0..=TOP).collect();
    let fwd = solver.solve_many(&ns).unwrap();
    let rev = solver.reversed().solve_many(&ns).unwrap();
    let tol = tolerance(P, 1, 2).to_f64();
    for (k, row) in biorthogonality_matrix(&sys, &rev, &fwd).iter().enumerate() {
        for (n, (v, scale)) in row.iter().enumerate() {
            let r = (&v.abs() / scale).to_f64();
            if k == n {
                assert!(r > tol, "diagonal {n}: {r:e}");
            } else {
                assert!(r <= tol, "({k}, {n}): {r:e}");
            }
        }
    }
}

#[test]
fn document_roundtrip_preserves_everything() {
    let sys = Arc::new(
        make_system(vec![
            IntervalMeasure::lebesgue(0.0, 1.0, NODES, P).unwrap(),
            IntervalMeasure::lebesgue(2.0, 3.0, NODES, P).unwrap(),
        ])
        .unwrap(),
    );
    let sol = HpSolver::new(sys.clone(), 6).solve(6).unwrap();
    let text = serde_json::to_string(&sol.to_document()).unwrap();
    let back = biorth_core::hp_solver::HpSolution::from_document(sys, &serde_json::from_str(&text).unwrap()).unwrap();
    for j in 0..=2 {
        assert_eq!(sol.a(j), back.a(j));
    }
    for j in 1..=2 {
        assert_eq!(sol.zeros(j), back.zeros(j));
    }
}
