mod common;

use biorth_core::ext::tolerance;
use biorth_core::measures::IntervalMeasure;
use biorth_core::nikishin::make_system;
use biorth_core::{ExtComplex, ExtReal};
use common::{raw_points, system};
use proptest::prelude::*;

const P: u32 = 192;
const NODES: usize = 16;

fn rel(a: &ExtReal, b: &ExtReal, scale: &ExtReal) -> f64 {
    (&(a - b).abs() / scale).to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Chained bimoments against a double sum over the kernel evaluated point by point.
    #[test]
    fn chained_bimoments_match_kernel_sums(
        spec in system(2..=3),
        pairs in prop::collection::vec((0usize..=10, 0usize..=10), 20),
    ) {
        let sys = spec.build(NODES, P);
        let (s1, sm) = (sys.measure(1), sys.measure(sys.m()));
        let kernel: Vec<Vec<ExtReal>> = s1
            .nodes()
            .iter()
            .map(|x| sm.nodes().iter().map(|y| sys.kernel_k(x, y).unwrap()).collect())
            .collect();
        let tol = tolerance(P, 1, 2).to_f64();
        for (nu, mu) in pairs {
            let mut direct = ExtReal::zero(P);
            let mut scale = ExtReal::zero(P);
            for (i, x) in s1.nodes().iter().enumerate() {
                for (l, y) in sm.nodes().iter().enumerate() {
                    let t = &(&(&s1.weights()[i] * &x.powi(nu as i32)) * &kernel[i][l])
                        * &(&sm.weights()[l] * &y.powi(mu as i32));
                    scale += &t.abs();
                    direct += &t;
                }
            }
            let chained = sys.bimoment(nu, mu);
            prop_assert!(rel(&chained, &direct, &scale) <= tol, "({}, {})", nu, mu);
        }
    }

    #[test]
    fn transforms_satisfy_cauchy_riemann(spec in system(2..=3), raw in raw_points(6)) {
        let sys = spec.build(NODES, P);
        let m = sys.m();
        let h = ExtReal::from_f64(1e-20, P);
        let dx = ExtComplex::new(h.clone(), ExtReal::zero(P));
        let dy = ExtComplex::new(ExtReal::zero(P), h.clone());
        for z in spec.probes(&raw, 0.3, P) {
            for j in 1..=m {
                for k in 1..=m {
                    let f = |w: &ExtComplex| sys.s_hat(j, k, w).unwrap();
                    // ∂f/∂x = -i ∂f/∂y for analytic f.
                    let fx = &(&f(&(&z + &dx)) - &f(&(&z - &dx))) / &ExtComplex::from_real(&h * 2.0);
                    let fy = &(&f(&(&z + &dy)) - &f(&(&z - &dy))) / &ExtComplex::from_real(&h * 2.0);
                    let minus_i = ExtComplex::from_f64(0.0, -1.0, P);
                    let d = (&fx - &(&minus_i * &fy)).abs().to_f64();
                    prop_assert!(d <= 1e-30 * (1.0 + fx.abs().to_f64()), "j={} k={} d={:e}", j, k, d);
                }
            }
        }
    }

    /// The reversed system's generated measures are the original ones with mirrored indices.
    #[test]
    fn reversal_mirrors_generated_measures(spec in system(2..=3), raw in raw_points(4)) {
        let sys = spec.build(NODES, P);
        let rev = sys.reversed();
        let m = sys.m();
        for z in spec.probes(&raw, 0.3, P) {
            for j in 1..=m {
                for k in 1..=m {
                    let a = sys.s_hat(j, k, &z).unwrap();
                    let b = rev.s_hat(m + 1 - j, m + 1 - k, &z).unwrap();
                    let d = (&a - &b).abs().to_f64() / (1e-300 + a.abs().to_f64());
                    prop_assert!(d < 1e-50, "j={} k={}", j, k);
                }
            }
        }
    }
}

#[test]
fn two_level_kernel_has_constant_sign() {
    for (first, second) in [((0.0, 1.0), (2.0, 3.0)), ((2.0, 3.0), (-1.0, 1.5))] {
        let sys = make_system(vec![
            IntervalMeasure::lebesgue(first.0, first.1, 12, P).unwrap(),
            IntervalMeasure::lebesgue(second.0, second.1, 12, P).unwrap(),
        ])
        .unwrap();
        let signs: Vec<i32> = sys
            .measure(1)
            .nodes()
            .iter()
            .flat_map(|x| sys.measure(2).nodes().iter().map(move |y| (x, y)))
            .map(|(x, y)| sys.kernel_k(x, y).unwrap().signum_i())
            .collect();
        assert!(signs.iter().all(|&s| s == signs[0] && s != 0));
    }
}
