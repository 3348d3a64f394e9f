mod common;

use biorth_core::ext::tolerance;
use biorth_core::measures::{exact_moment, make_measure, Interval, WeightSpec};
use biorth_core::poly::Polynomial;
use biorth_core::{ExtComplex, ExtReal};
use proptest::prelude::*;

const P: u32 = 192;

fn weight(alpha: f64, beta: f64, c0: f64, c1: f64) -> WeightSpec {
    WeightSpec::jacobi(alpha, beta, P).with_poly(Polynomial::from_f64(&[c0, c1], P))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_is_exact_to_its_degree(
        a in -3.0f64..3.0, w in 0.2f64..4.0,
        alpha in -0.9f64..2.0, beta in -0.9f64..2.0,
        nodes in 2usize..24,
    ) {
        let iv = Interval::from_f64(a, a + w, P).unwrap();
        // 2 + |a| + w keeps the linear factor positive on the interval.
        let c0 = 2.0 + a.abs() + w;
        let m = make_measure(iv, weight(alpha, beta, c0, 1.0), nodes, P).unwrap();
        let tol = tolerance(P, 1, 2).to_f64();
        for k in 0..=2 * nodes - 2 {
            let q = m.moment(k);
            let e = exact_moment(&m, k, P);
            let scale = exact_moment(&m, 0, P).abs().max(&e.abs());
            let rel = (&(&q - &e).abs() / &scale).to_f64();
            prop_assert!(rel <= tol, "k={} rel={:e}", k, rel);
        }
    }

    #[test]
    fn nodes_inside_and_weights_positive(
        a in -3.0f64..3.0, w in 0.01f64..5.0,
        alpha in -0.95f64..3.0, beta in -0.95f64..3.0,
        nodes in 1usize..40,
    ) {
        let iv = Interval::from_f64(a, a + w, P).unwrap();
        let m = make_measure(iv.clone(), WeightSpec::jacobi(alpha, beta, P), nodes, P).unwrap();
        prop_assert_eq!(m.node_count(), nodes);
        prop_assert!(m.nodes().iter().all(|x| iv.contains_open(x)));
        prop_assert!(m.nodes().windows(2).all(|p| p[0] < p[1]));
        prop_assert!(m.weights().iter().all(|x| x.is_positive()));
        prop_assert!(m.mass().is_positive());
    }

    #[test]
    fn transform_decays_like_inverse_distance(
        a in -2.0f64..2.0, w in 0.2f64..3.0, alpha in -0.5f64..1.0, arg in 0.1f64..3.0,
    ) {
        let iv = Interval::from_f64(a, a + w, P).unwrap();
        let m = make_measure(iv, WeightSpec::jacobi(alpha, 0.0, P), 16, P).unwrap();
        let mass = ExtComplex::from_real(m.mass());
        let errs: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|r| {
                let z = ExtComplex::from_f64(r * arg.cos(), r * arg.sin(), P);
                (&(&z * &m.cauchy_transform(&z).unwrap()) - &mass).abs().to_f64()
            })
            .collect();
        for p in errs.windows(2) {
            let r = p[0] / p[1];
            // At least first-order decay; faster when the first moment about 0 vanishes.
            prop_assert!(r >= 7.0, "ratio {}", r);
        }
    }
}

#[test]
fn nonpositive_factor_is_rejected() {
    let iv = Interval::from_f64(-1.0, 1.0, P).unwrap();
    // 0.5 - x changes sign inside.
    assert!(make_measure(iv.clone(), weight(0.0, 0.0, 0.5, -1.0), 8, P).is_err());
    // 1 + x vanishes at the left endpoint.
    assert!(make_measure(iv.clone(), weight(0.0, 0.0, 1.0, 1.0), 8, P).is_err());
    assert!(make_measure(iv, WeightSpec::jacobi(-1.0, 0.0, P), 8, P).is_err());
    assert!(Interval::new(ExtReal::one(P), ExtReal::zero(P)).is_err());
}
