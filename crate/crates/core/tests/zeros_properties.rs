use biorth_core::ext::tolerance;
use biorth_core::measures::Interval;
use biorth_core::poly::Polynomial;
use biorth_core::polyzeros::{counting_measure, interlaces, moment_distance, real_roots};
use biorth_core::{ExtComplex, ExtReal};
use proptest::prelude::*;

const P: u32 = 192;

fn spread_roots(raw: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = raw.to_vec();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn roots_rebuild_the_polynomial(raw in prop::collection::vec(-0.999f64..0.999, 1..14), a in -3.0f64..3.0, w in 0.5f64..4.0) {
        let iv = Interval::from_f64(a, a + w, P).unwrap();
        let roots: Vec<ExtReal> = spread_roots(&raw)
            .iter()
            .map(|t| iv.from_unit(&ExtReal::from_f64(*t, P)))
            .collect();
        let p = Polynomial::from_roots(&roots, P);
        let found = real_roots(&p, &iv).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        let rebuilt = Polynomial::from_roots(&found, P);
        let tol = tolerance(P, 1, 3).to_f64();
        let scale = p.coeffs().iter().fold(ExtReal::zero(P), |acc, c| acc.max(&c.abs()));
        for (x, y) in p.coeffs().iter().zip(rebuilt.coeffs()) {
            prop_assert!((&(x - y).abs() / &scale).to_f64() <= tol);
        }
    }

    #[test]
    fn potential_of_a_unit_measure_is_minus_log_far_away(raw in prop::collection::vec(-1.0f64..1.0, 1..20), arg in 0.0f64..6.28) {
        let pts: Vec<ExtReal> = spread_roots(&raw).iter().map(|t| ExtReal::from_f64(*t, P)).collect();
        let mu = counting_measure(&pts).unwrap();
        for r in [1e2, 1e4] {
            let z = ExtComplex::from_f64(r * arg.cos(), r * arg.sin(), P);
            let v = mu.log_potential(&z).unwrap().to_f64();
            prop_assert!((v + f64::ln(r)).abs() <= 2.0 / r);
        }
    }

    #[test]
    fn coincident_points_never_interlace(raw in prop::collection::vec(-1.0f64..1.0, 2..10), pick in 0usize..10) {
        let zb: Vec<ExtReal> = spread_roots(&raw).iter().map(|t| ExtReal::from_f64(*t, P)).collect();
        prop_assume!(zb.len() >= 2);
        let mut za: Vec<ExtReal> = zb.windows(2).map(|p| &(&p[0] + &p[1]) / 2.0).collect();
        prop_assert!(interlaces(&za, &zb).unwrap());
        let i = pick % za.len();
        za[i] = zb[i + pick % 2].clone();
        prop_assert!(!interlaces(&za, &zb).unwrap());
    }

    #[test]
    fn moment_distance_is_a_symmetric_gap(a in prop::collection::vec(-1.0f64..1.0, 1..10), b in prop::collection::vec(-1.0f64..1.0, 1..10)) {
        let ma = counting_measure(&spread_roots(&a).iter().map(|t| ExtReal::from_f64(*t, P)).collect::<Vec<_>>()).unwrap();
        let mb = counting_measure(&spread_roots(&b).iter().map(|t| ExtReal::from_f64(*t, P)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(moment_distance(&ma, &ma, 12), 0.0);
        let d = moment_distance(&ma, &mb, 12);
        prop_assert_eq!(d, moment_distance(&mb, &ma, 12));
        prop_assert!((0.0..=2.0 + 1e-12).contains(&d));
    }
}
