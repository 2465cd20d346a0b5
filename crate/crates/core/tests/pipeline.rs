use proptest::prelude::*;

use sampdisc::discretize::{equispaced_points, estimate_d, estimate_d_with, EstimateOptions, PointSet};
use sampdisc::experiments::{random_spectrum_experiment, XiMode};
use sampdisc::kernels::{classical_vp, generalized_vp};
use sampdisc::par::Execution;
use sampdisc::recovery::{chebyshev_fit, DEFAULT_FIT_POLYGON_K};
use sampdisc::{Complex64, FrequencySet, TrigPolynomial};

fn monomials(q: &FrequencySet) -> Vec<TrigPolynomial> {
    q.iter()
        .map(|k| TrigPolynomial::monomial(k.to_vec(), Complex64::new(1.0, 0.0)))
        .collect()
}

#[test]
fn kernel_reproduces_its_target() {
    let q = FrequencySet::from_1d([0, 3, 7, 12]);
    let kc = generalized_vp(&q, 2).unwrap();
    let f = TrigPolynomial::from_coefficients(&q, &[
        Complex64::new(1.0, -0.5),
        Complex64::new(0.25, 2.0),
        Complex64::new(-1.5, 0.0),
        Complex64::new(0.0, 0.75),
    ]);
    // convolving f with the kernel multiplies coefficients by the kernel's
    for (k, c) in f.terms() {
        assert_eq!(kc.coeff_exact(k), (kc.denominator, kc.denominator), "{k:?}");
        assert!((kc.kernel.coeff(k) * c - c).norm() < 1e-12, "{k:?}");
    }
    assert_eq!(kc.numerator.num_terms(), kc.kernel.num_terms());
}

#[test]
fn execution_modes_agree() {
    let q = FrequencySet::from_1d(-3..=3);
    let xi = equispaced_points(11).unwrap();
    let par = estimate_d_with(&q, &xi, &EstimateOptions { execution: Execution::Parallel, ..Default::default() }).unwrap();
    let seq = estimate_d_with(&q, &xi, &EstimateOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
    assert_eq!(par, seq);
}

#[test]
fn estimates_survive_serialization() {
    let kc = classical_vp(5).unwrap();
    let back: sampdisc::kernels::KernelConstruction =
        serde_json::from_str(&serde_json::to_string(&kc).unwrap()).unwrap();
    assert_eq!(back, kc);

    let cert = estimate_d(&FrequencySet::from_1d(0..=3), &equispaced_points(7).unwrap(), 32, 8).unwrap();
    let back: sampdisc::discretize::DiscretizationCertificate =
        serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn experiments_are_seed_deterministic() {
    let a = random_spectrum_experiment(1024, 16, 40, 3, 5, XiMode::Random).unwrap();
    let b = random_spectrum_experiment(1024, 16, 40, 3, 5, XiMode::Random).unwrap();
    let c = random_spectrum_experiment(1024, 16, 40, 3, 6, XiMode::Random).unwrap();
    assert_eq!(a.per_trial, b.per_trial);
    assert_ne!(a.per_trial, c.per_trial);
}

#[test]
fn more_points_never_hurt() {
    let q = FrequencySet::from_1d(0..=4);
    let coarse = equispaced_points(6).unwrap();
    let fine = coarse.union(&PointSet::new(1, vec![vec![0.3], vec![2.9], vec![4.4]]).unwrap()).unwrap();
    let dc = estimate_d(&q, &coarse, 64, 8).unwrap();
    let df = estimate_d(&q, &fine, 64, 8).unwrap();
    assert!(df.raw_value <= dc.raw_value * (1.0 + 1e-6), "{} > {}", df.raw_value, dc.raw_value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_span_members_are_refit(coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4)) {
        let q = FrequencySet::from_1d([-1, 0, 2, 5]);
        let basis = monomials(&q);
        let c: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let f = TrigPolynomial::from_coefficients(&q, &c);
        let xi = equispaced_points(13).unwrap();
        let y = f.evaluate(xi.points()).unwrap();
        let rep = chebyshev_fit(&xi, &y, &basis, DEFAULT_FIT_POLYGON_K).unwrap();
        let scale = 1.0 + f.coefficient_l1();
        prop_assert!(rep.sample_residual <= 1e-7 * scale);
        let err = f.sub(&rep.fitted).unwrap().coefficient_l1();
        prop_assert!(err <= 1e-4 * scale, "coefficient error {}", err);
    }
}
