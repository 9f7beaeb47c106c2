//! Integration tests of the polynomial algebra against independent
//! arithmetic: raw term dictionaries, quadrature, and finite differences.

mod common;

use common::{simpson, TermMap};
use micromacro::algebra::{op_norm_l1, Antiderivative, ExpTrigPoly, FrequencyVector};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn two_freq() -> FrequencyVector {
    FrequencyVector::certified(vec![1.0, std::f64::consts::SQRT_2], 1.0).unwrap()
}

/// Strategy: a random scalar sharp-flat polynomial over two frequencies,
/// returned both as a dictionary and as a canonical polynomial.
fn poly_strategy() -> impl Strategy<Value = (TermMap, ExpTrigPoly)> {
    let term = (
        prop::array::uniform2(-3i32..=3),
        prop_oneof![
            Just(C64::new(0.0, 0.0)),
            Just(C64::new(-0.5, 0.0)),
            Just(C64::new(-1.0, 0.8)),
        ],
        (-1.0..1.0f64, -1.0..1.0f64),
    );
    prop::collection::vec(term, 1..6).prop_map(|terms| {
        let freq = two_freq();
        let mut map = TermMap::new();
        for (alpha, lambda, (re, im)) in terms {
            map.add(alpha.to_vec(), lambda, C64::new(re, im));
        }
        let poly = map.to_poly(&freq);
        (map, poly)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_matches_direct_summation((map, poly) in poly_strategy(), tau in 0.0..20.0f64) {
        let direct = map.eval(&[1.0, std::f64::consts::SQRT_2], tau);
        let canonical = poly.evaluate(tau)[(0, 0)];
        prop_assert!((direct - canonical).norm() <= 1e-12 * (1.0 + map.max_coeff()));
    }

    #[test]
    fn product_evaluates_to_product_of_evaluations(
        (map_a, poly_a) in poly_strategy(),
        (map_b, poly_b) in poly_strategy(),
        tau in 0.0..10.0f64,
    ) {
        let product = poly_a.mul(&poly_b).unwrap();
        let expected = map_a.eval(&[1.0, std::f64::consts::SQRT_2], tau)
            * map_b.eval(&[1.0, std::f64::consts::SQRT_2], tau);
        let got = product.evaluate(tau)[(0, 0)];
        let scale = (1.0 + map_a.max_coeff()) * (1.0 + map_b.max_coeff());
        prop_assert!((expected - got).norm() <= 1e-10 * scale);
    }

    #[test]
    fn primitive_differentiates_back((map, poly) in poly_strategy()) {
        // remove the mean first: the primitive is defined on zero-mean input
        let mean = poly.average()[(0, 0)];
        let centered = poly.sub(&ExpTrigPoly::scalar(poly.freq(), mean)).unwrap();
        let prim = centered.zero_mean_primitive().unwrap();
        let back = prim.derivative(1);
        prop_assert!(back.coefficient_distance(&centered) <= 1e-11 * (1.0 + map.max_coeff()));
        // and the primitive itself has zero mean
        prop_assert!(prim.average()[(0, 0)].norm() <= 1e-12 * (1.0 + map.max_coeff()));
    }

    #[test]
    fn window_integral_matches_quadrature((map, poly) in poly_strategy(), t0 in 0.0..5.0f64, len in 0.01..3.0f64) {
        let anti = Antiderivative::new(&poly);
        let window = anti.window(t0, t0 + len)[(0, 0)];
        let quad = simpson(
            &|tau| map.eval(&[1.0, std::f64::consts::SQRT_2], tau),
            t0,
            t0 + len,
            1e-12,
        );
        prop_assert!((window - quad).norm() <= 1e-9 * (1.0 + map.max_coeff()));
    }

    #[test]
    fn cursor_steps_agree_with_one_shot_windows((map, poly) in poly_strategy()) {
        let anti = Antiderivative::new(&poly);
        let mut cursor = anti.cursor(0.0);
        let taus = [0.7, 1.3, 2.9, 4.2];
        let mut prev = 0.0;
        for &tau in &taus {
            let stepped = cursor.step_to(tau)[(0, 0)];
            let oneshot = anti.window(prev, tau)[(0, 0)];
            prop_assert!((stepped - oneshot).norm() <= 1e-10 * (1.0 + map.max_coeff()));
            prev = tau;
        }
    }

    #[test]
    fn coefficient_norm_dominates_grid_suprema((map, poly) in poly_strategy()) {
        let bound = poly.norm_kappa(0.0);
        for k in 0..64 {
            let tau = 0.31 * k as f64;
            let value = op_norm_l1(&poly.evaluate(tau));
            prop_assert!(value <= bound * (1.0 + 1e-12) + 1e-12 * (1.0 + map.max_coeff()));
        }
    }
}

#[test]
fn sharp_flat_split_is_clean() {
    let freq = two_freq();
    let mut map = TermMap::new();
    map.add(vec![1, 0], C64::new(0.0, 0.0), C64::new(0.3, 0.1));
    map.add(vec![0, 0], C64::new(-2.0, 0.0), C64::new(1.0, 0.0));
    map.add(vec![0, 1], C64::new(-0.5, 0.3), C64::new(0.0, -0.4));
    let poly = map.to_poly(&freq);
    let sharp = poly.sharp_part();
    let flat = poly.flat_part();
    assert_eq!(sharp.term_count(), 1);
    assert_eq!(flat.term_count(), 2);
    assert!(sharp
        .add(&flat)
        .unwrap()
        .coefficient_distance(&poly) == 0.0);
    assert_eq!(flat.flat_rate(), Some(0.5));
}

#[test]
fn growing_or_rotating_terms_are_rejected() {
    let freq = two_freq();
    let growing = ExpTrigPoly::from_terms(
        &freq,
        1,
        [(
            vec![0, 0],
            C64::new(0.1, 0.0),
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        )],
    );
    assert!(growing.is_err());
    let rotating = ExpTrigPoly::from_terms(
        &freq,
        1,
        [(
            vec![0, 0],
            C64::new(0.0, 1.5),
            DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        )],
    );
    assert!(rotating.is_err());
}

#[test]
fn rationally_dependent_frequencies_are_rejected() {
    // 2 * 1.5 - 3 * 1.0 = 0: an exact resonance inside the scan radius
    assert!(FrequencyVector::certified(vec![1.0, 1.5], 1.0).is_err());
    // and a pair that only nearly resonates far outside it is accepted
    assert!(FrequencyVector::certified(vec![1.0, std::f64::consts::PI], 1.0).is_ok());
}

#[test]
fn mono_frequency_constants_are_exact() {
    let freq = FrequencyVector::mono(std::f64::consts::PI).unwrap();
    assert_eq!(freq.nu(), 0.0);
    assert_eq!(freq.c_d(), std::f64::consts::PI);
    // nu = 0 makes the integration constant max(1, 1/c_D), kappa-free
    assert_eq!(freq.integration_constant(1.0), 1.0);
    assert_eq!(freq.integration_constant(0.1), 1.0);
}

#[test]
fn serialization_round_trips_coefficients_exactly() {
    let freq = two_freq();
    let mut map = TermMap::new();
    map.add(vec![2, -1], C64::new(0.0, 0.0), C64::new(0.25, -0.125));
    map.add(vec![0, 0], C64::new(-1.0, 2.0), C64::new(-0.5, 0.75));
    let poly = map.to_poly(&freq);
    let text = poly.to_json().unwrap();
    let back = ExpTrigPoly::from_json(&text).unwrap();
    assert_eq!(back.coefficient_distance(&poly), 0.0);
    assert_eq!(back.freq().omega(), poly.freq().omega());
}

#[test]
fn tampered_documents_are_rejected() {
    let freq = two_freq();
    let poly = ExpTrigPoly::cosine(&freq, 0).unwrap();
    // flip one decay rate positive: the document must fail revalidation
    let mut doc = poly.to_doc();
    doc.terms[0].lambda = [0.7, 0.0];
    assert!(ExpTrigPoly::from_doc(doc).is_err());
}
