use std::f64::consts::PI;

use lmoment_core::arith::{factorize, gcd, phi_star};
use lmoment_core::characters::{build_group, enumerate_characters, gauss_sum};
use lmoment_core::lfunction::{l_value, ShiftPair};
use lmoment_core::moments::{CoefficientVector, FamilySpec};
use lmoment_core::special::{gamma, hurwitz_zeta, sin_pi};
use lmoment_core::transforms::{v_tilde, weight_w, ContourSpec, WeightSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn non_integer_strip() -> impl Strategy<Value = Complex64> {
    (-5.0f64..5.0, -20.0f64..20.0)
        .prop_filter("away from the poles", |&(x, y)| {
            y.abs() > 1e-3 || (x - x.round()).abs() > 1e-3
        })
        .prop_map(|(x, y)| c(x, y))
}

fn small_shift() -> impl Strategy<Value = Complex64> {
    (-0.3f64..0.3, -0.3f64..0.3).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_reflection(z in non_integer_strip()) {
        let v = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * sin_pi(z) / PI;
        prop_assert!((v - 1.0).norm() < 1e-10, "z = {z}: {v}");
    }

    #[test]
    fn gamma_recurrence(z in non_integer_strip()) {
        let (g, g1) = (gamma(z).unwrap(), gamma(z + 1.0).unwrap());
        prop_assert!((g1 - z * g).norm() <= 1e-11 * g1.norm(), "z = {z}");
    }

    #[test]
    fn hurwitz_shift(re in -3.0f64..4.0, im in -15.0f64..15.0, a in 0.05f64..1.0) {
        let s = c(re, im);
        prop_assume!((s - 1.0).norm() > 1e-3);
        let d = hurwitz_zeta(s, a).unwrap() - hurwitz_zeta(s, a + 1.0).unwrap();
        let expect = (-s * a.ln()).exp();
        prop_assert!((d - expect).norm() <= 1e-10 * expect.norm().max(1.0), "s = {s}, a = {a}");
    }

    #[test]
    fn zeta_multiplication_formula(re in -2.0f64..4.0, im in -10.0f64..10.0, m in prop::sample::select(vec![2u64, 3, 5])) {
        let s = c(re, im);
        prop_assume!((s - 1.0).norm() > 1e-2);
        let sum: Complex64 = (1..=m).map(|j| hurwitz_zeta(s, j as f64 / m as f64).unwrap()).sum();
        let lhs = (-s * (m as f64).ln()).exp() * sum;
        let zeta = hurwitz_zeta(s, 1.0).unwrap();
        prop_assert!((lhs - zeta).norm() <= 1e-9 * zeta.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn characters_are_multiplicative_and_classified(q in 2u64..=100, seed in any::<u64>()) {
        let fq = factorize(q).unwrap();
        let group = build_group(&fq).unwrap();
        let chars = enumerate_characters(&group, false, false);
        prop_assert_eq!(chars.len() as u64, group.order());
        let units: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1).collect();
        let pick = |k: u64| units[((seed.wrapping_mul(6364136223846793005).wrapping_add(k)) % units.len() as u64) as usize];
        for chi in &chars {
            for k in 0..10 {
                let (m, n) = (pick(2 * k), pick(2 * k + 1));
                prop_assert!((chi.value(m * n) - chi.value(m) * chi.value(n)).norm() < 1e-12);
            }
            prop_assert_eq!(chi.is_even(), (chi.value(q - 1) - 1.0).norm() < 1e-12);
            prop_assert_eq!(q % chi.conductor().value(), 0);
            prop_assert_eq!(chi.is_primitive(), chi.conductor().value() == q);
            prop_assert_eq!(chi.value(q), c(0.0, 0.0));
        }
        let primitive: Vec<_> = chars.iter().filter(|chi| chi.is_primitive()).collect();
        prop_assert_eq!(primitive.len() as u64, phi_star(&fq));
        for chi in &primitive {
            prop_assert!((gauss_sum(chi).norm() - (q as f64).sqrt()).abs() < 1e-10);
        }
        // closed under conjugation
        for chi in &chars {
            let bar = chi.conj();
            prop_assert!(chars.iter().any(|other| other.exponents() == bar.exponents()));
        }
    }

    #[test]
    fn l_value_conjugation(q in 3u64..=40, re in 0.2f64..2.5, im in -10.0f64..10.0) {
        let chars = enumerate_characters(&build_group(&factorize(q).unwrap()).unwrap(), false, true);
        let s = c(re, im);
        for chi in chars.iter().take(4) {
            let a = l_value(s.conj(), &chi.conj()).unwrap();
            let b = l_value(s, chi).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn shift_pair_invariants(a in small_shift(), b in small_shift()) {
        match ShiftPair::new(a, b) {
            Ok(s) => {
                prop_assert!(a != b && a != -b && a.norm() > 0.0 && b.norm() > 0.0);
                prop_assert_eq!(s.swapped().swapped(), s);
                prop_assert_eq!(s.reflected().reflected(), s);
                let half = s.sum() / 2.0;
                prop_assert!(v_tilde(half, &s).unwrap().norm() <= 1e-14);
                prop_assert!(v_tilde(-half, &s).unwrap().norm() <= 1e-14);
            }
            Err(_) => prop_assert!(a == b || a == -b || a.norm() == 0.0 || b.norm() == 0.0),
        }
        prop_assert!(ShiftPair::new(a, a).is_err());
    }

    #[test]
    fn weight_is_nonnegative_and_supported_on_one_two(x in -1.0f64..4.0, sharp in 0.2f64..5.0) {
        let spec = WeightSpec { bump_sharpness: sharp, ..WeightSpec::default() };
        let w = weight_w(x, &spec);
        prop_assert!(w >= 0.0 && w.is_finite());
        if x <= 1.0 || x >= 2.0 {
            prop_assert_eq!(w, 0.0);
        } else if (x - 1.5).abs() < 0.4 {
            prop_assert!(w > 0.0);
        }
    }

    #[test]
    fn contour_spec_needs_integer_node_count(t in 1.0f64..100.0, k in 1u32..400) {
        let step = t / k as f64;
        prop_assert!(ContourSpec::new(1.0, t, step).is_ok());
        prop_assert!(ContourSpec::new(1.0, t, t / (k as f64 + 0.5)).is_err());
    }

    #[test]
    fn family_moduli_lie_strictly_inside(q in 2.0f64..500.0) {
        let spec = FamilySpec::new(q, ShiftPair::real(0.02, 0.01).unwrap(), 1, 1).unwrap();
        let moduli = spec.moduli();
        prop_assert!(moduli.iter().all(|&m| (m as f64) > q && (m as f64) < 2.0 * q));
        let all = ((q.floor() as u64)..=((2.0 * q).ceil() as u64)).filter(|&m| (m as f64) > q && (m as f64) < 2.0 * q).count();
        prop_assert_eq!(moduli.len(), all);
    }

    #[test]
    fn coefficient_vectors_sort_and_reject_repeats(hs in prop::collection::vec(1u64..50, 1..12)) {
        let entries: Vec<(u64, Complex64)> = hs.iter().map(|&h| (h, c(h as f64, 0.0))).collect();
        let mut uniq = hs.clone();
        uniq.sort_unstable();
        uniq.dedup();
        match CoefficientVector::new(entries, 50) {
            Ok(v) => {
                prop_assert_eq!(uniq.len(), hs.len());
                let got: Vec<u64> = v.entries().iter().map(|e| e.h).collect();
                prop_assert_eq!(got, uniq);
            }
            Err(_) => prop_assert!(uniq.len() < hs.len()),
        }
    }
}
