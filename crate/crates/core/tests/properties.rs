//! Randomized invariants across the public API.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use tomo_core::operator::{random_complex, random_density, random_hermitian, OperatorMatrix};
use tomo_core::scheme::{
    convert_symbol, intertwine_kernel, matrix_element_scheme, operator_of, star, star_bracket, star_kernel_with_order,
    symbol_of, KernelOrder, KernelTensor, Scheme,
};
use tomo_core::spin::{spin_scheme, spin_tomogram_at, AngularGrid};
use tomo_core::symplectic::{ground_state_tomogram, spectral_direction, FockSpace, SymplecticPoint};
use tomo_core::HalfInteger;

fn spin_half() -> &'static (Scheme, KernelTensor) {
    static CELL: OnceLock<(Scheme, KernelTensor)> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = spin_scheme(&AngularGrid::default_for(HalfInteger::from_twice(1)).unwrap()).unwrap();
        let k = star_kernel_with_order(&s, KernelOrder::LeftFirst);
        (s, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spin_symbol_round_trip(twice in 1i32..=6, seed in any::<u64>()) {
        let s = spin_scheme(&AngularGrid::default_for(HalfInteger::from_twice(twice)).unwrap()).unwrap();
        let a = random_complex(twice as usize + 1, seed);
        prop_assert!(operator_of(&symbol_of(&a, &s).unwrap(), &s).unwrap().max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn spin_star_is_operator_product(seed in any::<u64>()) {
        let (s, k) = spin_half();
        let (a, b) = (random_complex(2, seed), random_complex(2, seed.wrapping_add(1)));
        let fab = star(&symbol_of(&a, s).unwrap(), &symbol_of(&b, s).unwrap(), k, s).unwrap();
        prop_assert!(fab.max_abs_diff(&symbol_of(&(&a * &b), s).unwrap()) < 1e-10);
    }

    #[test]
    fn bracket_is_commutator_symbol(seed in any::<u64>()) {
        let (s, k) = spin_half();
        let (a, b) = (random_hermitian(2, seed), random_hermitian(2, seed ^ 0x5555));
        let br = star_bracket(&symbol_of(&a, s).unwrap(), &symbol_of(&b, s).unwrap(), k, s).unwrap();
        let comm = &(&a * &b) - &(&b * &a);
        prop_assert!(br.max_abs_diff(&symbol_of(&comm, s).unwrap()) < 1e-10);
    }

    #[test]
    fn matrix_element_intertwining(seed in any::<u64>()) {
        let (s, _) = spin_half();
        let me = matrix_element_scheme(2).unwrap();
        let f = symbol_of(&random_complex(2, seed), s).unwrap();
        let there = convert_symbol(&f, &intertwine_kernel(s, &me).unwrap()).unwrap();
        let back = convert_symbol(&there, &intertwine_kernel(&me, s).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn spin_tomogram_is_a_distribution(twice in 1i32..=5, seed in any::<u64>(), alpha in 0.0..6.3f64, beta in 0.0..3.15f64, gamma in -3.0..3.0f64) {
        let j = HalfInteger::from_twice(twice);
        let rho = random_density(j.multiplicity(), seed);
        let w = spin_tomogram_at(&rho, j, alpha, beta, gamma).unwrap();
        prop_assert!(w.iter().all(|v| v.re > -1e-12 && v.im.abs() < 1e-12));
        prop_assert!((w.iter().sum::<Complex64>() - 1.0).norm() < 1e-12);
        // the third Euler angle only rephases the rotated basis
        let w0 = spin_tomogram_at(&rho, j, alpha, beta, 0.0).unwrap();
        prop_assert!(w.iter().zip(&w0).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn ground_state_tomogram_homogeneity(x in -3.0..3.0f64, mu in -2.0..2.0f64, nu in -2.0..2.0f64, lambda in 0.2..5.0f64) {
        prop_assume!(mu.hypot(nu) > 1e-3);
        let w = ground_state_tomogram(&SymplecticPoint::new(x, mu, nu).unwrap());
        let scaled = ground_state_tomogram(&SymplecticPoint::new(lambda * x, lambda * mu, lambda * nu).unwrap());
        prop_assert!((scaled - w / lambda).abs() < 1e-12 * w.max(1.0));
        let flipped = ground_state_tomogram(&SymplecticPoint::new(-x, -mu, -nu).unwrap());
        prop_assert!((flipped - w).abs() < 1e-15);
    }

    #[test]
    fn spectral_masses_are_probabilities(seed in any::<u64>(), theta in 0.0..6.3f64) {
        let fock = FockSpace::new(12).unwrap();
        let rho = random_density(12, seed);
        let (_, masses) = spectral_direction(&rho, &fock, theta.cos(), theta.sin()).unwrap();
        prop_assert!(masses.iter().all(|m| m.re > -1e-12 && m.im.abs() < 1e-12));
        prop_assert!((masses.iter().sum::<Complex64>() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn operator_json_round_trip(n in 1usize..6, seed in any::<u64>()) {
        let a = random_complex(n, seed);
        prop_assert_eq!(OperatorMatrix::from_json(&a.to_json()).unwrap(), a);
    }
}
