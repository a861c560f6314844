//! Structural invariants of the concentration functionals, checked on random inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphere_ls::basis::Basis;
use sphere_ls::concentration::{
    gram_matrix, lambda_min, random_polynomials, sup_norm_ratios, uncertainty_check, SpectralSplit,
};
use sphere_ls::functionals::{harmonic_measure, interior_point, relative_density, GridOptions};
use sphere_ls::geometry::{Cap, CenterGrid, Rotation, SpherePoint};
use sphere_ls::measures::MeasureSpec;
use sphere_ls::quadrature::{build_quadrature, cap_rule};
use sphere_ls::sets::SetSpec;
use sphere_ls::zonal::{lambda_min_zonal, ZonalSet};

fn point(seed: u64) -> SpherePoint {
    SpherePoint::random(2, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn caps(seed: u64, count: usize) -> Vec<Cap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| Cap::new(SpherePoint::random(2, &mut rng), 0.25 + 0.15 * k as f64).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda_min_lies_in_unit_interval(seed in any::<u64>(), count in 1usize..4) {
        let set = SetSpec::CapUnion { caps: caps(seed, count) };
        let basis = Basis::new(2, 5).unwrap();
        let rule = build_quadrature(2, 10, 3).unwrap();
        let l = lambda_min(&set, &MeasureSpec::Lebesgue, &basis, &rule).unwrap().lambda_min;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&l));
    }

    #[test]
    fn lambda_min_is_monotone_in_the_set(seed in any::<u64>(), count in 1usize..3) {
        let small = caps(seed, count);
        let mut large = small.clone();
        large.extend(caps(seed ^ 0x5eed, 1));
        let basis = Basis::new(2, 5).unwrap();
        let rule = build_quadrature(2, 10, 3).unwrap();
        let mu = MeasureSpec::Lebesgue;
        let a = lambda_min(&SetSpec::CapUnion { caps: small }, &mu, &basis, &rule).unwrap().lambda_min;
        let b = lambda_min(&SetSpec::CapUnion { caps: large }, &mu, &basis, &rule).unwrap().lambda_min;
        prop_assert!(a <= b + 1e-9);
    }

    #[test]
    fn cap_spectrum_is_rotation_invariant(seed in any::<u64>(), radius in 0.3f64..2.0) {
        let basis = Basis::new(2, 6).unwrap();
        let center = point(seed);
        let at_pole = SetSpec::cap(SpherePoint::north(2), radius).unwrap();
        let moved = SetSpec::cap(center.clone(), radius).unwrap();
        let mu = MeasureSpec::Lebesgue;
        let a = lambda_min(&at_pole, &mu, &basis, &cap_rule(&SpherePoint::north(2), radius, 12, 1).unwrap()).unwrap();
        let b = lambda_min(&moved, &mu, &basis, &cap_rule(&center, radius, 12, 1).unwrap()).unwrap();
        prop_assert!((a.lambda_min - b.lambda_min).abs() < 1e-10);
    }

    #[test]
    fn weighted_full_sphere_has_unit_lambda(seed in any::<u64>(), exponent in 0.0f64..3.0) {
        // Both forms share the rule, so the pencil is (G, G) whatever its accuracy.
        let mu = MeasureSpec::PowerDistance { pole: point(seed), exponent };
        let basis = Basis::new(2, 4).unwrap();
        let rule = build_quadrature(2, 8, 1).unwrap();
        let l = lambda_min(&SetSpec::Full, &mu, &basis, &rule).unwrap().lambda_min;
        prop_assert!((l - 1.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_measures_of_complements_sum_to_one(seed in any::<u64>(), radius in 0.0f64..0.9) {
        let set = SetSpec::CapUnion { caps: caps(seed, 2) };
        let rule = build_quadrature(2, 24, 2).unwrap();
        let x = interior_point(&point(seed.wrapping_add(1)), radius);
        let inside = harmonic_measure(&set, &x, &rule).unwrap();
        let outside = harmonic_measure(&set.clone().complement(), &x, &rule).unwrap();
        prop_assert!((inside + outside - 1.0).abs() < 1e-9, "{inside} + {outside}");
    }

    #[test]
    fn sup_norm_ratio_is_at_most_one(seed in any::<u64>()) {
        let set = SetSpec::CapUnion { caps: caps(seed, 2) };
        let basis = Basis::new(2, 6).unwrap();
        let grid = CenterGrid::for_degree(2, 6, 6).points();
        let polys = random_polynomials(&basis, 8, seed);
        for r in sup_norm_ratios(&polys, &basis, &set, None, &grid).unwrap() {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn uncertainty_ratio_is_bounded_by_best_constant(seed in any::<u64>(), tail_scale in 0.0f64..2.0) {
        let set = SetSpec::CapUnion { caps: caps(seed, 2) };
        let basis = Basis::new(2, 5).unwrap();
        let rule = build_quadrature(2, 10, 3).unwrap();
        let c2 = lambda_min(&set, &MeasureSpec::Lebesgue, &basis, &rule).unwrap().best_c2;
        let big = Basis::new(2, 8).unwrap();
        let mut f = random_polynomials(&big, 1, seed).remove(0);
        f.coeffs[basis.dim()..].iter_mut().for_each(|c| *c *= tail_scale);
        let split = SpectralSplit::from_coeffs(&f, 5).unwrap();
        let ratio = uncertainty_check(&split, &set, &rule).unwrap();
        prop_assert!(ratio >= 1.0 - 1e-12 && ratio <= c2 * (1.0 + 1e-9));
    }

    #[test]
    fn relative_density_lies_in_unit_interval(seed in any::<u64>()) {
        let set = SetSpec::CapUnion { caps: caps(seed, 3) };
        let rho = relative_density(&set, &MeasureSpec::Lebesgue, 2, 4, 2.0, &GridOptions::default()).unwrap().rho_hat;
        prop_assert!((0.0..=1.0).contains(&rho));
    }

    #[test]
    fn rotating_set_and_rule_together_preserves_the_gram_spectrum(seed in any::<u64>()) {
        let rotation = Rotation::random(2, &mut ChaCha8Rng::seed_from_u64(seed));
        let set = SetSpec::CapUnion { caps: caps(seed ^ 1, 2) };
        let rule = build_quadrature(2, 8, 2).unwrap();
        let basis = Basis::new(2, 4).unwrap();
        let mu = MeasureSpec::Lebesgue;
        let ev = |s: &SetSpec, r| {
            let mut e: Vec<f64> = gram_matrix(s, &mu, &basis, r).unwrap().symmetric_eigenvalues().iter().copied().collect();
            e.sort_by(f64::total_cmp);
            e
        };
        let a = ev(&set, &rule);
        let b = ev(&set.rotated(&rotation).unwrap(), &rule.rotated(&rotation));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn extended_route_matches_gram_route_on_a_large_cap() {
    let set = SetSpec::cap(SpherePoint::north(2), 2.0).unwrap();
    let basis = Basis::new(2, 8).unwrap();
    let rule = cap_rule(&SpherePoint::north(2), 2.0, 16, 1).unwrap();
    let gram = lambda_min(&set, &MeasureSpec::Lebesgue, &basis, &rule).unwrap().lambda_min;
    let zonal = lambda_min_zonal(2, 8, &ZonalSet::from_spec(&set).unwrap()).unwrap().lambda_min;
    assert!((gram - zonal).abs() < 1e-12 * gram.max(1e-3), "{gram} vs {zonal}");
}

#[test]
fn small_cap_complement_is_nearly_full() {
    let set = SetSpec::cap(SpherePoint::north(2), 0.05).unwrap().complement();
    let z = lambda_min_zonal(2, 4, &ZonalSet::from_spec(&set).unwrap()).unwrap();
    assert!(z.lambda_min > 0.5 && z.lambda_min < 1.0);
}
