//! Randomized invariants of the core library.

use cekit::entropy::{entropy_of_spectrum, unified_entropy, EntropyParams};
use cekit::measures::{cce_pure, cce_value, named_measures, NamedMeasures};
use cekit::states::{
    dicke, ghz, haar_random, haar_random_with, random_density, random_product, random_unitary,
    seeded_rng, star, w,
};
use cekit::subset::SubsetSpec;
use cekit::suites::{random_concave_params, random_params};
use cekit::swaptest::{bounds_from_estimate, distribution_from_purities, swap_test_distribution};
use cekit::tensor::{
    hermitian_eigenvalues, partial_trace_mask, reduced_state_mask, trace_distance,
    DensityOperator, Dims, PureState, C64,
};
use proptest::prelude::*;
use rand::Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn qubits(n: usize) -> Dims {
    Dims::qubits(n).unwrap()
}

fn mixed_dims(seed: u64) -> Dims {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(2..=4);
    Dims::new((0..n).map(|_| rng.random_range(2..=3)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schmidt_duality(seed in any::<u64>()) {
        let dims = mixed_dims(seed);
        let psi = haar_random(&dims, seed).unwrap();
        let full = dims.full_mask();
        let chi = 1 + (seed % u64::from(full - 1)) as u32;
        let a = reduced_state_mask(&psi, chi).unwrap().spectrum().unwrap();
        let b = reduced_state_mask(&psi, full & !chi).unwrap().spectrum().unwrap();
        for k in 0..a.len().min(b.len()) {
            prop_assert!((a[k] - b[k]).abs() < 1e-10);
        }
        for x in a.iter().skip(b.len()).chain(b.iter().skip(a.len())) {
            prop_assert!(x.abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(seed in any::<u64>(), rank in 1usize..4) {
        let dims = mixed_dims(seed);
        let rho = random_density(&dims, rank, seed).unwrap();
        let keep = 1 + (seed % u64::from(dims.full_mask() - 1)) as u32;
        let red = partial_trace_mask(&rho, keep).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(red.spectrum().unwrap().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn eigenvalues_sum_to_trace_descending(seed in any::<u64>()) {
        let rho = random_density(&mixed_dims(seed), 3, seed).unwrap();
        let vals = hermitian_eigenvalues(rho.matrix()).unwrap();
        prop_assert!((vals.iter().sum::<f64>() - rho.trace().re).abs() < 1e-10);
        prop_assert!(vals.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn trace_distance_metric(seed in any::<u64>()) {
        let dims = qubits(2);
        let r = random_density(&dims, 2, seed).unwrap();
        let s = random_density(&dims, 3, seed ^ 1).unwrap();
        let t = random_density(&dims, 4, seed ^ 2).unwrap();
        let rs = trace_distance(&r, &s).unwrap();
        let st = trace_distance(&s, &t).unwrap();
        let rt = trace_distance(&r, &t).unwrap();
        prop_assert!(rt <= rs + st + 1e-10);
        let u = random_unitary(4, &mut seeded_rng(seed ^ 3));
        let ru = r.conjugate(&u).unwrap();
        let su = s.conjugate(&u).unwrap();
        prop_assert!((trace_distance(&ru, &su).unwrap() - rs).abs() < 1e-10);
    }

    #[test]
    fn entropy_limits(seed in any::<u64>(), alpha in 0.2f64..4.0, beta in 0.2f64..3.0) {
        let rho = random_density(&qubits(2), 3, seed).unwrap();
        // generic branch near β = 0 is the natural-log Rényi entropy
        let near_renyi = unified_entropy(&rho, EntropyParams::new(alpha, 1e-6).unwrap()).unwrap();
        let renyi = unified_entropy(&rho, EntropyParams::renyi(alpha).unwrap()).unwrap();
        prop_assert!((near_renyi - LN2 * renyi).abs() < 1e-4);
        let vn = unified_entropy(&rho, EntropyParams::von_neumann()).unwrap();
        for a in [1.0 - 1e-6, 1.0 + 1e-6] {
            let near_vn = unified_entropy(&rho, EntropyParams::new(a, beta).unwrap()).unwrap();
            prop_assert!((near_vn - LN2 * vn).abs() < 1e-4);
        }
    }

    #[test]
    fn entropy_nonnegative_and_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let p = random_params(&mut rng).unwrap();
        let rho = random_density(&qubits(2), rng.random_range(1..=4), seed).unwrap();
        let s = unified_entropy(&rho, p).unwrap();
        prop_assert!(s >= 0.0);
        let u = random_unitary(4, &mut rng);
        let su = unified_entropy(&rho.conjugate(&u).unwrap(), p).unwrap();
        prop_assert!((s - su).abs() < 1e-10 * s.max(1.0));
    }

    #[test]
    fn concavity_on_region_a(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let p = random_concave_params(&mut rng).unwrap();
        let dims = qubits(2);
        let a = random_density(&dims, rng.random_range(1..=4), seed ^ 5).unwrap();
        let b = random_density(&dims, rng.random_range(1..=4), seed ^ 6).unwrap();
        let q = rng.random_range(0.0..=1.0);
        let mix = a.mix(&b, q).unwrap();
        let lhs = unified_entropy(&mix, p).unwrap();
        let rhs = q * unified_entropy(&a, p).unwrap() + (1.0 - q) * unified_entropy(&b, p).unwrap();
        prop_assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs} at ({}, {})", p.alpha(), p.beta());
    }

    #[test]
    fn permutation_covariance(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let dims = mixed_dims(seed);
        let n = dims.len();
        let psi = haar_random_with(&dims, &mut rng).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let moved = psi.permute(&perm).unwrap();
        let mask = rng.random_range(1..(1u32 << n));
        let s = SubsetSpec::from_mask(mask).unwrap();
        // old subsystem perm[k] now sits at position k
        let new_labels: Vec<usize> = (0..n).filter(|&k| mask >> perm[k] & 1 == 1).map(|k| k + 1).collect();
        let s_new = SubsetSpec::new(&new_labels).unwrap();
        let p = random_params(&mut rng).unwrap();
        let a = cce_value(&psi, &s, p).unwrap();
        let b = cce_value(&moved, &s_new, p).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn complement_terms_match(seed in any::<u64>()) {
        let psi = haar_random(&qubits(4), seed).unwrap();
        let s = SubsetSpec::full(4).unwrap();
        let p = random_params(&mut seeded_rng(seed)).unwrap();
        let rep = cce_pure(&psi, &s, p).unwrap();
        for (&chi, &v) in &rep.per_subset_terms {
            let comp = rep.per_subset_terms[&(0b1111 & !chi)];
            prop_assert!((v - comp).abs() < 1e-10);
        }
    }

    #[test]
    fn product_states_vanish(seed in any::<u64>()) {
        let dims = mixed_dims(seed);
        let psi = random_product(&dims, seed).unwrap();
        let mut rng = seeded_rng(seed);
        let s = SubsetSpec::from_mask(rng.random_range(1..(1u32 << dims.len()))).unwrap();
        let p = random_params(&mut rng).unwrap();
        prop_assert!(cce_value(&psi, &s, p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn haar_states_are_positive(seed in any::<u64>()) {
        let psi = haar_random(&qubits(3), seed).unwrap();
        let p = random_params(&mut seeded_rng(seed)).unwrap();
        for label in 1..=3 {
            let s = SubsetSpec::new(&[label]).unwrap();
            prop_assert!(cce_value(&psi, &s, p).unwrap() > 1e-6);
        }
    }

    #[test]
    fn super_and_subadditivity(seed in any::<u64>(), alpha in 0.1f64..4.0, beta in 0.1f64..3.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let a = haar_random(&qubits(2), seed).unwrap();
        let b = haar_random(&qubits(2), seed ^ 9).unwrap();
        let p = EntropyParams::new(alpha, beta).unwrap();
        let ea = cce_value(&a, &SubsetSpec::full(2).unwrap(), p).unwrap();
        let eb = cce_value(&b, &SubsetSpec::full(2).unwrap(), p).unwrap();
        let joint = cce_value(&a.tensor(&b).unwrap(), &SubsetSpec::full(4).unwrap(), p).unwrap();
        if alpha < 1.0 {
            prop_assert!(joint >= ea + eb - 1e-10);
        } else {
            prop_assert!(joint <= ea + eb + 1e-10);
        }
    }

    #[test]
    fn swap_bounds_are_sound(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let n = rng.random_range(2..=5);
        let psi = haar_random_with(&qubits(n), &mut rng).unwrap();
        let s = SubsetSpec::from_mask(rng.random_range(1..(1u32 << n))).unwrap();
        let m = named_measures(&psi, &s).unwrap();
        let b = bounds_from_estimate(m.c).unwrap();
        prop_assert!(b.e_lower <= m.e + 1e-10);
        prop_assert!(b.r2_lower <= m.r2 + 1e-10);
        prop_assert!(m.t3 <= b.t3_upper + 1e-10);
    }

    #[test]
    fn swap_distribution_permutes_with_subsystems(seed in any::<u64>()) {
        let psi = haar_random(&qubits(3), seed).unwrap();
        let perm = [2usize, 0, 1];
        let moved = psi.permute(&perm).unwrap();
        let d = swap_test_distribution(&psi).unwrap();
        let dm = swap_test_distribution(&moved).unwrap();
        // control bit for position k (MSB first) of the moved state is
        // old control perm[k]
        for z in 0..8usize {
            let zm = (0..3).fold(0usize, |acc, k| acc << 1 | (z >> (2 - perm[k]) & 1));
            prop_assert!((d.prob(z) - dm.prob(zm)).abs() < 1e-12);
        }
        let f = distribution_from_purities(&psi).unwrap();
        for z in 0..8 {
            prop_assert!((d.prob(z) - f.prob(z)).abs() < 1e-12);
        }
    }
}

#[test]
fn maximum_values_on_maximally_mixed() {
    for d in [2usize, 3, 4, 8] {
        let dims = match d {
            2 => qubits(1),
            3 => Dims::new(vec![3]).unwrap(),
            4 => qubits(2),
            _ => qubits(3),
        };
        let rho = DensityOperator::maximally_mixed(dims);
        for (a, b) in [(1.0, 1.0), (2.0, 0.0), (2.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
            let p = EntropyParams::new(a, b).unwrap();
            let expected = if a == 1.0 || b == 0.0 {
                (d as f64).log2()
            } else {
                let c = (1.0 - a) * b;
                ((d as f64).powf(c) - 1.0) / c
            };
            assert!((unified_entropy(&rho, p).unwrap() - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn additive_under_tensor_powers() {
    let psi = haar_random(&qubits(2), 77).unwrap();
    for p in [EntropyParams::von_neumann(), EntropyParams::renyi(2.0).unwrap(), EntropyParams::new(1.0, 2.5).unwrap()] {
        let one = cce_value(&psi, &SubsetSpec::full(2).unwrap(), p).unwrap();
        let mut power = psi.clone();
        for k in 2..=3 {
            power = power.tensor(&psi).unwrap();
            let v = cce_value(&power, &SubsetSpec::full(2 * k).unwrap(), p).unwrap();
            assert!((v - k as f64 * one).abs() < 1e-10, "k={k}: {v} vs {}", k as f64 * one);
        }
    }
}

#[test]
fn zero_iff_product_on_constructed_states() {
    let p = EntropyParams::new(0.7, 1.3).unwrap();
    let bell_plus_zero = ghz(2).unwrap().tensor(&PureState::basis(0, qubits(1)).unwrap()).unwrap();
    let s_all = SubsetSpec::full(3).unwrap();
    assert!(cce_value(&bell_plus_zero, &s_all, p).unwrap() > 1e-6);
    // only the unentangled site in s
    let s3 = SubsetSpec::new(&[3]).unwrap();
    assert!(cce_value(&bell_plus_zero, &s3, p).unwrap().abs() < 1e-12);
    let prod = random_product(&qubits(4), 3).unwrap();
    assert!(cce_value(&prod, &SubsetSpec::full(4).unwrap(), p).unwrap().abs() < 1e-12);
}

#[test]
fn dicke_bit_flip_symmetry() {
    let mut rng = seeded_rng(31);
    for n in 2..=6 {
        let s = SubsetSpec::full(n).unwrap();
        for _ in 0..3 {
            let p = random_params(&mut rng).unwrap();
            for k in 0..=n {
                let a = cce_value(&dicke(n, k).unwrap(), &s, p).unwrap();
                let b = cce_value(&dicke(n, n - k).unwrap(), &s, p).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn star_periodicity_and_reflection() {
    let s = SubsetSpec::full(4).unwrap();
    let mut rng = seeded_rng(8);
    for _ in 0..10 {
        let t = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        let base = named_measures(&star(t).unwrap(), &s).unwrap();
        let shifted = named_measures(&star(t + std::f64::consts::FRAC_PI_2).unwrap(), &s).unwrap();
        let reflected = named_measures(&star(std::f64::consts::FRAC_PI_2 - t).unwrap(), &s).unwrap();
        for (a, b) in [(base, shifted), (base, reflected)] {
            for (x, y) in [(a.e, b.e), (a.r2, b.r2), (a.t3, b.t3), (a.c, b.c)] {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn closed_forms_agree_with_exact_evaluation_at_ten_qubits() {
    use cekit::closed_forms::{ghz_cce, w_cce};
    let (g, wv) = (ghz(10).unwrap(), w(10).unwrap());
    for size in [1usize, 4, 10] {
        let s = SubsetSpec::new(&(1..=size).collect::<Vec<_>>()).unwrap();
        for p in NamedMeasures::params() {
            assert!((cce_value(&g, &s, p).unwrap() - ghz_cce(10, size, p).unwrap()).abs() < 1e-9);
            assert!((cce_value(&wv, &s, p).unwrap() - w_cce(10, size, p).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn spectrum_helper_handles_zero_eigenvalues() {
    let p = EntropyParams::new(0.5, 2.0).unwrap();
    let with_zero = entropy_of_spectrum(&[0.5, 0.5, 0.0], p);
    let without = entropy_of_spectrum(&[0.5, 0.5], p);
    assert_eq!(with_zero, without);
    let _ = C64::new(0.0, 0.0);
}
