use proptest::prelude::*;

use swapcert::bell_decomposition::{
    block_chsh, chsh_operator, chsh_spectrum, jordan_blocks, separable_bound,
};
use swapcert::certification::{overlap_chsh, relabel, threshold_for_distance};
use swapcert::cli::sig9;
use swapcert::linalg::{eig_hermitian, overlap_sq, ComplexMatrix};
use swapcert::measurements::{bell_basis, perturbed_bell_measurement};
use swapcert::protocol::{
    chsh_ac, chsh_bc, chsh_report, conditional_chsh_ab, noisy_scenario, TSIRELSON,
};
use swapcert::random::{
    ginibre, haar_unitary, random_density, random_dichotomic, random_qubit_observable,
    random_rotated_bell, seeded_rng,
};
use swapcert::sampling::Counts;

fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let g = ComplexMatrix::from(ginibre(d, &mut seeded_rng(seed, 0)));
    (&g + &g.adjoint()).scale(0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(d in 1usize..=16, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let eig = eig_hermitian(&h).unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10 * (1.0 + h.max_abs()));
        let v = &eig.vectors;
        let gram = ComplexMatrix::from(v.adjoint() * v);
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
    }

    #[test]
    fn partial_traces_compose(seed in any::<u64>()) {
        let rho = random_density(vec![2, 3, 2], &mut seeded_rng(seed, 0));
        let direct = rho.partial_trace(&[0]).unwrap();
        let staged = rho.partial_trace(&[0, 1]).unwrap().partial_trace(&[0]).unwrap();
        prop_assert!(direct.matrix().max_abs_diff(staged.matrix()) < 1e-12);
        let full = rho.partial_trace(&[0, 1, 2]).unwrap();
        prop_assert!(full.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a = haar_unitary(2, &mut rng);
        let b = haar_unitary(3, &mut rng);
        let c = haar_unitary(2, &mut rng);
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn rotated_bell_measurements_validate(seed in any::<u64>()) {
        let m = random_rotated_bell(&mut seeded_rng(seed, 0));
        prop_assert!(m.validate(1e-9).is_ok());
        for c in 0..4 {
            prop_assert_eq!(m.rank(c), 1);
        }
    }

    #[test]
    fn perturbed_overlaps_sum_to_one(theta in -3.2f64..3.2, pair in 0usize..2) {
        let m = perturbed_bell_measurement(theta, pair).unwrap();
        let bell = bell_basis();
        for c in 0..4 {
            let e = m.eigenstate(c).unwrap();
            let total: f64 = bell.iter().map(|phi| overlap_sq(&e, phi).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
        if pair == 0 {
            let s = overlap_chsh(&m).unwrap();
            prop_assert!((s[0] - TSIRELSON * (2.0 * theta).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_scenarios_respect_tsirelson(v_ac in 0.0f64..=1.0, v_bc in 0.0f64..=1.0, theta in -1.6f64..1.6) {
        let sc = noisy_scenario(v_ac, v_bc, theta).unwrap();
        let s_ac = chsh_ac(&sc).unwrap();
        prop_assert!((s_ac - TSIRELSON * v_ac).abs() < 1e-9);
        prop_assert!(chsh_bc(&sc).unwrap().abs() <= TSIRELSON + 1e-9);
        let cond = conditional_chsh_ab(&sc).unwrap();
        for v in cond.versions.iter().flatten() {
            prop_assert!(v.iter().all(|s| s.abs() <= TSIRELSON + 1e-9));
        }
        let total: f64 = cond.outcome_probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relabeling_never_loses(seed in any::<u64>()) {
        let sc = noisy_scenario(1.0, 1.0, 0.0)
            .unwrap()
            .with_charlie3(random_rotated_bell(&mut seeded_rng(seed, 0)))
            .unwrap();
        let cond = conditional_chsh_ab(&sc).unwrap();
        let identity: f64 = cond.raw().iter().flatten().sum();
        let best = relabel(&cond.versions);
        let relabeled: f64 = best.values.iter().flatten().sum();
        prop_assert!(relabeled >= identity - 1e-12);
        let report = chsh_report(&sc).unwrap();
        prop_assert_eq!(report.relabeling, best.permutation);
    }

    #[test]
    fn jordan_blocks_reconstruct(d in 1usize..=8, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a0 = random_dichotomic(d, &mut rng);
        let a1 = random_dichotomic(d, &mut rng);
        let b = jordan_blocks(&a0, &a1, 1e-9).unwrap();
        prop_assert!(b.reconstruction_error(&a0, &a1) <= 1e-8);
        prop_assert!(b.invariance_defect(&a0, &a1) <= 1e-8);
        prop_assert!(b.orthogonality_defect() <= 1e-8);
        prop_assert!(b.blocks.iter().all(|blk| blk.dim() <= 2));
        prop_assert_eq!(b.blocks.iter().map(|blk| blk.dim()).sum::<usize>(), d);
    }

    #[test]
    fn block_norms_obey_landau_floor(da in 1usize..=6, db in 1usize..=6, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let a = [random_dichotomic(da, &mut rng), random_dichotomic(da, &mut rng)];
        let b = [random_dichotomic(db, &mut rng), random_dichotomic(db, &mut rng)];
        let s = block_chsh(
            &jordan_blocks(&a[0], &a[1], 1e-9).unwrap(),
            &jordan_blocks(&b[0], &b[1], 1e-9).unwrap(),
        )
        .unwrap();
        prop_assert!(s.pairs.iter().all(|p| p.alpha >= 2.0 - 1e-9 && p.alpha <= TSIRELSON + 1e-9));
    }

    #[test]
    fn qubit_chsh_spectral_law(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed, 0);
        let o: Vec<_> = (0..4).map(|_| random_qubit_observable(&mut rng)).collect();
        let beta = chsh_operator(&o[0], &o[1], &o[2], &o[3]).unwrap();
        let spec = chsh_spectrum(&beta).unwrap();
        prop_assert!((spec.alpha1.powi(2) + spec.alpha2.powi(2) - 8.0).abs() < 1e-8);
        prop_assert!(spec.alpha1 >= spec.alpha2 && spec.alpha2 >= 0.0);
    }

    #[test]
    fn formula_decreases_in_lambda(a in 2.0f64..TSIRELSON, b in 2.0f64..TSIRELSON) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(separable_bound(lo) >= separable_bound(hi) - 1e-15);
        prop_assert!(separable_bound(lo) <= 2.0 + 1e-15 && separable_bound(hi) >= std::f64::consts::SQRT_2 - 1e-15);
    }

    #[test]
    fn threshold_decreases_in_distance(a in 0.001f64..1.0, b in 0.001f64..1.0) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(threshold_for_distance(lo).unwrap() > threshold_for_distance(hi).unwrap());
    }

    #[test]
    fn sig9_is_idempotent(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let r = sig9(x);
        prop_assert_eq!(sig9(r), r);
        prop_assert!((r - x).abs() <= 1e-8 * x.abs());
    }

    #[test]
    fn counts_csv_round_trips(values in proptest::collection::vec(0u64..1_000_000, 192)) {
        let mut counts = Counts::default();
        let mut it = values.iter();
        for x in 0..2 { for y in 0..2 { for z in 0..3 { for a in 0..2 { for b in 0..2 { for c in 0..4 {
            counts.set(x, y, z, a, b, c, *it.next().unwrap());
        }}}}}}
        let parsed = Counts::read_csv(counts.to_csv().as_bytes()).unwrap();
        prop_assert_eq!(parsed, counts);
    }
}
