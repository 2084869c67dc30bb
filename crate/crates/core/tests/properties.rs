use std::f64::consts::PI;

use beamsplit::extract::{
    eliminate, identify, pack_bits, unpack_bits, von_neumann_debias, xor_combine, BitStream, Equipartition,
    SymbolStream,
};
use beamsplit::protocols::{apply_detector, rotated_state_residual, singlet_state, DetectorModel, SpinLabel};
use beamsplit::qcore::{
    born_probabilities, fourier_basis, joint_born_probabilities, overlap_table, sample, spin_rotation_basis, Basis,
    RandomSource, StateVector, C64,
};
use beamsplit::statkit::{
    bias_estimate, bias_std_err, entropy_rate, run_suite, serial_correlation, Stream, SuiteConfig, Verdict,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn bits_strategy(max: usize) -> impl Strategy<Value = BitStream> {
    prop::collection::vec(0u8..2, 0..max).prop_map(|b| BitStream::new(b).unwrap())
}

fn spin_strategy() -> impl Strategy<Value = SpinLabel> {
    prop::sample::select(SpinLabel::ALL.to_vec())
}

fn state_strategy() -> impl Strategy<Value = StateVector> {
    (2usize..7)
        .prop_flat_map(|d| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d))
        .prop_filter("nonzero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap())
}

proptest! {
    #[test]
    fn pack_round_trip(bits in bits_strategy(4097)) {
        let bytes = pack_bits(&bits);
        prop_assert_eq!(bytes.len(), bits.len().div_ceil(8));
        prop_assert_eq!(unpack_bits(&bytes, bits.len() as u64).unwrap(), bits);
    }

    #[test]
    fn xor_is_self_inverse(a in bits_strategy(512), seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let b = BitStream::from_bools((0..a.len()).map(|_| rng.bernoulli(0.5)));
        let s = xor_combine(&a, &b).unwrap();
        prop_assert_eq!(xor_combine(&s, &b).unwrap(), a.clone());
        prop_assert_eq!(xor_combine(&a, &a).unwrap().count_ones(), 0);
    }

    #[test]
    fn eliminate_preserves_order(
        syms in prop::collection::vec(0u32..5, 0..400),
        zero in 0u32..5,
        one in 0u32..5,
    ) {
        prop_assume!(zero != one);
        let stream = SymbolStream::new(5, syms.clone()).unwrap();
        let out = eliminate(&stream, (zero, one)).unwrap();
        // tag every survivor with its position and check the positions ascend
        let tagged: Vec<(usize, u8)> = syms
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == zero || s == one)
            .map(|(i, &s)| (i, u8::from(s == one)))
            .collect();
        prop_assert!(tagged.windows(2).all(|w| w[0].0 < w[1].0));
        let expect: Vec<u8> = tagged.into_iter().map(|(_, b)| b).collect();
        prop_assert_eq!(out.bits(), expect.as_slice());
    }

    #[test]
    fn identify_preserves_order_and_length(syms in prop::collection::vec(0u32..4, 0..400), perm in Just([0u32, 1, 2, 3]).prop_shuffle()) {
        let stream = SymbolStream::new(4, syms.clone()).unwrap();
        let part = Equipartition::new(4, &perm[..2], &perm[2..]).unwrap();
        let out = identify(&stream, &part).unwrap();
        prop_assert_eq!(out.len(), syms.len());
        for (s, b) in syms.iter().zip(out.bits()) {
            prop_assert_eq!(*b, u8::from(perm[2..].contains(s)));
        }
    }

    #[test]
    fn von_neumann_output_never_longer_than_half(bits in bits_strategy(1000)) {
        let out = von_neumann_debias(&bits);
        prop_assert!(out.len() <= bits.len() / 2);
    }

    #[test]
    fn born_probabilities_sum_to_one(state in state_strategy()) {
        let d = state.dim();
        for basis in [Basis::computational(d).unwrap(), fourier_basis(d).unwrap()] {
            let p = born_probabilities(&state, &basis).unwrap();
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.probs().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn rotations_compose(spin in spin_strategy(), a in -2.0 * PI..2.0 * PI, b in -2.0 * PI..2.0 * PI) {
        let ua = spin_rotation_basis(spin, a).unwrap();
        let ub = spin_rotation_basis(spin, b).unwrap();
        let uab = spin_rotation_basis(spin, a + b).unwrap();
        let diff = ua.matrix() * ub.matrix() - uab.matrix();
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-9));
        prop_assert!(ua.unitarity_residual() < 1e-10);
    }

    #[test]
    fn overlap_tables_are_doubly_stochastic(spin in spin_strategy(), a in -PI..PI, b in -PI..PI) {
        let t = overlap_table(&spin_rotation_basis(spin, a).unwrap(), &spin_rotation_basis(spin, b).unwrap()).unwrap();
        for i in 0..spin.dim() {
            prop_assert!((t.row(i).sum() - 1.0).abs() < 1e-10);
            prop_assert!((t.column(i).sum() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn singlet_invariant_under_any_rotation(spin in spin_strategy(), theta in -10.0f64..10.0) {
        prop_assert!(rotated_state_residual(spin, &singlet_state(spin), theta).unwrap() < 1e-9);
    }

    #[test]
    fn singlet_marginals_are_uniform(spin in spin_strategy(), a in -PI..PI, b in -PI..PI) {
        let d = spin.dim();
        let joint = joint_born_probabilities(
            &singlet_state(spin),
            &spin_rotation_basis(spin, a).unwrap(),
            &spin_rotation_basis(spin, b).unwrap(),
        )
        .unwrap();
        let p = joint.probs();
        for k in 0..d {
            let alice: f64 = (0..d).map(|j| p[k * d + j]).sum();
            let bob: f64 = (0..d).map(|i| p[i * d + k]).sum();
            prop_assert!((alice - 1.0 / d as f64).abs() < 1e-10);
            prop_assert!((bob - 1.0 / d as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_within_bounds(syms in prop::collection::vec(0u32..6, 1..300)) {
        let h = entropy_rate(&SymbolStream::new(6, syms).unwrap()).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= 6f64.log2() + 1e-12);
    }

    #[test]
    fn serial_correlation_in_range(bits in bits_strategy(600), lag in 1usize..5) {
        prop_assume!(bits.len() > lag + 1);
        let r = serial_correlation(&bits, lag, 0.001).unwrap();
        match r.verdict {
            Verdict::NotApplicable => {}
            _ => {
                let rho = r.statistic.unwrap();
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&rho), "{}", rho);
            }
        }
    }

    #[test]
    fn suite_is_deterministic(bits in bits_strategy(400)) {
        prop_assume!(bits.len() >= 100);
        let cfg = SuiteConfig::default();
        let a = run_suite(Stream::Bits(&bits), &cfg).unwrap();
        let b = run_suite(Stream::Bits(&bits), &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut dof = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 1e-12 {
            let e = n as f64 * p;
            stat += (c as f64 - e).powi(2) / e;
            dof += 1;
        }
    }
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn sampling_matches_born_distribution() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for i in 0..20 {
        let state = state_strategy().new_tree(&mut runner).unwrap().current();
        let basis = fourier_basis(state.dim()).unwrap();
        let dist = born_probabilities(&state, &basis).unwrap();
        let mut rng = RandomSource::new(1000 + i);
        let mut counts = vec![0u64; dist.len()];
        for _ in 0..50_000 {
            counts[sample(&dist, &mut rng)] += 1;
        }
        let p = chi_square_p(&counts, dist.probs());
        assert!(
            p > 1e-4,
            "state {i}: p = {p}, counts {counts:?}, probs {:?}",
            dist.probs()
        );
    }
}

#[test]
fn detector_stick_law() {
    for (k, beta) in [0.0, 0.1, 0.3, 0.6].into_iter().enumerate() {
        let det = DetectorModel::new(beta, 1, 0.0).unwrap();
        let mut rng = RandomSource::new(77 + k as u64);
        let n = 400_000;
        let out = BitStream::from_bools((0..n).map(|_| {
            let fair = rng.bernoulli(0.5) as usize;
            apply_detector(fair, &det, &mut rng) == Some(1)
        }));
        let bias = bias_estimate(&out).unwrap();
        let se = bias_std_err(&out);
        assert!((bias - beta / 2.0).abs() <= 3.0 * se.max(1e-9), "beta {beta}: {bias}");
    }
}

#[test]
fn xor_bias_law_for_independent_streams() {
    let grid = [0.0, 0.05, -0.05, 0.2, -0.2];
    let n = 400_000;
    let mut cell = 0u64;
    for ea in grid {
        for eb in grid {
            let mut rng = RandomSource::new(5).fork(cell);
            cell += 1;
            let a = BitStream::from_bools((0..n).map(|_| rng.bernoulli(0.5 + ea)));
            let b = BitStream::from_bools((0..n).map(|_| rng.bernoulli(0.5 + eb)));
            let s = xor_combine(&a, &b).unwrap();
            let bias = bias_estimate(&s).unwrap();
            let want = -2.0 * ea * eb;
            assert!(
                (bias - want).abs() <= 3.0 * bias_std_err(&s),
                "eps ({ea}, {eb}): {bias} vs {want}"
            );
        }
    }
}

#[test]
fn conjugate_bases_give_uniform_outcomes() {
    for d in 2..=8 {
        let f = fourier_basis(d).unwrap();
        for k in 0..d {
            let p = born_probabilities(&StateVector::basis_vector(d, k).unwrap(), &f).unwrap();
            assert!(p.probs().iter().all(|&x| (x - 1.0 / d as f64).abs() < 1e-12));
        }
    }
}
