use num_rational::BigRational;
use proptest::prelude::*;
use singleshot::bounds::lifetime_bound;
use singleshot::code::{CodeFamily, CodeId, StabilizerCode};
use singleshot::memory::wilson_interval;
use singleshot::pauli_algebra::{BitVec, PauliOp};
use singleshot::stochastic::StochasticChannel;

fn pauli(n: usize) -> impl Strategy<Value = PauliOp> {
    (0..1u64 << (2 * n)).prop_map(move |i| PauliOp::from_index(n, i))
}

fn sized_triple() -> impl Strategy<Value = (PauliOp, PauliOp, PauliOp)> {
    (1usize..=8).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

fn bits(len: usize) -> impl Strategy<Value = BitVec> {
    proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVec::from_bools(&b))
}

fn code_ids() -> impl Strategy<Value = CodeId> {
    prop_oneof![
        (2usize..=7).prop_map(|s| CodeId::new(CodeFamily::Repetition, s)),
        (2usize..=4).prop_map(|s| CodeId::new(CodeFamily::Toric2d, s)),
        (2usize..=3).prop_map(|s| CodeId::new(CodeFamily::Toric3dZ, s)),
    ]
}

fn code_and_ops() -> impl Strategy<Value = (StabilizerCode, PauliOp, PauliOp)> {
    code_ids().prop_flat_map(|id| {
        let code = id.build().unwrap();
        let n = code.n();
        let op = proptest::collection::vec(0u8..4, n).prop_map(move |v| {
            let x: Vec<bool> = v.iter().map(|k| k & 1 == 1).collect();
            let z: Vec<bool> = v.iter().map(|k| k & 2 == 2).collect();
            PauliOp::from_masks(BitVec::from_bools(&x), BitVec::from_bools(&z)).unwrap()
        });
        (Just(code), op.clone(), op)
    })
}

/// A normalized rational channel on `n` qubits from integer weights.
fn channel(n: usize) -> impl Strategy<Value = StochasticChannel<BigRational>> {
    proptest::collection::vec((1i64..20, pauli(n)), 1..5).prop_map(move |items| {
        let total: i64 = items.iter().map(|(w, _)| w).sum();
        let entries = items.into_iter().map(|(w, p)| (BigRational::new(w.into(), total.into()), p)).collect();
        StochasticChannel::new(n, entries).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pauli_product_is_associative_and_self_inverse((a, b, c) in sized_triple()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a * &a).is_identity());
        prop_assert!((&a * &b).weight() <= a.weight() + b.weight());
    }

    #[test]
    fn commutation_is_symmetric_and_bilinear((a, b, c) in sized_triple()) {
        prop_assert_eq!(a.anticommutes(&b), b.anticommutes(&a));
        prop_assert_eq!((&a * &b).anticommutes(&c), a.anticommutes(&c) ^ b.anticommutes(&c));
        prop_assert!(!a.anticommutes(&a));
    }

    #[test]
    fn symplectic_round_trip((a, _, _) in sized_triple()) {
        prop_assert_eq!(PauliOp::from_symplectic(&a.to_symplectic()).unwrap(), a);
    }

    #[test]
    fn bitvec_xor_counts((a, b) in (1usize..200).prop_flat_map(|n| (bits(n), bits(n)))) {
        prop_assert!(a.xor(&a).is_zero());
        prop_assert_eq!(a.xor(&b).count_ones(), a.count_ones() + b.count_ones() - 2 * a.and(&b).count_ones());
        prop_assert_eq!(a.xor(&b).xor(&b), a.clone());
        prop_assert!(a.and(&b).is_subset_of(&a.or(&b)));
    }

    #[test]
    fn syndrome_is_linear((code, e, d) in code_and_ops()) {
        let s = code.syndrome(&(&e * &d)).unwrap();
        prop_assert_eq!(s, code.syndrome(&e).unwrap().xor(&code.syndrome(&d).unwrap()));
    }

    #[test]
    fn correction_reproduces_syndrome((code, e, _) in code_and_ops()) {
        let s = code.syndrome(&e).unwrap();
        let c = code.correction(&s).unwrap();
        prop_assert_eq!(code.syndrome(&c).unwrap(), s);
        prop_assert!(code.is_gauge(&(&c * &code.synd(&c).unwrap())));
    }

    #[test]
    fn gauge_products_stay_correctable((code, e, _) in code_and_ops(), k in any::<prop::sample::Index>()) {
        // multiplying by a gauge generator never changes correctability
        let g = &code.gauge_gens()[k.index(code.gauge_gens().len())];
        prop_assert_eq!(code.is_correctable(&(&e * g)).unwrap(), code.is_correctable(&e).unwrap());
    }
}

fn toric3d3() -> &'static StabilizerCode {
    static CODE: std::sync::OnceLock<StabilizerCode> = std::sync::OnceLock::new();
    CODE.get_or_init(|| StabilizerCode::toric3d_z(3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn repair_is_valid_and_shift_linear(y in bits(81), e in proptest::collection::vec(0usize..81, 0..6)) {
        let code = toric3d3();
        let r = code.syndrome_repair(&y).unwrap();
        prop_assert!(code.is_valid_syndrome(&r));
        let err = PauliOp::x_on(code.n(), e);
        let x = code.valid_outcome(&err).unwrap().xor(&y);
        prop_assert_eq!(code.syndrome_repair(&x).unwrap(), code.syndrome(&err).unwrap().xor(&r));
    }

    #[test]
    fn repair_leaves_single_flips_nothing(i in 0usize..81) {
        let code = toric3d3();
        prop_assert!(code.syndrome_repair(&BitVec::from_indices(81, [i])).unwrap().is_zero());
    }

    #[test]
    fn channel_distance_is_a_metric((a, b, c) in (1usize..=3).prop_flat_map(|n| (channel(n), channel(n), channel(n)))) {
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        prop_assert_eq!(a.distance(&a), zero.clone());
        prop_assert_eq!(a.distance(&b), b.distance(&a));
        prop_assert!(a.distance(&c) <= a.distance(&b) + b.distance(&c));
        let d = a.distance(&b);
        prop_assert!(d >= zero && d <= one);
    }

    #[test]
    fn wilson_interval_brackets_the_mean(trials in 1u64..5000, frac in 0.0f64..=1.0) {
        let k = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(k, trials);
        let p = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn lifetime_bound_is_a_probability_and_grows(n in 0usize..1000, d1 in 0.0f64..0.5, d2 in 0.0f64..0.5, d3 in 0.0f64..1.0) {
        let b = lifetime_bound(n, d1, d2, d3);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(lifetime_bound(n + 1, d1, d2, d3) >= b);
    }
}
