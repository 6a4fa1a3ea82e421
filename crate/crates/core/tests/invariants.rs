//! Property tests for the invariants the library promises.

use proptest::prelude::*;

use pintersect_core::counting::{count_r_direct, count_r_fft, extract_subprogression, IndexSet};
use pintersect_core::fourier::{
    default_grid, plancherel_sides, twisted_gauss_sum_direct, twisted_gauss_sum_split, BalanceFn,
};
use pintersect_core::increment::{edge_case_check, run_iteration, IncrementConfig};
use pintersect_core::intersective::{aux_is_consistent, AuxFactory};
use pintersect_core::primes::{weighted_primes, PrimeTable, PsiAccumulator};
use pintersect_core::IntPoly;

fn polys() -> Vec<IntPoly> {
    [
        &[-1i64, 0, 1][..],
        &[0, -1, 1],
        &[1, -2, 1],
        &[0, -1, 0, 1],
        &[-2, -1, 2, 1],
    ]
    .iter()
    .map(|c| IntPoly::from_i64(c))
    .collect()
}

fn set_strategy(max_len: u64) -> impl Strategy<Value = IndexSet> {
    (20..=max_len).prop_flat_map(|l| {
        prop::collection::vec(any::<bool>(), l as usize).prop_map(move |bits| {
            let members = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64 + 1).collect();
            IndexSet::new(l, members).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crt_coherence(which in 0usize..5, d in 1u64..400, q in 1u64..25) {
        let h = &polys()[which];
        let mut f = AuxFactory::new(h).unwrap();
        let small = f.aux_mut(d).unwrap();
        let big = f.aux_mut(q * d).unwrap();
        prop_assert_eq!((big.r_d - small.r_d).rem_euclid(d as i64), 0);
        prop_assert!(aux_is_consistent(h, &small) && aux_is_consistent(h, &big));
        prop_assert_eq!(f.lambda_mut(q * d).unwrap(), f.lambda(q).unwrap() * f.lambda(d).unwrap());
    }

    #[test]
    fn fft_matches_direct(which in 0usize..5, d in 1u64..6, b in set_strategy(600)) {
        let h = &polys()[which];
        let aux = AuxFactory::new(h).unwrap().aux_mut(d).unwrap();
        let Ok(wp) = weighted_primes(&aux, b.length(), 6, &PrimeTable::sieve(1 << 16)) else {
            return Ok(());
        };
        let direct = count_r_direct(&b, &wp, false).unwrap().value;
        let fft = count_r_fft(&b, &wp).unwrap().value;
        prop_assert!((fft - direct).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn extraction_never_gains(b in set_strategy(2000), q in 1u64..8, x0 in -10i64..200, frac in 0.1f64..1.0) {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let mut f = AuxFactory::new(&h).unwrap();
        let lambda: u64 = f.lambda_mut(q).unwrap().try_into().unwrap();
        let max_len = b.length() / lambda;
        prop_assume!(max_len >= 6);
        let l_new = ((max_len as f64 * frac) as u64).max(6);
        let b2 = extract_subprogression(&b, x0, lambda, l_new).unwrap();
        let table = PrimeTable::sieve(1 << 16);
        let before = count_r_fft(&b, &weighted_primes(&f.aux_mut(1).unwrap(), b.length(), 6, &table).unwrap()).unwrap();
        let after = count_r_fft(&b2, &weighted_primes(&f.aux_mut(q).unwrap(), l_new, 6, &table).unwrap()).unwrap();
        prop_assert!(after.dominated_by(&before));
    }

    #[test]
    fn split_gauss_sums_agree(which in 0usize..5, w in -30i64..30, shift in -30i64..30, a in 1i64..500, q in 1u64..700) {
        prop_assume!(num_integer::Integer::gcd(&a, &(q as i64)) == 1);
        let g = &polys()[which];
        let direct = twisted_gauss_sum_direct(g, w, shift, a, q).unwrap();
        let split = twisted_gauss_sum_split(g, w, shift, a, q).unwrap();
        prop_assert!((direct - split).norm() < 1e-9);
    }

    #[test]
    fn plancherel(b in set_strategy(1500)) {
        let f = BalanceFn::new(&b);
        let spec = f.transform_grid(default_grid(b.length())).unwrap();
        let (lhs, rhs) = plancherel_sides(&spec, &f.values());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-12));
    }

    #[test]
    fn edge_interval_holds_an_eighth(b in set_strategy(3000)) {
        if let Some(e) = edge_case_check(&b) {
            prop_assert!(8 * e.count >= b.size() as u64);
            prop_assert_eq!(e.count, b.count_in(e.lo, e.hi));
            if e.lo == 1 {
                prop_assert!(e.density * b.length() as f64 >= 9.0 / 8.0 * b.size() as f64 - 1e-9);
            }
        }
    }

    #[test]
    fn psi_is_monotone(q in 1u64..30, steps in prop::collection::vec(1u64..500, 1..20)) {
        let table = PrimeTable::sieve(20_000);
        let mut acc = PsiAccumulator::new(&table, q);
        let mut x = 0;
        let mut last = vec![0.0; q as usize];
        for s in steps {
            x += s;
            acc.advance_to(x).unwrap();
            for a in 0..q {
                let v = acc.value(a as i64);
                prop_assert!(v >= last[a as usize]);
                last[a as usize] = v;
            }
        }
    }

    #[test]
    fn set_json_round_trip(b in set_strategy(300)) {
        let text = serde_json::to_string(&b).unwrap();
        let back: IndexSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn traces_keep_their_invariants(step in 2u64..12, offset in 0u64..5, len in 2_000u64..8_000) {
        let h = IntPoly::from_i64(&[0, -1, 1]);
        let a = IndexSet::from_predicate(len, |x| x % step == offset % step);
        prop_assume!(!a.is_empty());
        let trace = run_iteration(&a, &h, IncrementConfig::for_poly(&h)).unwrap();
        prop_assert!(trace.violations().is_empty(), "{:?}", trace.violations());
        prop_assert!(trace.steps.len() as u64 <= trace.start.budget);
        for w in trace.steps.windows(2) {
            prop_assert_eq!(w[1].d_in % w[0].d_in, 0);
        }
        let again = run_iteration(&a, &h, IncrementConfig::for_poly(&h)).unwrap();
        prop_assert_eq!(trace.to_json(), again.to_json());
    }
}
