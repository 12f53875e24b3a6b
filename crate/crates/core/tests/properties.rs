use nda_core::{check_law, Arithmetic, Carrier, Error, Law};
use proptest::prelude::*;

const FAMILIES: [&str; 6] = ["id", "pow:1.5", "pow:2", "pow:0.5", "quad", "exp2m1"];

fn arith() -> impl Strategy<Value = Arithmetic> {
    (
        prop::sample::select(&FAMILIES[..]),
        prop::bool::ANY,
        10usize..400,
    )
        .prop_map(|(f, dual, n)| {
            let kind = if dual { "dual" } else { "projective" };
            format!("{kind}:{f}@int:0:{n}").parse().unwrap()
        })
}

fn with_pair() -> impl Strategy<Value = (Arithmetic, usize, usize)> {
    arith().prop_flat_map(|ar| {
        let top = ar.top();
        (Just(ar), 0..=top, 0..=top)
    })
}

proptest! {
    #[test]
    fn addition_commutes((ar, a, b) in with_pair()) {
        let ab = ar.add_idx(a, b).ok();
        let ba = ar.add_idx(b, a).ok();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn multiplication_commutes((ar, a, b) in with_pair()) {
        prop_assert_eq!(ar.mul_idx(a, b).ok(), ar.mul_idx(b, a).ok());
    }

    #[test]
    fn zero_and_one_are_neutral((ar, a, _b) in with_pair()) {
        prop_assert_eq!(ar.add_idx(a, 0).unwrap(), a);
        prop_assert_eq!(ar.mul_idx(a, 1).unwrap(), a);
        prop_assert_eq!(ar.sub_idx(a, 0).unwrap(), a);
        prop_assert_eq!(ar.sub_idx(a, a).unwrap(), 0);
    }

    #[test]
    fn addition_is_monotone((ar, a, b) in with_pair()) {
        let a2 = (a + 1).min(ar.top());
        if let (Ok(lo), Ok(hi)) = (ar.add_idx(a, b), ar.add_idx(a2, b)) {
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn sums_never_shrink((ar, a, b) in with_pair()) {
        if let Ok(s) = ar.add_idx(a, b) {
            prop_assert!(s >= a.max(b));
        }
    }

    #[test]
    fn dual_sums_grow_strictly((ar, a, b) in with_pair()) {
        if ar.kind() == nda_core::Kind::Dual && b > 0 {
            match ar.add_idx(a, b) {
                Ok(s) => prop_assert!(s > a),
                Err(e) => prop_assert!(matches!(e, Error::CarrierExhausted)),
            }
        }
    }

    #[test]
    fn difference_undoes_nothing_past_a((ar, a, b) in with_pair()) {
        let d = ar.sub_idx(a, b).unwrap();
        prop_assert!(d <= a);
    }

    #[test]
    fn exp2m1_addition_is_max(a in 0usize..=300, b in 0usize..=300) {
        let ar: Arithmetic = "projective:exp2m1@int:0:300".parse().unwrap();
        prop_assert_eq!(ar.add_idx(a, b).unwrap(), a.max(b));
    }

    #[test]
    fn integer_carrier_round_trip(n in 0u64..1_000_000, i in 0u64..1_000_000) {
        let c: Carrier = format!("int:0:{n}").parse().unwrap();
        prop_assert_eq!(c.to_string().parse::<Carrier>().unwrap(), c.clone());
        let i = (i % (n + 1)) as usize;
        let v = c.value_at(i).unwrap();
        prop_assert_eq!(c.index_of(v).unwrap(), i);
    }

    #[test]
    fn grid_carrier_round_trip(steps in 1u64..5000, scale in 0u32..5, mant in 1u64..30, i in 0u64..5000) {
        let step = format!("{}", mant as f64 / 10f64.powi(scale as i32));
        let max = format!("{}", (mant * steps) as f64 / 10f64.powi(scale as i32));
        let c: Carrier = format!("grid:0:{max}:{step}").parse().unwrap();
        prop_assert_eq!(c.to_string().parse::<Carrier>().unwrap(), c.clone());
        prop_assert_eq!(c.size() as u64, steps + 1);
        let i = (i % (steps + 1)) as usize;
        let v = c.value_at(i).unwrap();
        prop_assert_eq!(c.index_of(v).unwrap(), i);
        prop_assert_eq!(c.format_index(i).parse::<f64>().unwrap(), v);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let ar: Arithmetic = "projective:pow:1.5@int:0:200".parse().unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                Law::ALL
                    .iter()
                    .map(|&law| check_law(&ar, law, 60))
                    .collect::<Vec<_>>()
            })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}
