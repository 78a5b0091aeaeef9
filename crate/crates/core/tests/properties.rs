use num_complex::Complex64;
use proptest::prelude::*;

use vilenkin::hardy::{lp_quasinorm, weak_lp_quasinorm};
use vilenkin::summability::{fejer_mean, riesz_mean};
use vilenkin::{forward_transform, inverse_transform, DiscreteFunction, Execution, GroupElement, GroupStructure};

fn group() -> impl Strategy<Value = GroupStructure> {
    prop::collection::vec(2usize..=5, 1..=5).prop_map(|m| GroupStructure::new(&m).unwrap())
}

fn group_and_values() -> impl Strategy<Value = (GroupStructure, Vec<Complex64>, Vec<Complex64>)> {
    group().prop_flat_map(|gs| {
        let size = gs.size();
        let values = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), size);
        (Just(gs), values.clone(), values)
    })
}

fn func(gs: &GroupStructure, values: &[Complex64]) -> DiscreteFunction {
    DiscreteFunction {
        depth: gs.depth(),
        values: values.to_vec(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roundtrip((gs, f, _) in group_and_values()) {
        let f = func(&gs, &f);
        let back = inverse_transform(&gs, &forward_transform(&gs, &f).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn parseval((gs, f, _) in group_and_values()) {
        let f = func(&gs, &f);
        let s = forward_transform(&gs, &f).unwrap();
        let energy = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / gs.size() as f64;
        prop_assert!((s.energy() - energy).abs() < 1e-10);
    }

    #[test]
    fn sequential_matches_parallel((gs, f, _) in group_and_values()) {
        let f = func(&gs, &f);
        let a = forward_transform(&gs, &f).unwrap();
        let b = forward_transform(&gs.clone().with_execution(Execution::Sequential), &f).unwrap();
        prop_assert_eq!(a.coeffs, b.coeffs);
    }

    #[test]
    fn means_are_linear((gs, f, g) in group_and_values(), a in -2.0f64..2.0, b in -2.0f64..2.0, pick in 0usize..1000) {
        let n = 1 + pick % gs.size();
        let combo: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| x * a + y * b).collect();
        let (sf, sg, sc) = (
            forward_transform(&gs, &func(&gs, &f)).unwrap(),
            forward_transform(&gs, &func(&gs, &g)).unwrap(),
            forward_transform(&gs, &func(&gs, &combo)).unwrap(),
        );
        for mean in [riesz_mean, fejer_mean] {
            let (mf, mg, mc) = (mean(&gs, &sf, n).unwrap(), mean(&gs, &sg, n).unwrap(), mean(&gs, &sc, n).unwrap());
            for x in 0..gs.size() {
                prop_assert!((mc.values[x] - (mf.values[x] * a + mg.values[x] * b)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn index_roundtrip(gs in group(), pick in 0usize..100_000) {
        let v = pick % gs.size();
        let x = gs.element(v).unwrap();
        prop_assert_eq!(gs.element_index(&x).unwrap(), v);
        let idx = gs.index(v).unwrap();
        prop_assert_eq!(idx.value, v);
        prop_assert!(gs.index(gs.size()).is_err());
    }

    #[test]
    fn subtraction_inverts_addition(gs in group(), a in 0usize..100_000, b in 0usize..100_000) {
        let (x, y) = (gs.element(a % gs.size()).unwrap(), gs.element(b % gs.size()).unwrap());
        let sum = gs.add(&x, &y);
        prop_assert_eq!(gs.sub(&sum, &y), x.clone());
        let (xi, yi, si) = (
            gs.element_index(&x).unwrap(),
            gs.element_index(&y).unwrap(),
            gs.element_index(&sum).unwrap(),
        );
        prop_assert_eq!(gs.sub_index(si, yi), xi);
        prop_assert_eq!(gs.sub(&x, &x), GroupElement::zero(gs.depth()));
    }

    #[test]
    fn weak_norm_below_strong((gs, f, _) in group_and_values(), p in 0.1f64..1.0) {
        let f = func(&gs, &f);
        prop_assert!(weak_lp_quasinorm(&f, p).unwrap().quasinorm <= lp_quasinorm(&f, p).unwrap() * (1.0 + 1e-12));
    }
}
