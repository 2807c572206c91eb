//! Property-based invariants of the library's public surface.

use proptest::prelude::*;
use psvf::{
    classify_point, hausdorff_points, hausdorff_polylines, make_canonical, metric_d,
    theta_inf_admissible, Alphabet, Engine, FamilyKind, Pk, Point, RealWindow, SymbolWindow,
    Tolerances,
};

fn finite_word(m: usize, len: usize) -> impl Strategy<Value = Vec<i64>> {
    // a random admissible walk over the compartment graph of the finite
    // family with alphabet size m = 2k - 2
    (0..m as i64, proptest::collection::vec(any::<bool>(), len - 1)).prop_map(
        move |(first, choices)| {
            let k = (m + 2) / 2;
            let engine = Engine::new(FamilyKind::FiniteK(k as u32));
            let parts = psvf::compartments(&engine.family, 0);
            let mut word = vec![first];
            for c in choices {
                let end = parts.by_index(*word.last().unwrap()).unwrap().end_fold;
                let next: Vec<i64> = parts
                    .arcs
                    .iter()
                    .filter(|a| (a.start_fold - end).abs() < 1e-9)
                    .map(|a| a.index)
                    .collect();
                word.push(next[usize::from(c) % next.len()]);
            }
            word
        },
    )
}

fn points(len: usize) -> impl Strategy<Value = Vec<Point>> {
    proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..len)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

proptest! {
    #[test]
    fn classification_is_total_on_the_manifold(x in -4.0..4.0f64, k in 2u32..=6) {
        let fam = make_canonical(FamilyKind::FiniteK(k));
        let tol = Tolerances::default();
        prop_assert!(classify_point(&fam.field, Point::new(x, 0.0), &tol).is_ok());
    }

    #[test]
    fn pk_factored_and_expanded_agree(x in -3.0..3.0f64, k in 2u32..=6) {
        let p = Pk::new(k);
        let horner = p
            .coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c);
        prop_assert!((p.value(x) - horner).abs() < 1e-9);
    }

    #[test]
    fn metric_axioms_on_finite_words(
        a in finite_word(4, 15),
        b in finite_word(4, 15),
        c in finite_word(4, 15),
    ) {
        let mk = |s: Vec<i64>| SymbolWindow::new(Alphabet::Finite(4), -7, s).unwrap();
        let (wa, wb, wc) = (mk(a), mk(b), mk(c));
        let dab = metric_d(&wa, &wb).unwrap();
        let dba = metric_d(&wb, &wa).unwrap();
        let dbc = metric_d(&wb, &wc).unwrap();
        let dac = metric_d(&wa, &wc).unwrap();
        prop_assert_eq!(metric_d(&wa, &wa).unwrap().value, 0.0);
        prop_assert_eq!(dab.value, dba.value);
        prop_assert!(dac.value <= dab.value + dbc.value + 1e-12);
        if wa.symbols != wb.symbols {
            prop_assert!(dab.value > 0.0);
        }
    }

    #[test]
    fn window_shift_is_invertible(
        word in finite_word(4, 11),
        steps in -5i64..=5,
    ) {
        let w = SymbolWindow::new(Alphabet::Finite(4), -5, word).unwrap();
        let back = w.shift(steps).shift(-steps);
        prop_assert_eq!(back.offset, w.offset);
        prop_assert_eq!(back.symbols, w.symbols);
    }

    #[test]
    fn hausdorff_is_symmetric_and_polylines_refine(
        a in points(16),
        b in points(16),
    ) {
        let dp = hausdorff_points(&a, &b).unwrap();
        prop_assert_eq!(dp, hausdorff_points(&b, &a).unwrap());
        let dl = hausdorff_polylines(&a, &b).unwrap();
        prop_assert!(dl <= dp + 1e-12);
        prop_assert!((hausdorff_points(&a, &a).unwrap()).abs() == 0.0);
    }

    #[test]
    fn finite_words_round_trip_through_synthesis(word in finite_word(4, 13)) {
        let engine = Engine::new(FamilyKind::FiniteK(3));
        let w = SymbolWindow::new(Alphabet::Finite(4), -6, word).unwrap();
        let gamma = engine.trajectory_from_symbols(&w).unwrap();
        let back = engine.itinerary(&gamma, -6, 6).unwrap();
        prop_assert_eq!(back.symbols, w.symbols);
    }

    #[test]
    fn random_infinite_words_are_admissible(seed in any::<u64>()) {
        let w = psvf::random_admissible_word(FamilyKind::Infinite, 15, -7, seed);
        prop_assert!(theta_inf_admissible(&w));
    }

    #[test]
    fn bean_beats_round_trip(values in proptest::collection::vec(0.001..=1.0f64, 2..8)) {
        let w = RealWindow::new(0, values).unwrap();
        let gamma = psvf::synthesize(&w).unwrap();
        let back = psvf::beat_itinerary(&gamma).unwrap();
        prop_assert_eq!(back.offset, w.offset);
        for (a, b) in back.values.iter().zip(w.values.iter()) {
            prop_assert!((a - b).abs() < 1e-9, "beat {a} vs {b}");
        }
    }

    #[test]
    fn bean_rejects_out_of_range_beats(v in prop_oneof![-1.0..=0.0f64, 1.0001..10.0]) {
        prop_assert!(RealWindow::new(0, vec![0.5, v]).is_err());
    }
}
