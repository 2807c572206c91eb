//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime against the pinned budget (run with `--nocapture` to see
//! the lines for passing criteria as well).

use psvf::{
    chain_field_from_profile, classify_fold, classify_point, differentiate, hausdorff_points,
    is_mixing, make_canonical, metric_d, normalize, periodic_count, random_admissible_word, rho,
    sample_profile, sft_matrix, sigma_equivalence_check, time_one, Engine, EquivError, FamilyKind,
    Pk, Point, RegionClass, Tolerances, TwoFoldKind,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Exact-identity tolerance for values that are dyadic-rational in `f64`.
const EXACT: f64 = 0.0;
/// Event-location tolerance for flight times and beat times.
const TIME_TOL: f64 = 1e-9;
/// Grid-hit tolerance for the bean surjectivity sweep.
const GRID_TOL: f64 = 1e-6;
/// Slack for floating-point accumulation in metric comparisons.
const SUM_TOL: f64 = 1e-12;

fn criterion(n: u32, name: &str, limit_s: f64, body: impl FnOnce() + std::panic::UnwindSafe) {
    let start = Instant::now();
    let result = std::panic::catch_unwind(body);
    let elapsed = start.elapsed().as_secs_f64();
    let status = if result.is_ok() && elapsed < limit_s {
        "PASS"
    } else {
        "FAIL"
    };
    println!("criterion {n:02} {name}: {status} ({elapsed:.2} s, limit {limit_s} s)");
    if let Err(e) = result {
        std::panic::resume_unwind(e);
    }
    assert!(elapsed < limit_s, "criterion {n} exceeded its {limit_s} s budget");
}

#[test]
fn acceptance_01_canonical_field_identity() {
    criterion(1, "canonical-field-identity", 1.0, || {
        // the k = 2 field's vertical component is x/2 - 4x^3
        let p2 = Pk::new(2);
        let d = differentiate(&p2.coefficients());
        assert_eq!(d, vec![0.0, 0.5, 0.0, -4.0], "P2' coefficients");
        let fam = make_canonical(FamilyKind::FiniteK(2));
        for i in 0..=100 {
            let x = -1.0 + 2.0 * i as f64 / 100.0;
            let v = fam.field.upper.eval(Point::new(x, 0.3));
            assert!((v.x - 1.0).abs() <= EXACT);
            assert!((v.y - (x / 2.0 - 4.0 * x * x * x)).abs() <= 1e-12);
        }
        // the k = 3 polynomial expands to -x^6 + 3x^4/2 - 9x^2/16 + 1/16
        let p3 = Pk::new(3);
        let expected = [1.0 / 16.0, 0.0, -9.0 / 16.0, 0.0, 1.5, 0.0, -1.0];
        let got = p3.coefficients();
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(expected.iter()) {
            assert!((g - e).abs() <= EXACT, "coefficient {g} != {e}");
        }
    });
}

#[test]
fn acceptance_02_tangency_table() {
    criterion(2, "tangency-table", 5.0, || {
        let tol = Tolerances::default();
        for k in 2..=6u32 {
            let fam = make_canonical(FamilyKind::FiniteK(k));
            let p = Pk::new(k);
            for &pj in p.fold_abscissas() {
                let fc = classify_fold(&fam.field, Point::new(pj, 0.0), &tol).unwrap();
                assert_eq!(
                    fc.two_fold,
                    Some(TwoFoldKind::VisibleVisible),
                    "k = {k}, fold {pj}"
                );
            }
            for r in [p.r0(), p.r1()] {
                let class = classify_point(&fam.field, Point::new(r, 0.0), &tol).unwrap();
                assert!(
                    matches!(class, RegionClass::CrossingPos | RegionClass::CrossingNeg),
                    "k = {k}, boundary root {r} classified {class:?}"
                );
            }
            // no sliding or escaping anywhere on the manifold
            for i in 0..1000 {
                let x = -3.0 + 6.0 * (i as f64 + 0.5) / 1000.0;
                let class = classify_point(&fam.field, Point::new(x, 0.0), &tol).unwrap();
                assert!(
                    !matches!(class, RegionClass::Sliding | RegionClass::Escaping),
                    "k = {k}, x = {x}: {class:?}"
                );
            }
        }
    });
}

#[test]
fn acceptance_03_transition_matrix() {
    criterion(3, "transition-matrix", 10.0, || {
        let m3 = sft_matrix(3);
        let expected = [
            [true, true, false, false],
            [false, false, true, true],
            [true, true, false, false],
            [false, false, true, true],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m3.get(i, j), expected[i][j], "M3 entry ({i}, {j})");
            }
        }
        let m2 = sft_matrix(2);
        assert_eq!(m2.n, 2);
        for i in 0..2 {
            for j in 0..2 {
                assert!(m2.get(i, j), "M2 must be all ones");
            }
        }
    });
}

/// Brute-force count of closed admissible paths of length `n`.
fn brute_force_cycles(m: &psvf::TransitionMatrix, n: u32) -> u128 {
    fn go(m: &psvf::TransitionMatrix, first: usize, cur: usize, left: u32) -> u128 {
        if left == 0 {
            return u128::from(m.get(cur, first));
        }
        (0..m.n)
            .filter(|&next| m.get(cur, next))
            .map(|next| go(m, first, next, left - 1))
            .sum()
    }
    (0..m.n).map(|s| go(m, s, s, n - 1)).sum()
}

#[test]
fn acceptance_04_mixing_and_periodic_points() {
    criterion(4, "mixing-and-periodic-points", 10.0, || {
        let m3 = sft_matrix(3);
        assert_eq!(is_mixing(&m3), Some(2), "M3 squared is positive");
        for n in 1..=8 {
            assert_eq!(
                periodic_count(&m3, n),
                brute_force_cycles(&m3, n),
                "period {n}"
            );
        }
        let m2 = sft_matrix(2);
        for n in 1..=10u32 {
            assert_eq!(periodic_count(&m2, n), 1u128 << n, "full 2-shift, period {n}");
        }
    });
}

#[test]
fn acceptance_05_flight_time() {
    criterion(5, "flight-time", 10.0, || {
        let fam = make_canonical(FamilyKind::FiniteK(3));
        let p = Pk::new(3);
        // all manifold hits of the invariant set, in order
        let mut roots = vec![p.r0()];
        roots.extend_from_slice(p.fold_abscissas());
        roots.push(p.r1());
        let is_fold = |i: usize| i != 0 && i != roots.len() - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            // random fold, random side; hop junction to junction until the
            // next fold and compare the accumulated flight time with 1
            let mut i = 1 + rng.gen_range(0..roots.len() - 2);
            let mut upper = rng.gen::<bool>();
            let mut q = Point::new(roots[i], 0.0);
            let mut total = 0.0;
            loop {
                let side = if upper { &fam.field.upper } else { &fam.field.lower };
                let target = if upper { roots[i + 1] } else { roots[i - 1] };
                let arc = psvf::integrate_until_x(side, q, 0.0, target, 2.0, 1e-3).unwrap();
                assert!(
                    arc.end().y.abs() < TIME_TOL,
                    "junction at x = {target} missed the manifold"
                );
                total += arc.duration();
                i = if upper { i + 1 } else { i - 1 };
                q = Point::new(roots[i], arc.end().y);
                if is_fold(i) {
                    break;
                }
                // boundary crossing: the orbit continues with the other field
                upper = !upper;
            }
            assert!((total - 1.0).abs() < TIME_TOL, "flight time {total}");
        }
    });
}

#[test]
fn acceptance_06_conjugacy_round_trip_and_shift() {
    criterion(6, "conjugacy-round-trip-and-shift", 60.0, || {
        // itinerary inverts synthesis on random words of length 20
        for kind in [
            FamilyKind::FiniteK(2),
            FamilyKind::FiniteK(3),
            FamilyKind::Infinite,
        ] {
            let engine = Engine::new(kind);
            for s in 0..100u64 {
                let w = random_admissible_word(kind, 20, -10, 1000 + s);
                let gamma = engine.trajectory_from_symbols(&w).unwrap();
                let back = engine.itinerary(&gamma, -10, 9).unwrap();
                assert_eq!(back.symbols, w.symbols, "{kind:?} word {s}");
            }
        }
        // the time-one map shifts the itinerary, on every branch-tree leaf
        let engine = Engine::new(FamilyKind::FiniteK(3));
        let tree = engine.enumerate_branches(Point::new(-0.5, 0.0), 12.0, 8192);
        assert!(!tree.truncated, "branch budget too small");
        assert!(tree.depth >= 12, "tree depth {}", tree.depth);
        assert!(tree.leaves.len() >= 1 << 11, "only {} leaves", tree.leaves.len());
        for leaf in &tree.leaves {
            let it = engine.itinerary(leaf, 0, 11).unwrap();
            let shifted = engine.itinerary(&time_one(leaf), 0, 10).unwrap();
            for j in 0..=10i64 {
                assert_eq!(shifted.get(j), it.get(j + 1), "leaf itinerary shift");
            }
        }
    });
}

#[test]
fn acceptance_07_bean_return_and_surjectivity() {
    criterion(7, "bean-return-and-surjectivity", 120.0, || {
        // the outer loop closes after eta = 3: unit descent to (1, 0), the
        // lower arc at speed 2 over [-1, 1], and a unit climb back
        let outer = psvf::synthesize(&psvf::RealWindow::new(-1, vec![1.0; 4]).unwrap()).unwrap();
        let eta = psvf::return_time(&outer).unwrap();
        assert!((eta - 3.0).abs() < TIME_TOL, "outer loop period {eta}");

        // first-return beats are the original beats advanced by eta, and the
        // zero anchor moves one beat later: t_j of the return orbit equals
        // t_{j+1} - eta of the original
        for s in 0..50u64 {
            let w = psvf::bean::random_real_window(6, -2, 4000 + s);
            let gamma = psvf::synthesize(&w).unwrap();
            let beats = psvf::beat_times(&gamma);
            let eta = psvf::return_time(&gamma).unwrap();
            let shifted = psvf::beat_times(&psvf::return_map(&gamma).unwrap());
            assert_eq!(shifted.len(), beats.len());
            for (t_new, t_old) in shifted.iter().zip(beats.iter()) {
                assert!(
                    (t_new - (t_old - eta)).abs() < TIME_TOL,
                    "beat identity: {t_new} vs {t_old} - {eta}"
                );
            }
            let zero_of = |ts: &[f64]| ts.iter().position(|t| t.abs() < TIME_TOL).unwrap();
            assert_eq!(
                zero_of(&shifted),
                zero_of(&beats) + 1,
                "the return map advances the beat index by one"
            );
        }

        // every section height in (0, 1] is reachable at the next beat
        for i in 0..50 {
            let target = (i as f64 + 1.0) / 50.0;
            let w = psvf::RealWindow::new(0, vec![0.5, target]).unwrap();
            let gamma = psvf::synthesize(&w).unwrap();
            let beats = psvf::beat_times(&gamma);
            let t1 = beats
                .iter()
                .copied()
                .find(|&t| t > TIME_TOL)
                .expect("next beat exists");
            let hit = gamma.at(t1);
            assert!(hit.x.abs() < GRID_TOL, "beat off the section: x = {}", hit.x);
            assert!((hit.y - target).abs() < GRID_TOL, "missed {target}: {}", hit.y);
        }
    });
}

#[test]
fn acceptance_08_metric_properties() {
    criterion(8, "metric-properties", 60.0, || {
        let kind = FamilyKind::FiniteK(3);
        // metric axioms on 10^3 random word triples
        for s in 0..1000u64 {
            let x = random_admissible_word(kind, 17, -8, 3 * s);
            let y = random_admissible_word(kind, 17, -8, 3 * s + 1);
            let z = random_admissible_word(kind, 17, -8, 3 * s + 2);
            assert_eq!(metric_d(&x, &x).unwrap().value, 0.0);
            let dxy = metric_d(&x, &y).unwrap().value;
            let dyx = metric_d(&y, &x).unwrap().value;
            let dyz = metric_d(&y, &z).unwrap().value;
            let dxz = metric_d(&x, &z).unwrap().value;
            assert_eq!(dxy, dyx, "symmetry");
            assert!(dxy >= 0.0);
            assert!(dxz <= dxy + dyz + SUM_TOL, "triangle inequality");
            if x.symbols != y.symbols {
                assert!(dxy > 0.0, "distinct words separate");
            }
        }
        // the Hausdorff implementation against a naive O(n^2) oracle
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let mk = |rng: &mut ChaCha8Rng| -> Vec<Point> {
                (0..24)
                    .map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let oracle = {
                let dir = |u: &[Point], v: &[Point]| -> f64 {
                    let mut worst = 0.0f64;
                    for p in u {
                        let mut best = f64::INFINITY;
                        for q in v {
                            let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
                            best = best.min(d);
                        }
                        worst = worst.max(best);
                    }
                    worst
                };
                dir(&a, &b).max(dir(&b, &a))
            };
            assert!((hausdorff_points(&a, &b).unwrap() - oracle).abs() <= SUM_TOL);
        }
        // the time-one shift at most doubles the orbit metric
        let engine = Engine::new(kind);
        for s in 0..100u64 {
            let w1 = random_admissible_word(kind, 21, -10, 9000 + 2 * s);
            let w2 = random_admissible_word(kind, 21, -10, 9001 + 2 * s);
            let g1 = engine.trajectory_from_symbols(&w1).unwrap();
            let g2 = engine.trajectory_from_symbols(&w2).unwrap();
            let r = rho(
                &normalize(kind, &g1),
                &normalize(kind, &g2),
                3,
                32,
            )
            .unwrap();
            let rs = rho(
                &normalize(kind, &time_one(&g1)),
                &normalize(kind, &time_one(&g2)),
                3,
                32,
            )
            .unwrap();
            assert!(
                rs.value <= 2.0 * r.value + r.tail + 1e-9,
                "shift estimate: {} vs 2 * {} + {}",
                rs.value,
                r.value,
                r.tail
            );
        }
    });
}

#[test]
fn acceptance_09_theta_inf_bound() {
    criterion(9, "theta-inf-metric-bound", 5.0, || {
        // on the integer chain, d(x, y) <= 3|x_0 - y_0| + 16
        for s in 0..100u64 {
            let x = random_admissible_word(FamilyKind::Infinite, 21, -10, 600 + 2 * s);
            let y = random_admissible_word(FamilyKind::Infinite, 21, -10, 601 + 2 * s);
            let d = metric_d(&x, &y).unwrap();
            let d0 = (x.get(0).unwrap() - y.get(0).unwrap()).abs() as f64;
            assert!(
                d.upper() <= 3.0 * d0 + 16.0 + 1e-9,
                "bound violated: {} > 3 * {d0} + 16",
                d.upper()
            );
        }
    });
}

#[test]
fn acceptance_10_sigma_equivalence() {
    criterion(10, "sigma-equivalence", 30.0, || {
        let tol = Tolerances::default();
        let z2 = make_canonical(FamilyKind::FiniteK(2));
        let p2 = Pk::new(2);
        let s2 = sample_profile(|x| p2.value(x), p2.r0(), p2.r1(), 1600);

        // a rescaled copy: profile (x^2 - x^4) / 8 on [-1, 1]
        let scaled = chain_field_from_profile(|x| x / 4.0 - x * x * x / 2.0);
        let s_scaled = sample_profile(|x| (x * x - x.powi(4)) / 8.0, -1.0, 1.0, 1600);
        let report = sigma_equivalence_check(&z2.field, &s2, &scaled, &s_scaled, &tol).unwrap();
        assert!(report.equivalent, "scaled copy: {:?}", report.checks);

        // a non-polynomial deformation keeping the node structure
        let q = Pk::new(2);
        let bump = |x: f64| 1.0 + 0.25 * (std::f64::consts::PI * x).sin();
        let bump_d = |x: f64| 0.25 * std::f64::consts::PI * (std::f64::consts::PI * x).cos();
        let qq = q.clone();
        let deformed = chain_field_from_profile(move |x| {
            qq.d1(x) * bump(x) + qq.value(x) * bump_d(x)
        });
        let s_def = sample_profile(|x| q.value(x) * bump(x), q.r0(), q.r1(), 1600);
        let report = sigma_equivalence_check(&z2.field, &s2, &deformed, &s_def, &tol).unwrap();
        assert!(report.equivalent, "deformation: {:?}", report.checks);

        // a different loop count must be rejected
        let z3 = make_canonical(FamilyKind::FiniteK(3));
        let p3 = Pk::new(3);
        let s3 = sample_profile(|x| p3.value(x), p3.r0(), p3.r1(), 1600);
        match sigma_equivalence_check(&z2.field, &s2, &z3.field, &s3, &tol) {
            Err(EquivError::SkeletonMismatch { .. }) => {}
            other => panic!("expected a skeleton mismatch, got {other:?}"),
        }
    });
}
