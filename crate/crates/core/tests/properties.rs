use nifs_core::catalog;
use nifs_core::dimension::{
    self, box_counting, box_counts, dyadic_ladder, s_energy, PointCloud, StreamSampler,
};
use nifs_core::nifs::{example_modulus_bound, MapSchedule};
use nifs_core::pressure::{self, PressureConfig};
use nifs_core::symbolic::{longest_common_prefix, StreamRule, SymbolStream, Word};
use nifs_core::transversality::{self, difference_series, DoubleZeroVerdict};
use nifs_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn param_in_u() -> impl Strategy<Value = Complex64> {
    (0.05..example_modulus_bound() - 1e-6, 0.01f64..(std::f64::consts::PI - 0.01), any::<bool>())
        .prop_map(|(r, a, lower)| Complex64::from_polar(r, if lower { -a } else { a }))
}

fn schedule_strategy() -> impl Strategy<Value = (MapSchedule, Complex64)> {
    prop_oneof![
        param_in_u().prop_map(|t| (catalog::paper_example(), t)),
        (0u64..1000).prop_map(|seed| (catalog::random_affine(seed), Complex64::new(0.0, 0.0))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_prefix_is_tail_of_longer_prefix(seed: u64, family in 0u64..50, n in 0usize..=20, j in 0usize..=20) {
        let alphabet = catalog::random_affine(family).alphabet();
        let stream = SymbolStream::seeded(1, seed, alphabet).unwrap();
        let long = stream.prefix(n + j);
        let shifted = stream.shift(n).prefix(j);
        prop_assert_eq!(shifted.start_level, 1 + n);
        prop_assert_eq!(&shifted.symbols[..], &long.symbols[n..]);
        prop_assert_eq!(long.drop_front(n), shifted);
    }

    #[test]
    fn common_prefix_is_symmetric(shared in proptest::collection::vec(0usize..2, 0..30), a: u64, b: u64) {
        let alphabet = catalog::paper_example().alphabet();
        let stream = |seed| SymbolStream::new(1, StreamRule::Prefixed {
            prefix: shared.clone(),
            tail: Box::new(StreamRule::Seeded { seed, alphabet: alphabet.clone() }),
        }).unwrap();
        let (x, y) = (stream(a), stream(b));
        prop_assert_eq!(
            longest_common_prefix(&x, &y, 64).unwrap(),
            longest_common_prefix(&y, &x, 64).unwrap()
        );
    }

    #[test]
    fn derivative_norm_is_multiplicative((schedule, t) in schedule_strategy(), seed: u64, p in 0usize..15, q in 0usize..15) {
        let stream = SymbolStream::seeded(1, seed, schedule.alphabet()).unwrap();
        let head = stream.prefix(p);
        let tail = stream.shift(p).prefix(q);
        let whole = schedule.compose(&head.concat(&tail).unwrap(), t).unwrap().derivative_norm();
        let split = schedule.compose(&head, t).unwrap().derivative_norm()
            * schedule.compose(&tail, t).unwrap().derivative_norm();
        prop_assert!((whole - split).abs() <= 1e-13 * whole.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn similarities_scale_distances_exactly((schedule, t) in schedule_strategy(), seed: u64, len in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stream = SymbolStream::seeded(1, seed, schedule.alphabet()).unwrap();
        let map = schedule.compose(&stream.prefix(len), t).unwrap();
        let ball = |rng: &mut ChaCha8Rng| {
            let r = schedule.space.radius * rng.gen::<f64>().sqrt();
            let z = if schedule.space.dim == 1 {
                Complex64::new(if rng.gen() { r } else { -r }, 0.0)
            } else {
                Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            };
            schedule.space.center + z
        };
        let (x, y) = (ball(&mut rng), ball(&mut rng));
        let image = (map.apply(x) - map.apply(y)).norm();
        let lower = map.derivative_norm() * (x - y).norm();
        prop_assert!((image - lower).abs() <= 1e-12 * lower.max(1e-300) + 1e-15);
    }

    #[test]
    fn cylinder_balls_are_nested((schedule, t) in schedule_strategy(), seed: u64) {
        let stream = SymbolStream::seeded(1, seed, schedule.alphabet()).unwrap();
        let (c, r) = (schedule.space.center, schedule.space.radius);
        let ball = |j: usize| {
            let m = schedule.compose(&stream.prefix(j), t).unwrap();
            (m.apply(c), m.derivative_norm() * r)
        };
        for j in 0..25 {
            let (outer_c, outer_r) = ball(j);
            let (inner_c, inner_r) = ball(j + 1);
            prop_assert!((inner_c - outer_c).norm() + inner_r <= outer_r * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn pressure_is_monotone_in_s((schedule, t) in schedule_strategy(), s1 in 0.0f64..4.0, ds in 0.0f64..4.0, depth in 1usize..=12) {
        let z = |s| pressure::log_partition_sum(&schedule, t, s, depth, u64::MAX).unwrap();
        let (a, b) = (z(s1), z(s1 + ds));
        prop_assert!(b <= a + 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn bowen_bracket_has_opposite_signs((schedule, t) in schedule_strategy()) {
        let config = PressureConfig::default();
        let r = pressure::bowen_dimension(&schedule, t, &config).unwrap();
        if let Some(s) = r.dimension.finite() {
            if s > 0.0 {
                prop_assert!(pressure::pressure(&schedule, t, r.bracket.0, &config).unwrap().value >= 0.0);
                prop_assert!(pressure::pressure(&schedule, t, r.bracket.1, &config).unwrap().value <= 0.0);
            }
        }
    }

    #[test]
    fn difference_series_are_in_the_class(seed: u64, n in 1usize..40) {
        let schedule = catalog::paper_example();
        let (omega, tau) = transversality::random_pair(&schedule, n, seed);
        let series = difference_series(&schedule, &omega, &tau, 128).unwrap();
        prop_assert!(series.check_membership().is_ok());
        prop_assert_eq!(series.leading.abs(), 1.0);
    }

    #[test]
    fn truncated_series_within_tail_of_longer_truncation(seed: u64, n in 1usize..20, r in 0.0f64..0.99, a in 0.0f64..std::f64::consts::TAU, len in 8usize..64) {
        let schedule = catalog::paper_example();
        let (omega, tau) = transversality::random_pair(&schedule, n, seed);
        let short = difference_series(&schedule, &omega, &tau, len).unwrap();
        let long = difference_series(&schedule, &omega, &tau, 4 * len).unwrap();
        let t = Complex64::from_polar(r, a);
        let slack = 1e-12;
        prop_assert!((short.eval(t) - long.eval(t)).norm() <= short.tail_bound(r) + slack);
        prop_assert!((short.derivative(t) - long.derivative(t)).norm() <= short.derivative_tail_bound(r) + slack);
    }
}

#[test]
fn exclusion_predicate_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gamma = 2.0 * 5f64.powf(-5.0 / 8.0);
    for k in 0..1_000_000 {
        // every eighth point is forced onto the real axis to exercise that boundary piece
        let re = rng.gen_range(-1.0..1.0);
        let im = if k % 8 == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let t = Complex64::new(re, im);
        let direct = (re * re + im * im).sqrt() < gamma && im != 0.0;
        let verdict = transversality::double_zero_exclusion(t);
        assert_eq!(verdict == DoubleZeroVerdict::Excluded, direct, "{t}");
        assert_eq!(verdict, transversality::double_zero_exclusion(t));
    }
}

fn example_cloud(points: usize, seed: u64) -> PointCloud {
    dimension::sample_limit_set(
        &catalog::paper_example(),
        Complex64::from_polar(0.55, 0.7),
        points,
        1e-6,
        StreamSampler::Uniform,
        seed,
    )
    .unwrap()
}

#[test]
fn box_counts_grow_as_scale_shrinks() {
    for seed in 0..4 {
        let cloud = example_cloud(20_000, seed * 100_000);
        let ladder = dyadic_ladder(cloud.diameter(), 10, cloud.error_bound);
        let counts = box_counts(&cloud, &ladder);
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }
}

/// Rotation moves box boundaries, so the coarse end of the ladder is where a single box more or
/// less shows up in the slope. The ladder here starts at diam/16, where the coarsest count is
/// already a few dozen boxes; from diam/4 (five or six boxes) the slope wanders by up to ~0.07.
#[test]
fn box_counting_invariant_under_rigid_motions() {
    let cloud = dimension::sample_limit_set(
        &catalog::paper_example(),
        Complex64::from_polar(0.7, 0.7),
        100_000,
        1e-6,
        StreamSampler::Uniform,
        5,
    )
    .unwrap();
    let (ladder, counts) = dimension::trim_undersampled(
        &cloud,
        &dyadic_ladder(cloud.diameter() / 16.0, 8, cloud.error_bound),
    );
    assert!(counts[0] >= 30, "{counts:?}");
    let base = box_counting(&cloud, &ladder).unwrap().estimate;
    let moved = box_counting(&cloud.translated(Complex64::new(1.37, -2.11)), &ladder)
        .unwrap()
        .estimate;
    assert!((base - moved).abs() <= 1e-9, "{base} vs {moved}");
    for k in 1..12 {
        let angle = 0.55 * k as f64;
        let rotated = box_counting(&cloud.rotated(angle, Complex64::new(0.4, 0.2)), &ladder)
            .unwrap()
            .estimate;
        assert!((base - rotated).abs() <= 0.02, "angle {angle}: {base} vs {rotated}");
    }
}

#[test]
fn s_energy_grows_with_s_on_unit_diameter_cloud() {
    let cloud = example_cloud(1_500, 9);
    let scale = 1.0 / (cloud.diameter() * 1.000001);
    let unit = PointCloud::from_points(
        2,
        cloud.points.iter().map(|p| p * scale).collect(),
        cloud.error_bound * scale,
    );
    let energies: Vec<f64> = (0..=8)
        .map(|k| s_energy(&unit, 0.25 * k as f64).unwrap().value().unwrap())
        .collect();
    assert!(energies.windows(2).all(|w| w[0] <= w[1]), "{energies:?}");
}

#[test]
fn word_counts_match_alphabet_products() {
    for seed in 0..10 {
        let alphabet = catalog::random_affine(seed).alphabet();
        for n in 0..=8 {
            let expected: u128 = (1..=n).map(|j| alphabet.size_at(j) as u128).product();
            assert_eq!(alphabet.words(1, n).count() as u128, expected);
            assert_eq!(alphabet.word_count(1, n), expected);
        }
    }
    let example = catalog::paper_example().alphabet();
    assert_eq!(example.words(1, 12).count(), 4096);
    assert!(example.words(1, 3).all(|w: Word| w.len() == 3));
}
