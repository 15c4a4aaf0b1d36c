use proptest::prelude::*;
use rand::Rng;

use dobrushin_core::bounds::INDEPENDENT_CONVEX_RATE;
use dobrushin_core::convexdist::{
    convex_distance, convex_distance_oracle, dt_squared_lipschitz_check, exact_convex_expectation, weighted_distance,
    ConvexDistanceInstance,
};
use dobrushin_core::rng::stream_rng;
use dobrushin_core::space::ProductSpace;

fn random_instance<R: Rng>(rng: &mut R, n: usize, k: usize, q: usize) -> ConvexDistanceInstance {
    let mut point = || (0..n).map(|_| rng.random_range(0..q)).collect::<Vec<_>>();
    let x = point();
    let set = (0..k).map(|_| point()).collect();
    ConvexDistanceInstance::new(x, set).unwrap()
}

fn hamming(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(u, v)| u != v).count()
}

#[test]
fn solver_agrees_with_subset_oracle() {
    let mut rng = stream_rng(211, 0);
    for _ in 0..400 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(1..=6);
        let q = rng.random_range(2..=3);
        let inst = random_instance(&mut rng, n, k, q);
        let got = convex_distance(&inst).unwrap().value;
        let want = convex_distance_oracle(&inst).unwrap();
        assert!((got - want).abs() < 1e-8, "{inst:?}: {got} vs {want}");
    }
}

#[test]
fn distance_lies_between_hamming_scalings() {
    let mut rng = stream_rng(223, 0);
    for _ in 0..300 {
        let n = rng.random_range(1..=12);
        let k = rng.random_range(1..=10);
        let inst = random_instance(&mut rng, n, k, 2);
        let h = inst.set.iter().map(|y| hamming(&inst.x, y)).min().unwrap() as f64;
        let d = convex_distance(&inst).unwrap().value;
        // uniform weights give the lower end, the nearest single point the upper
        assert!(d >= h / (n as f64).sqrt() - 1e-9);
        assert!(d <= h.sqrt() + 1e-9);
    }
}

#[test]
fn weighted_distances_never_exceed_convex_distance() {
    let mut rng = stream_rng(227, 0);
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=6);
        let inst = random_instance(&mut rng, n, k, 3);
        let r = convex_distance(&inst).unwrap();
        for _ in 0..20 {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
            let c: Vec<f64> = raw.iter().map(|v| v / norm).collect();
            assert!(weighted_distance(&c, &inst.x, &inst.set) <= r.value + 1e-9);
        }
        // the returned direction attains the supremum
        let at = weighted_distance(&r.optimal_direction, &inst.x, &inst.set);
        assert!((at - r.value).abs() < 1e-6, "{at} vs {}", r.value);
    }
}

#[test]
fn squared_distance_has_unit_increments() {
    let space = ProductSpace::binary(4);
    let states: Vec<Vec<usize>> = space.states().collect();
    for set in [vec![states[0].clone()], vec![states[3].clone(), states[12].clone()], vec![states[1].clone(), states[6].clone(), states[15].clone()]] {
        let r = dt_squared_lipschitz_check(&space, &set).unwrap();
        assert!(r.holds(), "{:?} {}", set, r.max_increment);
    }
}

#[test]
fn exact_expectation_of_independent_bits_is_below_inverse_mass() {
    let n = 8;
    let space = ProductSpace::binary(n);
    let law: Vec<(Vec<usize>, f64)> = space.states().map(|x| (x, 1.0 / 256.0)).collect();
    let ball: Vec<Vec<usize>> = space.states().filter(|x| x.iter().sum::<usize>() <= 2).collect();
    let (e, mu) = exact_convex_expectation(&law, &ball, INDEPENDENT_CONVEX_RATE).unwrap();
    assert!((mu - 37.0 / 256.0).abs() < 1e-12);
    assert!(e <= 1.0 / mu, "{e} vs {}", 1.0 / mu);
}

#[test]
fn instance_json_uses_capital_s() {
    let inst = ConvexDistanceInstance::from_json(r#"{"x":[0,1,0],"S":[[1,1,0],[0,0,1]]}"#).unwrap();
    assert_eq!(inst.set.len(), 2);
    assert!(ConvexDistanceInstance::from_json(r#"{"x":[0,1],"S":[[1,1,0]]}"#).is_err());
    assert!(ConvexDistanceInstance::from_json(r#"{"x":[0,1],"S":[]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_points_never_increases_distance(seed in 0u64..10_000, n in 1usize..=7, k in 1usize..=5) {
        let mut rng = stream_rng(seed, 0);
        let inst = random_instance(&mut rng, n, k, 2);
        let before = convex_distance(&inst).unwrap().value;
        let mut bigger = inst.clone();
        bigger.set.push((0..n).map(|_| rng.random_range(0..2)).collect());
        prop_assert!(convex_distance(&bigger).unwrap().value <= before + 1e-9);
    }

    #[test]
    fn certificate_is_consistent(seed in 0u64..10_000, n in 1usize..=9, k in 1usize..=8) {
        let mut rng = stream_rng(seed, 1);
        let inst = random_instance(&mut rng, n, k, 3);
        let r = convex_distance(&inst).unwrap();
        prop_assert!(r.optimal_direction.iter().all(|&c| c >= 0.0));
        let norm: f64 = r.optimal_direction.iter().map(|c| c * c).sum();
        prop_assert!((norm - 1.0).abs() < 1e-9);
        prop_assert!(r.optimal_weights.iter().all(|&w| w >= 0.0));
        prop_assert!((r.optimal_weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(r.duality_gap >= 0.0 && r.duality_gap <= 1e-8 * (1.0 + r.value * r.value));
        // the weights reproduce the distance
        let m: Vec<f64> = (0..n)
            .map(|i| inst.set.iter().zip(&r.optimal_weights).filter(|(y, _)| y[i] != inst.x[i]).map(|(_, w)| w).sum())
            .collect();
        let from_weights = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((from_weights - r.value).abs() < 1e-7);
    }
}
