mod oracles;

use deconflict::conflict::{detect_all, SeparationParams};
use deconflict::trajectory::{generate_synthetic, FlightSet, SyntheticConfig, Trajectory, TrajectoryPoint};
use oracles::{actualized, conflict_signature, reference_conflicts, spatial_pairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random walks inside a small box so that flights meet often.
fn random_walks(rng: &mut impl Rng, flights: usize) -> FlightSet {
    let list = (0..flights)
        .map(|f| {
            let mut lat: f64 = rng.gen_range(49.0..50.0);
            let mut lon = rng.gen_range(-10.0..-8.5);
            let altitude = [35000.0, 36000.0, 38000.0][rng.gen_range(0..3)];
            let points = (0..rng.gen_range(5..30))
                .map(|_| {
                    lat = (lat + rng.gen_range(-0.12..0.12)).clamp(48.5, 50.5);
                    lon += rng.gen_range(-0.15..0.2);
                    TrajectoryPoint::new(lat, lon, altitude).unwrap()
                })
                .collect();
            Trajectory::new(format!("W{f:02}"), rng.gen_range(0..25), points).unwrap()
        })
        .collect();
    FlightSet::new(list).unwrap()
}

#[test]
fn detection_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for round in 0..40 {
        let flights = random_walks(&mut rng, 6);
        let params = SeparationParams::default();
        let d_max = [0, 3, 6, 18][round % 4];
        let detected = detect_all(&flights, &params, d_max);
        let reference = reference_conflicts(&flights, &params, d_max);
        assert_eq!(conflict_signature(&detected), reference, "round {round}");
        total += reference.len();
    }
    assert!(total > 50, "fixture produced only {total} conflicts");
}

#[test]
fn detection_matches_on_synthetic_corridor() {
    let config = SyntheticConfig {
        flights: 14,
        seed: 3,
        departure_window_min: 30,
        ..SyntheticConfig::default()
    };
    let flights = generate_synthetic(&config).unwrap();
    let params = SeparationParams::default();
    let detected = detect_all(&flights, &params, 12);
    assert!(!detected.is_empty());
    assert_eq!(conflict_signature(&detected), reference_conflicts(&flights, &params, 12));
}

#[test]
fn conflict_ids_are_dense_and_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let flights = random_walks(&mut rng, 8);
    let cs = detect_all(&flights, &SeparationParams::default(), 9);
    let keys: Vec<_> = cs
        .conflicts()
        .iter()
        .map(|c| (c.first().to_owned(), c.second().to_owned(), c.pairs()[0].s))
        .collect();
    for (n, c) in cs.conflicts().iter().enumerate() {
        assert_eq!(c.id(), n);
    }
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
}

/// Every delay pair within the detection window that brings two flights
/// within separation hits exactly the detected conflicts whose interval
/// contains the delay difference.
#[test]
fn forbidden_intervals_match_delay_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for round in 0..20 {
        let flights = random_walks(&mut rng, 5);
        let dt = [2, 3, 4][round % 3];
        let params = SeparationParams::new(30.0, dt, 2000.0).unwrap();
        let d_max = 9;
        let detected = detect_all(&flights, &params, d_max);
        let list = flights.flights();
        for (n, a) in list.iter().enumerate() {
            for b in &list[n + 1..] {
                // a wider window than detection uses, to catch missed pairs
                let all = spatial_pairs(a, b, &params, 3 * d_max + dt);
                let mine: Vec<_> = detected
                    .conflicts()
                    .iter()
                    .filter(|c| c.first() == a.flight_id() && c.second() == b.flight_id())
                    .collect();
                for da in 0..=d_max {
                    for db in 0..=d_max {
                        let hit = actualized(&all, da, db, dt);
                        let blocked = mine.iter().any(|c| c.forbidden_interval().contains(da - db));
                        assert_eq!(hit, blocked, "{} {} delays ({da}, {db})", a.flight_id(), b.flight_id());
                        for c in &mine {
                            let pairs = c.pairs().iter().map(|p| (p.s, p.t)).collect();
                            assert_eq!(actualized(&pairs, da, db, dt), c.forbidden_interval().contains(da - db));
                            assert_eq!(c.is_avoided(da, db), !c.forbidden_interval().contains(da - db));
                        }
                        checked += usize::from(hit);
                    }
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} actualized delay pairs");
}

#[test]
fn vertical_separation_suppresses_conflicts() {
    let p = |lat, alt| TrajectoryPoint::new(lat, 0.0, alt).unwrap();
    let a = Trajectory::new("A", 0, vec![p(0.0, 35000.0); 5]).unwrap();
    let b = Trajectory::new("B", 0, vec![p(0.1, 37000.0); 5]).unwrap();
    let c = Trajectory::new("C", 0, vec![p(0.1, 36999.0); 5]).unwrap();
    let flights = FlightSet::new(vec![a, b, c]).unwrap();
    let cs = detect_all(&flights, &SeparationParams::default(), 0);
    let pairs: Vec<_> = cs.conflicts().iter().map(|c| (c.first(), c.second())).collect();
    assert_eq!(pairs, vec![("A", "C"), ("B", "C")]);
}

#[test]
fn temporal_window_is_strict() {
    let p = TrajectoryPoint::new(10.0, 10.0, 30000.0).unwrap();
    let a = Trajectory::new("A", 0, vec![p]).unwrap();
    // |s - t| must stay below d_max + temporal minimum = 5
    for (start, expected) in [(4, 1), (5, 0), (-4, 1), (-5, 0)] {
        let b = Trajectory::new("B", start, vec![p]).unwrap();
        let flights = FlightSet::new(vec![a.clone(), b]).unwrap();
        assert_eq!(detect_all(&flights, &SeparationParams::default(), 2).len(), expected, "start {start}");
    }
}
