use proptest::prelude::*;
use std::sync::Arc;
use tabletamp::feasibility::*;
use tabletamp::geometry::{Point2, Pose2D};
use tabletamp::rng;
use tabletamp::scenarios::{chair_on_target, dining_scene};
use tabletamp::world::*;

fn task1_objects() -> Vec<String> {
    tabletamp::tasks::task_by_id(1).unwrap().objects
}

fn easy() -> SceneState {
    dining_scene(&task1_objects(), 7)
}

fn with_obstacle(o: Obstacle) -> SceneState {
    let mut s = easy();
    s.obstacles.push(o);
    s.validate().unwrap();
    s
}

fn chair_top() -> SceneState {
    let s = easy();
    let chair = chair_on_target(&s, true);
    with_obstacle(chair)
}

/// Wall along the whole north side of the target table.
fn north_wall() -> SceneState {
    with_obstacle(Obstacle::new("wall", ObstacleKind::Wall, 0.0, 0.71, 2.0, 0.5))
}

fn band(scene: &SceneState, side: Side) -> SymbolicLocation {
    symbolic_locations(scene, "center").unwrap().into_iter().find(|b| b.side == side).unwrap()
}

fn params(sigma: f64) -> FeasibilityParams {
    FeasibilityParams { nav_noise_sigma_xy: sigma, ..Default::default() }
}

#[test]
fn standing_inside_chair_always_fails() {
    let s = chair_top();
    let nav = NavGrid::build(&s);
    let x = Pose2D::new(0.05, 0.55, -std::f64::consts::FRAC_PI_2);
    assert!(s.obstacles[0].rect().contains(x.position()));
    let mut r = rng::stream(1, "t", 0);
    for _ in 0..200 {
        let (out, _) = trial_outcome(&s, &nav, x, Point2::new(0.0, 0.0), "center", &FeasibilityParams::default(), &mut r);
        assert_eq!(out, TrialOutcome::Navigation);
    }
}

#[test]
fn adjacent_pose_without_noise_succeeds() {
    let s = easy();
    let nav = NavGrid::build(&s);
    let b = band(&s, Side::South);
    let c = b.cell_center(12, 0);
    let y = Point2::new(c.x, -0.2 + 0.3);
    let mut r = rng::stream(2, "t", 0);
    for _ in 0..100 {
        assert!(run_trial(&s, &nav, Pose2D::facing(c, y), y, "center", &params(1e-9), &mut r));
    }
}

/// Probability that an isotropic Gaussian around `x` lands within `reach`
/// of `y`, by midpoint quadrature over +-6 sigma.
fn reach_probability(x: Point2, y: Point2, sigma: f64, reach: f64) -> f64 {
    let steps = 600;
    let h = 12.0 * sigma / steps as f64;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma);
    let mut total = 0.0;
    for i in 0..steps {
        for j in 0..steps {
            let dx = -6.0 * sigma + (i as f64 + 0.5) * h;
            let dy = -6.0 * sigma + (j as f64 + 0.5) * h;
            let p = Point2::new(x.x + dx, x.y + dy);
            if p.distance(&y) <= reach {
                total += norm * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp() * h * h;
            }
        }
    }
    total
}

#[test]
fn empirical_rate_matches_quadrature() {
    let s = easy();
    let nav = NavGrid::build(&s);
    let y = Point2::new(0.0, -0.15);
    let x = Pose2D::facing(Point2::new(0.0, -1.13), y);
    let p = FeasibilityParams { nav_noise_sigma_xy: 0.05, reach_radius: 1.0, ..Default::default() };
    // Every arrival within 6 sigma is collision-free here, so only reach matters.
    assert!(s.disc_free(x.position(), s.robot.radius + 0.3));
    let expected = reach_probability(x.position(), y, 0.05, 1.0);
    assert!(expected > 0.3 && expected < 0.9, "{expected}");
    let mut r = rng::stream(3, "t", 0);
    let hits = (0..10_000).filter(|_| run_trial(&s, &nav, x, y, "center", &p, &mut r)).count();
    let rate = hits as f64 / 10_000.0;
    assert!((rate - expected).abs() <= 0.02, "rate {rate} expected {expected}");
}

#[test]
fn band_under_wall_is_all_zero() {
    let s = north_wall();
    let nav = NavGrid::build(&s);
    let b = band(&s, Side::North);
    let h = generate_heatmap(&s, &nav, Point2::new(0.0, 0.1), &b, &FeasibilityParams::default(), 5);
    assert!(h.is_all_zero());
    assert_eq!(weighted_mean(&h), 0.0);
    let south = generate_heatmap(&s, &nav, Point2::new(0.0, -0.1), &band(&s, Side::South), &FeasibilityParams::default(), 5);
    assert!(weighted_mean(&south) > 0.8);
}

#[test]
fn record_count_is_cells_times_trials() {
    let s = easy();
    let nav = NavGrid::build(&s);
    let mut total = 0;
    for (i, side) in [Side::North, Side::East].into_iter().enumerate() {
        for y in [Point2::new(0.1, 0.0), Point2::new(-0.2, 0.1)] {
            let b = band(&s, side);
            let (h, records) = generate_heatmap_records(&s, &nav, y, &b, &FeasibilityParams::default(), i as u64);
            assert_eq!(records.len(), 24 * 8 * 5);
            for (cell, chunk) in records.chunks(5).enumerate() {
                assert!(chunk.iter().all(|r| r.stand_cell == b.unflat(cell) && r.unload == y));
                assert_eq!(chunk.iter().filter(|r| r.success).count() as u32, h.successes[cell]);
            }
            total += records.len();
        }
    }
    assert_eq!(total, 4 * 960);
}

#[test]
fn cells_beyond_reach_are_zero() {
    let s = easy();
    let nav = NavGrid::build(&s);
    let p = FeasibilityParams::default();
    // Arrival noise is unbounded: past 3 sigma a success is rare, past 5
    // sigma it has never been observed.
    let near = p.reach_radius + 3.0 * p.nav_noise_sigma_xy;
    let bound = p.reach_radius + 5.0 * p.nav_noise_sigma_xy;
    let (mut far, mut tail_cells, mut tail_hits) = (0, 0, 0);
    for (k, y) in [Point2::new(0.0, 0.0), Point2::new(0.3, 0.15), Point2::new(-0.35, -0.1)].into_iter().enumerate() {
        for side in Side::ALL {
            let b = band(&s, side);
            let h = generate_heatmap(&s, &nav, y, &b, &p, k as u64);
            for i in 0..b.cell_count() {
                let (c, r) = b.unflat(i);
                let d = b.cell_center(c, r).distance(&y);
                if d > bound {
                    far += 1;
                    assert_eq!(h.successes[i], 0, "{side} cell {c},{r}");
                } else if d > near {
                    tail_cells += 1;
                    tail_hits += h.successes[i];
                }
            }
        }
    }
    assert!(far > 1000);
    assert!((tail_hits as f64) <= 0.01 * (5 * tail_cells) as f64, "{tail_hits} of {tail_cells} cells");
}

fn one_hot(b: &SymbolicLocation, flat: usize, value: f64) -> Heatmap {
    let mut v = vec![0.0; b.cell_count()];
    v[flat] = value;
    Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &v)
}

#[test]
fn fea_m_reads_the_cell_value() {
    let s = easy();
    for side in Side::ALL {
        let b = band(&s, side);
        let flat = b.flat(5, 3);
        let h = one_hot(&b, flat, 0.8);
        assert_eq!(fea_m(&h, b.cell_center(5, 3)).unwrap(), 0.8);
        assert_eq!(fea_m(&h, b.cell_center(6, 3)).unwrap(), 0.0);
        let zero = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &vec![0.0; b.cell_count()]);
        assert_eq!(fea_m(&zero, b.cell_center(0, 0)).unwrap(), 0.0);
        assert!(matches!(fea_m(&h, Point2::new(0.0, 0.0)), Err(FeasibilityError::OutOfRegion { .. })));
    }
}

/// Cell indices from the band rectangle, with the along axis running west to
/// east (or south to north) and rows counted away from the table.
fn index_oracle(b: &SymbolicLocation, p: Point2) -> (usize, usize) {
    let r = &b.region;
    let (along, out) = match b.side {
        Side::North => (p.x - r.min_x(), p.y - r.min_y()),
        Side::South => (p.x - r.min_x(), r.max_y() - p.y),
        Side::East => (p.y - r.min_y(), p.x - r.min_x()),
        Side::West => (p.y - r.min_y(), r.max_x() - p.x),
    };
    ((along / 0.1) as usize, (out / 0.1) as usize)
}

#[test]
fn fea_m_agrees_with_index_oracle() {
    let s = easy();
    let mut r = rng::stream(4, "t", 0);
    for side in Side::ALL {
        let b = band(&s, side);
        let values: Vec<f64> = (0..b.cell_count()).map(|_| r.gen_range(0..=5) as f64 / 5.0).collect();
        let h = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &values);
        for _ in 0..250 {
            let p = Point2::new(
                r.gen_range(b.region.min_x() + 1e-6..b.region.max_x() - 1e-6),
                r.gen_range(b.region.min_y() + 1e-6..b.region.max_y() - 1e-6),
            );
            let (c, w) = index_oracle(&b, p);
            assert_eq!(fea_m(&h, p).unwrap(), values[w * 24 + c], "{side} {p:?}");
        }
    }
}

use rand::Rng as _;

#[test]
fn smp_on_one_hot_always_returns_that_cell() {
    let s = easy();
    let b = band(&s, Side::East);
    let mut h = one_hot(&b, b.flat(10, 2), 0.4);
    h.anchor = Point2::new(0.2, 0.1);
    let mut r = rng::stream(5, "t", 0);
    for _ in 0..500 {
        let x = smp(&b, &h, &mut r);
        assert_eq!(x.position(), b.cell_center(10, 2));
        let facing = Pose2D::facing(x.position(), h.anchor);
        assert!((x.theta - facing.theta).abs() < 1e-12);
    }
}

#[test]
fn smp_picks_in_proportion_to_value() {
    let s = easy();
    let b = band(&s, Side::North);
    let mut v = vec![0.0; b.cell_count()];
    v[3] = 0.2;
    v[40] = 0.8;
    let h = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &v);
    let mut r = rng::stream(6, "t", 0);
    let (mut a, mut c) = (0, 0);
    for _ in 0..10_000 {
        match b.cell_at(smp(&b, &h, &mut r).position()).map(|(col, row)| b.flat(col, row)) {
            Some(3) => a += 1,
            Some(40) => c += 1,
            other => panic!("{other:?}"),
        }
    }
    let share = c as f64 / (a + c) as f64;
    assert!((share - 0.8).abs() <= 0.05, "{share}");
}

/// 99th percentile of chi-square with 191 degrees of freedom
/// (Wilson-Hilferty approximation).
const CHI2_191_P99: f64 = 239.4;

#[test]
fn smp_on_zero_heatmap_is_uniform() {
    let s = easy();
    let b = band(&s, Side::West);
    let h = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &vec![0.0; b.cell_count()]);
    let mut r = rng::stream(7, "t", 0);
    let mut counts = vec![0.0f64; b.cell_count()];
    let draws = 10_000;
    for _ in 0..draws {
        let (c, w) = b.cell_at(smp(&b, &h, &mut r).position()).unwrap();
        counts[b.flat(c, w)] += 1.0;
    }
    let e = draws as f64 / b.cell_count() as f64;
    let chi2: f64 = counts.iter().map(|o| (o - e) * (o - e) / e).sum();
    assert!(chi2 < CHI2_191_P99, "{chi2}");
}

#[test]
fn fea_t_on_flat_and_zero_maps() {
    let s = easy();
    let b = band(&s, Side::South);
    let mut r = rng::stream(8, "t", 0);
    let half = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 4, &vec![0.5; b.cell_count()]);
    assert_eq!(fea_t(&half, &b, 25, &mut r), 0.5);
    let fifths = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &vec![0.6; b.cell_count()]);
    assert!((fea_t(&fifths, &b, 25, &mut r) - 0.6).abs() < 1e-12);
    let zero = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &vec![0.0; b.cell_count()]);
    assert_eq!(fea_t(&zero, &b, 25, &mut r), 0.0);
}

#[test]
fn fea_t_approaches_weighted_mean() {
    let s = easy();
    let b = band(&s, Side::North);
    let mut r = rng::stream(9, "t", 0);
    let values: Vec<f64> = (0..b.cell_count()).map(|i| ((i * 7) % 6) as f64 / 5.0).collect();
    let h = Heatmap::from_values(Point2::new(0.0, 0.0), b.clone(), 5, &values);
    let exact = {
        let sum: f64 = values.iter().sum();
        values.iter().map(|v| v * v).sum::<f64>() / sum
    };
    assert!((weighted_mean(&h) - exact).abs() < 1e-12);
    assert!((fea_t(&h, &b, 10_000, &mut r) - exact).abs() <= 0.05);
}

#[test]
fn cache_computes_each_key_once_under_contention() {
    let s = chair_top();
    let nav = NavGrid::build(&s);
    let b = band(&s, Side::West);
    let cache = Arc::new(HeatmapCache::new());
    let hash = s.content_hash();
    let y = Point2::new(-0.1, 0.05);
    let maps: Vec<Arc<Heatmap>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..8)
            .map(|_| scope.spawn(|| cache.get_or_compute(&s, &hash, &nav, y, &b, &FeasibilityParams::default(), 11)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(cache.len(), 1);
    assert!(maps.iter().all(|m| Arc::ptr_eq(m, &maps[0])));
    assert_eq!(*maps[0], generate_heatmap(&s, &nav, y, &b, &FeasibilityParams::default(), 11));
    let other = cache.get_or_compute(&s, &hash, &nav, Point2::new(0.1, 0.05), &b, &FeasibilityParams::default(), 11);
    assert_eq!(cache.len(), 2);
    assert_ne!(*other, *maps[0]);
}

#[test]
fn cache_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let s = chair_top();
    let nav = NavGrid::build(&s);
    let b = band(&s, Side::East);
    let hash = s.content_hash();
    let y = Point2::new(0.2, -0.05);
    let p = FeasibilityParams::default();
    let first = HeatmapCache::with_dir(dir.path()).get_or_compute(&s, &hash, &nav, y, &b, &p, 3);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    assert!(files[0].to_string_lossy().ends_with(".heatmap.toml"));
    let again = HeatmapCache::with_dir(dir.path()).get_or_compute(&s, &hash, &nav, y, &b, &p, 3);
    assert_eq!(*first, *again);
}

#[test]
fn pgm_export_has_expected_layout() {
    let dir = tempfile::tempdir().unwrap();
    let s = easy();
    let b = band(&s, Side::North);
    let mut v = vec![0.0; b.cell_count()];
    v[b.flat(2, 0)] = 1.0;
    v[b.flat(5, 7)] = 0.4;
    let h = Heatmap::from_values(Point2::new(0.0, 0.1), b.clone(), 5, &v);
    write_heatmap(&h, &FeasibilityParams::default(), dir.path(), "north").unwrap();
    let bytes = std::fs::read(dir.path().join("north.pgm")).unwrap();
    let header: Vec<String> =
        String::from_utf8_lossy(&bytes[..16]).split_whitespace().take(4).map(str::to_string).collect();
    assert_eq!(header, ["P5", "24", "8", "255"]);
    let pixels = &bytes[bytes.len() - 24 * 8..];
    assert_eq!(pixels.len(), 24 * 8);
    // Image row 0 is the band row farthest from the table.
    assert_eq!(pixels[7 * 24 + 2], 255);
    assert_eq!(pixels[5], 102);
    assert_eq!(pixels.iter().filter(|p| **p != 0).count(), 2);
    let side: HeatmapSidecar = toml::from_str(&std::fs::read_to_string(dir.path().join("north.toml")).unwrap()).unwrap();
    assert_eq!((side.cols, side.rows, side.trials_per_cell), (24, 8, 5));
    assert_eq!(side.successes, h.successes);
    assert_eq!(side.anchor, h.anchor);
}

#[test]
fn heatmaps_are_seed_deterministic() {
    let s = chair_top();
    let nav = NavGrid::build(&s);
    let b = band(&s, Side::East);
    let p = params(0.05);
    let y = Point2::new(0.3, 0.15);
    assert_eq!(generate_heatmap(&s, &nav, y, &b, &p, 21), generate_heatmap(&s, &nav, y, &b, &p, 21));
    let wide = FeasibilityParams { reach_radius: 1.3, ..p };
    let a = generate_heatmap(&s, &nav, y, &b, &wide, 21);
    let c = generate_heatmap(&s, &nav, y, &b, &wide, 22);
    assert_ne!(a.successes, c.successes);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cells_touching_obstacles_are_zero(
        cx in -1.0f64..1.0,
        cy in 0.5f64..1.2,
        hx in 0.1f64..0.5,
        hy in 0.05f64..0.2,
        ux in -0.35f64..0.35,
        uy in -0.15f64..0.15,
        seed in 0u64..1000,
    ) {
        let mut s = easy();
        let chair = Obstacle::new("chair", ObstacleKind::Chair, cx, cy.max(0.2 + hy + 0.01), hx, hy);
        s.obstacles.push(chair.clone());
        prop_assume!(s.validate().is_ok());
        let nav = NavGrid::build(&s);
        let b = band(&s, Side::North);
        let h = generate_heatmap(&s, &nav, Point2::new(ux, uy), &b, &FeasibilityParams::default(), seed);
        for i in 0..b.cell_count() {
            let (c, r) = b.unflat(i);
            if chair.rect().distance_to(b.cell_center(c, r)) < s.robot.radius {
                prop_assert_eq!(h.successes[i], 0);
            }
            prop_assert!(h.value_at(i) >= 0.0 && h.value_at(i) <= 1.0);
        }
    }
}
