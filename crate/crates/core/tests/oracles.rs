mod common;

use common::*;
use ppanav_core::ppa::{self, GrayPlane, SIZE};
use ppanav_core::vision::{detect_closest, detect_with, AreaConfig, VisionParams};
use ppanav_core::world::{render_frame, Cone, VehicleState, WorldScene};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn flood_matches_bfs_on_random_planes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let mask = random_corner(&mut rng, 64, [0.3, 0.5, 0.6, 0.75][i % 4]);
        let mut seed = vec![vec![false; SIZE]; SIZE];
        for _ in 0..rng.gen_range(1..4) {
            seed[rng.gen_range(0..64)][rng.gen_range(0..64)] = true;
        }
        let got = ppa::flood(&from_grid(&seed), &from_grid(&mask));
        assert_eq!(to_grid(&got), bfs_flood(&seed, &mask), "plane {i}");
    }
}

#[test]
fn flood_spans_the_whole_array() {
    // a full-size maze exercises word boundaries and the last row/column
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let mask = random_corner(&mut rng, SIZE, 0.62);
        let mut seed = vec![vec![false; SIZE]; SIZE];
        seed[rng.gen_range(0..SIZE)][rng.gen_range(0..SIZE)] = true;
        let got = ppa::flood(&from_grid(&seed), &from_grid(&mask));
        assert_eq!(to_grid(&got), bfs_flood(&seed, &mask));
    }
}

#[test]
fn bbox_matches_minmax_on_random_planes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..200 {
        let density = [0.001, 0.01, 0.2][i % 3];
        let mut g = random_corner(&mut rng, 64, density);
        // shift some planes around so bounds reach every word of a row
        if i % 2 == 0 {
            let off = rng.gen_range(0..SIZE - 64);
            let mut moved = vec![vec![false; SIZE]; SIZE];
            for x in 0..64 {
                for y in 0..64 {
                    moved[(x + off) % SIZE][(y + 3 * off) % SIZE] = g[x][y];
                }
            }
            g = moved;
        }
        let got = ppa::scan_bounding_box(&from_grid(&g)).ok();
        assert_eq!(got, minmax_bbox(&g), "plane {i}");
    }
}

#[test]
fn opening_matches_naive_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let g = random_corner(&mut rng, SIZE, 0.7);
        assert_eq!(to_grid(&ppa::filter_noise(&from_grid(&g))), naive_open(&g));
    }
}

#[test]
fn first_event_is_row_major_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let g = random_corner(&mut rng, SIZE, 0.00005);
        let expected = (0..SIZE).flat_map(|x| (0..SIZE).map(move |y| (x, y))).find(|&(x, y)| g[x][y]);
        let got = ppa::scan_first_event(&from_grid(&g)).map(|c| (c.x, c.y));
        assert_eq!(got, expected);
    }
}

#[test]
fn detection_matches_component_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let areas = AreaConfig::default();
    for i in 0..100 {
        let frame = random_blob_frame(&mut rng);
        let (want, boxes) = oracle_detect(&frame, 100, &areas);
        let got = detect_with(&frame, &VisionParams::default());
        assert_eq!(got.components, boxes, "frame {i}");
        let r = detect_closest(&frame, 100, &areas);
        assert_eq!(
            (r.closest_x, r.closest_y, r.direction),
            (want.closest_x, want.closest_y, want.direction),
            "frame {i}"
        );
        assert!((r.closest_dis - want.closest_dis).abs() <= 1e-6, "frame {i}");
    }
}

#[test]
fn equidistant_tie_keeps_first_found() {
    // two blobs mirrored about column 127: same distance, the upper-left one
    // is met first by the row-major scan
    let mut g = GrayPlane::filled(200);
    for x in 150..=160 {
        for y in 100..=110 {
            g.set(x, y, 30);
            g.set(x, 254 - y, 30);
        }
    }
    let r = detect_closest(&g, 100, &AreaConfig::default());
    let (want, _) = oracle_detect(&g, 100, &AreaConfig::default());
    assert_eq!(r, want);
    assert_eq!(r.closest_y, 105.0);
}

#[test]
fn render_matches_point_projection() {
    let v = VehicleState::at(0.0, 0.0, 0.0);
    let camera = ppanav_core::CameraModel::default();
    for &(cx, cy, r, h) in &[(2.0, 0.0, 0.2, 0.6), (4.0, 0.0, 0.2, 0.6), (3.0, 0.8, 0.15, 0.5), (5.0, -1.0, 0.3, 1.0)] {
        let mut scene = WorldScene::empty([-10.0, -10.0, 10.0, 10.0]);
        scene.cones.push(Cone::new(cx, cy, r, h));
        let img = render_frame(&scene, &v, &camera);
        let got = rendered_extent(&img, 200).expect("cone visible");
        let want = oracle_cone_extent(&v, cx, cy, r, h);
        for (g, w) in [(got.0, want.0), (got.1, want.1), (got.2, want.2), (got.3, want.3)] {
            assert!((g - w).abs() <= 1, "cone at ({cx}, {cy}): rendered {got:?}, oracle {want:?}");
        }
    }
}

#[test]
fn nearer_cone_is_taller_and_lower() {
    let camera = ppanav_core::CameraModel::default();
    let v = VehicleState::at(0.0, 0.0, 0.0);
    for d in [1.5, 2.0, 2.5, 3.0] {
        let extent = |dist: f64| {
            let mut scene = WorldScene::empty([-10.0, -10.0, 10.0, 10.0]);
            scene.cones.push(Cone::new(dist, 0.0, 0.15, 0.5));
            let g = rendered_extent(&render_frame(&scene, &v, &camera), 200).unwrap();
            let o = oracle_cone_extent(&v, dist, 0.0, 0.15, 0.5);
            (g, o)
        };
        let ((near, onear), (far, ofar)) = (extent(d), extent(2.0 * d));
        assert!(near.1 - near.0 > far.1 - far.0, "d = {d}");
        assert!(near.1 > far.1, "d = {d}");
        assert!(onear.1 - onear.0 > ofar.1 - ofar.0 && onear.1 > ofar.1);
    }
}

#[test]
fn head_on_approach_bottom_row_never_rises() {
    let camera = ppanav_core::CameraModel::default();
    let mut scene = WorldScene::empty([-10.0, -10.0, 10.0, 10.0]);
    scene.cones.push(Cone::new(6.0, 0.0, 0.15, 0.5));
    let mut last = 0;
    for k in 0..100 {
        let v = VehicleState::at(k as f64 * 0.05, 0.0, 0.0);
        if let Some(e) = rendered_extent(&render_frame(&scene, &v, &camera), 200) {
            assert!(e.1 >= last, "step {k}: {} < {last}", e.1);
            last = e.1;
        }
    }
    assert!(last > 200);
}

#[test]
fn dead_ahead_is_centred() {
    let camera = ppanav_core::CameraModel::default();
    let mut scene = WorldScene::empty([-10.0, -10.0, 10.0, 10.0]);
    scene.cones.push(Cone::new(3.0, 0.0, 0.2, 0.6));
    let (.., c0, c1) = rendered_extent(&render_frame(&scene, &VehicleState::at(0.0, 0.0, 0.0), &camera), 200).unwrap();
    assert!(matches!((c0 + c1) / 2, 127 | 128));
    assert!(oracle_project(&VehicleState::at(0.0, 0.0, 0.0), [3.0, 0.0, 0.0]).unwrap().1 == 128.0);
}
