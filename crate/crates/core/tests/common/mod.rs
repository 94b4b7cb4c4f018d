//! Reference implementations used as oracles by the integration tests.
//!
//! Nothing in here calls the kernels under test: planes are read back pixel
//! by pixel and every algorithm is the slow textbook version.

#![allow(dead_code)]

use std::collections::VecDeque;

use ppanav_core::ppa::{BitPlane, BoundingBox, GrayPlane, SIZE};
use ppanav_core::vision::{AreaConfig, Direction, ObstacleReport};
use ppanav_core::world::VehicleState;
use rand::Rng;

pub type Grid = Vec<Vec<bool>>;

pub fn to_grid(b: &BitPlane) -> Grid {
    (0..SIZE).map(|x| (0..SIZE).map(|y| b.get(x, y)).collect()).collect()
}

pub fn from_grid(g: &Grid) -> BitPlane {
    BitPlane::from_fn(|x, y| g[x][y])
}

/// Random bits in the top-left `n × n` corner at the given density.
pub fn random_corner(rng: &mut impl Rng, n: usize, density: f64) -> Grid {
    let mut g = vec![vec![false; SIZE]; SIZE];
    for row in g.iter_mut().take(n) {
        for cell in row.iter_mut().take(n) {
            *cell = rng.gen_bool(density);
        }
    }
    g
}

const NEIGHBOURS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Breadth-first 4-connected fill of `mask` from every set seed pixel that
/// is also in the mask.
pub fn bfs_flood(seed: &Grid, mask: &Grid) -> Grid {
    let mut out = vec![vec![false; SIZE]; SIZE];
    let mut queue = VecDeque::new();
    for x in 0..SIZE {
        for y in 0..SIZE {
            if seed[x][y] && mask[x][y] {
                out[x][y] = true;
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in NEIGHBOURS {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            if nx < 0 || ny < 0 || nx >= SIZE as isize || ny >= SIZE as isize {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if mask[nx][ny] && !out[nx][ny] {
                out[nx][ny] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    out
}

pub fn minmax_bbox(g: &Grid) -> Option<BoundingBox> {
    let mut b: Option<BoundingBox> = None;
    for (x, row) in g.iter().enumerate() {
        for (y, &set) in row.iter().enumerate() {
            if !set {
                continue;
            }
            b = Some(match b {
                None => BoundingBox { x_min: x, x_max: x, y_min: y, y_max: y },
                Some(b) => BoundingBox {
                    x_min: b.x_min.min(x),
                    x_max: b.x_max.max(x),
                    y_min: b.y_min.min(y),
                    y_max: b.y_max.max(y),
                },
            });
        }
    }
    b
}

fn read(g: &Grid, x: isize, y: isize) -> bool {
    x >= 0 && y >= 0 && x < SIZE as isize && y < SIZE as isize && g[x as usize][y as usize]
}

/// 3×3 opening with out-of-array pixels read as 0.
pub fn naive_open(g: &Grid) -> Grid {
    let window = |g: &Grid, x: usize, y: usize, all: bool| {
        let mut hits = 0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                hits += read(g, x as isize + dx, y as isize + dy) as u32;
            }
        }
        if all {
            hits == 9
        } else {
            hits > 0
        }
    };
    let eroded: Grid = (0..SIZE).map(|x| (0..SIZE).map(|y| window(g, x, y, true)).collect()).collect();
    (0..SIZE).map(|x| (0..SIZE).map(|y| window(&eroded, x, y, false)).collect()).collect()
}

/// Connected-component labelling plus an exhaustive search for the admitted
/// component nearest to the robot pixel. Components are visited in the order
/// of their first pixel in row-major order and earlier ones win ties.
pub fn oracle_detect(frame: &GrayPlane, threshold: u8, areas: &AreaConfig) -> (ObstacleReport, Vec<BoundingBox>) {
    let bits: Grid = (0..SIZE).map(|x| (0..SIZE).map(|y| frame.get(x, y) < threshold).collect()).collect();
    let bits = naive_open(&bits);
    let mut label = vec![vec![usize::MAX; SIZE]; SIZE];
    let mut boxes: Vec<BoundingBox> = Vec::new();
    for x in 0..SIZE {
        for y in 0..SIZE {
            if !bits[x][y] || label[x][y] != usize::MAX {
                continue;
            }
            let id = boxes.len();
            let mut b = BoundingBox { x_min: x, x_max: x, y_min: y, y_max: y };
            let mut queue = VecDeque::from([(x, y)]);
            label[x][y] = id;
            while let Some((cx, cy)) = queue.pop_front() {
                b.x_min = b.x_min.min(cx);
                b.x_max = b.x_max.max(cx);
                b.y_min = b.y_min.min(cy);
                b.y_max = b.y_max.max(cy);
                for (dx, dy) in NEIGHBOURS {
                    let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                    if read(&bits, nx, ny) && label[nx as usize][ny as usize] == usize::MAX {
                        label[nx as usize][ny as usize] = id;
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
            boxes.push(b);
        }
    }

    let mut best = ObstacleReport { closest_x: 0.0, closest_y: 0.0, closest_dis: 1.0e6, direction: Direction::None };
    for b in &boxes {
        let (bx, by) = (b.x_max, (b.y_min + b.y_max) / 2);
        let admitted =
            bx > areas.distant_x_max && bx < areas.forbidden_x_min && by > areas.safe_right.1 && by < areas.safe_left.0;
        if !admitted {
            continue;
        }
        let dis = ((255.0 - bx as f64).powi(2) + (127.0 - by as f64).powi(2)).sqrt();
        if dis < best.closest_dis {
            let direction = if by >= areas.right.0 && by <= areas.right.1 {
                Direction::Right
            } else if by >= areas.left.0 && by <= areas.left.1 {
                Direction::Left
            } else {
                Direction::None
            };
            best = ObstacleReport { closest_x: bx as f64, closest_y: by as f64, closest_dis: dis, direction };
        }
    }
    (best, boxes)
}

/// Light frame with a handful of dark rectangles and ellipses plus a little
/// salt noise that the opening should remove.
pub fn random_blob_frame(rng: &mut impl Rng) -> GrayPlane {
    let mut g = GrayPlane::filled(200);
    let blobs = rng.gen_range(1..=8);
    for _ in 0..blobs {
        let (cx, cy) = (rng.gen_range(0..SIZE) as isize, rng.gen_range(0..SIZE) as isize);
        let (hx, hy) = (rng.gen_range(1..30) as isize, rng.gen_range(1..30) as isize);
        let ellipse = rng.gen_bool(0.5);
        let dark = rng.gen_range(0..100u8);
        for x in (cx - hx).max(0)..=(cx + hx).min(SIZE as isize - 1) {
            for y in (cy - hy).max(0)..=(cy + hy).min(SIZE as isize - 1) {
                let (u, v) = ((x - cx) as f64 / hx as f64, (y - cy) as f64 / hy as f64);
                if !ellipse || u * u + v * v <= 1.0 {
                    g.set(x as usize, y as usize, dark);
                }
            }
        }
    }
    for _ in 0..rng.gen_range(0..200) {
        g.set(rng.gen_range(0..SIZE), rng.gen_range(0..SIZE), 20);
    }
    g
}

/// Pinhole camera built directly from its geometric description: lens 0.5 m
/// ahead of the vehicle origin and 1 m up, optical axis pitched 38° below
/// the horizon, 60° field of view, image columns growing to the left.
pub fn oracle_project(v: &VehicleState, p: [f64; 3]) -> Option<(f64, f64)> {
    let (s, c) = v.heading.sin_cos();
    let cam = [v.x + 0.5 * c, v.y + 0.5 * s, 1.0];
    let pitch = 38f64.to_radians();
    let fwd = [c * pitch.cos(), s * pitch.cos(), -pitch.sin()];
    let left = [-s, c, 0.0];
    let up = [c * pitch.sin(), s * pitch.sin(), pitch.cos()];
    let d = [p[0] - cam[0], p[1] - cam[1], p[2] - cam[2]];
    let dot = |a: [f64; 3]| a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
    let z = dot(fwd);
    if z < 0.05 {
        return None;
    }
    let f = 128.0 / 30f64.to_radians().tan();
    Some((128.0 - f * dot(up) / z, 128.0 + f * dot(left) / z))
}

/// Pixel rows and columns whose centres fall within the projected extent of
/// a cone, sampled densely. Returns `(row_min, row_max, col_min, col_max)`.
pub fn oracle_cone_extent(v: &VehicleState, cx: f64, cy: f64, r: f64, h: f64) -> (i64, i64, i64, i64) {
    let mut pts = vec![oracle_project(v, [cx, cy, h]).expect("apex in front")];
    for k in 0..720 {
        let a = k as f64 * std::f64::consts::TAU / 720.0;
        pts.push(oracle_project(v, [cx + r * a.cos(), cy + r * a.sin(), 0.0]).expect("base in front"));
    }
    let fold = |f: fn(&(f64, f64)) -> f64, min: bool| {
        pts.iter()
            .map(f)
            .fold(if min { f64::INFINITY } else { f64::NEG_INFINITY }, if min { f64::min } else { f64::max })
    };
    let px = |lo: f64, hi: f64| (((lo - 0.5).ceil() as i64).max(0), ((hi - 0.5).floor() as i64).min(SIZE as i64 - 1));
    let (r0, r1) = px(fold(|p| p.0, true), fold(|p| p.0, false));
    let (c0, c1) = px(fold(|p| p.1, true), fold(|p| p.1, false));
    (r0, r1, c0, c1)
}

/// Extent of the pixels differing from the ground value.
pub fn rendered_extent(g: &GrayPlane, ground: u8) -> Option<(i64, i64, i64, i64)> {
    let grid: Grid = (0..SIZE).map(|x| (0..SIZE).map(|y| g.get(x, y) != ground).collect()).collect();
    minmax_bbox(&grid).map(|b| (b.x_min as i64, b.x_max as i64, b.y_min as i64, b.y_max as i64))
}

/// A well-formed message of a random type. Frames are filled from the rng.
pub fn random_message(rng: &mut impl Rng) -> ppanav_core::bridge::Message {
    use ppanav_core::bridge::Message;
    let f = |rng: &mut dyn rand::RngCore| {
        f32::from_bits(rng.next_u32() & 0x7f7f_ffff) * if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 }
    };
    match rng.gen_range(0..11) {
        0 => {
            let mut px = vec![0u8; SIZE * SIZE];
            rng.fill(&mut px[..]);
            Message::Frame(GrayPlane::from_vec(px).expect("full frame"))
        }
        1 => Message::Report { closest_x: f(rng), closest_y: f(rng), closest_dis: f(rng), direction: f(rng) },
        2 => {
            let len = rng.gen_range(0..40);
            let key: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
            Message::ParamSet { key, value: f(rng) }
        }
        3 => Message::GetPose,
        4 => Message::Pose { x: f(rng), y: f(rng), heading: f(rng) },
        5 => Message::SetSteer(f(rng)),
        6 => Message::SetSpeed(f(rng)),
        7 => Message::Step,
        8 => Message::StepDone { collision: rng.gen(), clearance: f(rng) },
        9 => Message::GetFrame,
        _ => Message::Status { mode: rng.gen(), value: f(rng) },
    }
}
