//! 2D world: cones, targets, an Ackermann vehicle and its forward camera.
//!
//! World frame is right-handed with z up. The vehicle body frame has x
//! forward, y left. The camera extrinsics are expressed in the robot frame
//! used by the original simulator scene, whose axes are (right, forward, up).

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ppa::{GrayPlane, SIZE};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("timestep must be positive, got {0}")]
    BadTimestep(f64),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("reading scene {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing scene: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Physical constants of the vehicle and integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleConfig {
    pub wheelbase: f64,
    pub vehicle_radius: f64,
    pub steer_limit: f64,
    pub wheel_radius: f64,
    pub dt: f64,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        Self { wheelbase: 0.6, vehicle_radius: 0.3, steer_limit: 30f64.to_radians(), wheel_radius: 0.1, dt: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub steer: f64,
    pub speed: f64,
}

impl VehicleState {
    pub fn at(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: wrap_angle(heading), steer: 0.0, speed: 0.0 }
    }
}

/// Kinematic bicycle step with the steering command clamped to the limit.
pub fn step_vehicle(
    v: &VehicleState,
    steer_cmd: f64,
    dt: f64,
    cfg: &VehicleConfig,
) -> Result<VehicleState, WorldError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(WorldError::BadTimestep(dt));
    }
    let steer = steer_cmd.clamp(-cfg.steer_limit, cfg.steer_limit);
    Ok(VehicleState {
        x: v.x + v.speed * v.heading.cos() * dt,
        y: v.y + v.speed * v.heading.sin() * dt,
        heading: wrap_angle(v.heading + v.speed / cfg.wheelbase * steer.tan() * dt),
        steer,
        speed: v.speed,
    })
}

fn default_cone_albedo() -> u8 {
    30
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub cx: f64,
    pub cy: f64,
    #[serde(rename = "radius")]
    pub base_radius: f64,
    pub height: f64,
    #[serde(default = "default_cone_albedo")]
    pub albedo: u8,
}

impl Cone {
    pub fn new(cx: f64, cy: f64, base_radius: f64, height: f64) -> Self {
        Self { cx, cy, base_radius, height, albedo: default_cone_albedo() }
    }
}

/// Initial vehicle placement in a scene file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

fn default_ground_albedo() -> u8 {
    200
}

/// Scene description, loaded from and saved to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldScene {
    pub cones: Vec<Cone>,
    pub targets: Vec<[f64; 2]>,
    pub vehicle: StartPose,
    /// `[xmin, ymin, xmax, ymax]`
    pub arena: [f64; 4],
    #[serde(default = "default_ground_albedo")]
    pub ground_albedo: u8,
}

impl WorldScene {
    pub fn empty(arena: [f64; 4]) -> Self {
        Self {
            cones: Vec::new(),
            targets: Vec::new(),
            vehicle: StartPose { x: 0.0, y: 0.0, heading: 0.0 },
            arena,
            ground_albedo: default_ground_albedo(),
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let [x0, y0, x1, y1] = self.arena;
        if !(x0 < x1 && y0 < y1) {
            return Err(WorldError::InvalidScene(format!("degenerate arena {:?}", self.arena)));
        }
        for (i, c) in self.cones.iter().enumerate() {
            if !(c.base_radius > 0.0 && c.height > 0.0) {
                return Err(WorldError::InvalidScene(format!("cone {i} needs positive radius and height")));
            }
        }
        if !self.contains(self.vehicle.x, self.vehicle.y) {
            return Err(WorldError::InvalidScene("vehicle starts outside the arena".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let [x0, y0, x1, y1] = self.arena;
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, WorldError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| WorldError::Io { path: path.display().to_string(), source })?;
        let scene: Self = serde_json::from_str(&text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serialises");
        s.push('\n');
        s
    }
}

pub type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn rot_x(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

fn rot_y(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn rot_z(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Pinhole camera mounted on the vehicle.
///
/// `rotation_deg` holds intrinsic X, Y, Z Euler angles applied in that
/// order, so the camera-to-robot rotation is `Rx · Ry · Rz`. The optical
/// axis is camera +z. Image columns grow along camera +x and rows grow
/// along camera −y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// Robot-to-camera offset `[right, forward, up]` in metres.
    pub translation: [f64; 3],
    pub rotation_deg: [f64; 3],
    pub fov_deg: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self { translation: [0.0, 0.5, 1.0], rotation_deg: [-128.0, 0.0, -180.0], fov_deg: 60.0 }
    }
}

/// Near-plane depth below which geometry is culled.
const NEAR: f64 = 0.05;
const BASE_SAMPLES: usize = 48;

impl CameraModel {
    /// Focal length in pixels for the fixed 256-pixel resolution.
    pub fn focal_px(&self) -> f64 {
        (SIZE as f64 / 2.0) / (self.fov_deg.to_radians() / 2.0).tan()
    }

    /// Columns of the result are the camera axes expressed in the robot frame.
    pub fn rotation(&self) -> Mat3 {
        let [a, b, c] = self.rotation_deg.map(f64::to_radians);
        mat_mul(&mat_mul(&rot_x(a), &rot_y(b)), &rot_z(c))
    }

    /// World point to camera coordinates for a vehicle at `v`.
    pub fn to_camera(&self, v: &VehicleState, p: [f64; 3]) -> [f64; 3] {
        let r = self.rotation();
        self.to_camera_with(&r, v, p)
    }

    fn to_camera_with(self, r: &Mat3, v: &VehicleState, p: [f64; 3]) -> [f64; 3] {
        let (dx, dy) = (p[0] - v.x, p[1] - v.y);
        let (s, c) = v.heading.sin_cos();
        let fwd = c * dx + s * dy;
        let left = -s * dx + c * dy;
        let q = [-left - self.translation[0], fwd - self.translation[1], p[2] - self.translation[2]];
        // R^T q
        [
            r[0][0] * q[0] + r[1][0] * q[1] + r[2][0] * q[2],
            r[0][1] * q[0] + r[1][1] * q[1] + r[2][1] * q[2],
            r[0][2] * q[0] + r[1][2] * q[1] + r[2][2] * q[2],
        ]
    }

    /// Continuous image coordinates `(row, col)`; pixel `(i, j)` covers
    /// `[i, i+1) × [j, j+1)`. `None` for points closer than the near plane.
    pub fn project(&self, v: &VehicleState, p: [f64; 3]) -> Option<(f64, f64)> {
        let pc = self.to_camera(v, p);
        self.project_camera(pc)
    }

    fn project_camera(&self, pc: [f64; 3]) -> Option<(f64, f64)> {
        if pc[2] < NEAR {
            return None;
        }
        let f = self.focal_px();
        let half = SIZE as f64 / 2.0;
        Some((half - f * pc[1] / pc[2], half + f * pc[0] / pc[2]))
    }
}

/// Outline points of a cone in world coordinates: apex first, then the base
/// circle.
fn cone_outline(cone: &Cone) -> impl Iterator<Item = [f64; 3]> + '_ {
    std::iter::once([cone.cx, cone.cy, cone.height]).chain((0..BASE_SAMPLES).map(move |k| {
        let a = 2.0 * PI * k as f64 / BASE_SAMPLES as f64;
        [cone.cx + cone.base_radius * a.cos(), cone.cy + cone.base_radius * a.sin(), 0.0]
    }))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; points are `(row, col)`.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite projections"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Fills pixels whose centres fall inside a convex polygon.
fn fill_convex(img: &mut GrayPlane, poly: &[(f64, f64)], value: u8) {
    if poly.len() < 3 {
        return;
    }
    let rmin = poly.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let rmax = poly.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let first = (rmin - 0.5).ceil().max(0.0);
    let last = (rmax - 0.5).floor().min(SIZE as f64 - 1.0);
    if first > last {
        return;
    }
    for row in first as usize..=last as usize {
        let yc = row as f64 + 0.5;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..poly.len() {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let (top, bot) = if a.0 <= b.0 { (a, b) } else { (b, a) };
            if yc < top.0 || yc > bot.0 || top.0 == bot.0 {
                continue;
            }
            let t = (yc - top.0) / (bot.0 - top.0);
            let col = top.1 + t * (bot.1 - top.1);
            lo = lo.min(col);
            hi = hi.max(col);
        }
        if lo > hi {
            continue;
        }
        let c0 = (lo - 0.5).ceil().max(0.0);
        let c1 = (hi - 0.5).floor().min(SIZE as f64 - 1.0);
        if c0 > c1 {
            continue;
        }
        img.row_mut(row)[c0 as usize..=c1 as usize].fill(value);
    }
}

type Silhouette = (f64, Vec<(f64, f64)>, u8);

/// Renders the camera view: each cone's projected silhouette (convex hull of
/// apex and base circle) over a uniform ground, nearer cones painted last.
pub fn render_frame(scene: &WorldScene, vehicle: &VehicleState, camera: &CameraModel) -> GrayPlane {
    let mut img = GrayPlane::filled(scene.ground_albedo);
    let r = camera.rotation();
    // (depth, hull, albedo)
    let mut visible: Vec<Silhouette> = Vec::new();
    'cones: for cone in &scene.cones {
        let mut pts = Vec::with_capacity(BASE_SAMPLES + 1);
        for p in cone_outline(cone) {
            match camera.project_camera(camera.to_camera_with(&r, vehicle, p)) {
                Some(uv) => pts.push(uv),
                None => continue 'cones,
            }
        }
        let depth = camera.to_camera_with(&r, vehicle, [cone.cx, cone.cy, 0.0])[2];
        visible.push((depth, convex_hull(pts), cone.albedo));
    }
    visible.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (_, hull, albedo) in &visible {
        fill_convex(&mut img, hull, *albedo);
    }
    img
}

/// Distance from the vehicle's footprint to the nearest cone base;
/// negative when overlapping. `+∞` without cones.
pub fn clearance(scene: &WorldScene, x: f64, y: f64, cfg: &VehicleConfig) -> f64 {
    scene
        .cones
        .iter()
        .map(|c| (c.cx - x).hypot(c.cy - y) - c.base_radius - cfg.vehicle_radius)
        .fold(f64::INFINITY, f64::min)
}

pub fn check_collision(scene: &WorldScene, x: f64, y: f64, cfg: &VehicleConfig) -> bool {
    scene.cones.iter().any(|c| (c.cx - x).hypot(c.cy - y) < c.base_radius + cfg.vehicle_radius)
}

/// Result of advancing the world one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub tick: u64,
    pub collision: bool,
    pub clearance: f64,
}

/// The simulated world: one owner advances it, readers copy state out.
#[derive(Debug, Clone)]
pub struct World {
    pub scene: WorldScene,
    pub vehicle: VehicleState,
    pub config: VehicleConfig,
    pub camera: CameraModel,
    steer_cmd: f64,
    tick: u64,
}

impl World {
    pub fn new(scene: WorldScene, config: VehicleConfig, camera: CameraModel) -> Self {
        let v = scene.vehicle;
        Self { vehicle: VehicleState::at(v.x, v.y, v.heading), scene, config, camera, steer_cmd: 0.0, tick: 0 }
    }

    pub fn get_pose(&self) -> (f64, f64, f64) {
        (self.vehicle.x, self.vehicle.y, self.vehicle.heading)
    }

    pub fn set_steer(&mut self, radians: f64) {
        let s = radians.clamp(-self.config.steer_limit, self.config.steer_limit);
        self.steer_cmd = s;
        self.vehicle.steer = s;
    }

    pub fn steer(&self) -> f64 {
        self.vehicle.steer
    }

    pub fn set_speed(&mut self, speed: f64) {
        self.vehicle.speed = speed;
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn step(&mut self) -> StepOutcome {
        self.vehicle = step_vehicle(&self.vehicle, self.steer_cmd, self.config.dt, &self.config)
            .expect("configured dt is positive");
        self.tick += 1;
        StepOutcome {
            tick: self.tick,
            collision: self.check_collision(),
            clearance: clearance(&self.scene, self.vehicle.x, self.vehicle.y, &self.config),
        }
    }

    pub fn render(&self) -> GrayPlane {
        render_frame(&self.scene, &self.vehicle, &self.camera)
    }

    pub fn check_collision(&self) -> bool {
        check_collision(&self.scene, self.vehicle.x, self.vehicle.y, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppa::{scan_bounding_box, threshold, Polarity};

    fn cfg() -> VehicleConfig {
        VehicleConfig::default()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5 + 4.0 * PI) - 0.5).abs() < 1e-12);
        assert!(wrap_angle(-PI + 1e-9) < 0.0);
    }

    #[test]
    fn straight_step() {
        let v = VehicleState { speed: 1.0, ..VehicleState::at(0.0, 0.0, 0.0) };
        let n = step_vehicle(&v, 0.0, 1.0, &cfg()).unwrap();
        assert_eq!((n.x, n.y, n.heading), (1.0, 0.0, 0.0));
    }

    #[test]
    fn steer_is_clamped() {
        let v = VehicleState::at(0.0, 0.0, 0.0);
        let n = step_vehicle(&v, 10.0, 0.05, &cfg()).unwrap();
        assert!((n.steer - std::f64::consts::FRAC_PI_6).abs() < 1e-4);
        let n = step_vehicle(&v, -10.0, 0.05, &cfg()).unwrap();
        assert!((n.steer + std::f64::consts::FRAC_PI_6).abs() < 1e-4);
    }

    #[test]
    fn non_positive_dt_rejected() {
        let v = VehicleState::at(0.0, 0.0, 0.0);
        assert!(matches!(step_vehicle(&v, 0.0, 0.0, &cfg()), Err(WorldError::BadTimestep(_))));
        assert!(step_vehicle(&v, 0.0, -1.0, &cfg()).is_err());
        assert!(step_vehicle(&v, 0.0, f64::NAN, &cfg()).is_err());
    }

    #[test]
    fn remote_style_accessors() {
        let mut w = World::new(WorldScene::empty([-10.0, -10.0, 10.0, 10.0]), cfg(), CameraModel::default());
        w.set_steer(0.2);
        assert_eq!(w.steer(), 0.2);
        w.set_steer(1.0);
        assert!((w.steer() - std::f64::consts::FRAC_PI_6).abs() < 1e-4);
        w.set_steer(0.0);
        w.set_speed(0.5);
        for _ in 0..10 {
            w.step();
        }
        let (x, y, h) = w.get_pose();
        assert!((x - 10.0 * 0.5 * 0.05).abs() < 1e-12);
        assert_eq!((y, h), (0.0, 0.0));
        assert_eq!(w.tick(), 10);
    }

    #[test]
    fn camera_looks_forward_and_down() {
        let cam = CameraModel::default();
        let r = cam.rotation();
        let optical = [r[0][2], r[1][2], r[2][2]];
        let pitch = (-optical[2]).atan2(optical[1]).to_degrees();
        assert!(optical[0].abs() < 1e-12);
        assert!((pitch - 38.0).abs() < 1e-9, "pitch {pitch}");
        assert!((cam.focal_px() - 221.7025).abs() < 1e-3);
    }

    #[test]
    fn left_points_map_to_high_columns() {
        let cam = CameraModel::default();
        let v = VehicleState::at(0.0, 0.0, 0.0);
        let (_, c_left) = cam.project(&v, [2.0, 0.5, 0.0]).unwrap();
        let (_, c_right) = cam.project(&v, [2.0, -0.5, 0.0]).unwrap();
        assert!(c_left > 128.0 && c_right < 128.0);
        let (r_near, _) = cam.project(&v, [1.5, 0.0, 0.0]).unwrap();
        let (r_far, _) = cam.project(&v, [3.0, 0.0, 0.0]).unwrap();
        assert!(r_near > r_far);
    }

    #[test]
    fn empty_scene_renders_ground() {
        let scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        let img = render_frame(&scene, &VehicleState::at(0.0, 0.0, 0.0), &CameraModel::default());
        assert_eq!(img, GrayPlane::filled(200));
    }

    #[test]
    fn cone_ahead_is_centered() {
        let mut scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        scene.cones.push(Cone::new(2.5, 0.0, 0.2, 0.5));
        let img = render_frame(&scene, &VehicleState::at(0.0, 0.0, 0.0), &CameraModel::default());
        let bb = scan_bounding_box(&threshold(&img, 100, Polarity::Below)).unwrap();
        let mid = bb.bottom_center().y;
        assert!(mid == 127 || mid == 128, "mid {mid} box {bb:?}");
    }

    #[test]
    fn cone_behind_is_culled() {
        let mut scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        scene.cones.push(Cone::new(-2.0, 0.0, 0.2, 0.5));
        let img = render_frame(&scene, &VehicleState::at(0.0, 0.0, 0.0), &CameraModel::default());
        assert_eq!(img, GrayPlane::filled(200));
    }

    #[test]
    fn nearer_cone_painted_over_farther() {
        let mut scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        scene.cones.push(Cone { albedo: 10, ..Cone::new(2.0, 0.0, 0.3, 1.0) });
        scene.cones.push(Cone { albedo: 60, ..Cone::new(4.0, 0.0, 0.3, 2.0) });
        let v = VehicleState::at(0.0, 0.0, 0.0);
        let cam = CameraModel::default();
        let img = render_frame(&scene, &v, &cam);
        let alone = |i: usize| {
            let mut s = scene.clone();
            s.cones = vec![scene.cones[i]];
            render_frame(&s, &v, &cam)
        };
        let (near, far) = (alone(0), alone(1));
        let mut overlap = 0;
        for x in 0..SIZE {
            for y in 0..SIZE {
                if near.get(x, y) == 10 && far.get(x, y) == 60 {
                    overlap += 1;
                    assert_eq!(img.get(x, y), 10);
                }
            }
        }
        assert!(overlap > 0);
        // swapping list order does not change the result
        scene.cones.reverse();
        assert_eq!(render_frame(&scene, &v, &cam), img);
    }

    #[test]
    fn collision_cases() {
        let mut scene = WorldScene::empty([-20.0, -20.0, 20.0, 20.0]);
        scene.cones.push(Cone::new(10.0, 0.0, 0.2, 0.5));
        assert!(!check_collision(&scene, 0.0, 0.0, &cfg()));
        assert!(check_collision(&scene, 10.0, 0.0, &cfg()));
        assert!((clearance(&scene, 0.0, 0.0, &cfg()) - 9.5).abs() < 1e-12);
        assert_eq!(clearance(&WorldScene::empty([-1.0, -1.0, 1.0, 1.0]), 0.0, 0.0, &cfg()), f64::INFINITY);
    }

    #[test]
    fn scene_json_round_trip() {
        let mut scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        scene.cones.push(Cone::new(1.0, 2.0, 0.2, 0.5));
        scene.targets.push([3.0, 0.0]);
        let back: WorldScene = serde_json::from_str(&scene.to_json()).unwrap();
        assert_eq!(back, scene);
        let minimal = r#"{"cones":[{"cx":1,"cy":2,"radius":0.2,"height":0.5}],
            "targets":[[3,0]],"vehicle":{"x":0,"y":0,"heading":0},"arena":[-5,-5,5,5]}"#;
        let parsed: WorldScene = serde_json::from_str(minimal).unwrap();
        assert_eq!(parsed, scene);
    }

    #[test]
    fn scene_validation() {
        let mut scene = WorldScene::empty([-5.0, -5.0, 5.0, 5.0]);
        assert!(scene.validate().is_ok());
        scene.cones.push(Cone::new(1.0, 1.0, 0.0, 0.5));
        assert!(scene.validate().is_err());
        let mut scene = WorldScene::empty([5.0, -5.0, -5.0, 5.0]);
        assert!(scene.validate().is_err());
        scene.arena = [1.0, 1.0, 2.0, 2.0];
        assert!(scene.validate().is_err());
    }
}
