//! Seeded scene generators for the experiment layouts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::world::{Cone, StartPose, WorldScene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    /// Two concentric rings of cones with the vehicle in the gap between.
    Ellipses,
    /// Straight lane lined with cones, one obstacle mid-lane, one target.
    Corridor,
    /// Uniformly scattered cones and one target.
    Scatter,
    /// One cone on the straight line between start and target.
    Course,
    /// Three targets on a square with a cone on every leg.
    Tour,
}

impl std::str::FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ellipses" => Ok(SceneKind::Ellipses),
            "corridor" => Ok(SceneKind::Corridor),
            "scatter" => Ok(SceneKind::Scatter),
            "course" => Ok(SceneKind::Course),
            "tour" => Ok(SceneKind::Tour),
            _ => Err(format!("unknown scene kind {s:?} (ellipses, corridor, scatter, course, tour)")),
        }
    }
}

/// One ring of the ellipse layout: semi-axes along x and y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub a: f64,
    pub b: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipseLayout {
    pub inner: Ring,
    pub outer: Ring,
    /// Maximum radial displacement of a cone off its ring, metres.
    pub jitter: f64,
    pub cone_radius: f64,
    pub cone_height: f64,
}

impl Default for EllipseLayout {
    fn default() -> Self {
        Self {
            inner: Ring { a: 3.0, b: 2.2, count: 16 },
            outer: Ring { a: 8.0, b: 7.0, count: 44 },
            jitter: 0.1,
            cone_radius: 0.15,
            cone_height: 0.5,
        }
    }
}

impl EllipseLayout {
    /// Normalised radius `sqrt((x/a)² + (y/b)²)` of a point against a ring.
    pub fn ring_radius(ring: &Ring, x: f64, y: f64) -> f64 {
        ((x / ring.a).powi(2) + (y / ring.b).powi(2)).sqrt()
    }

    pub fn build(&self, seed: u64) -> WorldScene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        let mut cones = Vec::with_capacity(self.inner.count + self.outer.count);
        for ring in [self.inner, self.outer] {
            for k in 0..ring.count {
                let t = phase + 2.0 * PI * k as f64 / ring.count as f64;
                // radial displacement along the outward direction, bounded by jitter
                let (x, y) = (ring.a * t.cos(), ring.b * t.sin());
                let norm = x.hypot(y);
                let d = rng.gen_range(-self.jitter..=self.jitter);
                cones.push(Cone::new(x + d * x / norm, y + d * y / norm, self.cone_radius, self.cone_height));
            }
        }
        let mid = (self.inner.a + self.outer.a) / 2.0;
        let arena_x = self.outer.a + 2.0;
        let arena_y = self.outer.b + 2.0;
        WorldScene {
            cones,
            targets: Vec::new(),
            vehicle: StartPose { x: mid, y: 0.0, heading: PI / 2.0 },
            arena: [-arena_x, -arena_y, arena_x, arena_y],
            ground_albedo: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorridorLayout {
    pub length: f64,
    pub half_width: f64,
    pub spacing: f64,
    pub cone_radius: f64,
    pub cone_height: f64,
}

impl Default for CorridorLayout {
    fn default() -> Self {
        Self { length: 14.0, half_width: 2.5, spacing: 1.0, cone_radius: 0.15, cone_height: 0.5 }
    }
}

impl CorridorLayout {
    pub fn build(&self, seed: u64) -> WorldScene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cones = Vec::new();
        let n = (self.length / self.spacing).floor() as usize;
        for k in 0..=n {
            let x = k as f64 * self.spacing;
            for side in [-1.0, 1.0] {
                let jx = rng.gen_range(-0.1..=0.1);
                cones.push(Cone::new(x + jx, side * self.half_width, self.cone_radius, self.cone_height));
            }
        }
        let offset = rng.gen_range(-0.3..=0.3);
        cones.push(Cone::new(self.length / 2.0, offset, self.cone_radius, self.cone_height));
        WorldScene {
            cones,
            targets: vec![[self.length - 1.0, 0.0]],
            vehicle: StartPose { x: 0.0, y: 0.0, heading: 0.0 },
            arena: [-2.0, -self.half_width - 1.0, self.length + 2.0, self.half_width + 1.0],
            ground_albedo: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterLayout {
    pub count: usize,
    pub half_extent: f64,
    /// No cone centre within this distance of the start or the target.
    pub keep_out: f64,
    pub cone_radius: f64,
    pub cone_height: f64,
}

impl Default for ScatterLayout {
    fn default() -> Self {
        Self { count: 12, half_extent: 8.0, keep_out: 1.5, cone_radius: 0.15, cone_height: 0.5 }
    }
}

impl ScatterLayout {
    pub fn build(&self, seed: u64) -> WorldScene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = (-self.half_extent + 1.0, 0.0);
        let target = (self.half_extent - 1.0, 0.0);
        let mut cones = Vec::with_capacity(self.count);
        while cones.len() < self.count {
            let x = rng.gen_range(-self.half_extent..self.half_extent);
            let y = rng.gen_range(-self.half_extent..self.half_extent);
            let clear = |p: (f64, f64)| (x - p.0).hypot(y - p.1) >= self.keep_out;
            if clear(start) && clear(target) {
                cones.push(Cone::new(x, y, self.cone_radius, self.cone_height));
            }
        }
        let e = self.half_extent + 1.0;
        WorldScene {
            cones,
            targets: vec![[target.0, target.1]],
            vehicle: StartPose { x: start.0, y: start.1, heading: 0.0 },
            arena: [-e, -e, e, e],
            ground_albedo: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CourseLayout {
    pub cone_distance: f64,
    pub target_distance: f64,
    /// Bound on the seeded lateral offset of the cone.
    pub lateral_jitter: f64,
    pub cone_radius: f64,
    pub cone_height: f64,
}

impl Default for CourseLayout {
    fn default() -> Self {
        Self { cone_distance: 5.0, target_distance: 10.0, lateral_jitter: 0.05, cone_radius: 0.15, cone_height: 0.5 }
    }
}

impl CourseLayout {
    pub fn build(&self, seed: u64) -> WorldScene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dy = rng.gen_range(-self.lateral_jitter..=self.lateral_jitter);
        WorldScene {
            cones: vec![Cone::new(self.cone_distance, dy, self.cone_radius, self.cone_height)],
            targets: vec![[self.target_distance, 0.0]],
            vehicle: StartPose { x: 0.0, y: 0.0, heading: 0.0 },
            arena: [-3.0, -5.0, self.target_distance + 3.0, 5.0],
            ground_albedo: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TourLayout {
    pub side: f64,
    pub cone_radius: f64,
    pub cone_height: f64,
}

impl Default for TourLayout {
    fn default() -> Self {
        Self { side: 10.0, cone_radius: 0.15, cone_height: 0.5 }
    }
}

impl TourLayout {
    /// Start at the origin facing +x; targets at three corners of the square.
    /// The layout is fixed, so the seed is unused.
    pub fn build(&self, _seed: u64) -> WorldScene {
        let (l, h) = (self.side, self.side / 2.0);
        let cone = |x, y| Cone::new(x, y, self.cone_radius, self.cone_height);
        WorldScene {
            cones: vec![cone(h, 0.0), cone(l, h), cone(h, l), cone(h, h)],
            targets: vec![[l, 0.0], [l, l], [0.0, l]],
            vehicle: StartPose { x: 0.0, y: 0.0, heading: 0.0 },
            arena: [-4.0, -4.0, l + 4.0, l + 4.0],
            ground_albedo: 200,
        }
    }
}

/// Generates a scene of the given kind with default layout parameters.
pub fn gen_scene(kind: SceneKind, seed: u64) -> WorldScene {
    match kind {
        SceneKind::Ellipses => EllipseLayout::default().build(seed),
        SceneKind::Corridor => CorridorLayout::default().build(seed),
        SceneKind::Scatter => ScatterLayout::default().build(seed),
        SceneKind::Course => CourseLayout::default().build(seed),
        SceneKind::Tour => TourLayout::default().build(seed),
    }
}
