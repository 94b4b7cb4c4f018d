//! Closed-loop simulation of on-sensor vision and a steered mobile robot.
//!
//! * [`ppa`]: pixel-processor-array register planes and kernels
//! * [`vision`]: closest-obstacle detection built from those kernels
//! * [`world`]: 2D world, Ackermann vehicle and pinhole camera
//! * [`navigator`]: target seeking and the avoidance steering law
//! * [`bridge`]: binary wire protocol, links and servers
//! * [`runner`]: the interface loop, logs and summaries
//! * [`scenes`]: seeded scene generators

pub mod bridge;
pub mod navigator;
pub mod ppa;
pub mod runner;
pub mod scenes;
pub mod vision;
pub mod world;

pub use navigator::{Mode, NavParams, Navigator, SteerCommand};
pub use ppa::{BitPlane, BoundingBox, GrayPlane, PixelCoord, Polarity};
pub use runner::{RunConfig, RunMode, RunOutput, Summary, TrajectoryLog};
pub use scenes::{gen_scene, SceneKind};
pub use vision::{AreaConfig, Direction, ObstacleReport, VisionParams};
pub use world::{CameraModel, Cone, VehicleConfig, VehicleState, World, WorldScene};
