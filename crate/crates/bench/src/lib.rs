//! Fixtures shared by the criterion benches.

use ppanav_core::world::render_frame;
use ppanav_core::{gen_scene, BitPlane, CameraModel, GrayPlane, SceneKind, VehicleState};

/// Camera frame from the ellipse scene a few metres in, with several cones
/// in view.
pub fn ellipse_frame() -> GrayPlane {
    let scene = gen_scene(SceneKind::Ellipses, 0);
    render_frame(&scene, &VehicleState::at(2.0, 0.0, 0.0), &CameraModel::default())
}

/// Maze-like plane: one long serpentine component, the flood worst case.
pub fn serpentine() -> BitPlane {
    BitPlane::from_fn(|x, y| x % 4 != 3 || (x / 4 % 2 == 0 && y == 255) || (x / 4 % 2 == 1 && y == 0))
}
