//! Closest-obstacle detection on the PPA.
//!
//! Segments dark cones out of a frame, peels connected components off one at
//! a time with flood + bounding-box readout, and reports the valid component
//! whose bottom-centre is nearest to the robot's image position (255, 127).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ppa::{self, BitPlane, BoundingBox, GrayPlane, PixelCoord, Polarity, ScanOrder};

/// Image position standing in for the robot itself.
pub const ROBOT_PIXEL: PixelCoord = PixelCoord { x: 255, y: 127 };

/// `closest_dis` value when no valid obstacle was found.
pub const NO_OBSTACLE_DIS: f64 = 1.0e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AreaError {
    #[error("distant rows must end before forbidden rows ({distant} >= {forbidden})")]
    RowBands { distant: usize, forbidden: usize },
    #[error("column bands out of order: {0}")]
    ColumnBands(String),
}

/// Image regions gating which bounding boxes count as obstacles.
///
/// Row bounds are inclusive ends of the excluded bands, column bands are
/// inclusive `[lo, hi]` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaConfig {
    /// Rows `[0, distant_x_max]` are too far away to matter.
    pub distant_x_max: usize,
    /// Rows `[forbidden_x_min, 255]` are ignored.
    pub forbidden_x_min: usize,
    pub safe_right: (usize, usize),
    pub safe_left: (usize, usize),
    pub right: (usize, usize),
    pub left: (usize, usize),
}

impl Default for AreaConfig {
    fn default() -> Self {
        Self {
            distant_x_max: 50,
            forbidden_x_min: 240,
            safe_right: (0, 10),
            safe_left: (245, 255),
            right: (15, 127),
            left: (128, 240),
        }
    }
}

impl AreaConfig {
    pub fn validate(&self) -> Result<(), AreaError> {
        if self.distant_x_max >= self.forbidden_x_min {
            return Err(AreaError::RowBands { distant: self.distant_x_max, forbidden: self.forbidden_x_min });
        }
        let bands = [self.safe_right, self.right, self.left, self.safe_left];
        for (lo, hi) in bands {
            if lo > hi || hi > 255 {
                return Err(AreaError::ColumnBands(format!("[{lo}, {hi}] is not a valid band")));
            }
        }
        for pair in bands.windows(2) {
            if pair[0].1 >= pair[1].0 {
                return Err(AreaError::ColumnBands(format!(
                    "[{}, {}] overlaps or follows [{}, {}]",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(())
    }

    /// Whether a bottom-centre lies in the valid area.
    pub fn admits(&self, c: PixelCoord) -> bool {
        self.distant_x_max < c.x && c.x < self.forbidden_x_min && self.safe_right.1 < c.y && c.y < self.safe_left.0
    }
}

/// Side of the image the closest obstacle sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Low columns.
    Right,
    /// High columns.
    Left,
    None,
}

impl Direction {
    /// −1 right, +1 left, 0 none.
    pub fn sign(self) -> i8 {
        match self {
            Direction::Right => -1,
            Direction::Left => 1,
            Direction::None => 0,
        }
    }

    /// Inverse of [`Direction::sign`]; anything that is not ±1 maps to `None`.
    pub fn from_sign(v: f32) -> Self {
        if v == 1.0 {
            Direction::Left
        } else if v == -1.0 {
            Direction::Right
        } else {
            Direction::None
        }
    }
}

pub fn classify_direction(y: usize, areas: &AreaConfig) -> Direction {
    if (areas.right.0..=areas.right.1).contains(&y) {
        Direction::Right
    } else if (areas.left.0..=areas.left.1).contains(&y) {
        Direction::Left
    } else {
        Direction::None
    }
}

/// The four-field message posted from the vision side to the interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleReport {
    pub closest_x: f64,
    pub closest_y: f64,
    pub closest_dis: f64,
    pub direction: Direction,
}

impl ObstacleReport {
    pub const fn none() -> Self {
        Self { closest_x: 0.0, closest_y: 0.0, closest_dis: NO_OBSTACLE_DIS, direction: Direction::None }
    }

    pub fn is_obstacle(&self) -> bool {
        self.direction != Direction::None
    }
}

impl Default for ObstacleReport {
    fn default() -> Self {
        Self::none()
    }
}

/// Pixel distance from `c` to the robot position.
pub fn distance_to_robot(c: PixelCoord) -> f64 {
    let dx = ROBOT_PIXEL.x as f64 - c.x as f64;
    let dy = ROBOT_PIXEL.y as f64 - c.y as f64;
    (dx * dx + dy * dy).sqrt()
}

/// Tunables for the vision side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisionParams {
    pub threshold: u8,
    pub polarity: Polarity,
    pub areas: AreaConfig,
}

impl Default for VisionParams {
    fn default() -> Self {
        Self { threshold: 100, polarity: Polarity::Below, areas: AreaConfig::default() }
    }
}

impl VisionParams {
    /// Applies one named parameter. Returns `Ok(false)` if the key is not a
    /// vision parameter.
    pub fn set(&mut self, key: &str, value: f32) -> Result<bool, String> {
        let mut next = *self;
        let px = || -> Result<usize, String> {
            if (0.0..=255.0).contains(&value) && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(format!("{key} must be an integer in [0, 255], got {value}"))
            }
        };
        match key {
            "threshold" => next.threshold = px()? as u8,
            "distant_x_max" => next.areas.distant_x_max = px()?,
            "forbidden_x_min" => next.areas.forbidden_x_min = px()?,
            "safe_right_max" => next.areas.safe_right.1 = px()?,
            "safe_left_min" => next.areas.safe_left.0 = px()?,
            "right_min" => next.areas.right.0 = px()?,
            "right_max" => next.areas.right.1 = px()?,
            "left_min" => next.areas.left.0 = px()?,
            "left_max" => next.areas.left.1 = px()?,
            _ => return Ok(false),
        }
        next.areas.validate().map_err(|e| e.to_string())?;
        *self = next;
        Ok(true)
    }

    pub const KEYS: [&'static str; 9] = [
        "threshold",
        "distant_x_max",
        "forbidden_x_min",
        "safe_right_max",
        "safe_left_min",
        "right_min",
        "right_max",
        "left_min",
        "left_max",
    ];

    pub fn get(&self, key: &str) -> Option<f32> {
        let a = &self.areas;
        let v = match key {
            "threshold" => self.threshold as usize,
            "distant_x_max" => a.distant_x_max,
            "forbidden_x_min" => a.forbidden_x_min,
            "safe_right_max" => a.safe_right.1,
            "safe_left_min" => a.safe_left.0,
            "right_min" => a.right.0,
            "right_max" => a.right.1,
            "left_min" => a.left.0,
            "left_max" => a.left.1,
            _ => return None,
        };
        Some(v as f32)
    }
}

/// Threshold then noise filter: the working register before peeling.
pub fn segment(frame: &GrayPlane, threshold: u8, polarity: Polarity) -> BitPlane {
    ppa::filter_noise(&ppa::threshold(frame, threshold, polarity))
}

/// Per-component readout from one detection pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub report: ObstacleReport,
    /// Bounding boxes in discovery order, one per connected component.
    pub components: Vec<BoundingBox>,
}

pub fn detect_closest(frame: &GrayPlane, threshold: u8, areas: &AreaConfig) -> ObstacleReport {
    let work = segment(frame, threshold, Polarity::Below);
    detect_in_plane(work, areas, ScanOrder::RowMajor).report
}

pub fn detect_with(frame: &GrayPlane, params: &VisionParams) -> Detection {
    let work = segment(frame, params.threshold, params.polarity);
    detect_in_plane(work, &params.areas, ScanOrder::RowMajor)
}

/// The peeling loop on an already-segmented register.
pub fn detect_in_plane(mut work: BitPlane, areas: &AreaConfig, order: ScanOrder) -> Detection {
    let mut report = ObstacleReport::none();
    let mut components = Vec::new();
    while ppa::global_or(&work) {
        let event = ppa::scan_first_event_in(&work, order).expect("plane is non-empty");
        let seed = ppa::load_point(event).expect("scan yields in-range coordinates");
        let component = ppa::flood(&seed, &work);
        let bbox = ppa::scan_bounding_box(&component).expect("flood from a set bit is non-empty");
        components.push(bbox);

        let bottom = bbox.bottom_center();
        if areas.admits(bottom) {
            let dis = distance_to_robot(bottom);
            if dis < report.closest_dis {
                report = ObstacleReport {
                    closest_x: bottom.x as f64,
                    closest_y: bottom.y as f64,
                    closest_dis: dis,
                    direction: classify_direction(bottom.y, areas),
                };
            }
        }
        work = ppa::xor(&work, &component);
    }
    Detection { report, components }
}
