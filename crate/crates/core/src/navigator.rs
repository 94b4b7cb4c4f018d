//! Steering: target seeking with obstacle-avoidance dispatch.
//!
//! The avoidance law is
//!
//! ```text
//! K     = O_closest · (k_safe / D_closest)
//! raw   = −k_steer · K
//! steer = clamp(raw · d_steer_scale, ±steer_limit)
//! ```
//!
//! where `O_closest` is the report direction (±1) and `D_closest` its pixel
//! distance. `raw` is dimensionless; `d_steer_scale = d_steer / 10` maps it
//! to radians.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vision::ObstacleReport;
use crate::world::wrap_angle;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{0} must be positive and finite, got {1}")]
    NotPositive(&'static str, f64),
}

/// Controller tunables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavParams {
    /// Pixel distance below which avoidance takes over.
    pub d_safe: f64,
    /// Metres from a target at which it counts as reached.
    pub e_safe: f64,
    pub k_safe: f64,
    pub k_steer: f64,
    /// Commanded wheel speed, revolutions per second.
    pub d_vel: f64,
    /// Base steering quantum, radians.
    pub d_steer: f64,
    pub steer_limit: f64,
}

impl Default for NavParams {
    fn default() -> Self {
        Self {
            d_safe: 200.0,
            e_safe: 1.0,
            k_safe: 100.0,
            k_steer: 20.0,
            d_vel: 1.0,
            d_steer: 0.1,
            steer_limit: 30f64.to_radians(),
        }
    }
}

impl NavParams {
    pub const KEYS: [&'static str; 7] = ["d_safe", "e_safe", "k_safe", "k_steer", "d_vel", "d_steer", "steer_limit"];

    pub fn validate(&self) -> Result<(), ParamError> {
        let check = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ParamError::NotPositive(name, v))
            }
        };
        check("d_safe", self.d_safe)?;
        check("e_safe", self.e_safe)?;
        check("k_safe", self.k_safe)?;
        check("k_steer", self.k_steer)?;
        check("d_steer", self.d_steer)?;
        check("steer_limit", self.steer_limit)?;
        if !(self.d_vel.is_finite() && self.d_vel >= 0.0) {
            return Err(ParamError::NotPositive("d_vel", self.d_vel));
        }
        Ok(())
    }

    /// Radians per unit of the dimensionless avoidance output.
    pub fn d_steer_scale(&self) -> f64 {
        self.d_steer / 10.0
    }

    /// Forward speed in m/s for a wheel of the given radius.
    pub fn speed(&self, wheel_radius: f64) -> f64 {
        self.d_vel * 2.0 * std::f64::consts::PI * wheel_radius
    }

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "d_safe" => &mut self.d_safe,
            "e_safe" => &mut self.e_safe,
            "k_safe" => &mut self.k_safe,
            "k_steer" => &mut self.k_steer,
            "d_vel" => &mut self.d_vel,
            "d_steer" => &mut self.d_steer,
            "steer_limit" => &mut self.steer_limit,
            _ => return None,
        })
    }

    /// Applies one named parameter; `Ok(false)` if the key is not ours.
    pub fn set(&mut self, key: &str, value: f64) -> Result<bool, ParamError> {
        let mut next = *self;
        match next.slot(key) {
            Some(slot) => *slot = value,
            None => return Ok(false),
        }
        next.validate()?;
        *self = next;
        Ok(true)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(key).map(|v| *v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TargetNav,
    Avoidance,
    OnTarget,
    Idle,
    /// Reactive runs: no target, no near obstacle, drive straight.
    Cruise,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::Idle => 0,
            Mode::TargetNav => 1,
            Mode::Avoidance => 2,
            Mode::OnTarget => 3,
            Mode::Cruise => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Mode::Idle,
            1 => Mode::TargetNav,
            2 => Mode::Avoidance,
            3 => Mode::OnTarget,
            4 => Mode::Cruise,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TargetNav => "target_nav",
            Mode::Avoidance => "avoidance",
            Mode::OnTarget => "on_target",
            Mode::Idle => "idle",
            Mode::Cruise => "cruise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteerCommand {
    pub theta_steer: f64,
    pub mode: Mode,
}

impl SteerCommand {
    fn new(theta: f64, mode: Mode, p: &NavParams) -> Self {
        Self { theta_steer: theta.clamp(-p.steer_limit, p.steer_limit), mode }
    }
}

/// The unclamped, dimensionless avoidance output `−k_steer · O · k_safe / D`.
pub fn avoidance_raw(direction: f64, d_closest: f64, p: &NavParams) -> f64 {
    let k = direction * (p.k_safe / d_closest);
    -p.k_steer * k
}

/// Steers away from the reported obstacle.
pub fn avoidance_steer(report: &ObstacleReport, p: &NavParams) -> SteerCommand {
    let dir = report.direction.sign() as f64;
    if report.closest_dis <= 0.0 {
        return SteerCommand::new(-dir * p.steer_limit, Mode::Avoidance, p);
    }
    let raw = avoidance_raw(dir, report.closest_dis, p);
    SteerCommand::new(raw * p.d_steer_scale(), Mode::Avoidance, p)
}

/// Heads for `target`, or reports arrival inside `e_safe`.
pub fn target_steer(pos: (f64, f64), heading: f64, target: (f64, f64), p: &NavParams) -> SteerCommand {
    let (dx, dy) = (target.0 - pos.0, target.1 - pos.1);
    let e_dis = dx.hypot(dy);
    if e_dis <= p.e_safe {
        return SteerCommand { theta_steer: 0.0, mode: Mode::OnTarget };
    }
    let theta_target = dy.atan2(dx);
    SteerCommand::new(wrap_angle(theta_target - heading), Mode::TargetNav, p)
}

/// Whether a report should trigger avoidance.
pub fn needs_avoidance(report: &ObstacleReport, p: &NavParams) -> bool {
    report.is_obstacle() && report.closest_dis < p.d_safe
}

/// Stateful dispatcher over an ordered target list.
#[derive(Debug, Clone, PartialEq)]
pub struct Navigator {
    targets: Vec<(f64, f64)>,
    index: usize,
    reactive: bool,
}

impl Navigator {
    pub fn new(targets: Vec<(f64, f64)>) -> Self {
        Self { targets, index: 0, reactive: false }
    }

    /// Targetless wandering: drive straight unless an obstacle is near.
    pub fn reactive() -> Self {
        Self { targets: Vec::new(), index: 0, reactive: true }
    }

    pub fn target_index(&self) -> usize {
        self.index
    }

    pub fn current_target(&self) -> Option<(f64, f64)> {
        self.targets.get(self.index).copied()
    }

    pub fn targets(&self) -> &[(f64, f64)] {
        &self.targets
    }

    pub fn is_finished(&self) -> bool {
        !self.reactive && self.index >= self.targets.len()
    }

    pub fn navigate_step(
        &mut self,
        report: &ObstacleReport,
        pos: (f64, f64),
        heading: f64,
        p: &NavParams,
    ) -> SteerCommand {
        if self.is_finished() {
            return SteerCommand { theta_steer: 0.0, mode: Mode::Idle };
        }
        if needs_avoidance(report, p) {
            return avoidance_steer(report, p);
        }
        match self.current_target() {
            None => SteerCommand { theta_steer: 0.0, mode: Mode::Cruise },
            Some(target) => {
                let cmd = target_steer(pos, heading, target, p);
                if cmd.mode == Mode::OnTarget {
                    self.index += 1;
                }
                cmd
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vision::Direction;
    use std::f64::consts::PI;

    fn report(direction: Direction, dis: f64) -> ObstacleReport {
        ObstacleReport { closest_x: 200.0, closest_y: 100.0, closest_dis: dis, direction }
    }

    #[test]
    fn raw_spot_values() {
        let p = NavParams::default();
        assert_eq!(avoidance_raw(1.0, 100.0, &p), -20.0);
        assert_eq!(avoidance_raw(-1.0, 100.0, &p), 20.0);
        assert_eq!(avoidance_raw(1.0, 200.0, &p), -10.0);
    }

    #[test]
    fn left_obstacle_steers_right_at_limit() {
        let p = NavParams::default();
        let cmd = avoidance_steer(&report(Direction::Left, 100.0), &p);
        assert_eq!(cmd.mode, Mode::Avoidance);
        // raw −20 · 0.01 rad = −0.2 rad, inside the limit
        assert!((cmd.theta_steer + 0.2).abs() < 1e-12);
        let near = avoidance_steer(&report(Direction::Left, 10.0), &p);
        assert_eq!(near.theta_steer, -p.steer_limit);
        let mirror = avoidance_steer(&report(Direction::Right, 10.0), &p);
        assert_eq!(mirror.theta_steer, p.steer_limit);
    }

    #[test]
    fn zero_distance_saturates_away() {
        let p = NavParams::default();
        assert_eq!(avoidance_steer(&report(Direction::Left, 0.0), &p).theta_steer, -p.steer_limit);
        assert_eq!(avoidance_steer(&report(Direction::Right, 0.0), &p).theta_steer, p.steer_limit);
    }

    #[test]
    fn target_cases() {
        let p = NavParams::default();
        let c = target_steer((0.0, 0.0), 0.0, (5.0, 0.0), &p);
        assert_eq!((c.theta_steer, c.mode), (0.0, Mode::TargetNav));
        let c = target_steer((0.0, 0.0), 0.0, (0.0, 5.0), &p);
        assert_eq!(c.theta_steer, p.steer_limit);
        let c = target_steer((0.5, 0.5), 0.0, (1.0, 1.0), &p);
        assert_eq!((c.theta_steer, c.mode), (0.0, Mode::OnTarget));
        // raw difference is 2π − 0.12; the wrapped command is a small right turn
        let c = target_steer((0.0, 0.0), -PI + 0.1, (-5.0, 5.0 * 0.02f64.tan()), &p);
        assert!((c.theta_steer + 0.12).abs() < 1e-9, "{}", c.theta_steer);
    }

    #[test]
    fn target_on_axis_exactly_at_e_safe_counts_as_reached() {
        let p = NavParams::default();
        assert_eq!(target_steer((0.0, 0.0), 0.0, (1.0, 0.0), &p).mode, Mode::OnTarget);
    }

    #[test]
    fn dispatch() {
        let p = NavParams::default();
        let mut nav = Navigator::new(vec![(10.0, 0.0)]);
        let c = nav.navigate_step(&ObstacleReport::none(), (0.0, 0.0), 0.0, &p);
        assert_eq!(c.mode, Mode::TargetNav);
        let c = nav.navigate_step(&report(Direction::Left, 150.0), (0.0, 0.0), 0.0, &p);
        assert_eq!(c.mode, Mode::Avoidance);
        // at the threshold itself the target wins
        let c = nav.navigate_step(&report(Direction::Left, 200.0), (0.0, 0.0), 0.0, &p);
        assert_eq!(c.mode, Mode::TargetNav);
        // near but undirected detections do not steer
        let c = nav.navigate_step(&report(Direction::None, 50.0), (0.0, 0.0), 0.0, &p);
        assert_eq!(c.mode, Mode::TargetNav);
    }

    #[test]
    fn targets_advance_then_idle() {
        let p = NavParams::default();
        let targets = vec![(5.0, 0.0), (5.0, 5.0), (0.0, 5.0)];
        let mut nav = Navigator::new(targets.clone());
        let none = ObstacleReport::none();
        assert_eq!(nav.navigate_step(&none, (0.0, 0.0), 0.0, &p).mode, Mode::TargetNav);
        for (i, t) in targets.iter().enumerate() {
            assert_eq!(nav.target_index(), i);
            let c = nav.navigate_step(&none, (t.0 + 0.3, t.1), 0.0, &p);
            assert_eq!(c.mode, Mode::OnTarget);
            assert_eq!(c.theta_steer, 0.0);
        }
        assert_eq!(nav.target_index(), 3);
        let c = nav.navigate_step(&report(Direction::Left, 10.0), (0.0, 5.0), 0.0, &p);
        assert_eq!(c.mode, Mode::Idle);
    }

    #[test]
    fn one_advance_per_step() {
        // two targets both within reach: only one is consumed per tick
        let p = NavParams::default();
        let mut nav = Navigator::new(vec![(0.1, 0.0), (0.2, 0.0)]);
        let none = ObstacleReport::none();
        nav.navigate_step(&none, (0.0, 0.0), 0.0, &p);
        assert_eq!(nav.target_index(), 1);
        nav.navigate_step(&none, (0.0, 0.0), 0.0, &p);
        assert_eq!(nav.target_index(), 2);
    }

    #[test]
    fn empty_targets_idle_reactive_cruises() {
        let p = NavParams::default();
        let none = ObstacleReport::none();
        assert_eq!(Navigator::new(vec![]).navigate_step(&none, (0.0, 0.0), 0.0, &p).mode, Mode::Idle);
        let mut r = Navigator::reactive();
        assert_eq!(r.navigate_step(&none, (0.0, 0.0), 0.0, &p).mode, Mode::Cruise);
        assert_eq!(r.navigate_step(&report(Direction::Right, 80.0), (0.0, 0.0), 0.0, &p).mode, Mode::Avoidance);
    }

    #[test]
    fn params_by_key() {
        let mut p = NavParams::default();
        assert_eq!(p.set("k_safe", 50.0), Ok(true));
        assert_eq!(p.k_safe, 50.0);
        assert_eq!(p.set("threshold", 1.0), Ok(false));
        assert!(p.set("d_safe", -1.0).is_err());
        assert_eq!(p.d_safe, 200.0);
        for k in NavParams::KEYS {
            assert!(p.get(k).is_some(), "{k}");
        }
        assert!((NavParams::default().speed(0.1) - 0.6283).abs() < 1e-4);
    }

    #[test]
    fn mode_codes_round_trip() {
        for m in [Mode::TargetNav, Mode::Avoidance, Mode::OnTarget, Mode::Idle, Mode::Cruise] {
            assert_eq!(Mode::from_code(m.code()), Some(m));
        }
        assert_eq!(Mode::from_code(9), None);
    }
}
