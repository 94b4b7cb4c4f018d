//! Closed-loop experiment harness.
//!
//! The interface loop renders a frame in the world, ships it to the vision
//! server, waits for the obstacle report, decides a steering command and
//! advances the world by one tick. The same loop drives in-process links and
//! TCP links.

use std::fmt::Write as _;
use std::net::{SocketAddr, TcpListener};
use std::path::Path;
use std::thread;
use std::time::Duration;

use log::{debug, info};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bridge::{self, BridgeError, Link, LocalLink, Message, TcpLink, VisionServer, WorldServer};
use crate::navigator::{Mode, NavParams, Navigator};
use crate::ppa::GrayPlane;
use crate::vision::{Direction, ObstacleReport, VisionParams};
use crate::world::{CameraModel, VehicleConfig, World, WorldError, WorldScene};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("bridge: {0}")]
    Bridge(#[from] BridgeError),
    #[error("collision at step {0}")]
    Collision(u64),
    #[error("writing outputs: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Reactive,
    SingleTarget,
    MultiTarget,
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reactive" => Ok(RunMode::Reactive),
            "single_target" | "single-target" | "single" => Ok(RunMode::SingleTarget),
            "multi_target" | "multi-target" | "multi" => Ok(RunMode::MultiTarget),
            _ => Err(format!("unknown mode {s:?} (reactive, single_target, multi_target)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    pub nav: NavParams,
    pub vision: VisionParams,
    pub vehicle: VehicleConfig,
    pub camera: CameraModel,
    pub max_steps: u64,
    pub fail_on_collision: bool,
    /// Pipelined vision: each tick acts on the previous frame's report.
    pub freerun: bool,
    pub reply_timeout: Duration,
}

impl RunConfig {
    pub fn new(mode: RunMode) -> Self {
        Self {
            mode,
            nav: NavParams::default(),
            vision: VisionParams::default(),
            vehicle: VehicleConfig::default(),
            camera: CameraModel::default(),
            max_steps: 2000,
            fail_on_collision: false,
            freerun: false,
            reply_timeout: bridge::REPLY_TIMEOUT,
        }
    }

    pub fn validate(&self, scene: &WorldScene) -> Result<(), RunError> {
        if self.max_steps == 0 {
            return Err(RunError::Config("max_steps must be positive".into()));
        }
        let need = match self.mode {
            RunMode::Reactive => 0,
            RunMode::SingleTarget => 1,
            RunMode::MultiTarget => 2,
        };
        if scene.targets.len() < need {
            return Err(RunError::Config(format!(
                "{:?} mode needs at least {need} target(s), scene has {}",
                self.mode,
                scene.targets.len()
            )));
        }
        self.nav.validate().map_err(|e| RunError::Config(e.to_string()))?;
        self.vision.areas.validate().map_err(|e| RunError::Config(e.to_string()))?;
        scene.validate()?;
        Ok(())
    }

    /// Applies a named parameter to whichever side owns it.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<(), String> {
        if self.nav.set(key, value).map_err(|e| e.to_string())? {
            return Ok(());
        }
        if self.vision.set(key, value as f32)? {
            return Ok(());
        }
        Err(format!("unknown parameter {key:?}"))
    }

    pub fn navigator(&self, scene: &WorldScene) -> Navigator {
        let targets: Vec<(f64, f64)> = scene.targets.iter().map(|t| (t[0], t[1])).collect();
        match self.mode {
            RunMode::Reactive => Navigator::reactive(),
            RunMode::SingleTarget => Navigator::new(targets.into_iter().take(1).collect()),
            RunMode::MultiTarget => Navigator::new(targets),
        }
    }
}

/// One logged loop iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub step: u64,
    /// Pose after the tick's world step, as reported by the world.
    pub x: f32,
    pub y: f32,
    pub heading: f32,
    pub mode: Mode,
    pub theta_steer: f32,
    pub report: ObstacleReport,
    pub collision: bool,
    pub clearance: f32,
    /// Index of the target being sought after this tick.
    pub target_index: usize,
}

pub const CSV_HEADER: &str =
    "step,x,y,heading,mode,theta_steer,closest_x,closest_y,closest_dis,direction,collision,clearance,target_index";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryLog {
    pub records: Vec<TickRecord>,
}

impl TrajectoryLog {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(96 * (self.records.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                r.x,
                r.y,
                r.heading,
                r.mode.as_str(),
                r.theta_steer,
                r.report.closest_x as f32,
                r.report.closest_y as f32,
                r.report.closest_dis as f32,
                r.report.direction.sign(),
                r.collision as u8,
                r.clearance,
                r.target_index
            )
            .expect("writing to a String");
        }
        s
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Every target visited; the vehicle is idle.
    Completed,
    MaxSteps,
    /// A peer closed its connection.
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: u64,
    pub reached_targets: usize,
    pub total_targets: usize,
    pub collisions: usize,
    /// Smallest footprint-to-cone distance seen; `None` without cones.
    pub min_clearance: Option<f64>,
    pub end: EndReason,
    pub final_pose: [f64; 3],
}

impl Summary {
    /// Everything here is recomputable from the log.
    pub fn from_log(log: &TrajectoryLog, total_targets: usize, end: EndReason) -> Self {
        let min = log.records.iter().map(|r| r.clearance as f64).fold(f64::INFINITY, f64::min);
        let last = log.records.last();
        Self {
            steps: log.records.len() as u64,
            reached_targets: log.records.iter().filter(|r| r.mode == Mode::OnTarget).count(),
            total_targets,
            collisions: log.records.iter().filter(|r| r.collision).count(),
            min_clearance: min.is_finite().then_some(min),
            end,
            final_pose: last.map(|r| [r.x as f64, r.y as f64, r.heading as f64]).unwrap_or_default(),
        }
    }

    pub fn all_targets_reached(&self) -> bool {
        self.reached_targets == self.total_targets && self.end == EndReason::Completed
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: TrajectoryLog,
    pub summary: Summary,
}

impl RunOutput {
    /// Writes `trajectory.csv` and `summary.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), RunError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trajectory.csv"), self.log.to_csv())?;
        let mut json = serde_json::to_string_pretty(&self.summary).expect("summary serialises");
        json.push('\n');
        std::fs::write(dir.join("summary.json"), json)?;
        Ok(())
    }
}

/// A parameter change requested mid-run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamUpdate {
    pub key: String,
    pub value: f64,
}

/// What the loop publishes to an observer after each tick.
#[derive(Debug)]
pub struct Telemetry<'a> {
    pub record: &'a TickRecord,
    pub nav: &'a NavParams,
    pub vision: &'a VisionParams,
    pub frame: &'a GrayPlane,
}

/// Live observer and parameter source. Implementations must not block.
pub trait Console {
    /// Updates queued since the last tick; applied before the next frame.
    fn poll_params(&mut self) -> Vec<ParamUpdate>;
    fn publish(&mut self, telemetry: &Telemetry<'_>);
    fn rejected(&mut self, update: &ParamUpdate, reason: &str);
}

fn expect<T>(
    reply: Option<Message>,
    expected: &'static str,
    pick: impl FnOnce(Message) -> Result<T, Message>,
) -> Result<Option<T>, BridgeError> {
    match reply {
        None => Ok(None),
        Some(m) => pick(m).map(Some).map_err(|m| BridgeError::Unexpected { expected, got: m.name() }),
    }
}

fn report_from_wire(x: f32, y: f32, dis: f32, dir: f32) -> ObstacleReport {
    ObstacleReport {
        closest_x: x as f64,
        closest_y: y as f64,
        closest_dis: dis as f64,
        direction: Direction::from_sign(dir),
    }
}

/// Interface process: owns the navigator and both links.
pub struct Interface<W, V> {
    world: W,
    vision: V,
    nav: Navigator,
    params: NavParams,
    vision_params: VisionParams,
    wheel_radius: f64,
    freerun: bool,
    pose: (f32, f32, f32),
    last_report: ObstacleReport,
}

enum TickOutcome {
    Continue,
    Done(EndReason),
}

impl<W: Link, V: Link> Interface<W, V> {
    pub fn new(world: W, vision: V, nav: Navigator, cfg: &RunConfig) -> Self {
        Self {
            world,
            vision,
            nav,
            params: cfg.nav,
            vision_params: cfg.vision,
            wheel_radius: cfg.vehicle.wheel_radius,
            freerun: cfg.freerun,
            pose: (0.0, 0.0, 0.0),
            last_report: ObstacleReport::none(),
        }
    }

    pub fn into_links(self) -> (W, V) {
        (self.world, self.vision)
    }

    fn push_vision_params(&mut self) -> Result<(), BridgeError> {
        for key in VisionParams::KEYS {
            let value = self.vision_params.get(key).expect("listed key");
            self.vision.send(Message::ParamSet { key: key.to_string(), value })?;
        }
        Ok(())
    }

    fn apply(&mut self, update: &ParamUpdate) -> Result<(), String> {
        if self.params.set(&update.key, update.value).map_err(|e| e.to_string())? {
            return Ok(());
        }
        if self.vision_params.set(&update.key, update.value as f32)? {
            let value = self.vision_params.get(&update.key).expect("just set");
            self.vision.send(Message::ParamSet { key: update.key.clone(), value }).map_err(|e| e.to_string())?;
            return Ok(());
        }
        Err(format!("unknown parameter {:?}", update.key))
    }

    fn fetch_pose(&mut self) -> Result<bool, BridgeError> {
        let pose = expect(self.world.request(Message::GetPose)?, "POSE", |m| match m {
            Message::Pose { x, y, heading } => Ok((x, y, heading)),
            m => Err(m),
        })?;
        match pose {
            Some(p) => {
                self.pose = p;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Runs until the navigator idles, a peer disconnects, or `max_steps`.
    pub fn run(
        &mut self,
        max_steps: u64,
        fail_on_collision: bool,
        mut console: Option<&mut dyn Console>,
    ) -> Result<(TrajectoryLog, EndReason), RunError> {
        let mut log = TrajectoryLog::default();
        self.push_vision_params()?;
        if !self.fetch_pose()? {
            return Ok((log, EndReason::Disconnected));
        }
        for step in 0..max_steps {
            if let Some(c) = console.as_deref_mut() {
                for update in c.poll_params() {
                    if let Err(reason) = self.apply(&update) {
                        c.rejected(&update, &reason);
                    }
                }
            }
            let (record, frame, outcome) = match self.tick(step)? {
                Some(t) => t,
                None => return Ok((log, EndReason::Disconnected)),
            };
            log.records.push(record);
            if let Some(c) = console.as_deref_mut() {
                c.publish(&Telemetry {
                    record: &record,
                    nav: &self.params,
                    vision: &self.vision_params,
                    frame: &frame,
                });
            }
            if record.collision && fail_on_collision {
                return Err(RunError::Collision(step));
            }
            if let TickOutcome::Done(reason) = outcome {
                return Ok((log, reason));
            }
        }
        Ok((log, EndReason::MaxSteps))
    }

    fn tick(&mut self, step: u64) -> Result<Option<(TickRecord, GrayPlane, TickOutcome)>, RunError> {
        let frame = match expect(self.world.request(Message::GetFrame)?, "FRAME", |m| match m {
            Message::Frame(g) => Ok(g),
            m => Err(m),
        })? {
            Some(f) => f,
            None => return Ok(None),
        };

        let packet = if self.freerun {
            self.vision.send(Message::Frame(frame.clone()))?;
            if step == 0 {
                Some(ObstacleReport::none())
            } else {
                self.recv_report()?
            }
        } else {
            self.vision.send(Message::Frame(frame.clone()))?;
            self.recv_report()?
        };
        // A missing packet ends the loop.
        let Some(report) = packet else {
            return Ok(None);
        };
        self.last_report = report;

        let (x, y, heading) = self.pose;
        let cmd = self.nav.navigate_step(&report, (x as f64, y as f64), heading as f64, &self.params);
        let speed = if cmd.mode == Mode::Idle { 0.0 } else { self.params.speed(self.wheel_radius) };
        let theta = cmd.theta_steer as f32;
        self.world.send(Message::SetSteer(theta))?;
        self.world.send(Message::SetSpeed(speed as f32))?;
        let done = expect(self.world.request(Message::Step)?, "STEP_DONE", |m| match m {
            Message::StepDone { collision, clearance } => Ok((collision, clearance)),
            m => Err(m),
        })?;
        let Some((collision, clearance)) = done else {
            return Ok(None);
        };
        if !self.fetch_pose()? {
            return Ok(None);
        }
        let record = TickRecord {
            step,
            x: self.pose.0,
            y: self.pose.1,
            heading: self.pose.2,
            mode: cmd.mode,
            theta_steer: theta,
            report,
            collision,
            clearance,
            target_index: self.nav.target_index(),
        };
        debug!("tick {step}: {:?} steer {theta:.4}", cmd.mode);
        let outcome =
            if cmd.mode == Mode::Idle { TickOutcome::Done(EndReason::Completed) } else { TickOutcome::Continue };
        Ok(Some((record, frame, outcome)))
    }

    fn recv_report(&mut self) -> Result<Option<ObstacleReport>, BridgeError> {
        expect(self.vision.recv()?, "REPORT", |m| match m {
            Message::Report { closest_x, closest_y, closest_dis, direction } => {
                Ok(report_from_wire(closest_x, closest_y, closest_dis, direction))
            }
            m => Err(m),
        })
    }
}

fn finish(log: TrajectoryLog, end: EndReason, total_targets: usize) -> RunOutput {
    let summary = Summary::from_log(&log, total_targets, end);
    RunOutput { log, summary }
}

/// Runs the whole loop inside this process.
pub fn run_in_process(
    scene: &WorldScene,
    cfg: &RunConfig,
    console: Option<&mut dyn Console>,
) -> Result<RunOutput, RunError> {
    cfg.validate(scene)?;
    let nav = cfg.navigator(scene);
    let total = nav.targets().len();
    let world = LocalLink::new(WorldServer::new(World::new(scene.clone(), cfg.vehicle, cfg.camera)));
    let vision = LocalLink::new(VisionServer::new(cfg.vision));
    let mut iface = Interface::new(world, vision, nav, cfg);
    let (log, end) = iface.run(cfg.max_steps, cfg.fail_on_collision, console)?;
    info!("in-process run finished after {} ticks: {end:?}", log.len());
    Ok(finish(log, end, total))
}

/// Listening sockets for a networked run. Port 0 picks a free port.
pub struct NetListeners {
    pub vision: TcpListener,
    pub world: TcpListener,
}

impl NetListeners {
    pub fn bind(vision_port: u16, world_port: u16) -> Result<Self, RunError> {
        let bind = |port: u16| {
            TcpListener::bind(("127.0.0.1", port)).map_err(|e| RunError::Config(format!("binding port {port}: {e}")))
        };
        Ok(Self { vision: bind(vision_port)?, world: bind(world_port)? })
    }

    pub fn addrs(&self) -> Result<(SocketAddr, SocketAddr), RunError> {
        Ok((self.vision.local_addr()?, self.world.local_addr()?))
    }
}

/// Runs the world and vision servers on their own threads and drives them
/// over TCP loopback.
pub fn run_networked(
    scene: &WorldScene,
    cfg: &RunConfig,
    listeners: NetListeners,
    console: Option<&mut dyn Console>,
) -> Result<RunOutput, RunError> {
    cfg.validate(scene)?;
    let (vision_addr, world_addr) = listeners.addrs()?;
    let NetListeners { vision: vision_listener, world: world_listener } = listeners;

    let world_endpoint = WorldServer::new(World::new(scene.clone(), cfg.vehicle, cfg.camera));
    let world_thread = thread::Builder::new()
        .name("world-server".into())
        .spawn(move || bridge::serve_one(&world_listener, world_endpoint).map(|_| ()))?;
    // Vision starts from defaults; the interface pushes the configured
    // parameters on connect.
    let vision_thread = thread::Builder::new()
        .name("vision-server".into())
        .spawn(move || bridge::serve_one(&vision_listener, VisionServer::default()).map(|_| ()))?;

    let result = run_interface(world_addr, vision_addr, scene, cfg, console);

    for (name, handle) in [("world", world_thread), ("vision", vision_thread)] {
        match handle.join() {
            Ok(Ok(())) => {}
            Ok(Err(e)) => debug!("{name} server ended with {e}"),
            Err(_) => return Err(RunError::Config(format!("{name} server thread panicked"))),
        }
    }
    result
}

/// Interface side only: connects to already-running world and vision
/// servers.
pub fn run_interface(
    world_addr: SocketAddr,
    vision_addr: SocketAddr,
    scene: &WorldScene,
    cfg: &RunConfig,
    console: Option<&mut dyn Console>,
) -> Result<RunOutput, RunError> {
    cfg.validate(scene)?;
    let nav = cfg.navigator(scene);
    let total = nav.targets().len();
    let world = TcpLink::connect(world_addr, cfg.reply_timeout)?;
    let vision = TcpLink::connect(vision_addr, cfg.reply_timeout)?;
    let mut iface = Interface::new(world, vision, nav, cfg);
    let outcome = iface.run(cfg.max_steps, cfg.fail_on_collision, console);
    // Closing both links lets the servers return.
    drop(iface);
    let (log, end) = outcome?;
    info!("networked run finished after {} ticks: {end:?}", log.len());
    Ok(finish(log, end, total))
}
