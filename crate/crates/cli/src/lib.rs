//! Command-line front end for ppanav: runs, scene generation, standalone
//! servers and the operator console endpoint.

pub mod console;

use std::net::{SocketAddr, TcpListener};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use ppanav_core::bridge::{self, Ports, VisionServer, WorldServer};
use ppanav_core::runner::{run_in_process, run_interface, run_networked, Console, NetListeners, RunError};
use ppanav_core::{gen_scene, RunConfig, RunMode, RunOutput, SceneKind, World, WorldScene};

pub use console::ConsoleServer;

/// Exit status when `--fail-on-collision` stops a run.
pub const EXIT_COLLISION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ppanav", version, about = "Bit-plane vision navigation runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a closed-loop experiment and print its summary.
    Run(RunArgs),
    /// Write a generated scene to a JSON file.
    GenScene {
        #[arg(long)]
        kind: SceneKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the vision side on the vision port until killed.
    ServeVision {
        #[arg(long)]
        port: Option<u16>,
    },
    /// Serve a world on the world port; every connection gets a fresh world.
    ServeWorld {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        port: Option<u16>,
    },
    /// Drive already running world and vision servers.
    Interface {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        world: Option<SocketAddr>,
        #[arg(long)]
        vision: Option<SocketAddr>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scene JSON file.
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    pub scene: Option<PathBuf>,
    /// Generate the scene instead of loading one.
    #[arg(long)]
    pub kind: Option<SceneKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub mode: RunMode,
    /// Run world and vision as TCP servers on the configured ports.
    #[arg(long)]
    pub net: bool,
    #[arg(long)]
    pub steps: Option<u64>,
    /// Directory for trajectory.csv and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Serve the console on this port.
    #[arg(long)]
    pub console_port: Option<u16>,
    /// Serve the console on the configured console port.
    #[arg(long)]
    pub console: bool,
    /// Directory of console static files.
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
    /// Minimum wall time per tick in milliseconds.
    #[arg(long, conflicts_with = "realtime")]
    pub pace_ms: Option<u64>,
    /// Pace ticks at the simulation time step.
    #[arg(long)]
    pub realtime: bool,
    /// Act on the previous frame's report instead of waiting for the current one.
    #[arg(long)]
    pub freerun: bool,
    #[arg(long)]
    pub fail_on_collision: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl RunArgs {
    pub fn scene(&self) -> Result<WorldScene> {
        match (&self.scene, self.kind) {
            (Some(path), _) => WorldScene::load(path).with_context(|| format!("loading {}", path.display())),
            (None, Some(kind)) => Ok(gen_scene(kind, self.seed)),
            (None, None) => bail!("either --scene or --kind is required"),
        }
    }

    pub fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.mode);
        if let Some(n) = self.steps {
            cfg.max_steps = n;
        }
        for (k, v) in &self.params {
            cfg.set_param(k, *v).map_err(anyhow::Error::msg).with_context(|| format!("--param {k}={v}"))?;
        }
        cfg.freerun = self.freerun;
        cfg.fail_on_collision = self.fail_on_collision;
        Ok(cfg)
    }

    pub fn console(&self, ports: &Ports, cfg: &RunConfig) -> Result<Option<ConsoleServer>> {
        let port = match (self.console_port, self.console) {
            (Some(p), _) => p,
            (None, true) => ports.console,
            (None, false) => return Ok(None),
        };
        let mut server =
            ConsoleServer::bind(port, self.assets.clone()).with_context(|| format!("console port {port}"))?;
        let pace = match (self.pace_ms, self.realtime) {
            (Some(ms), _) => Some(Duration::from_millis(ms)),
            (None, true) => Some(Duration::from_secs_f64(cfg.vehicle.dt)),
            (None, false) => None,
        };
        if let Some(p) = pace {
            server = server.with_pace(p);
        }
        eprintln!("console: http://{}/", server.local_addr());
        Ok(Some(server))
    }
}

fn ports() -> Result<Ports> {
    Ports::from_env().map_err(anyhow::Error::msg).context("PPANAV_PORTS")
}

/// Prints the summary, writes outputs and maps the result to an exit code.
fn finish(result: Result<RunOutput, RunError>, out: Option<&PathBuf>) -> Result<i32> {
    let output = match result {
        Ok(o) => o,
        Err(RunError::Collision(step)) => {
            eprintln!("collision at step {step}");
            return Ok(EXIT_COLLISION);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = out {
        output.write_to(dir).with_context(|| format!("writing {}", dir.display()))?;
    }
    println!("{}", serde_json::to_string_pretty(&output.summary)?);
    Ok(0)
}

pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let scene = args.scene()?;
            let cfg = args.config()?;
            let ports = ports()?;
            let mut console = args.console(&ports, &cfg)?;
            let console_ref = console.as_mut().map(|c| c as &mut dyn Console);
            let result = if args.net {
                let listeners = NetListeners::bind(ports.vision, ports.world)?;
                run_networked(&scene, &cfg, listeners, console_ref)
            } else {
                run_in_process(&scene, &cfg, console_ref)
            };
            finish(result, args.out.as_ref())
        }
        Command::GenScene { kind, seed, out } => {
            let scene = gen_scene(kind, seed);
            std::fs::write(&out, scene.to_json()).with_context(|| format!("writing {}", out.display()))?;
            info!("wrote {kind:?} scene (seed {seed}) to {}", out.display());
            Ok(0)
        }
        Command::ServeVision { port } => {
            let port = port.unwrap_or(ports()?.vision);
            let listener = TcpListener::bind(("127.0.0.1", port)).with_context(|| format!("binding port {port}"))?;
            println!("vision server on {}", listener.local_addr()?);
            loop {
                match bridge::serve_one(&listener, VisionServer::default()) {
                    Ok(v) => info!("vision client done after {} frames", v.frames_processed()),
                    Err(e) => warn!("vision client: {e}"),
                }
            }
        }
        Command::ServeWorld { scene, port } => {
            let scene = WorldScene::load(&scene).with_context(|| format!("loading {}", scene.display()))?;
            scene.validate()?;
            let port = port.unwrap_or(ports()?.world);
            let listener = TcpListener::bind(("127.0.0.1", port)).with_context(|| format!("binding port {port}"))?;
            println!("world server on {}", listener.local_addr()?);
            let cfg = RunConfig::new(RunMode::Reactive);
            loop {
                let world = World::new(scene.clone(), cfg.vehicle, cfg.camera);
                if let Err(e) = bridge::serve_one(&listener, WorldServer::new(world)) {
                    warn!("world client: {e}");
                }
            }
        }
        Command::Interface { run, world, vision } => {
            let scene = run.scene()?;
            let cfg = run.config()?;
            let ports = ports()?;
            let world = world.unwrap_or_else(|| SocketAddr::from(([127, 0, 0, 1], ports.world)));
            let vision = vision.unwrap_or_else(|| SocketAddr::from(([127, 0, 0, 1], ports.vision)));
            let mut console = run.console(&ports, &cfg)?;
            let console_ref = console.as_mut().map(|c| c as &mut dyn Console);
            finish(run_interface(world, vision, &scene, &cfg, console_ref), run.out.as_ref())
        }
    }
}
