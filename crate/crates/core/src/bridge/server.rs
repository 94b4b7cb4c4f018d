use std::io::{BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};

use log::{debug, warn};

use super::codec::{encode, read_message, Message};
use super::link::BridgeError;
use crate::vision::{detect_with, VisionParams};
use crate::world::World;

/// Message handler for one side of the bridge.
pub trait Endpoint {
    /// Handles one incoming message, optionally producing a reply.
    fn handle(&mut self, msg: Message) -> Result<Option<Message>, BridgeError>;
}

impl<E: Endpoint + ?Sized> Endpoint for &mut E {
    fn handle(&mut self, msg: Message) -> Result<Option<Message>, BridgeError> {
        (**self).handle(msg)
    }
}

/// The vision computer: one REPORT per FRAME.
#[derive(Debug, Clone, Default)]
pub struct VisionServer {
    pub params: VisionParams,
    frames: u32,
}

impl VisionServer {
    pub fn new(params: VisionParams) -> Self {
        Self { params, frames: 0 }
    }

    pub fn frames_processed(&self) -> u32 {
        self.frames
    }
}

impl Endpoint for VisionServer {
    fn handle(&mut self, msg: Message) -> Result<Option<Message>, BridgeError> {
        match msg {
            Message::Frame(frame) => {
                let r = detect_with(&frame, &self.params).report;
                self.frames += 1;
                Ok(Some(Message::Report {
                    closest_x: r.closest_x as f32,
                    closest_y: r.closest_y as f32,
                    closest_dis: r.closest_dis as f32,
                    direction: r.direction.sign() as f32,
                }))
            }
            Message::ParamSet { key, value } => {
                match self.params.set(&key, value) {
                    Ok(true) => debug!("vision param {key} = {value}"),
                    Ok(false) => warn!("vision server ignoring unknown parameter {key}"),
                    Err(e) => warn!("vision server rejected {key}: {e}"),
                }
                Ok(None)
            }
            // Sequence probe: echoes how many frames have been processed.
            Message::Status { .. } => Ok(Some(Message::Status { mode: 0, value: self.frames as f32 })),
            other => Err(BridgeError::Unexpected { expected: "FRAME, PARAM_SET or STATUS", got: other.name() }),
        }
    }
}

/// The simulated robot world behind a remote-API style surface.
#[derive(Debug, Clone)]
pub struct WorldServer {
    pub world: World,
}

impl WorldServer {
    pub fn new(world: World) -> Self {
        Self { world }
    }
}

impl Endpoint for WorldServer {
    fn handle(&mut self, msg: Message) -> Result<Option<Message>, BridgeError> {
        let w = &mut self.world;
        match msg {
            Message::GetPose => {
                let (x, y, heading) = w.get_pose();
                Ok(Some(Message::Pose { x: x as f32, y: y as f32, heading: heading as f32 }))
            }
            Message::SetSteer(v) => {
                w.set_steer(v as f64);
                Ok(None)
            }
            Message::SetSpeed(v) => {
                w.set_speed(v as f64);
                Ok(None)
            }
            Message::Step => {
                let out = w.step();
                Ok(Some(Message::StepDone { collision: out.collision, clearance: out.clearance as f32 }))
            }
            Message::GetFrame => Ok(Some(Message::Frame(w.render()))),
            other => Err(BridgeError::Unexpected {
                expected: "GET_POSE, SET_STEER, SET_SPEED, STEP or GET_FRAME",
                got: other.name(),
            }),
        }
    }
}

/// Runs `endpoint` on one accepted connection until the peer hangs up.
pub fn serve_connection<E: Endpoint>(stream: TcpStream, endpoint: &mut E) -> Result<(), BridgeError> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::with_capacity(1 << 17, stream.try_clone()?);
    let mut writer = BufWriter::with_capacity(1 << 17, stream);
    loop {
        let msg = match read_message(&mut reader) {
            Ok(Some(m)) => m,
            Ok(None) => return Ok(()),
            Err(e) => return Err(e.into()),
        };
        if let Some(reply) = endpoint.handle(msg)? {
            writer.write_all(&encode(&reply))?;
            writer.flush()?;
        }
    }
}

/// Accepts a single client on `listener` and serves it; returns the endpoint
/// so callers can inspect its final state.
pub fn serve_one<E: Endpoint>(listener: &TcpListener, mut endpoint: E) -> Result<E, BridgeError> {
    let (stream, peer) = listener.accept()?;
    debug!("bridge client connected from {peer}");
    serve_connection(stream, &mut endpoint)?;
    Ok(endpoint)
}
