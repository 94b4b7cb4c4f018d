//! Framed binary wire format.
//!
//! ```text
//! offset  size  field
//! 0       2     magic 0x53 0x43 ("SC")
//! 2       1     version (0x01)
//! 3       1     message type
//! 4       4     payload length, u32 little-endian
//! 8       n     payload
//! ```
//!
//! All multi-byte payload fields are little-endian.

use std::io::{self, Read};

use thiserror::Error;

use crate::ppa::{GrayPlane, PIXELS};

pub const MAGIC: [u8; 2] = [0x53, 0x43];
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 8;
/// Largest payload accepted for any type other than FRAME.
pub const MAX_PAYLOAD: usize = 1 << 20;

pub mod msg_type {
    pub const FRAME: u8 = 0x01;
    pub const REPORT: u8 = 0x02;
    pub const PARAM_SET: u8 = 0x03;
    pub const GET_POSE: u8 = 0x10;
    pub const POSE: u8 = 0x11;
    pub const SET_STEER: u8 = 0x12;
    pub const SET_SPEED: u8 = 0x13;
    pub const STEP: u8 = 0x14;
    pub const STEP_DONE: u8 = 0x15;
    pub const GET_FRAME: u8 = 0x16;
    pub const STATUS: u8 = 0x20;

    pub const ALL: [u8; 11] =
        [FRAME, REPORT, PARAM_SET, GET_POSE, POSE, SET_STEER, SET_SPEED, STEP, STEP_DONE, GET_FRAME, STATUS];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("bad magic byte {found:#04x} at offset {offset}")]
    BadMagic { offset: usize, found: u8 },
    #[error("unsupported version {found:#04x} at offset {offset}")]
    BadVersion { offset: usize, found: u8 },
    #[error("unknown message type {found:#04x} at offset {offset}")]
    UnknownType { offset: usize, found: u8 },
    #[error("payload length {len} invalid for type {msg_type:#04x} (offset {offset})")]
    BadLength { offset: usize, msg_type: u8, len: u32 },
    #[error("malformed payload at offset {offset}: {reason}")]
    BadPayload { offset: usize, reason: String },
}

/// Every message the bridge carries.
#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Frame(GrayPlane),
    Report {
        closest_x: f32,
        closest_y: f32,
        closest_dis: f32,
        direction: f32,
    },
    ParamSet {
        key: String,
        value: f32,
    },
    GetPose,
    Pose {
        x: f32,
        y: f32,
        heading: f32,
    },
    SetSteer(f32),
    SetSpeed(f32),
    /// Advance the world one tick.
    Step,
    StepDone {
        collision: bool,
        clearance: f32,
    },
    GetFrame,
    Status {
        mode: u8,
        value: f32,
    },
}

impl Message {
    pub fn type_code(&self) -> u8 {
        use msg_type::*;
        match self {
            Message::Frame(_) => FRAME,
            Message::Report { .. } => REPORT,
            Message::ParamSet { .. } => PARAM_SET,
            Message::GetPose => GET_POSE,
            Message::Pose { .. } => POSE,
            Message::SetSteer(_) => SET_STEER,
            Message::SetSpeed(_) => SET_SPEED,
            Message::Step => STEP,
            Message::StepDone { .. } => STEP_DONE,
            Message::GetFrame => GET_FRAME,
            Message::Status { .. } => STATUS,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Message::Frame(_) => "FRAME",
            Message::Report { .. } => "REPORT",
            Message::ParamSet { .. } => "PARAM_SET",
            Message::GetPose => "GET_POSE",
            Message::Pose { .. } => "POSE",
            Message::SetSteer(_) => "SET_STEER",
            Message::SetSpeed(_) => "SET_SPEED",
            Message::Step => "STEP",
            Message::StepDone { .. } => "STEP_DONE",
            Message::GetFrame => "GET_FRAME",
            Message::Status { .. } => "STATUS",
        }
    }
}

fn put_f32s(out: &mut Vec<u8>, vals: &[f32]) {
    for v in vals {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serialises `msg` into a fresh buffer.
pub fn encode(msg: &Message) -> Vec<u8> {
    let mut payload = Vec::new();
    match msg {
        Message::Frame(g) => payload.extend_from_slice(g.as_bytes()),
        Message::Report { closest_x, closest_y, closest_dis, direction } => {
            put_f32s(&mut payload, &[*closest_x, *closest_y, *closest_dis, *direction])
        }
        Message::ParamSet { key, value } => {
            assert!(key.len() <= u8::MAX as usize && key.is_ascii(), "PARAM_SET key must be short ASCII");
            payload.push(key.len() as u8);
            payload.extend_from_slice(key.as_bytes());
            put_f32s(&mut payload, &[*value]);
        }
        Message::GetPose | Message::Step | Message::GetFrame => {}
        Message::Pose { x, y, heading } => put_f32s(&mut payload, &[*x, *y, *heading]),
        Message::SetSteer(v) | Message::SetSpeed(v) => put_f32s(&mut payload, &[*v]),
        Message::StepDone { collision, clearance } => {
            payload.push(*collision as u8);
            put_f32s(&mut payload, &[*clearance]);
        }
        Message::Status { mode, value } => {
            payload.push(*mode);
            put_f32s(&mut payload, &[*value]);
        }
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg.type_code());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(&payload);
    out
}

/// Outcome of a decode attempt on a possibly partial buffer.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoded {
    Message {
        msg: Message,
        consumed: usize,
    },
    /// Buffer holds a valid prefix; at least this many more bytes are needed.
    NeedMore(usize),
}

/// Allowed payload length for a type, or `None` for variable-length types.
fn fixed_len(t: u8) -> Option<usize> {
    use msg_type::*;
    match t {
        FRAME => Some(PIXELS),
        REPORT => Some(16),
        GET_POSE | STEP | GET_FRAME => Some(0),
        POSE => Some(12),
        SET_STEER | SET_SPEED => Some(4),
        STEP_DONE | STATUS => Some(5),
        _ => None,
    }
}

fn f32_at(b: &[u8], i: usize) -> f32 {
    f32::from_le_bytes(b[i..i + 4].try_into().expect("4-byte slice"))
}

/// Validates the header bytes present so far.
fn check_header(buf: &[u8]) -> Result<(), ProtocolError> {
    for (i, &m) in MAGIC.iter().enumerate() {
        if let Some(&b) = buf.get(i) {
            if b != m {
                return Err(ProtocolError::BadMagic { offset: i, found: b });
            }
        }
    }
    if let Some(&v) = buf.get(2) {
        if v != VERSION {
            return Err(ProtocolError::BadVersion { offset: 2, found: v });
        }
    }
    if let Some(&t) = buf.get(3) {
        if !msg_type::ALL.contains(&t) {
            return Err(ProtocolError::UnknownType { offset: 3, found: t });
        }
    }
    if buf.len() >= HEADER_LEN {
        let t = buf[3];
        let len = u32::from_le_bytes(buf[4..8].try_into().expect("4-byte slice"));
        let ok = match fixed_len(t) {
            Some(n) => len as usize == n,
            None => (len as usize) <= MAX_PAYLOAD,
        };
        if !ok {
            return Err(ProtocolError::BadLength { offset: 4, msg_type: t, len });
        }
    }
    Ok(())
}

fn parse_payload(t: u8, p: &[u8]) -> Result<Message, ProtocolError> {
    use msg_type::*;
    Ok(match t {
        FRAME => Message::Frame(GrayPlane::from_vec(p.to_vec()).expect("length checked in header")),
        REPORT => Message::Report {
            closest_x: f32_at(p, 0),
            closest_y: f32_at(p, 4),
            closest_dis: f32_at(p, 8),
            direction: f32_at(p, 12),
        },
        PARAM_SET => {
            let bad = |reason: &str| ProtocolError::BadPayload { offset: HEADER_LEN, reason: reason.into() };
            let klen = *p.first().ok_or_else(|| bad("empty PARAM_SET"))? as usize;
            if p.len() != 1 + klen + 4 {
                return Err(bad("key length disagrees with payload length"));
            }
            let key = &p[1..1 + klen];
            if !key.is_ascii() {
                return Err(ProtocolError::BadPayload { offset: HEADER_LEN + 1, reason: "key is not ASCII".into() });
            }
            Message::ParamSet {
                key: String::from_utf8(key.to_vec()).expect("ascii is utf-8"),
                value: f32_at(p, 1 + klen),
            }
        }
        GET_POSE => Message::GetPose,
        POSE => Message::Pose { x: f32_at(p, 0), y: f32_at(p, 4), heading: f32_at(p, 8) },
        SET_STEER => Message::SetSteer(f32_at(p, 0)),
        SET_SPEED => Message::SetSpeed(f32_at(p, 0)),
        STEP => Message::Step,
        STEP_DONE => match p[0] {
            0 | 1 => Message::StepDone { collision: p[0] == 1, clearance: f32_at(p, 1) },
            other => {
                return Err(ProtocolError::BadPayload {
                    offset: HEADER_LEN,
                    reason: format!("collision flag must be 0 or 1, got {other}"),
                })
            }
        },
        GET_FRAME => Message::GetFrame,
        STATUS => Message::Status { mode: p[0], value: f32_at(p, 1) },
        _ => unreachable!("type validated in header"),
    })
}

/// Decodes one message from the front of `buf` without consuming on
/// incomplete input.
pub fn decode(buf: &[u8]) -> Result<Decoded, ProtocolError> {
    check_header(buf)?;
    if buf.len() < HEADER_LEN {
        return Ok(Decoded::NeedMore(HEADER_LEN - buf.len()));
    }
    let len = u32::from_le_bytes(buf[4..8].try_into().expect("4-byte slice")) as usize;
    let total = HEADER_LEN + len;
    if buf.len() < total {
        return Ok(Decoded::NeedMore(total - buf.len()));
    }
    let msg = parse_payload(buf[3], &buf[HEADER_LEN..total])?;
    Ok(Decoded::Message { msg, consumed: total })
}

/// Incremental decoder for a byte stream arriving in arbitrary chunks.
#[derive(Debug, Default)]
pub struct StreamDecoder {
    buf: Vec<u8>,
    /// Bytes consumed so far, for error offsets relative to the stream.
    position: usize,
}

impl StreamDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    /// Next complete message, `Ok(None)` if more bytes are needed. Error
    /// offsets are absolute stream positions.
    pub fn next_message(&mut self) -> Result<Option<Message>, ProtocolError> {
        match decode(&self.buf).map_err(|e| offset_by(e, self.position))? {
            Decoded::NeedMore(_) => Ok(None),
            Decoded::Message { msg, consumed } => {
                self.buf.drain(..consumed);
                self.position += consumed;
                Ok(Some(msg))
            }
        }
    }
}

fn offset_by(e: ProtocolError, base: usize) -> ProtocolError {
    match e {
        ProtocolError::BadMagic { offset, found } => ProtocolError::BadMagic { offset: offset + base, found },
        ProtocolError::BadVersion { offset, found } => ProtocolError::BadVersion { offset: offset + base, found },
        ProtocolError::UnknownType { offset, found } => ProtocolError::UnknownType { offset: offset + base, found },
        ProtocolError::BadLength { offset, msg_type, len } => {
            ProtocolError::BadLength { offset: offset + base, msg_type, len }
        }
        ProtocolError::BadPayload { offset, reason } => ProtocolError::BadPayload { offset: offset + base, reason },
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Blocking read of one message. `Ok(None)` on a clean end of stream at a
/// message boundary.
pub fn read_message(r: &mut impl Read) -> Result<Option<Message>, ReadError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        let n = r.read(&mut header[got..])?;
        if n == 0 {
            if got == 0 {
                return Ok(None);
            }
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "stream closed inside a header").into());
        }
        got += n;
        check_header(&header[..got])?;
    }
    let len = u32::from_le_bytes(header[4..8].try_into().expect("4-byte slice")) as usize;
    let mut frame = Vec::with_capacity(HEADER_LEN + len);
    frame.extend_from_slice(&header);
    frame.resize(HEADER_LEN + len, 0);
    r.read_exact(&mut frame[HEADER_LEN..])?;
    match decode(&frame)? {
        Decoded::Message { msg, .. } => Ok(Some(msg)),
        Decoded::NeedMore(_) => unreachable!("buffer sized from header"),
    }
}
