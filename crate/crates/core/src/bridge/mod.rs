//! Process bridge: wire codec, message links and the two servers.
//!
//! The interface loop talks to the vision server and the world through the
//! [`Link`] trait. A [`LocalLink`] calls an [`Endpoint`] directly; a
//! [`TcpLink`] carries the same messages over a socket. Because both move
//! the same [`Message`] values, an in-process run and a networked run see
//! identical numbers.

pub mod codec;
mod link;
mod server;

pub use codec::{decode, encode, msg_type, read_message, Decoded, Message, ProtocolError, StreamDecoder};
pub use link::{BridgeError, Link, LocalLink, TcpLink};
pub use server::{serve_connection, serve_one, Endpoint, VisionServer, WorldServer};

use std::time::Duration;

/// Default per-reply timeout.
pub const REPLY_TIMEOUT: Duration = Duration::from_secs(2);

/// TCP ports for the vision server, the world and the console telemetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ports {
    pub vision: u16,
    pub world: u16,
    pub console: u16,
}

impl Default for Ports {
    fn default() -> Self {
        Self { vision: 27725, world: 27726, console: 27727 }
    }
}

impl Ports {
    /// Parses `"vision,world,console"`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<_> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated ports, got {s:?}"));
        }
        let p = |i: usize| parts[i].parse::<u16>().map_err(|e| format!("port {:?}: {e}", parts[i]));
        Ok(Self { vision: p(0)?, world: p(1)?, console: p(2)? })
    }

    /// Defaults, overridden by `PPANAV_PORTS` when set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("PPANAV_PORTS") {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(Self::default()),
        }
    }
}
