use std::collections::VecDeque;
use std::io::{self, BufReader, BufWriter, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use thiserror::Error;

use super::codec::{encode, read_message, Message, ProtocolError, ReadError};
use super::server::Endpoint;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("protocol: {0}")]
    Protocol(#[from] ProtocolError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("timed out waiting for a reply")]
    Timeout,
    #[error("expected {expected}, got {got}")]
    Unexpected { expected: &'static str, got: &'static str },
    #[error("peer closed the connection")]
    Disconnected,
}

impl From<ReadError> for BridgeError {
    fn from(e: ReadError) -> Self {
        match e {
            ReadError::Protocol(p) => BridgeError::Protocol(p),
            ReadError::Io(io) if matches!(io.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {
                BridgeError::Timeout
            }
            ReadError::Io(io) => BridgeError::Io(io),
        }
    }
}

/// A message channel to one peer.
pub trait Link {
    fn send(&mut self, msg: Message) -> Result<(), BridgeError>;

    /// Next reply from the peer; `Ok(None)` once the peer has gone away.
    fn recv(&mut self) -> Result<Option<Message>, BridgeError>;

    fn request(&mut self, msg: Message) -> Result<Option<Message>, BridgeError> {
        self.send(msg)?;
        self.recv()
    }
}

/// Direct calls into an in-process endpoint.
#[derive(Debug)]
pub struct LocalLink<E> {
    endpoint: E,
    replies: VecDeque<Message>,
}

impl<E: Endpoint> LocalLink<E> {
    pub fn new(endpoint: E) -> Self {
        Self { endpoint, replies: VecDeque::new() }
    }

    pub fn endpoint(&self) -> &E {
        &self.endpoint
    }

    pub fn into_inner(self) -> E {
        self.endpoint
    }
}

impl<E: Endpoint> Link for LocalLink<E> {
    fn send(&mut self, msg: Message) -> Result<(), BridgeError> {
        if let Some(reply) = self.endpoint.handle(msg)? {
            self.replies.push_back(reply);
        }
        Ok(())
    }

    fn recv(&mut self) -> Result<Option<Message>, BridgeError> {
        // Nothing queued is what a silent remote peer looks like.
        self.replies.pop_front().map(Some).ok_or(BridgeError::Timeout)
    }
}

/// Framed messages over a TCP stream.
#[derive(Debug)]
pub struct TcpLink {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl TcpLink {
    pub fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> Result<Self, BridgeError> {
        let stream = TcpStream::connect(addr)?;
        Self::from_stream(stream, timeout)
    }

    pub fn from_stream(stream: TcpStream, timeout: Duration) -> Result<Self, BridgeError> {
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(timeout))?;
        let reader = BufReader::with_capacity(1 << 17, stream.try_clone()?);
        Ok(Self { reader, writer: BufWriter::with_capacity(1 << 17, stream) })
    }
}

impl Link for TcpLink {
    fn send(&mut self, msg: Message) -> Result<(), BridgeError> {
        self.writer.write_all(&encode(&msg))?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Option<Message>, BridgeError> {
        self.writer.flush()?;
        match read_message(&mut self.reader) {
            Ok(m) => Ok(m),
            Err(ReadError::Io(e)) if e.kind() == io::ErrorKind::ConnectionReset => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for TcpLink {
    fn drop(&mut self) {
        let _ = self.writer.flush();
    }
}
