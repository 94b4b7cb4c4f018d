//! Operator console endpoint.
//!
//! One TCP port carries both the `/telemetry` websocket and plain HTTP for
//! the console's static files. The run loop never waits on a client: each
//! client gets a small bounded queue and messages are dropped when it is
//! full.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender, SyncSender, TryRecvError, TrySendError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use base64::Engine as _;
use log::{debug, info, warn};
use ppanav_core::runner::{Console, ParamUpdate, Telemetry};
use ppanav_core::{NavParams, VisionParams};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tungstenite::{Message as WsMessage, WebSocket};

/// Per-client queue depth before telemetry is dropped.
pub const CLIENT_QUEUE: usize = 32;
/// Upper bound on how often a camera frame rides along with telemetry.
pub const MAX_FRAME_RATE: f64 = 15.0;

const POLL: Duration = Duration::from_millis(5);
const REQUEST_LIMIT: usize = 8192;

const PLACEHOLDER_INDEX: &str = r#"<!doctype html>
<html>
<head><meta charset="utf-8"><title>ppanav console</title></head>
<body>
<h1>ppanav console</h1>
<p>No console assets installed. Pass <code>--assets DIR</code> to serve a built console.</p>
<pre id="log"></pre>
<script>
const ws = new WebSocket(`ws://${location.host}/telemetry`);
const log = document.getElementById("log");
ws.onmessage = (ev) => {
  const m = JSON.parse(ev.data);
  if (m.frame) m.frame = `<${m.frame.length} base64 chars>`;
  log.textContent = JSON.stringify(m, null, 2);
};
</script>
</body>
</html>
"#;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Inbound {
    ParamSet { key: String, value: f64 },
}

struct Client {
    id: u64,
    tx: SyncSender<Arc<str>>,
}

struct Shared {
    clients: Mutex<Vec<Client>>,
    params: Mutex<Sender<ParamUpdate>>,
    assets: Option<PathBuf>,
    stop: AtomicBool,
    next_id: AtomicU64,
}

impl Shared {
    fn broadcast(&self, text: Arc<str>) {
        let mut clients = self.clients.lock().expect("client list");
        clients.retain(|c| match c.tx.try_send(text.clone()) {
            Ok(()) => true,
            Err(TrySendError::Full(_)) => {
                debug!("console client {} is behind, dropping a message", c.id);
                true
            }
            Err(TrySendError::Disconnected(_)) => false,
        });
    }
}

/// Console endpoint bound to a port; implements [`Console`] for the run loop.
pub struct ConsoleServer {
    shared: Arc<Shared>,
    params: Receiver<ParamUpdate>,
    addr: SocketAddr,
    acceptor: Option<JoinHandle<()>>,
    last_frame: Option<Instant>,
    pace: Option<Duration>,
    next_tick: Option<Instant>,
}

impl ConsoleServer {
    /// Binds `127.0.0.1:port`; port 0 picks a free one. Static files come
    /// from `assets` when given.
    pub fn bind(port: u16, assets: Option<PathBuf>) -> io::Result<Self> {
        let listener = TcpListener::bind(("127.0.0.1", port))?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (tx, rx) = mpsc::channel();
        let shared = Arc::new(Shared {
            clients: Mutex::new(Vec::new()),
            params: Mutex::new(tx),
            assets,
            stop: AtomicBool::new(false),
            next_id: AtomicU64::new(0),
        });
        let s = shared.clone();
        let acceptor = thread::Builder::new().name("console-accept".into()).spawn(move || accept_loop(listener, s))?;
        info!("console listening on http://{addr}/ (telemetry at ws://{addr}/telemetry)");
        Ok(Self { shared, params: rx, addr, acceptor: Some(acceptor), last_frame: None, pace: None, next_tick: None })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Holds each tick to at least `period` of wall time.
    pub fn with_pace(mut self, period: Duration) -> Self {
        self.pace = Some(period);
        self
    }

    pub fn client_count(&self) -> usize {
        self.shared.clients.lock().expect("client list").len()
    }

    fn wait_for_pace(&mut self) {
        let Some(period) = self.pace else { return };
        let now = Instant::now();
        let deadline = self.next_tick.unwrap_or(now);
        if deadline > now {
            thread::sleep(deadline - now);
        }
        self.next_tick = Some(deadline.max(now) + period);
    }
}

impl Drop for ConsoleServer {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.acceptor.take() {
            let _ = h.join();
        }
    }
}

impl Console for ConsoleServer {
    fn poll_params(&mut self) -> Vec<ParamUpdate> {
        let mut out = Vec::new();
        loop {
            match self.params.try_recv() {
                Ok(u) => out.push(u),
                Err(TryRecvError::Empty | TryRecvError::Disconnected) => return out,
            }
        }
    }

    fn publish(&mut self, t: &Telemetry<'_>) {
        let now = Instant::now();
        let with_frame = self.last_frame.is_none_or(|last| (now - last).as_secs_f64() >= 1.0 / MAX_FRAME_RATE);
        if with_frame {
            self.last_frame = Some(now);
        }
        if self.client_count() > 0 {
            let msg = telemetry_json(t, with_frame);
            self.shared.broadcast(msg.to_string().into());
        }
        self.wait_for_pace();
    }

    fn rejected(&mut self, update: &ParamUpdate, reason: &str) {
        warn!("console parameter {}={} rejected: {reason}", update.key, update.value);
        let msg = json!({ "type": "error", "key": update.key, "value": update.value, "message": reason });
        self.shared.broadcast(msg.to_string().into());
    }
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Current values of every tunable parameter, keyed by name.
pub fn params_json(nav: &NavParams, vision: &VisionParams) -> Map<String, Value> {
    let mut m = Map::new();
    for k in NavParams::KEYS {
        m.insert(k.into(), finite(nav.get(k).expect("listed key")));
    }
    for k in VisionParams::KEYS {
        m.insert(k.into(), finite(vision.get(k).expect("listed key") as f64));
    }
    m
}

pub fn telemetry_json(t: &Telemetry<'_>, with_frame: bool) -> Value {
    let r = t.record;
    let frame = with_frame.then(|| base64::engine::general_purpose::STANDARD.encode(t.frame.as_bytes()));
    json!({
        "type": "telemetry",
        "tick": r.step,
        "pose": { "x": r.x, "y": r.y, "heading": r.heading },
        "mode": r.mode.as_str(),
        "theta_steer": r.theta_steer,
        "report": {
            "closest_x": r.report.closest_x,
            "closest_y": r.report.closest_y,
            "closest_dis": r.report.closest_dis,
            "direction": r.report.direction.sign(),
        },
        "collision": r.collision,
        "clearance": finite(r.clearance as f64),
        "target_index": r.target_index,
        "params": params_json(t.nav, t.vision),
        "frame": frame,
    })
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) {
    while !shared.stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, peer)) => {
                let s = shared.clone();
                let spawned = thread::Builder::new().name("console-client".into()).spawn(move || {
                    if let Err(e) = handle_connection(stream, &s) {
                        debug!("console connection from {peer} ended: {e}");
                    }
                });
                if let Err(e) = spawned {
                    warn!("console: cannot spawn client thread: {e}");
                }
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(20)),
            Err(e) => {
                warn!("console accept failed: {e}");
                thread::sleep(Duration::from_millis(20));
            }
        }
    }
}

struct Request {
    method: String,
    path: String,
    headers: HashMap<String, String>,
}

/// Peeks the request head without consuming it so a websocket handshake
/// can still read it.
fn peek_request(stream: &TcpStream) -> io::Result<Request> {
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut buf = vec![0u8; REQUEST_LIMIT];
    let head = loop {
        let n = stream.peek(&mut buf)?;
        if n == 0 {
            return Err(io::ErrorKind::UnexpectedEof.into());
        }
        if let Some(end) = buf[..n].windows(4).position(|w| w == b"\r\n\r\n") {
            break String::from_utf8_lossy(&buf[..end]).into_owned();
        }
        if n == buf.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "request head too large"));
        }
        thread::sleep(Duration::from_millis(2));
    };
    let mut lines = head.lines();
    let mut first = lines.next().unwrap_or_default().split_whitespace();
    let method = first.next().unwrap_or_default().to_string();
    let path = first.next().unwrap_or_default().to_string();
    let headers = lines
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
        .collect();
    Ok(Request { method, path, headers })
}

fn handle_connection(stream: TcpStream, shared: &Shared) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    let req = peek_request(&stream)?;
    let upgrade = req.headers.get("upgrade").is_some_and(|v| v.eq_ignore_ascii_case("websocket"));
    let path = req.path.split('?').next().unwrap_or_default();
    if path == "/telemetry" && upgrade {
        return serve_websocket(stream, shared);
    }
    serve_http(stream, &req, path, shared.assets.as_deref())
}

fn serve_websocket(stream: TcpStream, shared: &Shared) -> io::Result<()> {
    let mut ws = tungstenite::accept(stream).map_err(|e| io::Error::other(e.to_string()))?;
    ws.get_ref().set_read_timeout(Some(POLL))?;
    let id = shared.next_id.fetch_add(1, Ordering::SeqCst);
    let (tx, rx) = mpsc::sync_channel::<Arc<str>>(CLIENT_QUEUE);
    shared.clients.lock().expect("client list").push(Client { id, tx });
    let params = shared.params.lock().expect("param sender").clone();
    debug!("console client {id} connected");
    let result = client_loop(&mut ws, &rx, &params, shared);
    shared.clients.lock().expect("client list").retain(|c| c.id != id);
    debug!("console client {id} gone");
    result
}

fn client_loop(
    ws: &mut WebSocket<TcpStream>,
    rx: &Receiver<Arc<str>>,
    params: &Sender<ParamUpdate>,
    shared: &Shared,
) -> io::Result<()> {
    let ws_err = |e: tungstenite::Error| io::Error::other(e.to_string());
    loop {
        if shared.stop.load(Ordering::SeqCst) {
            let _ = ws.close(None);
            let _ = ws.flush();
            return Ok(());
        }
        loop {
            match rx.try_recv() {
                Ok(text) => ws.send(WsMessage::text(text.as_ref())).map_err(ws_err)?,
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => return Ok(()),
            }
        }
        match ws.read() {
            Ok(WsMessage::Text(text)) => match serde_json::from_str::<Inbound>(&text) {
                Ok(Inbound::ParamSet { key, value }) => {
                    // the loop may be gone already; nothing to do then
                    let _ = params.send(ParamUpdate { key, value });
                }
                Err(e) => {
                    let reply = json!({ "type": "error", "message": format!("bad console message: {e}") });
                    ws.send(WsMessage::text(reply.to_string())).map_err(ws_err)?;
                }
            },
            Ok(WsMessage::Close(_)) => {}
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => return Ok(()),
            Err(e) => return Err(ws_err(e)),
        }
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html" | "htm") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("ico") => "image/x-icon",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

/// Resolves a URL path inside `root`; `None` for anything that would leave it.
pub fn resolve_asset(root: &Path, url_path: &str) -> Option<PathBuf> {
    let rel = url_path.trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let mut out = root.to_path_buf();
    for c in Path::new(rel).components() {
        match c {
            Component::Normal(part) => out.push(part),
            _ => return None,
        }
    }
    Some(out)
}

fn respond(stream: &mut TcpStream, status: &str, ctype: &str, body: &[u8]) -> io::Result<()> {
    write!(
        stream,
        "HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    )?;
    stream.write_all(body)?;
    stream.flush()
}

fn serve_http(mut stream: TcpStream, req: &Request, path: &str, assets: Option<&Path>) -> io::Result<()> {
    // consume the head we peeked
    let mut head = Vec::new();
    let mut byte = [0u8; 1];
    while !head.ends_with(b"\r\n\r\n") && head.len() < REQUEST_LIMIT {
        if stream.read(&mut byte)? == 0 {
            break;
        }
        head.push(byte[0]);
    }
    if req.method != "GET" && req.method != "HEAD" {
        return respond(&mut stream, "405 Method Not Allowed", "text/plain", b"method not allowed\n");
    }
    if path == "/telemetry" {
        return respond(&mut stream, "426 Upgrade Required", "text/plain", b"websocket endpoint\n");
    }
    let (status, ctype, body) = match assets {
        Some(root) => match resolve_asset(root, path).filter(|p| p.is_file()) {
            Some(file) => ("200 OK", content_type(&file), std::fs::read(&file)?),
            None => ("404 Not Found", "text/plain", b"not found\n".to_vec()),
        },
        None if path == "/" || path == "/index.html" => {
            ("200 OK", "text/html; charset=utf-8", PLACEHOLDER_INDEX.as_bytes().to_vec())
        }
        None => ("404 Not Found", "text/plain", b"not found\n".to_vec()),
    };
    let body = if req.method == "HEAD" { &[][..] } else { &body[..] };
    respond(&mut stream, status, ctype, body)
}
