//! One environment per connection; raw TCP and WebSocket share a port.
//!
//! A connection whose first bytes are `GET ` is upgraded to WebSocket and
//! then carries one protocol frame per binary message. Replies go through a
//! bounded queue drained by a writer thread; a client that lets the queue
//! fill up is disconnected.

use std::io::{self, BufReader, BufWriter, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use tungstenite::protocol::Role;
use tungstenite::{Message as WsMessage, WebSocket};

use super::codec::{
    decode, encode, read_message, ConfigAck, DecodeError, ErrorCode, InfoMsg, Message, Obs, ReadError,
    PROTOCOL_VERSION,
};
use crate::config::EnvConfig;
use crate::env::{Env, GazeAction};
use crate::error::Error;

#[derive(Debug, Clone)]
pub struct ServerOptions {
    /// Used when HELLO carries no config.
    pub config: EnvConfig,
    /// Forced onto every session config when set.
    pub fovea: Option<String>,
    pub privileged: bool,
    /// Outgoing frames buffered per connection before it is dropped.
    pub queue_capacity: usize,
}

impl ServerOptions {
    pub fn new(config: EnvConfig) -> Self {
        Self {
            config,
            fovea: None,
            privileged: false,
            queue_capacity: 64,
        }
    }

    fn session_config(&self, requested: Option<EnvConfig>) -> EnvConfig {
        let mut cfg = requested.unwrap_or_else(|| self.config.clone());
        if let Some(f) = &self.fovea {
            cfg.observation.fovea = Some(f.clone());
        }
        cfg.privileged |= self.privileged;
        cfg
    }
}

/// Protocol state for one connection, independent of the transport.
pub struct Session {
    opts: Arc<ServerOptions>,
    env: Option<Env>,
    info: bool,
    reset_done: bool,
}

pub enum Reply {
    Send(Vec<Message>),
    /// Send, then close.
    Close(Vec<Message>),
}

impl Session {
    pub fn new(opts: Arc<ServerOptions>) -> Self {
        Self {
            opts,
            env: None,
            info: false,
            reset_done: false,
        }
    }

    pub fn handle(&mut self, msg: Message) -> Reply {
        let fail = |code, m: String| Reply::Close(vec![Message::error(code, m)]);
        match msg {
            Message::Hello(h) => {
                if self.env.is_some() {
                    return fail(ErrorCode::State, "duplicate HELLO".into());
                }
                if h.version != PROTOCOL_VERSION {
                    return fail(
                        ErrorCode::Version,
                        format!("server speaks version {PROTOCOL_VERSION}, client sent {}", h.version),
                    );
                }
                let cfg = self.opts.session_config(h.config.map(|b| *b));
                match Env::new(cfg) {
                    Ok(env) => {
                        let (w, hh) = env.observation_size();
                        let ack = ConfigAck {
                            version: PROTOCOL_VERSION,
                            task: env.config().task.clone(),
                            observation_width: w,
                            observation_height: hh,
                            episode_length_steps: env.clock().episode_length_steps,
                            privileged: env.config().privileged,
                        };
                        self.info = h.info;
                        self.env = Some(env);
                        Reply::Send(vec![Message::ConfigAck(ack)])
                    }
                    Err(e) => fail(ErrorCode::Config, e.to_string()),
                }
            }
            Message::Reset(r) => {
                let Some(env) = self.env.as_mut() else {
                    return fail(ErrorCode::State, "RESET before HELLO".into());
                };
                match env.reset(r.seed) {
                    Ok(img) => {
                        self.reset_done = true;
                        let obs = obs_message(&img, 0, 0.0, false);
                        let mut out = vec![obs];
                        if self.info {
                            out.push(info_message(env));
                        }
                        Reply::Send(out)
                    }
                    Err(e) => fail(ErrorCode::Internal, e.to_string()),
                }
            }
            Message::Step(s) => {
                let Some(env) = self.env.as_mut().filter(|_| self.reset_done) else {
                    return fail(ErrorCode::State, "STEP before RESET".into());
                };
                match env.step(GazeAction::new(s.d_yaw, s.d_pitch)) {
                    Ok(r) => {
                        let obs = obs_message(&r.observation, r.info.step_index, r.reward, r.done);
                        let mut out = vec![obs];
                        if self.info {
                            out.push(info_message(env));
                        }
                        Reply::Send(out)
                    }
                    Err(Error::Misuse(m)) => fail(ErrorCode::State, m.into()),
                    Err(e) => fail(ErrorCode::Internal, e.to_string()),
                }
            }
            Message::Bye => Reply::Close(Vec::new()),
            other => fail(ErrorCode::State, format!("unexpected client message tag {}", other.tag())),
        }
    }

    /// The reply to a frame that failed to decode.
    pub fn decode_failure(e: &DecodeError) -> Message {
        let code = match e {
            DecodeError::Oversized(_) => ErrorCode::Size,
            _ => ErrorCode::Decode,
        };
        Message::error(code, e.to_string())
    }
}

fn obs_message(img: &image::RgbImage, step: u64, reward: f64, done: bool) -> Message {
    Message::Obs(Obs {
        width: img.width() as u16,
        height: img.height() as u16,
        step: step as u32,
        reward: reward as f32,
        done,
        pixels: img.as_raw().clone(),
    })
}

fn info_message(env: &mut Env) -> Message {
    Message::Info(Box::new(InfoMsg {
        info: env.info(),
        records: env.drain_records(),
    }))
}

/// Writer half: a bounded queue in front of the socket.
struct Outbox {
    tx: SyncSender<Vec<u8>>,
    stream: TcpStream,
}

impl Outbox {
    /// False once the connection should be torn down.
    fn push(&self, frame: Vec<u8>) -> bool {
        match self.tx.try_send(frame) {
            Ok(()) => true,
            Err(TrySendError::Full(_)) | Err(TrySendError::Disconnected(_)) => {
                let _ = self.stream.shutdown(Shutdown::Both);
                false
            }
        }
    }
}

fn spawn_writer<F>(rx: Receiver<Vec<u8>>, mut send: F) -> JoinHandle<()>
where
    F: FnMut(Vec<u8>) -> io::Result<()> + Send + 'static,
{
    thread::spawn(move || {
        for frame in rx {
            if send(frame).is_err() {
                break;
            }
        }
    })
}

fn run_tcp(stream: TcpStream, opts: Arc<ServerOptions>) -> io::Result<()> {
    let (tx, rx) = sync_channel(opts.queue_capacity.max(1));
    let mut w = BufWriter::new(stream.try_clone()?);
    let writer = spawn_writer(rx, move |frame| {
        w.write_all(&frame)?;
        w.flush()
    });
    let out = Outbox {
        tx,
        stream: stream.try_clone()?,
    };
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut session = Session::new(opts);
    loop {
        let msg = match read_message(&mut reader) {
            Ok(Some(m)) => m,
            Ok(None) | Err(ReadError::Io(_)) => break,
            Err(ReadError::Decode(e)) => {
                out.push(encode(&Session::decode_failure(&e)));
                break;
            }
        };
        let (msgs, close) = match session.handle(msg) {
            Reply::Send(m) => (m, false),
            Reply::Close(m) => (m, true),
        };
        if !msgs.into_iter().all(|m| out.push(encode(&m))) || close {
            break;
        }
    }
    drop(out);
    let _ = writer.join();
    let _ = stream.shutdown(Shutdown::Both);
    Ok(())
}

fn run_ws(stream: TcpStream, opts: Arc<ServerOptions>) -> io::Result<()> {
    let mut ws = tungstenite::accept(stream.try_clone()?).map_err(|e| io::Error::other(e.to_string()))?;
    let (tx, rx) = sync_channel(opts.queue_capacity.max(1));
    let mut wws = WebSocket::from_raw_socket(stream.try_clone()?, Role::Server, None);
    let writer = spawn_writer(rx, move |frame| {
        wws.send(WsMessage::Binary(frame)).map_err(|e| io::Error::other(e.to_string()))
    });
    let out = Outbox {
        tx,
        stream: stream.try_clone()?,
    };
    let mut session = Session::new(opts);
    loop {
        let data = match ws.read() {
            Ok(WsMessage::Binary(b)) => b,
            Ok(WsMessage::Close(_)) | Err(_) => break,
            Ok(_) => continue,
        };
        let msg = match decode(&data) {
            Ok(m) => m,
            Err(e) => {
                out.push(encode(&Session::decode_failure(&e)));
                break;
            }
        };
        let (msgs, close) = match session.handle(msg) {
            Reply::Send(m) => (m, false),
            Reply::Close(m) => (m, true),
        };
        if !msgs.into_iter().all(|m| out.push(encode(&m))) || close {
            break;
        }
    }
    drop(out);
    let _ = writer.join();
    let _ = stream.shutdown(Shutdown::Both);
    Ok(())
}

fn handle_connection(stream: TcpStream, opts: Arc<ServerOptions>) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let mut head = [0u8; 4];
    let n = peek_exact(&stream, &mut head)?;
    if n == 4 && &head == b"GET " {
        run_ws(stream, opts)
    } else {
        run_tcp(stream, opts)
    }
}

/// Peek until `buf` is full or the peer stops sending.
fn peek_exact(stream: &TcpStream, buf: &mut [u8]) -> io::Result<usize> {
    loop {
        let n = stream.peek(buf)?;
        if n == 0 || n == buf.len() {
            return Ok(n);
        }
        thread::yield_now();
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stop accepting; live sessions finish on their own.
    pub fn shutdown(mut self) {
        self.stop_now();
    }

    fn stop_now(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if self.thread.is_some() {
            self.stop_now();
        }
    }
}

/// Accept connections on `listener` in a background thread.
pub fn spawn(listener: TcpListener, opts: ServerOptions) -> io::Result<ServerHandle> {
    let addr = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let flag = stop.clone();
    let opts = Arc::new(opts);
    let thread = thread::spawn(move || accept_loop(listener, opts, &flag));
    Ok(ServerHandle {
        addr,
        stop,
        thread: Some(thread),
    })
}

/// Accept connections forever on the calling thread.
pub fn serve(listener: TcpListener, opts: ServerOptions) {
    accept_loop(listener, Arc::new(opts), &AtomicBool::new(false));
}

fn accept_loop(listener: TcpListener, opts: Arc<ServerOptions>, stop: &AtomicBool) {
    for conn in listener.incoming() {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = conn else { continue };
        let opts = opts.clone();
        thread::spawn(move || {
            let _ = handle_connection(stream, opts);
        });
    }
}
