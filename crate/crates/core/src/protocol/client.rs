//! Blocking TCP client.

use std::io::{BufReader, BufWriter, Write};
use std::net::{TcpStream, ToSocketAddrs};

use super::codec::{encode, read_message, ConfigAck, ErrorMsg, Hello, InfoMsg, Message, Obs, Reset, Step, PROTOCOL_VERSION};
use crate::config::EnvConfig;
use crate::env::GazeAction;
use crate::error::{Error, Result};

#[derive(Debug)]
pub enum ClientError {
    Server(ErrorMsg),
    Unexpected(Message),
    Closed,
}

impl std::fmt::Display for ClientError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClientError::Server(e) => write!(f, "server error {:?}: {}", e.code, e.message),
            ClientError::Unexpected(m) => write!(f, "unexpected message tag {}", m.tag()),
            ClientError::Closed => write!(f, "connection closed"),
        }
    }
}

/// One observation, plus step metadata when the session asked for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub obs: Obs,
    pub info: Option<InfoMsg>,
}

pub struct Client {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
    info: bool,
}

fn proto(e: ClientError) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self> {
        let s = TcpStream::connect(addr)?;
        s.set_nodelay(true)?;
        Ok(Self {
            reader: BufReader::new(s.try_clone()?),
            writer: BufWriter::new(s),
            info: false,
        })
    }

    pub fn send(&mut self, m: &Message) -> Result<()> {
        self.writer.write_all(&encode(m))?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn recv(&mut self) -> Result<Message> {
        match read_message(&mut self.reader) {
            Ok(Some(m)) => Ok(m),
            Ok(None) => Err(proto(ClientError::Closed)),
            Err(super::codec::ReadError::Io(e)) => Err(Error::Io(e)),
            Err(super::codec::ReadError::Decode(e)) => Err(Error::Decode(e)),
        }
    }

    fn expect_ok(&mut self) -> Result<Message> {
        match self.recv()? {
            Message::Error(e) => Err(proto(ClientError::Server(e))),
            m => Ok(m),
        }
    }

    pub fn hello(&mut self, config: Option<EnvConfig>, info: bool) -> Result<ConfigAck> {
        self.send(&Message::Hello(Hello {
            version: PROTOCOL_VERSION,
            info,
            config: config.map(Box::new),
        }))?;
        match self.expect_ok()? {
            Message::ConfigAck(a) => {
                self.info = info;
                Ok(a)
            }
            m => Err(proto(ClientError::Unexpected(m))),
        }
    }

    fn frame(&mut self) -> Result<Frame> {
        let obs = match self.expect_ok()? {
            Message::Obs(o) => o,
            m => return Err(proto(ClientError::Unexpected(m))),
        };
        let info = if self.info {
            match self.expect_ok()? {
                Message::Info(i) => Some(*i),
                m => return Err(proto(ClientError::Unexpected(m))),
            }
        } else {
            None
        };
        Ok(Frame { obs, info })
    }

    pub fn reset(&mut self, seed: u64) -> Result<Frame> {
        self.send(&Message::Reset(Reset { seed }))?;
        self.frame()
    }

    pub fn step(&mut self, action: GazeAction) -> Result<Frame> {
        self.send(&Message::Step(Step {
            d_yaw: action.d_yaw,
            d_pitch: action.d_pitch,
        }))?;
        self.frame()
    }

    pub fn bye(mut self) -> Result<()> {
        self.send(&Message::Bye)
    }
}
