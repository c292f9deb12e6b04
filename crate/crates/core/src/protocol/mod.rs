//! Wire protocol for external agents and the browser client.

pub mod client;
pub mod codec;
pub mod server;

pub use client::{Client, Frame};
pub use codec::{
    decode, decode_prefix, encode, read_message, write_message, ConfigAck, DecodeError, ErrorCode, ErrorMsg, Hello,
    InfoMsg, Message, Obs, Reset, Step, MAX_PAYLOAD, OBS_HEADER_LEN, PROTOCOL_VERSION,
};
pub use server::{serve, spawn, ServerHandle, ServerOptions, Session};
