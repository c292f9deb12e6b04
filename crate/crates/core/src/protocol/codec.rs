//! Frame encoding.
//!
//! ```text
//! +----------------+--------+-----------------+
//! | len: u32 (BE)  | tag u8 | payload (len B) |
//! +----------------+--------+-----------------+
//! ```
//!
//! Control payloads are JSON. OBS is binary: a 13-byte header
//! (`width u16, height u16, step u32, reward f32, done u8`, all big-endian)
//! followed by `3·width·height` RGB bytes, row-major from the top.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EnvConfig;
use crate::env::StepInfo;
use crate::session::TrialRecord;

pub const PROTOCOL_VERSION: u32 = 1;
/// Largest accepted payload.
pub const MAX_PAYLOAD: usize = 16 << 20;
pub const OBS_HEADER_LEN: usize = 13;

pub mod tag {
    pub const HELLO: u8 = 1;
    pub const CONFIG_ACK: u8 = 2;
    pub const RESET: u8 = 3;
    pub const STEP: u8 = 4;
    pub const OBS: u8 = 5;
    pub const ERROR: u8 = 6;
    pub const BYE: u8 = 7;
    pub const INFO: u8 = 8;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("truncated frame: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("unknown message tag {0}")]
    BadTag(u8),
    #[error("payload of {0} bytes exceeds the limit")]
    Oversized(usize),
    #[error("length field says {declared} bytes but {actual} follow")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("bad payload: {0}")]
    Payload(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Hello {
    pub version: u32,
    /// Ask for an INFO frame after every OBS.
    #[serde(default)]
    pub info: bool,
    /// Environment config; the server default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Box<EnvConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConfigAck {
    pub version: u32,
    pub task: String,
    pub observation_width: u32,
    pub observation_height: u32,
    pub episode_length_steps: u64,
    pub privileged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reset {
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Step {
    pub d_yaw: f64,
    pub d_pitch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obs {
    pub width: u16,
    pub height: u16,
    pub step: u32,
    pub reward: f32,
    pub done: bool,
    pub pixels: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ErrorCode {
    Version,
    Size,
    State,
    Decode,
    Config,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorMsg {
    pub code: ErrorCode,
    pub message: String,
}

/// Step metadata and the trials completed on that step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InfoMsg {
    pub info: StepInfo,
    #[serde(default)]
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Hello(Hello),
    ConfigAck(ConfigAck),
    Reset(Reset),
    Step(Step),
    Obs(Obs),
    Error(ErrorMsg),
    Bye,
    Info(Box<InfoMsg>),
}

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::Hello(_) => tag::HELLO,
            Message::ConfigAck(_) => tag::CONFIG_ACK,
            Message::Reset(_) => tag::RESET,
            Message::Step(_) => tag::STEP,
            Message::Obs(_) => tag::OBS,
            Message::Error(_) => tag::ERROR,
            Message::Bye => tag::BYE,
            Message::Info(_) => tag::INFO,
        }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Message::Error(ErrorMsg {
            code,
            message: message.into(),
        })
    }
}

impl Obs {
    pub fn payload_len(&self) -> usize {
        OBS_HEADER_LEN + self.pixels.len()
    }
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    serde_json::to_vec(v).expect("protocol types serialize")
}

pub fn encode_payload(msg: &Message) -> Vec<u8> {
    match msg {
        Message::Hello(m) => json(m),
        Message::ConfigAck(m) => json(m),
        Message::Reset(m) => json(m),
        Message::Step(m) => json(m),
        Message::Error(m) => json(m),
        Message::Info(m) => json(m),
        Message::Bye => Vec::new(),
        Message::Obs(o) => {
            let mut out = Vec::with_capacity(o.payload_len());
            out.extend_from_slice(&o.width.to_be_bytes());
            out.extend_from_slice(&o.height.to_be_bytes());
            out.extend_from_slice(&o.step.to_be_bytes());
            out.extend_from_slice(&o.reward.to_be_bytes());
            out.push(u8::from(o.done));
            out.extend_from_slice(&o.pixels);
            out
        }
    }
}

/// A complete frame: length, tag, payload.
pub fn encode(msg: &Message) -> Vec<u8> {
    let payload = encode_payload(msg);
    let mut out = Vec::with_capacity(5 + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.push(msg.tag());
    out.extend_from_slice(&payload);
    out
}

fn parse_json<'a, T: Deserialize<'a>>(payload: &'a [u8]) -> Result<T, DecodeError> {
    serde_json::from_slice(payload).map_err(|e| DecodeError::Payload(e.to_string()))
}

pub fn decode_payload(tag: u8, payload: &[u8]) -> Result<Message, DecodeError> {
    Ok(match tag {
        tag::HELLO => Message::Hello(parse_json(payload)?),
        tag::CONFIG_ACK => Message::ConfigAck(parse_json(payload)?),
        tag::RESET => Message::Reset(parse_json(payload)?),
        tag::STEP => {
            let s: Step = parse_json(payload)?;
            if !(s.d_yaw.is_finite() && s.d_pitch.is_finite()) {
                return Err(DecodeError::Payload("non-finite step".into()));
            }
            Message::Step(s)
        }
        tag::ERROR => Message::Error(parse_json(payload)?),
        tag::INFO => Message::Info(Box::new(parse_json(payload)?)),
        tag::BYE => {
            if !payload.is_empty() {
                return Err(DecodeError::Payload("BYE carries no payload".into()));
            }
            Message::Bye
        }
        tag::OBS => {
            if payload.len() < OBS_HEADER_LEN {
                return Err(DecodeError::Truncated {
                    needed: OBS_HEADER_LEN,
                    have: payload.len(),
                });
            }
            let width = u16::from_be_bytes([payload[0], payload[1]]);
            let height = u16::from_be_bytes([payload[2], payload[3]]);
            let step = u32::from_be_bytes(payload[4..8].try_into().expect("4 bytes"));
            let reward = f32::from_be_bytes(payload[8..12].try_into().expect("4 bytes"));
            let done = match payload[12] {
                0 => false,
                1 => true,
                b => return Err(DecodeError::Payload(format!("done byte {b}"))),
            };
            let pixels = &payload[OBS_HEADER_LEN..];
            let expected = 3 * usize::from(width) * usize::from(height);
            if pixels.len() != expected {
                return Err(DecodeError::LengthMismatch {
                    declared: expected,
                    actual: pixels.len(),
                });
            }
            Message::Obs(Obs {
                width,
                height,
                step,
                reward,
                done,
                pixels: pixels.to_vec(),
            })
        }
        other => return Err(DecodeError::BadTag(other)),
    })
}

/// Decode exactly one frame occupying all of `bytes`.
pub fn decode(bytes: &[u8]) -> Result<Message, DecodeError> {
    let (msg, used) = decode_prefix(bytes)?;
    if used != bytes.len() {
        return Err(DecodeError::LengthMismatch {
            declared: used - 5,
            actual: bytes.len() - 5,
        });
    }
    Ok(msg)
}

/// Decode the first frame of `bytes`, returning it and the bytes consumed.
pub fn decode_prefix(bytes: &[u8]) -> Result<(Message, usize), DecodeError> {
    if bytes.len() < 5 {
        return Err(DecodeError::Truncated {
            needed: 5,
            have: bytes.len(),
        });
    }
    let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
    if len > MAX_PAYLOAD {
        return Err(DecodeError::Oversized(len));
    }
    let tag = bytes[4];
    let end = 5 + len;
    if bytes.len() < end {
        return Err(DecodeError::Truncated {
            needed: end,
            have: bytes.len(),
        });
    }
    Ok((decode_payload(tag, &bytes[5..end])?, end))
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Read one frame; `Ok(None)` on a clean end of stream before any byte.
pub fn read_message<R: Read>(r: &mut R) -> Result<Option<Message>, ReadError> {
    let mut head = [0u8; 5];
    let mut got = 0;
    while got < head.len() {
        let n = r.read(&mut head[got..])?;
        if n == 0 {
            if got == 0 {
                return Ok(None);
            }
            return Err(DecodeError::Truncated { needed: 5, have: got }.into());
        }
        got += n;
    }
    let len = u32::from_be_bytes(head[..4].try_into().expect("4 bytes")) as usize;
    if len > MAX_PAYLOAD {
        return Err(DecodeError::Oversized(len).into());
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            ReadError::Decode(DecodeError::Truncated {
                needed: 5 + len,
                have: 5,
            })
        } else {
            ReadError::Io(e)
        }
    })?;
    Ok(Some(decode_payload(head[4], &payload)?))
}

pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> io::Result<()> {
    w.write_all(&encode(msg))?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(w: u16, h: u16) -> Obs {
        Obs {
            width: w,
            height: h,
            step: 17,
            reward: 1.0,
            done: false,
            pixels: (0..3 * usize::from(w) * usize::from(h)).map(|i| i as u8).collect(),
        }
    }

    #[test]
    fn obs_length_for_84x84() {
        let frame = encode(&Message::Obs(obs(84, 84)));
        let len = u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize;
        assert_eq!(len, 13 + 21168);
        assert_eq!(frame.len(), 5 + 13 + 21168);
    }

    #[test]
    fn hello_round_trip() {
        let m = Message::Hello(Hello {
            version: 1,
            info: true,
            config: Some(Box::new(EnvConfig::for_task("glass"))),
        });
        assert_eq!(decode(&encode(&m)).unwrap(), m);
    }

    #[test]
    fn truncated_and_mismatched_frames() {
        let f = encode(&Message::Reset(Reset { seed: 5 }));
        assert!(matches!(decode(&f[..f.len() - 1]), Err(DecodeError::Truncated { .. })));
        assert!(matches!(decode(&f[..3]), Err(DecodeError::Truncated { .. })));
        let mut long = f.clone();
        long.push(b' ');
        assert!(matches!(decode(&long), Err(DecodeError::LengthMismatch { .. })));
        let mut bad = f.clone();
        bad[4] = 99;
        assert_eq!(decode(&bad), Err(DecodeError::BadTag(99)));
        let mut o = encode(&Message::Obs(obs(2, 2)));
        o.pop();
        let n = (o.len() - 5) as u32;
        o[..4].copy_from_slice(&n.to_be_bytes());
        assert!(matches!(decode(&o), Err(DecodeError::LengthMismatch { .. })));
    }

    #[test]
    fn oversized_length_rejected() {
        let mut f = vec![0u8; 5];
        f[..4].copy_from_slice(&((MAX_PAYLOAD + 1) as u32).to_be_bytes());
        f[4] = tag::RESET;
        assert!(matches!(decode_prefix(&f), Err(DecodeError::Oversized(_))));
        assert!(matches!(read_message(&mut &f[..]), Err(ReadError::Decode(DecodeError::Oversized(_)))));
    }

    #[test]
    fn stream_reading() {
        let mut buf = encode(&Message::Bye);
        buf.extend(encode(&Message::Step(Step { d_yaw: 1.5, d_pitch: -0.25 })));
        let mut r = &buf[..];
        assert_eq!(read_message(&mut r).unwrap(), Some(Message::Bye));
        assert!(matches!(read_message(&mut r).unwrap(), Some(Message::Step(_))));
        assert_eq!(read_message(&mut r).unwrap(), None);
    }

    fn arb_message() -> impl Strategy<Value = Message> {
        let code = prop_oneof![
            Just(ErrorCode::Version),
            Just(ErrorCode::Size),
            Just(ErrorCode::State),
            Just(ErrorCode::Decode),
            Just(ErrorCode::Config),
            Just(ErrorCode::Internal),
        ];
        prop_oneof![
            (any::<u32>(), any::<bool>()).prop_map(|(version, info)| Message::Hello(Hello {
                version,
                info,
                config: None
            })),
            ("[a-z]{1,10}", 1u32..500, 1u32..500, any::<u64>(), any::<bool>()).prop_map(|(task, w, h, len, p)| {
                Message::ConfigAck(ConfigAck {
                    version: PROTOCOL_VERSION,
                    task,
                    observation_width: w,
                    observation_height: h,
                    episode_length_steps: len,
                    privileged: p,
                })
            }),
            any::<u64>().prop_map(|seed| Message::Reset(Reset { seed })),
            (-1e6f64..1e6, -1e6f64..1e6).prop_map(|(d_yaw, d_pitch)| Message::Step(Step { d_yaw, d_pitch })),
            (0u16..20, 0u16..20, any::<u32>(), -10f32..10.0, any::<bool>(), any::<u8>()).prop_map(
                |(w, h, step, reward, done, fill)| Message::Obs(Obs {
                    width: w,
                    height: h,
                    step,
                    reward,
                    done,
                    pixels: vec![fill; 3 * usize::from(w) * usize::from(h)],
                })
            ),
            (code, ".{0,40}").prop_map(|(code, message)| Message::Error(ErrorMsg { code, message })),
            Just(Message::Bye),
            (any::<u64>(), any::<u64>(), -100f64..100.0).prop_map(|(s, t, r)| Message::Info(Box::new(InfoMsg {
                info: StepInfo {
                    step_index: s,
                    trial_index: t,
                    episode_return: r,
                    privileged: None,
                },
                records: vec![],
            }))),
        ]
    }

    proptest! {
        #[test]
        fn every_message_round_trips(m in arb_message()) {
            let f = encode(&m);
            prop_assert_eq!(decode(&f).unwrap(), m);
        }
    }
}
