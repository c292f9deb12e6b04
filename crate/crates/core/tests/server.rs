use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use psychlab::config::EnvConfig;
use psychlab::env::GazeAction;
use psychlab::protocol::{
    decode, encode, read_message, spawn, Client, ErrorCode, Hello, Message, Reset, ServerHandle, ServerOptions, Step,
    MAX_PAYLOAD, PROTOCOL_VERSION,
};

fn server(opts: ServerOptions) -> ServerHandle {
    spawn(TcpListener::bind("127.0.0.1:0").unwrap(), opts).unwrap()
}

fn glass() -> ServerOptions {
    ServerOptions::new(EnvConfig::for_task("glass"))
}

fn raw(h: &ServerHandle) -> TcpStream {
    let s = TcpStream::connect(h.addr()).unwrap();
    s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    s
}

fn send(s: &mut TcpStream, m: &Message) {
    s.write_all(&encode(m)).unwrap();
}

fn hello() -> Message {
    Message::Hello(Hello {
        version: PROTOCOL_VERSION,
        info: false,
        config: None,
    })
}

fn expect_error(s: &mut TcpStream, code: ErrorCode) {
    match read_message(s).unwrap() {
        Some(Message::Error(e)) => assert_eq!(e.code, code, "{}", e.message),
        other => panic!("expected error, got {other:?}"),
    }
    // and then the server hangs up
    assert!(matches!(read_message(s), Ok(None) | Err(_)));
}

#[test]
fn same_seed_same_frames_across_sessions() {
    let h = server(glass());
    let run = || {
        let mut c = Client::connect(h.addr()).unwrap();
        let ack = c.hello(None, false).unwrap();
        assert_eq!((ack.observation_width, ack.observation_height), (84, 84));
        let mut frames = vec![c.reset(5).unwrap().obs];
        for i in 0..30 {
            frames.push(c.step(GazeAction::new(0.1 * f64::from(i % 5), -0.2)).unwrap().obs);
        }
        c.bye().unwrap();
        frames
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a[0].step, 0);
    assert_eq!(a[30].step, 30);
}

#[test]
fn state_errors() {
    let h = server(glass());
    let mut s = raw(&h);
    send(&mut s, &hello());
    assert!(matches!(read_message(&mut s).unwrap(), Some(Message::ConfigAck(_))));
    send(&mut s, &Message::Step(Step { d_yaw: 0.0, d_pitch: 0.0 }));
    expect_error(&mut s, ErrorCode::State);

    let mut s = raw(&h);
    send(&mut s, &Message::Reset(Reset { seed: 1 }));
    expect_error(&mut s, ErrorCode::State);

    let mut s = raw(&h);
    send(&mut s, &hello());
    read_message(&mut s).unwrap();
    send(&mut s, &hello());
    expect_error(&mut s, ErrorCode::State);
}

#[test]
fn version_mismatch() {
    let h = server(glass());
    let mut s = raw(&h);
    send(
        &mut s,
        &Message::Hello(Hello {
            version: PROTOCOL_VERSION + 1,
            info: false,
            config: None,
        }),
    );
    expect_error(&mut s, ErrorCode::Version);
}

#[test]
fn oversized_and_malformed_frames() {
    let h = server(glass());
    let mut s = raw(&h);
    let mut frame = ((MAX_PAYLOAD + 1) as u32).to_be_bytes().to_vec();
    frame.push(1);
    s.write_all(&frame).unwrap();
    expect_error(&mut s, ErrorCode::Size);

    let mut s = raw(&h);
    s.write_all(&[0, 0, 0, 2, 99, b'{', b'}']).unwrap();
    expect_error(&mut s, ErrorCode::Decode);

    let mut s = raw(&h);
    let body = br#"{"version":1,"bogus":true}"#;
    let mut frame = (body.len() as u32).to_be_bytes().to_vec();
    frame.push(1);
    frame.extend_from_slice(body);
    s.write_all(&frame).unwrap();
    expect_error(&mut s, ErrorCode::Decode);
}

#[test]
fn invalid_config_in_hello() {
    let h = server(glass());
    let mut cfg = EnvConfig::for_task("glass");
    cfg.episode_length_steps = -3;
    let mut s = raw(&h);
    send(
        &mut s,
        &Message::Hello(Hello {
            version: PROTOCOL_VERSION,
            info: false,
            config: Some(Box::new(cfg)),
        }),
    );
    expect_error(&mut s, ErrorCode::Config);
}

#[test]
fn server_flags_override_the_session_config() {
    let mut opts = glass();
    opts.fovea = Some("168:84".into());
    opts.privileged = true;
    let h = server(opts);
    let mut c = Client::connect(h.addr()).unwrap();
    let ack = c.hello(Some(EnvConfig::for_task("motion")), true).unwrap();
    assert_eq!(ack.task, "motion");
    assert!(ack.privileged);
    let f = c.reset(1).unwrap();
    assert_eq!((f.obs.width, f.obs.height), (84, 84));
    assert!(f.info.unwrap().info.privileged.is_some());
}

#[test]
fn episode_end_is_reported_and_enforced() {
    let h = server(glass());
    let mut cfg = EnvConfig::for_task("glass");
    cfg.episode_length_steps = 5;
    let mut c = Client::connect(h.addr()).unwrap();
    c.hello(Some(cfg), false).unwrap();
    c.reset(1).unwrap();
    for i in 1..=5 {
        let f = c.step(GazeAction::NOOP).unwrap();
        assert_eq!(f.obs.done, i == 5);
    }
    assert!(c.step(GazeAction::NOOP).is_err());
}

#[test]
fn websocket_carries_the_same_frames() {
    let h = server(glass());
    let (mut ws, _) = tungstenite::connect(format!("ws://{}/", h.addr())).unwrap();
    let mut roundtrip = |m: &Message| -> Message {
        ws.send(tungstenite::Message::Binary(encode(m))).unwrap();
        loop {
            match ws.read().unwrap() {
                tungstenite::Message::Binary(b) => return decode(&b).unwrap(),
                _ => continue,
            }
        }
    };
    assert!(matches!(roundtrip(&hello()), Message::ConfigAck(_)));
    let Message::Obs(ws_obs) = roundtrip(&Message::Reset(Reset { seed: 5 })) else {
        panic!("no OBS")
    };

    let mut c = Client::connect(h.addr()).unwrap();
    c.hello(None, false).unwrap();
    assert_eq!(c.reset(5).unwrap().obs, ws_obs);
}

#[test]
fn client_that_never_reads_gets_dropped() {
    let mut opts = glass();
    opts.queue_capacity = 2;
    let h = server(opts);
    let mut s = raw(&h);
    send(&mut s, &hello());
    send(&mut s, &Message::Reset(Reset { seed: 1 }));
    let step = encode(&Message::Step(Step { d_yaw: 0.1, d_pitch: 0.0 }));
    s.set_write_timeout(Some(Duration::from_secs(5))).unwrap();
    // roughly 100 MB of replies if the server kept going
    for _ in 0..5000 {
        if s.write_all(&step).is_err() {
            break;
        }
    }
    // drain whatever made it out; the stream must end rather than block
    let mut sink = Vec::new();
    let _ = s.read_to_end(&mut sink);
    assert!(sink.len() < 5000 * 21186, "server sent every reply");
}
