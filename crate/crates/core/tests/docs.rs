use psychlab::config::{EnvConfig, TASK_NAMES};
use psychlab::protocol::{encode, Message, Obs, Reset};

fn doc(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/");
    std::fs::read_to_string(format!("{path}{name}")).unwrap()
}

#[test]
fn config_reference_matches_defaults() {
    let cfg = EnvConfig::from_toml_str(&doc("config-reference.toml")).unwrap();
    assert_eq!(cfg, EnvConfig::default());
}

#[test]
fn config_reference_covers_every_key() {
    // uncomment the optional keys and it must still parse
    let text = doc("config-reference.toml")
        .lines()
        .map(|l| match l.strip_prefix("# ") {
            Some(rest) if rest.starts_with("fovea =") || rest.starts_with("fixedLevels =") || rest.starts_with("datasetDir =") => rest,
            _ => l,
        })
        .collect::<Vec<_>>()
        .join("\n");
    let cfg = EnvConfig::from_toml_str(&text).unwrap();
    assert_eq!(cfg.observation.fovea.as_deref(), Some("168:84"));
    assert_eq!(cfg.staircase.fixed_levels, Some(vec![4]));
    assert!(cfg.recognition.dataset_dir.is_some());
}

#[test]
fn defaults_validate_for_every_task() {
    for t in TASK_NAMES {
        EnvConfig::for_task(t).validate().unwrap();
    }
}

#[test]
fn protocol_doc_example_bytes() {
    let text = doc("protocol.md");
    let hex = text
        .lines()
        .skip_while(|l| !l.starts_with("The bytes of `RESET"))
        .nth(3)
        .unwrap();
    let bytes: Vec<u8> = hex.split_whitespace().map(|b| u8::from_str_radix(b, 16).unwrap()).collect();
    assert_eq!(bytes, encode(&Message::Reset(Reset { seed: 5 })));
    let obs = Obs {
        width: 84,
        height: 84,
        step: 0,
        reward: 0.0,
        done: false,
        pixels: vec![0; 84 * 84 * 3],
    };
    assert_eq!(encode(&Message::Obs(obs)).len(), 21186);
    assert!(text.contains("N = 21181"));
}
