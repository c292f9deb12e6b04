//! Step a random-dot kinematogram and check how much of the mean motion is
//! carried by the coherent dots.
//!
//!     cargo run --example motion_dots -- /tmp

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use psychlab::stimuli::{MotionDirection, MotionField, MotionFieldSpec};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for coherence in [1.0, 0.5, 0.1] {
        let spec = MotionFieldSpec {
            coherence,
            direction: MotionDirection::Left,
            ..MotionFieldSpec::default()
        };
        let speed = spec.speed;
        let mut field = MotionField::new(spec, &mut rng)?;
        let mut dx = 0.0;
        for _ in 0..1000 {
            dx += field.step(&mut rng).mean_displacement.0;
        }
        println!(
            "coherence {coherence}: {} coherent dots, mean leftward drift {:.3} (expected {:.3})",
            field.coherent_count(),
            -dx / 1000.0,
            coherence * speed
        );
        field.render().save(out.join(format!("dots-{coherence}.png")))?;
    }
    Ok(())
}
