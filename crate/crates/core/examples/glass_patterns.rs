//! Render a concentric Glass pattern next to its random-orientation foil at a
//! few coherence levels.
//!
//!     cargo run --example glass_patterns -- /tmp

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use psychlab::stimuli::{gen_glass_pair, DotPolarity, GlassSpec};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (coherence, polarity) in [(1.0, DotPolarity::White), (0.5, DotPolarity::Black), (0.25, DotPolarity::Mixed)] {
        let spec = GlassSpec {
            coherence,
            polarity,
            ..GlassSpec::default()
        };
        let (target, foil) = gen_glass_pair(&spec, &mut rng)?;
        let worst = target
            .dipoles
            .iter()
            .filter(|d| d.coherent)
            .map(|d| d.tangent_error_degrees())
            .fold(0.0, f64::max);
        println!(
            "coherence {coherence}: {} of {} dipoles tangent (max error {worst:.1e} deg)",
            target.coherent_count(),
            target.dipoles.len()
        );
        target.image.save(out.join(format!("glass-{coherence}-target.png")))?;
        foil.image.save(out.join(format!("glass-{coherence}-foil.png")))?;
    }
    println!("wrote {}", out.display());
    Ok(())
}
