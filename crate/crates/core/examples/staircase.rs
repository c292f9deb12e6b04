//! Drive the adaptive staircase with a simulated observer that is reliable up
//! to level 7 and guesses beyond it, and print where the base level settles.
//!
//!     cargo run --example staircase

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psychlab::staircase::{CaseKind, Staircase};

fn main() -> psychlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut s = Staircase::one_dimensional(10)?;
    let mut kinds = [0usize; 3];
    let mut sum = 0;
    for trial in 1..=2000 {
        let case = s.next_case(&mut rng);
        let p = if case.levels[0] <= 7 { 0.95 } else { 0.2 };
        kinds[match case.kind {
            CaseKind::Base => 0,
            CaseKind::Advance(_) => 1,
            CaseKind::Probe => 2,
        }] += 1;
        for change in s.record(&case, rng.gen_bool(p)) {
            if trial <= 200 {
                println!("trial {trial:>4}: {change:?}");
            }
        }
        sum += s.base();
    }
    println!("time-average base level {:.2}", sum as f64 / 2000.0);
    println!("cases: base {} advance {} probe {}", kinds[0], kinds[1], kinds[2]);
    Ok(())
}
