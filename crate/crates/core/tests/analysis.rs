use proptest::prelude::*;
use psychlab::analysis::{fit_psychometric, psi, CurvePoint, PsychometricCurve, LAPSE};

fn curve(points: Vec<CurvePoint>, chance: f64) -> PsychometricCurve {
    PsychometricCurve {
        points,
        chance,
        fitted: None,
    }
}

fn expected_counts(values: &[f64], mu: f64, s: f64, chance: f64, n: u64) -> Vec<CurvePoint> {
    values
        .iter()
        .map(|&x| CurvePoint {
            value: x,
            n_trials: n,
            n_correct: (psi(x, mu, s, chance, LAPSE) * n as f64).round() as u64,
        })
        .collect()
}

fn log_lik(points: &[CurvePoint], mu: f64, s: f64, chance: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let q = psi(p.value, mu, s, chance, LAPSE).clamp(1e-12, 1.0 - 1e-12);
            p.n_correct as f64 * q.ln() + (p.n_trials - p.n_correct) as f64 * (1.0 - q).ln()
        })
        .sum()
}

fn levels() -> Vec<f64> {
    (0..8).map(|i| 0.1 + 0.1 * f64::from(i)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_is_at_least_as_likely_as_the_truth(mu in 0.3f64..0.6, s in 0.03f64..0.12, chance in prop::sample::select(vec![0.25, 0.5])) {
        let pts = expected_counts(&levels(), mu, s, chance, 200);
        let fit = fit_psychometric(&curve(pts.clone(), chance)).unwrap().unwrap();
        prop_assert!(fit.log_likelihood >= log_lik(&pts, mu, s, chance) - 1e-6);
        prop_assert!((fit.mu - mu).abs() < 0.02, "mu {} vs {}", fit.mu, mu);
    }

    #[test]
    fn point_order_does_not_matter(seed in any::<u64>()) {
        let pts = expected_counts(&levels(), 0.45, 0.07, 0.5, 150);
        let mut shuffled = pts.clone();
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let a = fit_psychometric(&curve(pts, 0.5)).unwrap().unwrap();
        let b = fit_psychometric(&curve(shuffled, 0.5)).unwrap().unwrap();
        prop_assert!((a.mu - b.mu).abs() < 1e-9);
        prop_assert!((a.s - b.s).abs() < 1e-9);
    }

    #[test]
    fn shifting_the_axis_shifts_threshold(shift in -0.2f64..0.2) {
        let pts = expected_counts(&levels(), 0.45, 0.07, 0.5, 300);
        let moved: Vec<_> = pts.iter().map(|p| CurvePoint { value: p.value + shift, ..*p }).collect();
        let a = fit_psychometric(&curve(pts, 0.5)).unwrap().unwrap();
        let b = fit_psychometric(&curve(moved, 0.5)).unwrap().unwrap();
        let (ta, tb) = (a.threshold75.unwrap(), b.threshold75.unwrap());
        prop_assert!((tb - ta - shift).abs() < 2e-3, "{ta} {tb} {shift}");
    }
}

#[test]
fn too_few_levels_is_an_error() {
    let pts = expected_counts(&[0.2, 0.8], 0.5, 0.1, 0.5, 50);
    assert!(fit_psychometric(&curve(pts, 0.5)).is_err());
}
