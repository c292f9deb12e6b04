//! Psychometric curves, threshold fits and reaction-time regressions over
//! trial logs.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::session::TrialRecord;

/// Lapse rate fixed in every fit.
pub const LAPSE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvePoint {
    pub value: f64,
    pub n_trials: u64,
    pub n_correct: u64,
}

impl CurvePoint {
    pub fn accuracy(&self) -> f64 {
        self.n_correct as f64 / self.n_trials as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Fit {
    pub mu: f64,
    pub s: f64,
    /// Where the fitted curve crosses 0.75, if inside the observed range.
    pub threshold75: Option<f64>,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PsychometricCurve {
    pub points: Vec<CurvePoint>,
    pub chance: f64,
    pub fitted: Option<Fit>,
}

/// ψ(x) = γ + (1 − γ − λ)·logistic((x − μ)/s)
pub fn psi(x: f64, mu: f64, s: f64, chance: f64, lapse: f64) -> f64 {
    chance + (1.0 - chance - lapse) / (1.0 + (-(x - mu) / s).exp())
}

/// Group records by the exact value of descriptor key `param`, ascending.
pub fn bin_accuracy(records: &[TrialRecord], param: &str, chance: f64) -> Result<PsychometricCurve> {
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.task_name != first.task_name) {
            return Err(Error::Analysis(format!(
                "records mix tasks `{}` and `{}`",
                first.task_name, other.task_name
            )));
        }
    }
    let mut bins: BTreeMap<u64, (f64, u64, u64)> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let v = r.param(param).ok_or_else(|| {
            Error::Analysis(format!("record {i} has no numeric stimulus parameter `{param}`"))
        })?;
        // order-preserving key for finite floats
        let bits = v.to_bits();
        let key = if v.is_sign_negative() { !bits } else { bits | (1 << 63) };
        let e = bins.entry(key).or_insert((v, 0, 0));
        e.1 += 1;
        e.2 += u64::from(r.correct);
    }
    Ok(PsychometricCurve {
        points: bins
            .into_values()
            .map(|(value, n_trials, n_correct)| CurvePoint {
                value,
                n_trials,
                n_correct,
            })
            .collect(),
        chance,
        fitted: None,
    })
}

fn log_likelihood(points: &[CurvePoint], mu: f64, s: f64, chance: f64, lapse: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let q = psi(p.value, mu, s, chance, lapse).clamp(1e-12, 1.0 - 1e-12);
            p.n_correct as f64 * q.ln() + (p.n_trials - p.n_correct) as f64 * (1.0 - q).ln()
        })
        .sum()
}

/// Maximize a unimodal `f` on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Maximum-likelihood fit of μ and s with the lapse fixed at [`LAPSE`].
/// Returns `None` when the optimum sits on the search boundary.
pub fn fit_psychometric(curve: &PsychometricCurve) -> Result<Option<Fit>> {
    fit_psychometric_with_lapse(curve, LAPSE)
}

pub fn fit_psychometric_with_lapse(curve: &PsychometricCurve, lapse: f64) -> Result<Option<Fit>> {
    if !(0.0..1.0 - curve.chance).contains(&lapse) {
        return Err(Error::Analysis(format!("lapse {lapse} outside [0, 1 - chance)")));
    }
    let mut pts: Vec<CurvePoint> = curve.points.iter().copied().filter(|p| p.n_trials > 0).collect();
    pts.sort_by(|a, b| a.value.total_cmp(&b.value));
    if pts.len() < 3 {
        return Err(Error::Analysis(format!(
            "need at least 3 distinct stimulus values, got {}",
            pts.len()
        )));
    }
    let chance = curve.chance;
    let lo = pts[0].value;
    let hi = pts[pts.len() - 1].value;
    let range = hi - lo;
    let (mu_lo, mu_hi) = (lo - range, hi + range);
    let (ls_lo, ls_hi) = ((range * 1e-4).ln(), (range * 4.0).ln());
    let ll = |mu: f64, ls: f64| log_likelihood(&pts, mu, ls.exp(), chance, lapse);

    let (nm, ns) = (121, 61);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..nm {
        let mu = mu_lo + (mu_hi - mu_lo) * i as f64 / (nm - 1) as f64;
        for j in 0..ns {
            let ls = ls_lo + (ls_hi - ls_lo) * j as f64 / (ns - 1) as f64;
            let v = ll(mu, ls);
            if v > best.0 {
                best = (v, mu, ls);
            }
        }
    }
    let (_, mut mu, mut ls) = best;
    let dmu = (mu_hi - mu_lo) / (nm - 1) as f64;
    let dls = (ls_hi - ls_lo) / (ns - 1) as f64;
    // alternate golden-section refinements within one grid cell either side
    for _ in 0..20 {
        let s_now = ls;
        mu = golden_max((mu - dmu).max(mu_lo), (mu + dmu).min(mu_hi), |m| ll(m, s_now));
        let m_now = mu;
        ls = golden_max((ls - dls).max(ls_lo), (ls + dls).min(ls_hi), |l| ll(m_now, l));
    }
    let s = ls.exp();
    let edge = |v: f64, a: f64, b: f64, step: f64| v - a < step * 0.01 || b - v < step * 0.01;
    if edge(mu, mu_lo, mu_hi, dmu) || edge(ls, ls_lo, ls_hi, dls) && ls > ls_lo + dls {
        return Ok(None);
    }
    Ok(Some(Fit {
        mu,
        s,
        threshold75: threshold(mu, s, chance, lapse, 0.75).filter(|t| (lo..=hi).contains(t)),
        log_likelihood: ll(mu, ls),
    }))
}

/// Stimulus value where ψ reaches `level`.
pub fn threshold(mu: f64, s: f64, chance: f64, lapse: f64, level: f64) -> Option<f64> {
    let q = (level - chance) / (1.0 - chance - lapse);
    (q > 0.0 && q < 1.0).then(|| mu + s * (q / (1.0 - q)).ln())
}

/// Bin, then fit.
pub fn psychometric(records: &[TrialRecord], param: &str, chance: f64) -> Result<PsychometricCurve> {
    let mut c = bin_accuracy(records, param, chance)?;
    c.fitted = fit_psychometric(&c)?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RtPoint {
    pub set_size: f64,
    pub median_rt: f64,
    pub n_trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RtRegression {
    pub points: Vec<RtPoint>,
    /// Steps per item.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Ordinary least squares of median correct-trial RT against set size.
pub fn rt_by_set_size(records: &[TrialRecord]) -> Result<RtRegression> {
    let mut by: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.correct) {
        let n = r
            .param("setSize")
            .ok_or_else(|| Error::Analysis("record has no `setSize` stimulus parameter".into()))?;
        by.entry(n as u64).or_default().push(r.reaction_steps as f64);
    }
    if by.len() < 2 {
        return Err(Error::Analysis(format!("need at least 2 set sizes, got {}", by.len())));
    }
    let points: Vec<RtPoint> = by
        .into_iter()
        .map(|(n, mut rts)| RtPoint {
            set_size: n as f64,
            n_trials: rts.len() as u64,
            median_rt: median(&mut rts),
        })
        .collect();
    let (slope, intercept, r2) = ols(&points.iter().map(|p| (p.set_size, p.median_rt)).collect::<Vec<_>>());
    Ok(RtRegression {
        points,
        slope,
        intercept,
        r2,
    })
}

/// `(slope, intercept, r²)`; a perfect fit has r² = 1 even when y is flat.
pub fn ols(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_res <= 1e-12 * (1.0 + ss_tot) {
        1.0
    } else if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        0.0
    };
    (slope, intercept, r2)
}

/// Fitted values use the default lapse.
pub fn write_curve_csv<W: Write>(out: W, curve: &PsychometricCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "nTrials", "nCorrect", "accuracy", "fitted"]).map_err(csv_err)?;
    for p in &curve.points {
        let fitted = curve
            .fitted
            .map(|f| psi(p.value, f.mu, f.s, curve.chance, LAPSE).to_string())
            .unwrap_or_default();
        w.write_record([
            p.value.to_string(),
            p.n_trials.to_string(),
            p.n_correct.to_string(),
            p.accuracy().to_string(),
            fitted,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rt_csv<W: Write>(out: W, reg: &RtRegression) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["setSize", "medianRt", "nTrials", "predicted"]).map_err(csv_err)?;
    for p in &reg.points {
        w.write_record([
            p.set_size.to_string(),
            p.median_rt.to_string(),
            p.n_trials.to_string(),
            (reg.intercept + reg.slope * p.set_size).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}
