//! Time-response metrics: rise time, overshoot, settling time, RMS tracking
//! error and control total variation.

use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Step-style metrics for one channel. `None` marks a threshold that was
/// never reached (rise) or a signal that never settled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseMetrics {
    pub rise_time: Option<f64>,
    /// Percent of the target value.
    pub overshoot: f64,
    pub settling_time: Option<f64>,
    pub rms_error: f64,
    /// Total variation of the associated control input over the final half
    /// of the horizon.
    pub control_total_variation: f64,
}

/// Time from the first 10% crossing to the first 90% crossing of `target`,
/// with linear interpolation between samples.
pub fn rise_time(t: &[f64], signal: &[f64], target: f64) -> Option<f64> {
    assert_eq!(t.len(), signal.len());
    let t_lo = first_crossing(t, signal, 0.1 * target, target)?;
    let t_hi = first_crossing(t, signal, 0.9 * target, target)?;
    Some(t_hi - t_lo)
}

/// First time the signal reaches `threshold` moving in the direction of
/// `target`'s sign.
fn first_crossing(t: &[f64], signal: &[f64], threshold: f64, target: f64) -> Option<f64> {
    let dir = if target >= 0.0 { 1.0 } else { -1.0 };
    let reached = |v: f64| dir * v >= dir * threshold;
    if signal.is_empty() {
        return None;
    }
    if reached(signal[0]) {
        return Some(t[0]);
    }
    for i in 1..signal.len() {
        if reached(signal[i]) {
            let frac = (threshold - signal[i - 1]) / (signal[i] - signal[i - 1]);
            return Some(t[i - 1] + frac * (t[i] - t[i - 1]));
        }
    }
    None
}

/// Peak exceedance of the target in percent, floored at zero.
pub fn overshoot(signal: &[f64], target: f64) -> f64 {
    let dir = if target >= 0.0 { 1.0 } else { -1.0 };
    let peak = signal
        .iter()
        .fold(f64::NEG_INFINITY, |acc, v| acc.max(dir * v));
    (100.0 * (peak - dir * target) / target.abs()).max(0.0)
}

/// Time after which the signal stays inside `target ± band·|target|`,
/// measured from the start of the series and defined by the re-entry
/// following the last exit. Zero if the signal never leaves the band,
/// `None` if it ends outside.
pub fn settling_time(t: &[f64], signal: &[f64], target: f64, band: f64) -> Option<f64> {
    assert_eq!(t.len(), signal.len());
    let tol = band * target.abs();
    let last_outside = signal.iter().rposition(|v| (v - target).abs() > tol);
    let last_outside = match last_outside {
        None => return Some(0.0),
        Some(i) => i,
    };
    if last_outside + 1 >= signal.len() {
        return None; // still outside at the end of the horizon
    }
    // Interpolate the crossing into the band.
    let d0 = (signal[last_outside] - target).abs();
    let d1 = (signal[last_outside + 1] - target).abs();
    let frac = if (d0 - d1).abs() < f64::EPSILON {
        1.0
    } else {
        (d0 - tol) / (d0 - d1)
    };
    let cross = t[last_outside] + frac.clamp(0.0, 1.0) * (t[last_outside + 1] - t[last_outside]);
    Some(cross - t[0])
}

impl Default for ResponseMetrics {
    fn default() -> Self {
        ResponseMetrics {
            rise_time: None,
            overshoot: 0.0,
            settling_time: None,
            rms_error: 0.0,
            control_total_variation: 0.0,
        }
    }
}

/// Sum of absolute sample-to-sample changes.
pub fn total_variation(signal: &[f64]) -> f64 {
    signal.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Signed element of largest magnitude (the signal's peak excursion).
pub fn peak_value(signal: &[f64]) -> f64 {
    signal
        .iter()
        .copied()
        .fold(0.0, |acc: f64, v| if v.abs() > acc.abs() { v } else { acc })
}

/// Step-style metrics for sinusoid tracking.
///
/// The reference's peak excursion serves as the "specified value": rise time
/// is measured on the tracked signal against that value, while overshoot and
/// settling are measured on the tracking deviation (measured - reference).
/// Overshoot is the peak absolute deviation from the reference in percent of
/// the target — a fault transient registers whether the response lags the
/// reference or exceeds it — and a signal whose deviation never leaves the
/// ±band envelope settles at time zero.
pub fn sinusoid_tracking_metrics(
    t: &[f64],
    reference: &[f64],
    measured: &[f64],
    control: &[f64],
    band: f64,
) -> Result<ResponseMetrics> {
    if reference.len() != measured.len() || t.len() != measured.len() || control.len() != t.len() {
        return Err(Error::Domain(format!(
            "series length mismatch: t={}, ref={}, measured={}, control={}",
            t.len(),
            reference.len(),
            measured.len(),
            control.len()
        )));
    }
    if t.is_empty() {
        return Err(Error::Domain("empty series".to_string()));
    }

    let target = peak_value(reference);
    let rise = rise_time(t, measured, target);

    // Deviation series re-centered on the target so the generic overshoot
    // and settling definitions apply unchanged.
    let deviation: Vec<f64> = measured
        .iter()
        .zip(reference.iter())
        .map(|(m, r)| target + (m - r))
        .collect();
    let os = if target.abs() < 1e-12 {
        0.0
    } else {
        let peak_dev = deviation
            .iter()
            .fold(0.0f64, |acc, d| acc.max((d - target).abs()));
        100.0 * peak_dev / target.abs()
    };
    let settle = settling_time(t, &deviation, target, band);

    let rms = (measured
        .iter()
        .zip(reference.iter())
        .map(|(m, r)| (m - r) * (m - r))
        .sum::<f64>()
        / measured.len() as f64)
        .sqrt();

    let tv = total_variation(&control[control.len() / 2..]);

    Ok(ResponseMetrics {
        rise_time: rise,
        overshoot: os,
        settling_time: settle,
        rms_error: rms,
        control_total_variation: tv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(dt: f64, t_end: f64, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let n = (t_end / dt).round() as usize;
        let t: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let y: Vec<f64> = t.iter().map(|&ti| f(ti)).collect();
        (t, y)
    }

    #[test]
    fn rise_time_of_first_order_response() {
        let (t, y) = series(0.001, 10.0, |ti| 1.0 - (-ti).exp());
        let r = rise_time(&t, &y, 1.0).unwrap();
        assert!((r - 9f64.ln()).abs() < 0.01, "rise {r}");
    }

    #[test]
    fn rise_time_of_ideal_step_is_zero() {
        let (t, y) = series(0.001, 1.0, |_| 1.0);
        assert_eq!(rise_time(&t, &y, 1.0), Some(0.0));
    }

    #[test]
    fn rise_time_of_unit_ramp() {
        let (t, y) = series(0.001, 2.0, |ti| ti);
        let r = rise_time(&t, &y, 1.0).unwrap();
        assert!((r - 0.8).abs() < 1e-9);
    }

    #[test]
    fn rise_time_not_reached() {
        let (t, y) = series(0.001, 1.0, |_| 0.5);
        assert_eq!(rise_time(&t, &y, 1.0), None);
    }

    #[test]
    fn overshoot_of_monotone_approach_is_zero() {
        let (_, y) = series(0.001, 10.0, |ti| 1.0 - (-ti).exp());
        assert_eq!(overshoot(&y, 1.0), 0.0);
    }

    #[test]
    fn overshoot_of_underdamped_second_order_step() {
        // zeta = 0.5, wn = 1: y = 1 - exp(-z t)/sqrt(1-z^2) * sin(wd t + acos(z))
        let z: f64 = 0.5;
        let wd = (1.0 - z * z).sqrt();
        let phase = z.acos();
        let (_, y) = series(0.0005, 20.0, |ti| {
            1.0 - (-z * ti).exp() / wd * (wd * ti + phase).sin()
        });
        let os = overshoot(&y, 1.0);
        assert!((os - 16.3).abs() < 0.2, "overshoot {os}");
    }

    #[test]
    fn overshoot_simple_peak() {
        let y = [0.0, 0.5, 1.022, 1.0];
        assert!((overshoot(&y, 1.0) - 2.2).abs() < 1e-9);
    }

    #[test]
    fn settling_inside_band_is_zero() {
        let (t, y) = series(0.001, 5.0, |ti| 1.0 + 0.01 * (3.0 * ti).sin());
        assert_eq!(settling_time(&t, &y, 1.0, 0.02), Some(0.0));
    }

    #[test]
    fn settling_of_first_order_response() {
        let (t, y) = series(0.001, 10.0, |ti| 1.0 - (-ti).exp());
        let s = settling_time(&t, &y, 1.0, 0.02).unwrap();
        assert!((s - 50f64.ln()).abs() < 0.01, "settling {s}");
    }

    #[test]
    fn settling_uses_last_exit() {
        // Outside the band only on [1.0, 1.5).
        let (t, y) = series(0.001, 3.0, |ti| {
            if (1.0..1.5).contains(&ti) {
                1.1
            } else {
                1.0
            }
        });
        let s = settling_time(&t, &y, 1.0, 0.02).unwrap();
        assert!((s - 1.5).abs() < 0.002, "settling {s}");
    }

    #[test]
    fn settling_none_when_ending_outside() {
        let (t, y) = series(0.001, 1.0, |ti| ti);
        assert_eq!(settling_time(&t, &y, 10.0, 0.02), None);
    }

    #[test]
    fn metrics_invariant_under_time_shift() {
        let f = |ti: f64| 1.0 - (-ti).exp();
        let (t, y) = series(0.001, 10.0, f);
        let shifted: Vec<f64> = t.iter().map(|ti| ti + 5.0).collect();
        let r0 = rise_time(&t, &y, 1.0).unwrap();
        let r1 = rise_time(&shifted, &y, 1.0).unwrap();
        assert!((r0 - r1).abs() < 1e-12);
        let s0 = settling_time(&t, &y, 1.0, 0.02).unwrap();
        let s1 = settling_time(&shifted, &y, 1.0, 0.02).unwrap();
        assert!((s1 - s0).abs() < 1e-12);
        assert!((overshoot(&y, 1.0) - overshoot(&y, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn metrics_invariant_under_positive_scaling() {
        let f = |ti: f64| 1.0 - (-ti).exp() * (1.0 + 0.3 * (4.0 * ti).sin());
        let (t, y) = series(0.001, 10.0, f);
        let scaled: Vec<f64> = y.iter().map(|v| 7.5 * v).collect();
        assert!(
            (rise_time(&t, &y, 1.0).unwrap() - rise_time(&t, &scaled, 7.5).unwrap()).abs() < 1e-9
        );
        assert!((overshoot(&y, 1.0) - overshoot(&scaled, 7.5)).abs() < 1e-9);
        assert!(
            (settling_time(&t, &y, 1.0, 0.02).unwrap()
                - settling_time(&t, &scaled, 7.5, 0.02).unwrap())
            .abs()
                < 1e-9
        );
    }

    #[test]
    fn constant_at_target_is_all_zero() {
        let (t, y) = series(0.001, 2.0, |_| 3.0);
        assert_eq!(rise_time(&t, &y, 3.0), Some(0.0));
        assert_eq!(overshoot(&y, 3.0), 0.0);
        assert_eq!(settling_time(&t, &y, 3.0, 0.02), Some(0.0));
    }

    #[test]
    fn doubling_sample_rate_barely_moves_metrics() {
        let f = |ti: f64| 1.0 - (-ti / 0.7).exp();
        let (t1, y1) = series(0.002, 10.0, f);
        let (t2, y2) = series(0.001, 10.0, f);
        let r1 = rise_time(&t1, &y1, 1.0).unwrap();
        let r2 = rise_time(&t2, &y2, 1.0).unwrap();
        assert!((r1 - r2).abs() / r2 < 0.005);
        let s1 = settling_time(&t1, &y1, 1.0, 0.02).unwrap();
        let s2 = settling_time(&t2, &y2, 1.0, 0.02).unwrap();
        assert!((s1 - s2).abs() / s2 < 0.005);
    }

    #[test]
    fn perfect_tracking_metrics() {
        let (t, r) = series(0.001, 10.0, |ti| (0.5 * ti).sin());
        let ctrl = vec![0.0; t.len()];
        let m = sinusoid_tracking_metrics(&t, &r, &r, &ctrl, 0.02).unwrap();
        assert_eq!(m.overshoot, 0.0);
        assert_eq!(m.rms_error, 0.0);
        assert_eq!(m.settling_time, Some(0.0));
    }

    #[test]
    fn scaled_peak_gives_expected_overshoot() {
        // Tracking 5.7% above the reference near the peak.
        let (t, r) = series(0.001, 10.0, |ti| (0.5 * ti).sin());
        let m: Vec<f64> = r.iter().map(|v| 1.057 * v).collect();
        let ctrl = vec![0.0; t.len()];
        let out = sinusoid_tracking_metrics(&t, &r, &m, &ctrl, 0.02).unwrap();
        assert!((out.overshoot - 5.7).abs() < 0.05, "{}", out.overshoot);
    }

    #[test]
    fn one_sample_lag_rms() {
        let (t, r) = series(0.001, 10.0, |ti| (0.5 * ti).sin());
        let mut lagged = r.clone();
        lagged.rotate_right(1);
        lagged[0] = r[0];
        let incr: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
        let expected = (incr.iter().map(|d| d * d).sum::<f64>() / r.len() as f64).sqrt();
        let ctrl = vec![0.0; t.len()];
        let out = sinusoid_tracking_metrics(&t, &r, &lagged, &ctrl, 0.02).unwrap();
        assert!((out.rms_error - expected).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let t = vec![0.0, 1.0];
        let r = vec![0.0, 1.0, 2.0];
        let m = vec![0.0, 1.0];
        let c = vec![0.0, 1.0];
        assert!(sinusoid_tracking_metrics(&t, &r, &m, &c, 0.02).is_err());
    }
}
