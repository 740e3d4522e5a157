//! Per-channel metric extraction from telemetry plus the report table.

use serde::Serialize;

use crate::metrics::{sinusoid_tracking_metrics, ResponseMetrics};
use crate::scenario::ScenarioConfig;
use crate::telemetry::TelemetryRecord;
use crate::Result;

/// Controlled channels in the report's row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Channel {
    Roll,
    Pitch,
    Yaw,
    Altitude,
}

pub const CHANNELS: [Channel; 4] = [Channel::Roll, Channel::Pitch, Channel::Yaw, Channel::Altitude];

impl Channel {
    pub fn label(&self) -> &'static str {
        match self {
            Channel::Roll => "Roll angle",
            Channel::Pitch => "Pitch angle",
            Channel::Yaw => "Yaw angle",
            Channel::Altitude => "Altitude",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub channel: Channel,
    pub metrics: ResponseMetrics,
}

/// Reference, measured and control series for one channel.
///
/// The altitude channel is measured about its reference offset (the offset
/// is subtracted from both series) whenever the altitude reference actually
/// oscillates; percentage metrics are then relative to the peak amplitude.
pub fn channel_series(
    cfg: &ScenarioConfig,
    records: &[TelemetryRecord],
    channel: Channel,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let (reference, measured, control): (Vec<f64>, Vec<f64>, Vec<f64>) = match channel {
        Channel::Roll => (
            t.iter().map(|&ti| cfg.references.phi.eval(ti).r).collect(),
            records.iter().map(|r| r.state.phi).collect(),
            records.iter().map(|r| r.u[1]).collect(),
        ),
        Channel::Pitch => (
            t.iter().map(|&ti| cfg.references.theta.eval(ti).r).collect(),
            records.iter().map(|r| r.state.theta).collect(),
            records.iter().map(|r| r.u[2]).collect(),
        ),
        Channel::Yaw => (
            t.iter().map(|&ti| cfg.references.psi.eval(ti).r).collect(),
            records.iter().map(|r| r.state.psi).collect(),
            records.iter().map(|r| r.u[3]).collect(),
        ),
        Channel::Altitude => {
            let offset = if cfg.references.z.amplitude.abs() > 0.0 {
                cfg.references.z.offset
            } else {
                0.0
            };
            (
                t.iter()
                    .map(|&ti| cfg.references.z.eval(ti).r - offset)
                    .collect(),
                records.iter().map(|r| r.state.z - offset).collect(),
                records.iter().map(|r| r.u[0]).collect(),
            )
        }
    };
    (t, reference, measured, control)
}

/// Metrics for all four channels in the report's row order.
pub fn scenario_channel_metrics(
    cfg: &ScenarioConfig,
    records: &[TelemetryRecord],
    band: f64,
) -> Result<Vec<ChannelReport>> {
    CHANNELS
        .iter()
        .map(|&channel| {
            let (t, reference, measured, control) = channel_series(cfg, records, channel);
            let metrics = sinusoid_tracking_metrics(&t, &reference, &measured, &control, band)?;
            Ok(ChannelReport { channel, metrics })
        })
        .collect()
}

fn fmt_time(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "not reached".to_string(),
    }
}

/// Plain-text table in the row order roll, pitch, yaw, altitude.
pub fn format_table(title: &str, reports: &[ChannelReport]) -> String {
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    out.push_str(&format!(
        "{:<12} {:>13} {:>14} {:>18} {:>12} {:>12}\n",
        "Reference", "Rise time (s)", "Overshoot (%)", "Settling time (s)", "RMS error", "Control TV"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<12} {:>13} {:>14.3} {:>18} {:>12.4e} {:>12.4e}\n",
            r.channel.label(),
            fmt_time(r.metrics.rise_time),
            r.metrics.overshoot,
            fmt_time(r.metrics.settling_time),
            r.metrics.rms_error,
            r.metrics.control_total_variation,
        ));
    }
    out
}

/// Side-by-side comparison of two runs of the same channels.
pub fn format_comparison(
    left_title: &str,
    left: &[ChannelReport],
    right_title: &str,
    right: &[ChannelReport],
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} | {:^34} | {:^34}\n",
        "", left_title, right_title
    ));
    out.push_str(&format!(
        "{:<12} | {:>10} {:>9} {:>11} | {:>10} {:>9} {:>11}\n",
        "Reference", "Rise (s)", "OS (%)", "Settle (s)", "Rise (s)", "OS (%)", "Settle (s)"
    ));
    for (l, r) in left.iter().zip(right.iter()) {
        out.push_str(&format!(
            "{:<12} | {:>10} {:>9.3} {:>11} | {:>10} {:>9.3} {:>11}\n",
            l.channel.label(),
            fmt_time(l.metrics.rise_time),
            l.metrics.overshoot,
            fmt_time(l.metrics.settling_time),
            fmt_time(r.metrics.rise_time),
            r.metrics.overshoot,
            fmt_time(r.metrics.settling_time),
        ));
    }
    out
}
