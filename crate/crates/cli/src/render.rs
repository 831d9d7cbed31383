//! CSV and JSON renderings of command results.

use std::fmt::Write as _;

use refocus::analysis::{Protocol, SweepResult};
use refocus::order::OrderEstimate;
use refocus::table::Table1Row;
use serde::Serialize;

use crate::config::{Format, ScaleKind};

/// Floor applied to `log10(1 - f)` when the infidelity underflows.
pub const LOG10_INFIDELITY_FLOOR: f64 = -15.0;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `(log10 infidelity, clamped)`.
pub fn log10_infidelity(infidelity: f64) -> (f64, bool) {
    if infidelity > 0.0 {
        let l = infidelity.log10();
        if l >= LOG10_INFIDELITY_FLOOR {
            return (l, false);
        }
    }
    (LOG10_INFIDELITY_FLOOR, true)
}

#[derive(Serialize)]
struct SweepRowOut {
    epsilon: f64,
    fidelity: f64,
    log10_infidelity: f64,
    clamped: bool,
    delta_1: f64,
    delta_x: f64,
    delta_y: f64,
    delta_z: f64,
}

#[derive(Serialize)]
struct SweepOut<'a> {
    sequence: String,
    pulse: &'a str,
    window_delay: f64,
    amplitude_scale: f64,
    timestep_scale: f64,
    rows: Vec<SweepRowOut>,
}

/// Rendered text and the number of clamped rows.
pub fn sweep(protocol: &Protocol, result: &SweepResult, format: Format) -> (String, usize) {
    let rows: Vec<SweepRowOut> = result
        .rows
        .iter()
        .map(|r| {
            let (l, clamped) = log10_infidelity(r.infidelity);
            SweepRowOut {
                epsilon: r.epsilon,
                fidelity: r.fidelity,
                log10_infidelity: l,
                clamped,
                delta_1: r.delta_1,
                delta_x: r.delta_x,
                delta_y: r.delta_y,
                delta_z: r.delta_z,
            }
        })
        .collect();
    let clamped = rows.iter().filter(|r| r.clamped).count();
    let text = match format {
        Format::Csv => {
            let mut s =
                String::from("epsilon,fidelity,log10_infidelity,delta_1,delta_x,delta_y,delta_z\n");
            for r in &rows {
                let cells = [
                    r.epsilon,
                    r.fidelity,
                    r.log10_infidelity,
                    r.delta_1,
                    r.delta_x,
                    r.delta_y,
                    r.delta_z,
                ];
                let line: Vec<String> = cells.iter().map(|&x| num(x)).collect();
                writeln!(s, "{}", line.join(",")).unwrap();
            }
            s
        }
        Format::Json => json(&SweepOut {
            sequence: protocol.sequence.to_text(),
            pulse: protocol.base.name(),
            window_delay: protocol.window_delay,
            amplitude_scale: protocol.amplitude_scale,
            timestep_scale: protocol.timestep_scale,
            rows,
        }),
    };
    (text, clamped)
}

#[derive(Serialize)]
struct MapRowOut {
    epsilon: f64,
    scale: f64,
    fidelity: f64,
}

pub fn map(result: &SweepResult, kind: ScaleKind, format: Format) -> String {
    let rows = result.rows.iter().map(|r| MapRowOut {
        epsilon: r.epsilon,
        scale: match kind {
            ScaleKind::Amplitude => r.amplitude_scale,
            ScaleKind::Timestep => r.timestep_scale,
        },
        fidelity: r.fidelity,
    });
    match format {
        Format::Csv => {
            let mut s = String::from("epsilon,scale,fidelity\n");
            for r in rows {
                writeln!(s, "{},{},{}", num(r.epsilon), num(r.scale), num(r.fidelity)).unwrap();
            }
            s
        }
        Format::Json => json(&rows.collect::<Vec<_>>()),
    }
}

fn order_cell(e: &OrderEstimate) -> String {
    match e.order() {
        Some(q) => num(q),
        None => "vanishing".to_string(),
    }
}

pub fn table1(rows: &[Table1Row], format: Format) -> String {
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut header = vec!["label".to_string()];
            if let Some(first) = rows.first() {
                for cell in &first.eps_max {
                    header.push(format!("eps_max_{}", cell.pulse));
                    header.push(format!("reference_{}", cell.pulse));
                    header.push(format!("abs_diff_{}", cell.pulse));
                }
            }
            for h in [
                "delta_z_order",
                "delta_z_reference",
                "delta_y_order",
                "delta_y_reference",
            ] {
                header.push(h.to_string());
            }
            let mut s = header.join(",");
            s.push('\n');
            for r in rows {
                let mut line = vec![r.label.clone()];
                for c in &r.eps_max {
                    line.extend([num(c.value), num(c.reference), num(c.abs_diff)]);
                }
                line.push(order_cell(&r.delta_z));
                line.push(num(r.delta_z_reference));
                line.push(order_cell(&r.delta_y));
                line.push(num(r.delta_y_reference));
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
