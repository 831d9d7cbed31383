//! ε_max and error-order summary over the canonical family.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{epsilon_max, Protocol};
use crate::error::Result;
use crate::order::{estimate_order, OrderEstimate};
use crate::pulse::BasePulse;
use crate::reference::{DELTA_Y_ORDER, DELTA_Z_ORDER};
use crate::sequence::{build_canonical, CANONICAL_LABELS};
use crate::su2::Component;

pub const FIDELITY_THRESHOLD: f64 = 0.99;

/// A base pulse with the reference ε_max values it is compared against.
#[derive(Debug, Clone)]
pub struct Column {
    pub pulse: BasePulse,
    pub reference: [f64; 8],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsMaxCell {
    pub pulse: String,
    pub value: f64,
    pub reference: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub label: String,
    pub eps_max: Vec<EpsMaxCell>,
    pub delta_z: OrderEstimate,
    pub delta_z_reference: f64,
    pub delta_y: OrderEstimate,
    pub delta_y_reference: f64,
}

/// One row per canonical label. Error orders are always fitted with the
/// simple base pulse.
pub fn table1(columns: &[Column]) -> Result<Vec<Table1Row>> {
    let simple = crate::pulse::simple_pi();
    CANONICAL_LABELS
        .par_iter()
        .enumerate()
        .map(|(i, &label)| {
            let seq = build_canonical(label)?;
            let eps_max = columns
                .iter()
                .map(|col| {
                    let value = epsilon_max(
                        &Protocol::new(seq.clone(), col.pulse.clone()),
                        FIDELITY_THRESHOLD,
                    )?;
                    Ok(EpsMaxCell {
                        pulse: col.pulse.name().to_string(),
                        value,
                        reference: col.reference[i],
                        abs_diff: (value - col.reference[i]).abs(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Table1Row {
                label: label.to_string(),
                eps_max,
                delta_z: estimate_order(&seq, &simple, Component::DeltaZ)?,
                delta_z_reference: DELTA_Z_ORDER[i],
                delta_y: estimate_order(&seq, &simple, Component::DeltaY)?,
                delta_y_reference: DELTA_Y_ORDER[i],
            })
        })
        .collect()
}
