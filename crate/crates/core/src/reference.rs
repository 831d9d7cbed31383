//! Published figures for the canonical family, indexed like
//! [`CANONICAL_LABELS`](crate::sequence::CANONICAL_LABELS).

/// ε_max at f = 0.99 with the simple π base pulse.
pub const EPS_MAX_SIMPLE: [f64; 8] = [0.25, 0.32, 0.25, 0.43, 0.36, 0.73, 0.45, 0.72];
/// ε_max at f = 0.99 with the Levitt 3-pulse base pulse.
pub const EPS_MAX_LEVITT3: [f64; 8] = [0.47, 0.54, 0.49, 0.77, 0.60, 0.80, 0.79, 0.79];
/// ε_max at f = 0.99 with the Tycko 7-pulse base pulse.
pub const EPS_MAX_TYCKO7: [f64; 8] = [0.72, 0.74, 0.72, 0.79, 0.76, 0.87, 0.86, 0.86];

/// Leading σ_z error order, simple base pulse.
pub const DELTA_Z_ORDER: [f64; 8] = [3.0, 3.0, 3.0, 5.0, 5.0, 7.0, 7.0, 9.0];
/// Listed σ_y error order, simple base pulse.
pub const DELTA_Y_ORDER: [f64; 8] = [2.0, 5.0, 8.0, 10.0, 14.0, 13.0, 20.0, 18.0];

/// Acceptance tolerance on ε_max.
pub const EPS_MAX_TOLERANCE: f64 = 0.03;
/// Acceptance tolerance on fitted orders.
pub const ORDER_TOLERANCE: f64 = 0.3;
