//! Offset sweeps, robustness maps and ε_max extraction.
//!
//! Every grid point is an independent computation; points are evaluated on
//! the rayon pool and emitted in grid order.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pulse::{scale_amplitude, scale_timesteps, BasePulse};
use crate::sequence::{SequenceExpr, Token};
use crate::su2::Unitary2;

/// Evenly spaced closed grid `min, min + step, …, ≤ max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if max < min {
            return Err(Error::InvalidGrid(format!("max {max} is below min {min}")));
        }
        Ok(Self { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

/// A sequence, its base pulse and the experimental knobs applied to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Protocol {
    pub sequence: SequenceExpr,
    pub base: BasePulse,
    /// Free evolution before each base pulse, in units of `1/ν1`.
    pub window_delay: f64,
    pub amplitude_scale: f64,
    pub timestep_scale: f64,
}

impl Protocol {
    pub fn new(sequence: SequenceExpr, base: BasePulse) -> Self {
        Self {
            sequence,
            base,
            window_delay: 0.0,
            amplitude_scale: 1.0,
            timestep_scale: 1.0,
        }
    }

    pub fn with_window(mut self, delay: f64) -> Result<Self> {
        if !delay.is_finite() {
            return Err(Error::NonFinite("window_delay"));
        }
        if delay < 0.0 {
            return Err(Error::Negative {
                name: "window_delay",
                value: delay,
            });
        }
        self.window_delay = delay;
        Ok(self)
    }

    pub fn with_amplitude_scale(mut self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidScale(s));
        }
        self.amplitude_scale = s;
        Ok(self)
    }

    pub fn with_timestep_scale(mut self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidScale(s));
        }
        self.timestep_scale = s;
        Ok(self)
    }

    /// Base pulse after amplitude and timestep scaling.
    pub fn scaled_base(&self) -> BasePulse {
        let p = scale_amplitude(&self.base, self.amplitude_scale).expect("validated scale");
        scale_timesteps(&p, self.timestep_scale).expect("validated scale")
    }

    pub fn propagate(&self, epsilon: f64) -> Unitary2 {
        propagate_with(
            &self.sequence,
            &self.scaled_base(),
            self.window_delay,
            epsilon,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub protocol: Protocol,
    pub epsilon: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub amplitude_scale: f64,
    pub timestep_scale: f64,
    pub fidelity: f64,
    /// `|b|²`, the infidelity without cancellation error.
    pub infidelity: f64,
    pub delta_1: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_z: f64,
}

impl SweepRow {
    fn from_unitary(epsilon: f64, protocol: &Protocol, u: &Unitary2) -> Self {
        let e = u.error_coeffs();
        Self {
            epsilon,
            amplitude_scale: protocol.amplitude_scale,
            timestep_scale: protocol.timestep_scale,
            fidelity: u.fidelity_identity(),
            infidelity: u.infidelity_identity(),
            delta_1: e.delta_1,
            delta_x: e.delta_x,
            delta_y: e.delta_y,
            delta_z: e.delta_z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Free precession under the offset alone for `delay` (units of `1/ν1`).
pub fn delay_propagator(epsilon: f64, delay: f64) -> Result<Unitary2> {
    if !(epsilon.is_finite() && delay.is_finite()) {
        return Err(Error::NonFinite("delay_propagator"));
    }
    if delay < 0.0 {
        return Err(Error::Negative {
            name: "delay",
            value: delay,
        });
    }
    let (s, c) = (PI * epsilon * delay).sin_cos();
    Ok(Unitary2::new(c, [0.0, 0.0, s]))
}

fn propagate_with(seq: &SequenceExpr, base: &BasePulse, delay: f64, epsilon: f64) -> Unitary2 {
    let p = base.propagate(epsilon);
    let q = p.bar();
    let window = (delay > 0.0).then(|| delay_propagator(epsilon, delay).expect("validated delay"));
    seq.tokens().iter().fold(Unitary2::IDENTITY, |mut u, t| {
        if let Some(d) = &window {
            u = u.then(d);
        }
        u.then(match t {
            Token::Plain => &p,
            Token::Barred => &q,
        })
    })
}

pub fn propagate_sequence(spec: &SweepSpec, epsilon: f64) -> Unitary2 {
    spec.protocol.propagate(epsilon)
}

fn sweep_protocol(protocol: &Protocol, grid: &Grid) -> Vec<SweepRow> {
    let base = protocol.scaled_base();
    grid.points()
        .into_par_iter()
        .map(|eps| {
            let u = propagate_with(&protocol.sequence, &base, protocol.window_delay, eps);
            SweepRow::from_unitary(eps, protocol, &u)
        })
        .collect()
}

pub fn offset_sweep(spec: &SweepSpec) -> SweepResult {
    SweepResult {
        rows: sweep_protocol(&spec.protocol, &spec.epsilon),
    }
}

/// Resolution knobs for [`epsilon_max_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsMaxOptions {
    pub step: f64,
    pub tolerance: f64,
    /// Scan stops here; a band that never breaks reports this value.
    pub limit: f64,
}

impl Default for EpsMaxOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            tolerance: 1e-4,
            limit: 3.0,
        }
    }
}

pub fn epsilon_max(protocol: &Protocol, f_threshold: f64) -> Result<f64> {
    epsilon_max_with(protocol, f_threshold, &EpsMaxOptions::default())
}

/// Edge of the contiguous band `0 ≤ ε ≤ ε*` with fidelity at or above
/// `f_threshold`, scanned on a coarse grid and refined by bisection.
pub fn epsilon_max_with(
    protocol: &Protocol,
    f_threshold: f64,
    opts: &EpsMaxOptions,
) -> Result<f64> {
    if !(f_threshold > 0.0 && f_threshold < 1.0) {
        return Err(Error::InvalidThreshold(f_threshold));
    }
    if !(opts.step > 0.0 && opts.tolerance > 0.0 && opts.limit > 0.0) {
        return Err(Error::InvalidGrid(
            "epsilon_max options must be positive".into(),
        ));
    }
    let base = protocol.scaled_base();
    let fid = |eps: f64| {
        propagate_with(&protocol.sequence, &base, protocol.window_delay, eps).fidelity_identity()
    };
    let n = (opts.limit / opts.step + 1e-9).floor() as usize;
    const CHUNK: usize = 256;
    let mut first_bad = None;
    let mut start = 1;
    while start <= n && first_bad.is_none() {
        let end = (start + CHUNK).min(n + 1);
        first_bad = (start..end)
            .into_par_iter()
            .map(|i| (i, fid(i as f64 * opts.step)))
            .collect::<Vec<_>>()
            .into_iter()
            .find(|&(_, f)| f < f_threshold)
            .map(|(i, _)| i);
        start = end;
    }
    let Some(i) = first_bad else {
        return Ok(n as f64 * opts.step);
    };
    if i == 1 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = ((i - 1) as f64 * opts.step, i as f64 * opts.step);
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if fid(mid) >= f_threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Fidelity over offsets × amplitude scale factors.
pub fn robustness_map(
    protocol: &Protocol,
    epsilon: &Grid,
    amplitude: &Grid,
) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(epsilon.len() * amplitude.len());
    for s in amplitude.points() {
        let p = protocol.clone().with_amplitude_scale(s)?;
        rows.extend(sweep_protocol(&p, epsilon));
    }
    Ok(SweepResult { rows })
}

/// Fidelity over offsets × timestep scale factors.
pub fn timestep_map(protocol: &Protocol, epsilon: &Grid, timestep: &Grid) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(epsilon.len() * timestep.len());
    for s in timestep.points() {
        let p = protocol.clone().with_timestep_scale(s)?;
        rows.extend(sweep_protocol(&p, epsilon));
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{levitt3, simple_pi};
    use crate::sequence::build_canonical;
    use approx::assert_abs_diff_eq;

    fn protocol(label: &str, base: BasePulse) -> Protocol {
        Protocol::new(build_canonical(label).unwrap(), base)
    }

    #[test]
    fn grid_points() {
        let g = Grid::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid::new(0.0, 1.0, 0.001).unwrap().len(), 1001);
        assert_eq!(Grid::new(0.3, 0.3, 0.1).unwrap().points(), vec![0.3]);
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn delay_examples() {
        assert_eq!(delay_propagator(0.0, 5.0).unwrap(), Unitary2::IDENTITY);
        let u = delay_propagator(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(u.a, -1.0, epsilon = 1e-15);
        let u = delay_propagator(0.5, 8.0).unwrap();
        assert_abs_diff_eq!(u.a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.b[2], 0.0, epsilon = 1e-14);
        assert!(delay_propagator(0.1, -1.0).is_err());
    }

    #[test]
    fn delay_matches_zero_amplitude_segment() {
        let seg = crate::su2::segment_propagator(0.0, 0.0, 2.0 * PI * 3.7, 0.23).unwrap();
        let d = delay_propagator(0.23, 3.7).unwrap();
        assert!(seg.max_abs_diff(&d) < 1e-14);
    }

    #[test]
    fn propagate_examples() {
        let u = protocol("2", simple_pi()).propagate(0.0);
        assert_abs_diff_eq!(u.a, -1.0, epsilon = 1e-15);
        let p16 = protocol("16", levitt3());
        assert!(p16.propagate(0.4).fidelity_identity() >= 0.99);
        let w = p16.clone().with_window(8.0).unwrap();
        assert!(w.propagate(0.4).fidelity_identity() >= 0.99);
    }

    #[test]
    fn sweep_rows_are_consistent() {
        let spec = SweepSpec {
            protocol: protocol("64", simple_pi()),
            epsilon: Grid::new(0.0, 1.0, 0.05).unwrap(),
        };
        let r = offset_sweep(&spec);
        assert_eq!(r.rows.len(), 21);
        assert_abs_diff_eq!(r.rows[0].fidelity, 1.0, epsilon = 1e-15);
        for row in &r.rows {
            assert!((0.0..=1.0).contains(&row.fidelity));
            assert_abs_diff_eq!(row.fidelity + row.infidelity, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eps_max_examples() {
        let e = epsilon_max(&protocol("2", simple_pi()), 0.99).unwrap();
        assert!((e - 0.25).abs() <= 0.02, "{e}");
        let e = epsilon_max(&protocol("16", levitt3()), 0.99).unwrap();
        assert!((e - 0.77).abs() <= 0.02, "{e}");
    }

    #[test]
    fn eps_max_refinement_stays_near_coarse_grid() {
        let p = protocol("8", simple_pi());
        let fine = epsilon_max(&p, 0.99).unwrap();
        let coarse = epsilon_max_with(
            &p,
            0.99,
            &EpsMaxOptions {
                tolerance: 1e-3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((fine - coarse).abs() <= 1e-3);
    }

    #[test]
    fn eps_max_edge_cases() {
        let p = protocol("2", simple_pi());
        assert!(matches!(
            epsilon_max(&p, 1.0),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            epsilon_max(&p, 0.0),
            Err(Error::InvalidThreshold(_))
        ));
        // a half-amplitude pulse never refocusses
        let bad = p.with_amplitude_scale(0.5).unwrap();
        assert_eq!(epsilon_max(&bad, 0.99).unwrap(), 0.0);
    }

    #[test]
    fn map_rows_in_grid_order() {
        let eps = Grid::new(0.0, 0.2, 0.1).unwrap();
        let amp = Grid::new(0.9, 1.1, 0.1).unwrap();
        let r = robustness_map(&protocol("4", levitt3()), &eps, &amp).unwrap();
        assert_eq!(r.rows.len(), 9);
        assert_abs_diff_eq!(r.rows[3].amplitude_scale, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rows[4].epsilon, 0.1, epsilon = 1e-15);
        let t = timestep_map(&protocol("4", levitt3()), &eps, &amp).unwrap();
        assert_eq!(t.rows.len(), 9);
    }

    #[test]
    fn timestep_scale_one_is_offset_sweep() {
        let p = protocol("16", levitt3());
        let eps = Grid::new(0.0, 1.0, 0.1).unwrap();
        let t = timestep_map(&p, &eps, &Grid::new(1.0, 1.0, 0.1).unwrap()).unwrap();
        let o = offset_sweep(&SweepSpec {
            protocol: p,
            epsilon: eps,
        });
        assert_eq!(t.rows, o.rows);
    }

    #[test]
    fn invalid_protocol_knobs() {
        let p = protocol("2", simple_pi());
        assert!(p.clone().with_window(-1.0).is_err());
        assert!(p.clone().with_amplitude_scale(0.0).is_err());
        assert!(p.with_timestep_scale(-0.2).is_err());
    }
}
