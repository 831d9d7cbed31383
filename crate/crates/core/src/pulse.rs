//! Base π pulses as piecewise-constant segment lists.
//!
//! Segments keep their phase in degrees and their nominal angle in units of
//! π, exactly as written in a pulse config. Multiples of 90° therefore map to
//! exact axis components, and the high-precision path can rebuild the same
//! angles without inheriting `f64` rounding of π.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{self, Unitary2};

/// Tolerance for the π_y check applied when a pulse is loaded.
pub const PI_Y_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSegment {
    amplitude_rel: f64,
    phase_deg: f64,
    angle_over_pi: f64,
}

/// `(cos, sin)` of an angle in degrees, exact on the quadrant axes.
pub(crate) fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let d = deg.rem_euclid(360.0);
    if d == 0.0 {
        (1.0, 0.0)
    } else if d == 90.0 {
        (0.0, 1.0)
    } else if d == 180.0 {
        (-1.0, 0.0)
    } else if d == 270.0 {
        (0.0, -1.0)
    } else {
        let (s, c) = d.to_radians().sin_cos();
        (c, s)
    }
}

impl PulseSegment {
    /// Builds a segment from config units: amplitude relative to ν1, phase in
    /// degrees, nominal flip angle in units of π.
    pub fn from_config(amplitude_rel: f64, phase_deg: f64, angle_over_pi: f64) -> Result<Self> {
        if !amplitude_rel.is_finite() {
            return Err(Error::NonFinite("amplitude_rel"));
        }
        if !phase_deg.is_finite() {
            return Err(Error::NonFinite("phase_deg"));
        }
        if !angle_over_pi.is_finite() {
            return Err(Error::NonFinite("angle_over_pi"));
        }
        if amplitude_rel < 0.0 {
            return Err(Error::Negative {
                name: "amplitude_rel",
                value: amplitude_rel,
            });
        }
        if angle_over_pi < 0.0 {
            return Err(Error::Negative {
                name: "angle_over_pi",
                value: angle_over_pi,
            });
        }
        Ok(Self {
            amplitude_rel,
            phase_deg: phase_deg.rem_euclid(360.0),
            angle_over_pi,
        })
    }

    pub fn amplitude_rel(&self) -> f64 {
        self.amplitude_rel
    }

    /// Phase in radians, in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase_deg.to_radians()
    }

    pub fn phase_deg(&self) -> f64 {
        self.phase_deg
    }

    /// Nominal flip angle in radians at unit amplitude.
    pub fn nominal_angle(&self) -> f64 {
        PI * self.angle_over_pi
    }

    pub fn angle_over_pi(&self) -> f64 {
        self.angle_over_pi
    }

    /// Duration in units of `1/ν1`.
    pub fn duration(&self) -> f64 {
        0.5 * self.angle_over_pi
    }

    /// Rotation vector `(s cos φ, s sin φ, ε)`.
    pub fn rotation_vector(&self, epsilon: f64) -> [f64; 3] {
        let (c, s) = cos_sin_deg(self.phase_deg);
        [self.amplitude_rel * c, self.amplitude_rel * s, epsilon]
    }

    pub fn propagator(&self, epsilon: f64) -> Unitary2 {
        su2::rotation(self.rotation_vector(epsilon), self.nominal_angle())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasePulse {
    name: String,
    segments: Vec<PulseSegment>,
}

impl BasePulse {
    /// Validates that the segments compose to π about +y (either spinor sign)
    /// at zero offset.
    pub fn new(name: impl Into<String>, segments: Vec<PulseSegment>) -> Result<Self> {
        let pulse = Self {
            name: name.into(),
            segments,
        };
        if pulse.total_duration() <= 0.0 {
            return Err(Error::EmptyPulse(pulse.name));
        }
        let achieved = pulse.propagate(0.0);
        let target = Unitary2::new(0.0, [0.0, 1.0, 0.0]);
        if achieved.max_abs_diff_up_to_sign(&target) > PI_Y_TOLERANCE {
            return Err(Error::InvariantViolation {
                name: pulse.name,
                achieved,
            });
        }
        Ok(pulse)
    }

    /// Resolves `simple` or `levitt3`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "simple" => Some(simple_pi()),
            "levitt3" => Some(levitt3()),
            _ => None,
        }
    }

    /// A built-in name, or otherwise a path to a pulse config file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if let Some(p) = Self::builtin(name_or_path) {
            return Ok(p);
        }
        let text = std::fs::read_to_string(Path::new(name_or_path))
            .map_err(|e| Error::Parse(format!("{name_or_path}: {e}")))?;
        load_pulse(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    /// Total duration in units of `1/ν1`.
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(PulseSegment::duration).sum()
    }

    pub fn total_angle_over_pi(&self) -> f64 {
        self.segments.iter().map(|s| s.angle_over_pi).sum()
    }

    pub fn propagate(&self, epsilon: f64) -> Unitary2 {
        self.segments
            .iter()
            .fold(Unitary2::IDENTITY, |u, s| u.then(&s.propagator(epsilon)))
    }

    pub fn to_config_text(&self) -> String {
        let cfg = PulseConfig {
            name: self.name.clone(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentConfig {
                    amplitude_rel: s.amplitude_rel,
                    phase_deg: s.phase_deg,
                    angle_over_pi: s.angle_over_pi,
                })
                .collect(),
        };
        toml::to_string(&cfg).expect("pulse config serializes")
    }
}

fn seg(amplitude_rel: f64, phase_deg: f64, angle_over_pi: f64) -> PulseSegment {
    PulseSegment::from_config(amplitude_rel, phase_deg, angle_over_pi)
        .expect("built-in segment is valid")
}

/// A single resonant π pulse about +y.
pub fn simple_pi() -> BasePulse {
    BasePulse::new("simple", vec![seg(1.0, 90.0, 1.0)]).expect("simple pulse is pi_y")
}

/// Levitt's `(π/2)_x (3π/2)_y (π/2)_x` composite.
///
/// As written, that composite is a π rotation about `(-x + y)/√2`; every
/// phase is advanced by -45° so the net rotation is about +y. The uniform
/// shift is a z-rotation frame change and leaves all offset behaviour intact.
pub fn levitt3() -> BasePulse {
    BasePulse::new(
        "levitt3",
        vec![
            seg(1.0, 315.0, 0.5),
            seg(1.0, 45.0, 1.5),
            seg(1.0, 315.0, 0.5),
        ],
    )
    .expect("levitt3 is pi_y")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PulseConfig {
    name: String,
    segments: Vec<SegmentConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentConfig {
    amplitude_rel: f64,
    phase_deg: f64,
    angle_over_pi: f64,
}

/// Parses a TOML pulse config and checks the π_y invariant.
pub fn load_pulse(config_text: &str) -> Result<BasePulse> {
    let cfg: PulseConfig = toml::from_str(config_text).map_err(|e| Error::Parse(e.to_string()))?;
    let segments = cfg
        .segments
        .iter()
        .map(|s| PulseSegment::from_config(s.amplitude_rel, s.phase_deg, s.angle_over_pi))
        .collect::<Result<Vec<_>>>()?;
    BasePulse::new(cfg.name, segments)
}

/// Phase-reverses every segment.
pub fn bar_pulse(p: &BasePulse) -> BasePulse {
    BasePulse {
        name: p.name.clone(),
        segments: p
            .segments
            .iter()
            .map(|s| PulseSegment {
                phase_deg: (s.phase_deg + 180.0).rem_euclid(360.0),
                ..*s
            })
            .collect(),
    }
}

fn check_scale(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScale(s))
    }
}

/// Multiplies every amplitude by `s`, keeping durations fixed.
pub fn scale_amplitude(p: &BasePulse, s: f64) -> Result<BasePulse> {
    check_scale(s)?;
    Ok(BasePulse {
        name: p.name.clone(),
        segments: p
            .segments
            .iter()
            .map(|seg| PulseSegment {
                amplitude_rel: seg.amplitude_rel * s,
                ..*seg
            })
            .collect(),
    })
}

/// Multiplies every duration by `s` at unchanged amplitude.
pub fn scale_timesteps(p: &BasePulse, s: f64) -> Result<BasePulse> {
    check_scale(s)?;
    Ok(BasePulse {
        name: p.name.clone(),
        segments: p
            .segments
            .iter()
            .map(|seg| PulseSegment {
                angle_over_pi: seg.angle_over_pi * s,
                ..*seg
            })
            .collect(),
    })
}

pub fn propagate_pulse(p: &BasePulse, epsilon: f64) -> Unitary2 {
    p.propagate(epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::integrate_oracle;
    use approx::assert_abs_diff_eq;

    const PI_Y: Unitary2 = Unitary2::new(0.0, [0.0, 1.0, 0.0]);

    #[test]
    fn builtins_are_pi_y() {
        for p in [simple_pi(), levitt3()] {
            assert!(
                p.propagate(0.0).max_abs_diff_up_to_sign(&PI_Y) < 1e-10,
                "{}",
                p.name()
            );
        }
    }

    #[test]
    fn simple_pi_closed_form() {
        let p = simple_pi();
        assert_eq!(p.segments().len(), 1);
        assert!(p.propagate(0.0).max_abs_diff(&PI_Y) < 1e-15);
        assert_eq!(p.total_duration(), 0.5);
        for eps in [0.1f64, 0.5, 1.3] {
            let a = (0.5 * PI * (1.0 + eps * eps).sqrt()).cos();
            assert_abs_diff_eq!(p.propagate(eps).a, a, epsilon = 1e-15);
        }
    }

    #[test]
    fn levitt3_structure() {
        let p = levitt3();
        assert_eq!(p.segments().len(), 3);
        assert_abs_diff_eq!(p.total_angle_over_pi(), 2.5);
        // consecutive segments stay 90° apart, as in (π/2)x (3π/2)y (π/2)x
        let ph: Vec<f64> = p.segments().iter().map(|s| s.phase_deg()).collect();
        assert_eq!(((ph[1] - ph[0]).rem_euclid(360.0)), 90.0);
        assert_eq!(ph[0], ph[2]);
    }

    #[test]
    fn levitt3_compensates_offset() {
        let lz = levitt3().propagate(0.2).b[2].abs();
        let sz = simple_pi().propagate(0.2).b[2].abs();
        assert!(lz < sz, "{lz} vs {sz}");
        for i in 1..=30 {
            let eps = 0.01 * i as f64;
            assert!(levitt3().propagate(eps).b[2].abs() <= simple_pi().propagate(eps).b[2].abs());
        }
    }

    #[test]
    fn levitt3_matches_oracle() {
        let p = levitt3();
        let brute = integrate_oracle(p.segments(), 0.3, 2_000);
        assert!(brute.max_abs_diff(&p.propagate(0.3)) < 1e-8);
    }

    #[test]
    fn config_round_trip() {
        for p in [simple_pi(), levitt3()] {
            assert_eq!(load_pulse(&p.to_config_text()).unwrap(), p);
        }
    }

    #[test]
    fn config_rejects_wrong_axis() {
        let text = r#"
name = "pi_x"
[[segments]]
amplitude_rel = 1.0
phase_deg = 0.0
angle_over_pi = 1.0
"#;
        match load_pulse(text) {
            Err(Error::InvariantViolation { achieved, .. }) => {
                assert!(achieved.max_abs_diff(&Unitary2::new(0.0, [1.0, 0.0, 0.0])) < 1e-15)
            }
            other => panic!("expected invariant violation, got {other:?}"),
        }
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let text = r#"
name = "x"
[[segments]]
amplitude_rel = 1.0
phase_deg = 90.0
angle_over_pi = 1.0
shape = "gauss"
"#;
        assert!(matches!(load_pulse(text), Err(Error::Parse(_))));
        assert!(matches!(load_pulse("name = "), Err(Error::Parse(_))));
    }

    #[test]
    fn config_rejects_empty_and_negative() {
        assert!(matches!(
            load_pulse("name = \"e\"\nsegments = []\n"),
            Err(Error::EmptyPulse(_))
        ));
        let neg = "name = \"n\"\n[[segments]]\namplitude_rel = -1.0\nphase_deg = 90.0\nangle_over_pi = 1.0\n";
        assert!(matches!(load_pulse(neg), Err(Error::Negative { .. })));
    }

    #[test]
    fn bar_pulse_examples() {
        let s = simple_pi();
        let minus_y = Unitary2::new(0.0, [0.0, -1.0, 0.0]);
        assert!(bar_pulse(&s).propagate(0.0).max_abs_diff(&minus_y) < 1e-15);
        let l = levitt3();
        let lhs = bar_pulse(&l).propagate(0.37);
        let rhs = l.propagate(0.37).bar();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert_eq!(bar_pulse(&bar_pulse(&l)), l);
    }

    #[test]
    fn scaling() {
        let s = simple_pi();
        assert_eq!(scale_amplitude(&s, 1.0).unwrap(), s);
        assert_eq!(scale_timesteps(&s, 1.0).unwrap(), s);
        let half_y = Unitary2::new(
            std::f64::consts::FRAC_1_SQRT_2,
            [0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0],
        );
        assert!(
            scale_amplitude(&s, 0.5)
                .unwrap()
                .propagate(0.0)
                .max_abs_diff(&half_y)
                < 1e-15
        );
        assert!(
            scale_timesteps(&s, 0.5)
                .unwrap()
                .propagate(0.0)
                .max_abs_diff(&half_y)
                < 1e-15
        );
        for bad in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                scale_amplitude(&s, bad),
                Err(Error::InvalidScale(_))
            ));
            assert!(matches!(
                scale_timesteps(&s, bad),
                Err(Error::InvalidScale(_))
            ));
        }
    }

    #[test]
    fn amplitude_scaling_keeps_offset_absolute() {
        // scaled amplitude changes the transverse part only
        let p = scale_amplitude(&simple_pi(), 0.8).unwrap();
        let v = p.segments()[0].rotation_vector(0.3);
        assert_eq!(v, [0.0, 0.8, 0.3]);
    }

    #[test]
    fn resolve_names() {
        assert_eq!(BasePulse::resolve("simple").unwrap(), simple_pi());
        assert!(matches!(
            BasePulse::resolve("/no/such/pulse.toml"),
            Err(Error::Parse(_))
        ));
    }
}
