//! SU(2) propagators stored as real unit quaternions.
//!
//! A propagator is `U = a·1 + i b·σ` with `a² + |b|² = 1`. Constant-field
//! segments have the closed form `exp(+i (θ/2) v·σ)` where
//! `v = (s cos φ, s sin φ, ε)` and `θ` is the nominal flip angle at unit
//! amplitude, so the effective rotation angle is `θ |v|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pulse::PulseSegment;

/// Drift in `a² + |b|²` tolerated before a product is renormalized.
pub const RENORM_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Unitary2 {
    /// Coefficient of the identity.
    pub a: f64,
    /// Coefficients of `iσ_x`, `iσ_y`, `iσ_z`.
    pub b: [f64; 3],
}

impl Default for Unitary2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Unitary2 {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: [0.0; 3],
    };

    pub const fn new(a: f64, b: [f64; 3]) -> Self {
        Self { a, b }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b.iter().map(|x| x * x).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.iter().all(|x| x.is_finite())
    }

    /// Matrix product `self · rhs`, i.e. `rhs` acts first.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (a1, b1) = (self.a, self.b);
        let (a2, b2) = (rhs.a, rhs.b);
        let dot = b1[0] * b2[0] + b1[1] * b2[1] + b1[2] * b2[2];
        let cross = [
            b1[1] * b2[2] - b1[2] * b2[1],
            b1[2] * b2[0] - b1[0] * b2[2],
            b1[0] * b2[1] - b1[1] * b2[0],
        ];
        Self {
            a: a1 * a2 - dot,
            b: [
                a1 * b2[0] + a2 * b1[0] - cross[0],
                a1 * b2[1] + a2 * b1[1] - cross[1],
                a1 * b2[2] + a2 * b1[2] - cross[2],
            ],
        }
    }

    /// Applies `self` and then `next`.
    pub fn then(&self, next: &Self) -> Self {
        next.mul(self).renormalized()
    }

    pub fn renormalized(self) -> Self {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > RENORM_THRESHOLD && n2 > 0.0 {
            let inv = n2.sqrt().recip();
            Self {
                a: self.a * inv,
                b: self.b.map(|x| x * inv),
            }
        } else {
            self
        }
    }

    /// Phase-reversed twin: `σ_z U σ_z`, flips the transverse coefficients.
    pub fn bar(&self) -> Self {
        Self {
            a: self.a,
            b: [-self.b[0], -self.b[1], self.b[2]],
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            a: self.a,
            b: self.b.map(|x| -x),
        }
    }

    /// `|Tr U|² / 4`, blind to the spinor sign.
    pub fn fidelity_identity(&self) -> f64 {
        (self.a * self.a).clamp(0.0, 1.0)
    }

    /// `|b|²`, which equals `1 - fidelity` without the cancellation.
    pub fn infidelity_identity(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum::<f64>().clamp(0.0, 1.0)
    }

    pub fn error_coeffs(&self) -> ErrorCoeffs {
        ErrorCoeffs {
            delta_1: (self.a - 1.0).abs().min((self.a + 1.0).abs()),
            delta_x: self.b[0].abs(),
            delta_y: self.b[1].abs(),
            delta_z: self.b[2].abs(),
        }
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = (self.a - other.a).abs();
        for k in 0..3 {
            d = d.max((self.b[k] - other.b[k]).abs());
        }
        d
    }

    /// Like [`max_abs_diff`](Self::max_abs_diff) but treating `U` and `-U` as equal.
    pub fn max_abs_diff_up_to_sign(&self, other: &Self) -> f64 {
        let neg = Self {
            a: -other.a,
            b: other.b.map(|x| -x),
        };
        self.max_abs_diff(other).min(self.max_abs_diff(&neg))
    }
}

/// Magnitudes of the deviation of a propagator from `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorCoeffs {
    pub delta_1: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_z: f64,
}

/// Selects one field of [`ErrorCoeffs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    Delta1,
    DeltaX,
    DeltaY,
    DeltaZ,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Delta1,
        Component::DeltaX,
        Component::DeltaY,
        Component::DeltaZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Delta1 => "delta_1",
            Component::DeltaX => "delta_x",
            Component::DeltaY => "delta_y",
            Component::DeltaZ => "delta_z",
        }
    }
}

impl ErrorCoeffs {
    pub fn get(&self, component: Component) -> f64 {
        match component {
            Component::Delta1 => self.delta_1,
            Component::DeltaX => self.delta_x,
            Component::DeltaY => self.delta_y,
            Component::DeltaZ => self.delta_z,
        }
    }
}

/// `exp(+i (θ/2) v·σ)` for rotation vector `v` and nominal angle `θ`.
pub(crate) fn rotation(v: [f64; 3], nominal_angle: f64) -> Unitary2 {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 || nominal_angle == 0.0 {
        return Unitary2::IDENTITY;
    }
    let half = 0.5 * nominal_angle * r;
    let (s, c) = half.sin_cos();
    let k = s / r;
    Unitary2 {
        a: c,
        b: v.map(|x| x * k),
    }
}

/// Closed-form propagator of a constant resonant field with relative
/// amplitude `amplitude_rel`, phase `phase` (radians) and nominal angle
/// `nominal_angle` (radians at unit amplitude), at fractional offset
/// `epsilon`.
pub fn segment_propagator(
    amplitude_rel: f64,
    phase: f64,
    nominal_angle: f64,
    epsilon: f64,
) -> Result<Unitary2> {
    for (name, x) in [
        ("amplitude_rel", amplitude_rel),
        ("phase", phase),
        ("nominal_angle", nominal_angle),
        ("epsilon", epsilon),
    ] {
        if !x.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if nominal_angle < 0.0 {
        return Err(Error::Negative {
            name: "nominal_angle",
            value: nominal_angle,
        });
    }
    if amplitude_rel < 0.0 {
        return Err(Error::Negative {
            name: "amplitude_rel",
            value: amplitude_rel,
        });
    }
    let (sin_phi, cos_phi) = phase.sin_cos();
    Ok(rotation(
        [amplitude_rel * cos_phi, amplitude_rel * sin_phi, epsilon],
        nominal_angle,
    ))
}

/// Propagator of `first` followed by `second`.
pub fn compose(first: &Unitary2, second: &Unitary2) -> Unitary2 {
    first.then(second)
}

pub fn bar(u: &Unitary2) -> Unitary2 {
    u.bar()
}

pub fn fidelity_identity(u: &Unitary2) -> f64 {
    u.fidelity_identity()
}

pub fn error_coeffs(u: &Unitary2) -> ErrorCoeffs {
    u.error_coeffs()
}

/// Brute-force reference propagator: integrates `dU/dt = (i v·σ / 2) U`
/// through each segment with `steps_per_segment` classical RK4 steps.
/// Shares nothing with the closed form beyond the generator itself.
pub fn integrate_oracle(
    segments: &[PulseSegment],
    epsilon: f64,
    steps_per_segment: usize,
) -> Unitary2 {
    let steps = steps_per_segment.max(1);
    let mut u = Unitary2::IDENTITY;
    for seg in segments {
        let v = seg.rotation_vector(epsilon);
        let half_v = Unitary2::new(0.0, v.map(|x| 0.5 * x));
        let h = seg.nominal_angle() / steps as f64;
        let deriv = |q: &Unitary2| half_v.mul(q);
        let axpy = |q: &Unitary2, k: &Unitary2, s: f64| Unitary2 {
            a: q.a + s * k.a,
            b: [
                q.b[0] + s * k.b[0],
                q.b[1] + s * k.b[1],
                q.b[2] + s * k.b[2],
            ],
        };
        for _ in 0..steps {
            let k1 = deriv(&u);
            let k2 = deriv(&axpy(&u, &k1, 0.5 * h));
            let k3 = deriv(&axpy(&u, &k2, 0.5 * h));
            let k4 = deriv(&axpy(&u, &k3, h));
            let next = Unitary2 {
                a: u.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                b: std::array::from_fn(|i| {
                    u.b[i] + h / 6.0 * (k1.b[i] + 2.0 * k2.b[i] + 2.0 * k3.b[i] + k4.b[i])
                }),
            };
            u = next.renormalized();
        }
    }
    u
}
