//! Extended-precision propagation for error-order fits.
//!
//! Transverse residuals of the longer sequences sit 40 to 60 decades below
//! the O(1) terms they are computed from, far beyond `f64`. This module
//! mirrors the quaternion algebra on MPFR floats so those residuals survive
//! the cancellation. Only used where an error coefficient has to be resolved;
//! every sweep runs in `f64`.

use rug::float::Constant;
use rug::Float;

use crate::pulse::{BasePulse, PulseSegment};
use crate::sequence::Token;
use crate::su2::ErrorCoeffs;

/// Working precision in bits (about 115 decimal digits).
pub const PRECISION: u32 = 384;

fn float(x: f64) -> Float {
    Float::with_val(PRECISION, x)
}

#[derive(Debug, Clone)]
pub struct PreciseUnitary {
    a: Float,
    b: [Float; 3],
}

impl PreciseUnitary {
    pub fn identity() -> Self {
        Self {
            a: float(1.0),
            b: [float(0.0), float(0.0), float(0.0)],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (a1, b1) = (&self.a, &self.b);
        let (a2, b2) = (&rhs.a, &rhs.b);
        let prod = |x: &Float, y: &Float| Float::with_val(PRECISION, x * y);
        let dot = prod(&b1[0], &b2[0]) + prod(&b1[1], &b2[1]) + prod(&b1[2], &b2[2]);
        let cross = [
            prod(&b1[1], &b2[2]) - prod(&b1[2], &b2[1]),
            prod(&b1[2], &b2[0]) - prod(&b1[0], &b2[2]),
            prod(&b1[0], &b2[1]) - prod(&b1[1], &b2[0]),
        ];
        let [c0, c1, c2] = cross;
        Self {
            a: prod(a1, a2) - dot,
            b: [
                prod(a1, &b2[0]) + prod(a2, &b1[0]) - c0,
                prod(a1, &b2[1]) + prod(a2, &b1[1]) - c1,
                prod(a1, &b2[2]) + prod(a2, &b1[2]) - c2,
            ],
        }
    }

    pub fn then(&self, next: &Self) -> Self {
        next.mul(self)
    }

    pub fn bar(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: [
                Float::with_val(PRECISION, -&self.b[0]),
                Float::with_val(PRECISION, -&self.b[1]),
                self.b[2].clone(),
            ],
        }
    }

    pub fn error_coeffs(&self) -> ErrorCoeffs {
        let one = float(1.0);
        let d_minus = Float::with_val(PRECISION, &self.a - &one).abs();
        let d_plus = Float::with_val(PRECISION, &self.a + &one).abs();
        let delta_1 = if d_minus < d_plus { d_minus } else { d_plus };
        ErrorCoeffs {
            delta_1: delta_1.to_f64(),
            delta_x: self.b[0].clone().abs().to_f64(),
            delta_y: self.b[1].clone().abs().to_f64(),
            delta_z: self.b[2].clone().abs().to_f64(),
        }
    }

    pub fn to_f64(&self) -> crate::su2::Unitary2 {
        crate::su2::Unitary2::new(
            self.a.to_f64(),
            [self.b[0].to_f64(), self.b[1].to_f64(), self.b[2].to_f64()],
        )
    }
}

fn cos_sin_deg(deg: f64) -> (Float, Float) {
    let d = deg.rem_euclid(360.0);
    let axis = |c: f64, s: f64| (float(c), float(s));
    if d == 0.0 {
        axis(1.0, 0.0)
    } else if d == 90.0 {
        axis(0.0, 1.0)
    } else if d == 180.0 {
        axis(-1.0, 0.0)
    } else if d == 270.0 {
        axis(0.0, -1.0)
    } else {
        let pi = Float::with_val(PRECISION, Constant::Pi);
        let rad = Float::with_val(PRECISION, pi * d) / 180u32;
        let (s, c) = rad.sin_cos(float(0.0));
        (c, s)
    }
}

fn segment(seg: &PulseSegment, epsilon: &Float) -> PreciseUnitary {
    let (c, s) = cos_sin_deg(seg.phase_deg());
    let amp = float(seg.amplitude_rel());
    let v = [
        Float::with_val(PRECISION, &amp * &c),
        Float::with_val(PRECISION, &amp * &s),
        epsilon.clone(),
    ];
    let r2 = Float::with_val(PRECISION, &v[0] * &v[0])
        + Float::with_val(PRECISION, &v[1] * &v[1])
        + Float::with_val(PRECISION, &v[2] * &v[2]);
    if r2.is_zero() || seg.angle_over_pi() == 0.0 {
        return PreciseUnitary::identity();
    }
    let r = r2.sqrt();
    let pi = Float::with_val(PRECISION, Constant::Pi);
    let half = Float::with_val(PRECISION, pi * seg.angle_over_pi()) * &r / 2u32;
    let (sin, cos) = half.sin_cos(float(0.0));
    let k = sin / &r;
    PreciseUnitary {
        a: cos,
        b: v.map(|x| x * &k),
    }
}

pub fn propagate_pulse(p: &BasePulse, epsilon: f64) -> PreciseUnitary {
    let eps = float(epsilon);
    p.segments()
        .iter()
        .fold(PreciseUnitary::identity(), |u, s| u.then(&segment(s, &eps)))
}

/// Propagates a token list at offset `epsilon`.
pub fn propagate_tokens(tokens: &[Token], base: &BasePulse, epsilon: f64) -> PreciseUnitary {
    let p = propagate_pulse(base, epsilon);
    let q = p.bar();
    tokens.iter().fold(PreciseUnitary::identity(), |u, t| {
        u.then(match t {
            Token::Plain => &p,
            Token::Barred => &q,
        })
    })
}
