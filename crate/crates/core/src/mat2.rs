//! 2x2 real linear algebra: arithmetic, inversion, characteristic polynomial
//! and two independent matrix-exponential implementations.
//!
//! [`Mat2::expm_closed`] evaluates the spectral closed form
//! `e^A = e^{m} (cosh(D) I + sinhc(D) (A - m I))` with `m = trace/2` and
//! `D^2 = m^2 - det A`; [`Mat2::expm_squaring`] is a conventional
//! scaling-and-squaring Pade implementation kept deliberately independent so
//! the two can cross-check each other.

use serde::Serialize;

use crate::error::{Error, Result};

/// Determinant magnitude below which [`Mat2::inverse`] refuses to divide.
///
/// The system matrices always have `det = 1/(LC) > 0`; the guard only keeps
/// the API total for arbitrary input.
pub const SINGULAR_EPS: f64 = 1e-300;

/// Discriminant threshold (relative to `max(1, trace^2)`) below which the
/// hyperbolic pair in the closed-form exponential switches to truncated
/// series, avoiding the indeterminate form at a repeated eigenvalue.
const SERIES_THRESHOLD: f64 = 1e-6;

/// A real 2x2 matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

/// A real 2-vector; in circuit context `first` is the inductor current and
/// `second` the capacitor voltage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Vec2 {
    pub first: f64,
    pub second: f64,
}

/// Coefficients of the monic characteristic polynomial `p(l) = l^2 + alpha l + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharPoly2 {
    /// Coefficient of the linear term, `-trace`.
    pub alpha: f64,
    /// Constant term, `det`.
    pub beta: f64,
}

impl Mat2 {
    /// Builds a matrix from row-major entries.
    ///
    /// Panics if any entry is NaN or infinite; every operation in this module
    /// preserves finiteness for inputs whose exponentials stay within f64
    /// range.
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        assert!(
            m11.is_finite() && m12.is_finite() && m21.is_finite() && m22.is_finite(),
            "Mat2 entries must be finite, got [[{m11}, {m12}], [{m21}, {m22}]]"
        );
        Self { m11, m12, m21, m22 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        f64::max(
            self.m11.abs() + self.m12.abs(),
            self.m21.abs() + self.m22.abs(),
        )
    }

    /// Characteristic polynomial coefficients, by the same floating-point
    /// expressions as [`Mat2::trace`] and [`Mat2::det`].
    pub fn charpoly(&self) -> CharPoly2 {
        CharPoly2 {
            alpha: -(self.m11 + self.m22),
            beta: self.det(),
        }
    }

    /// Closed-form inverse.
    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det.abs() <= SINGULAR_EPS {
            return Err(Error::SingularMatrix(format!(
                "|det| = {:e} <= {SINGULAR_EPS:e}",
                det.abs()
            )));
        }
        Ok(Mat2::new(
            self.m22 / det,
            -self.m12 / det,
            -self.m21 / det,
            self.m11 / det,
        ))
    }

    /// Matrix exponential through the 2x2 spectral closed form.
    ///
    /// With `m = trace/2` and `q = m^2 - det` (the squared half-gap between
    /// eigenvalues) the exponential is
    ///
    /// ```text
    /// e^A = c I + s (A - m I),   c = e^m cosh(sqrt q),  s = e^m sinhc(sqrt q)
    /// ```
    ///
    /// For `q < 0` the pair becomes `(cos, sinc)` of `sqrt(-q)`; for `|q|`
    /// under the series threshold both factors are evaluated by truncated
    /// Taylor series in `q`. The exact branches pair the exponentials as
    /// `e^{m +- sqrt q}` so that stable matrices with large negative
    /// eigenvalues underflow gracefully instead of producing `inf * 0`.
    pub fn expm_closed(&self) -> Mat2 {
        let m = 0.5 * self.trace();
        let q = m * m - self.det();
        let tr2 = self.trace() * self.trace();

        let (c, s) = if q.abs() < SERIES_THRESHOLD * f64::max(1.0, tr2) {
            let em = m.exp();
            // cosh(sqrt q) and sinhc(sqrt q) as series in q, 6 terms each
            let ch = 1.0
                + q * (1.0 / 2.0
                    + q * (1.0 / 24.0 + q * (1.0 / 720.0 + q * (1.0 / 40320.0 + q / 3_628_800.0))));
            let sh = 1.0
                + q * (1.0 / 6.0
                    + q * (1.0 / 120.0
                        + q * (1.0 / 5040.0 + q * (1.0 / 362_880.0 + q / 39_916_800.0))));
            (em * ch, em * sh)
        } else if q > 0.0 {
            let d = q.sqrt();
            if d > 350.0 {
                // e^{m-d} is below 1e-152 of e^{m+d}; drop it
                let ep = (m + d).exp();
                (0.5 * ep, 0.5 * ep / d)
            } else {
                let elo = (m - d).exp();
                let grow = (2.0 * d).exp_m1(); // e^{m+d} - e^{m-d} = elo * grow
                (elo + 0.5 * elo * grow, 0.5 * elo * grow / d)
            }
        } else {
            let w = (-q).sqrt();
            let em = m.exp();
            (em * w.cos(), em * w.sin() / w)
        };

        Mat2::new(
            c + s * (self.m11 - m),
            s * self.m12,
            s * self.m21,
            c + s * (self.m22 - m),
        )
    }

    /// Matrix exponential by scaling and squaring with a diagonal Pade [7/7]
    /// kernel; the scaled norm is brought at or below 0.5.
    ///
    /// Kept free of any code shared with [`Mat2::expm_closed`] so the two
    /// routes form an independent cross-check.
    pub fn expm_squaring(&self) -> Mat2 {
        // Pade [7/7] coefficients of exp: c_k = (14-k)! 7! / (14! k! (7-k)!)
        const C: [f64; 8] = [
            1.0,
            0.5,
            3.0 / 26.0,
            5.0 / 312.0,
            5.0 / 3432.0,
            1.0 / 11440.0,
            1.0 / 308_880.0,
            1.0 / 17_297_280.0,
        ];

        let norm = self.norm_inf();
        let scalings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let b = *self * 0.5f64.powi(scalings);

        let b2 = b * b;
        let b4 = b2 * b2;
        let b6 = b4 * b2;
        let ident = Mat2::identity();
        let odd = b * (ident * C[1] + b2 * C[3] + b4 * C[5] + b6 * C[7]);
        let even = ident * C[0] + b2 * C[2] + b4 * C[4] + b6 * C[6];
        let num = even + odd;
        let den = even - odd;
        let mut x = den
            .inverse()
            .expect("Pade denominator is nonsingular for scaled norm <= 0.5")
            * num;
        for _ in 0..scalings {
            x = x * x;
        }
        x
    }
}

impl std::ops::Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 + rhs.m11,
            self.m12 + rhs.m12,
            self.m21 + rhs.m21,
            self.m22 + rhs.m22,
        )
    }
}

impl std::ops::Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
}

/// Matrix product with plain left-to-right accumulation (no reassociation).
impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

impl std::ops::Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, x: Vec2) -> Vec2 {
        Vec2::new(
            self.m11 * x.first + self.m12 * x.second,
            self.m21 * x.first + self.m22 * x.second,
        )
    }
}

impl std::ops::Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, k: f64) -> Mat2 {
        Mat2::new(self.m11 * k, self.m12 * k, self.m21 * k, self.m22 * k)
    }
}

impl std::ops::Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

impl Vec2 {
    pub fn new(first: f64, second: f64) -> Self {
        assert!(
            first.is_finite() && second.is_finite(),
            "Vec2 entries must be finite, got [{first}, {second}]"
        );
        Self { first, second }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn norm_inf(&self) -> f64 {
        f64::max(self.first.abs(), self.second.abs())
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.first + rhs.first, self.second + rhs.second)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.first - rhs.first, self.second - rhs.second)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.first * k, self.second * k)
    }
}
