//! Midpoint-radius ("ball") arithmetic over `Complex<f64>`.
//!
//! Every analytic quantity in this crate is an [`ErrorBoundedComplex`]: a
//! floating midpoint plus a nonnegative radius that dominates both truncation
//! error and accumulated rounding. Combinators propagate radii conservatively
//! and fold a per-operation rounding inflation of a few ulps into the result,
//! so a chain of operations stays a rigorous enclosure.

use num_complex::Complex64;

/// Relative rounding inflation applied per floating operation (4 ulps).
pub const ROUNDING_INFLATION: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundedComplex {
    pub mid: Complex64,
    pub radius: f64,
}

impl ErrorBoundedComplex {
    pub fn new(mid: Complex64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0 && radius.is_finite());
        Self { mid, radius }
    }

    pub fn exact(mid: Complex64) -> Self {
        Self { mid, radius: 0.0 }
    }

    pub fn zero() -> Self {
        Self {
            mid: Complex64::new(0.0, 0.0),
            radius: 0.0,
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::exact(Complex64::new(x, 0.0))
    }

    /// Rounding inflation for a freshly computed midpoint.
    fn inflation(mid: Complex64) -> f64 {
        ROUNDING_INFLATION * mid.norm()
    }

    pub fn add(self, other: Self) -> Self {
        let mid = self.mid + other.mid;
        Self::new(mid, self.radius + other.radius + Self::inflation(mid))
    }

    pub fn sub(self, other: Self) -> Self {
        let mid = self.mid - other.mid;
        Self::new(mid, self.radius + other.radius + Self::inflation(mid))
    }

    pub fn mul(self, other: Self) -> Self {
        let mid = self.mid * other.mid;
        let radius = self.mid.norm() * other.radius
            + other.mid.norm() * self.radius
            + self.radius * other.radius
            + Self::inflation(mid);
        Self::new(mid, radius)
    }

    /// Multiply by an exactly known complex scalar.
    pub fn scale(self, k: Complex64) -> Self {
        let mid = self.mid * k;
        Self::new(mid, k.norm() * self.radius + Self::inflation(mid))
    }

    /// Multiply by an exactly known complex scalar whose modulus is known
    /// exactly (e.g. a root of unity, modulus 1, or q^{-s} on the 1-line,
    /// modulus 1/q). Avoids inflating the radius through `k.norm()` rounding.
    pub fn scale_with_modulus(self, k: Complex64, k_abs: f64) -> Self {
        let mid = self.mid * k;
        Self::new(mid, k_abs * self.radius + Self::inflation(mid))
    }

    /// Grow the radius by an externally derived error term.
    pub fn widen(self, extra: f64) -> Self {
        debug_assert!(extra >= 0.0);
        Self::new(self.mid, self.radius + extra)
    }

    /// Rigorous upper bound for the modulus of every point of the ball.
    pub fn abs_upper(&self) -> f64 {
        let m = self.mid.norm();
        m + self.radius + ROUNDING_INFLATION * m
    }

    /// Rigorous lower bound for the modulus (clamped at zero).
    pub fn abs_lower(&self) -> f64 {
        let m = self.mid.norm();
        (m - self.radius - ROUNDING_INFLATION * m).max(0.0)
    }

    /// Whether `z` is provably inside the ball is not decidable in floats;
    /// this is the conservative membership test used by the oracles: true iff
    /// `|mid - z|` is at most the radius after inflating for the subtraction.
    pub fn contains(&self, z: Complex64) -> bool {
        let d = (self.mid - z).norm();
        d <= self.radius + ROUNDING_INFLATION * (d + self.mid.norm())
    }

    /// Do two balls intersect? Used by cross-checks: two rigorous enclosures
    /// of the same value must overlap.
    pub fn overlaps(&self, other: &Self) -> bool {
        let d = (self.mid - other.mid).norm();
        d <= self.radius + other.radius + ROUNDING_INFLATION * (d + 1.0)
    }
}

impl std::fmt::Display for ErrorBoundedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({:.17e} + {:.17e}i) +/- {:.3e}",
            self.mid.re, self.mid.im, self.radius
        )
    }
}
