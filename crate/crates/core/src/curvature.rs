//! Curvature-dependent special functions.
//!
//! Every model space of constant sectional curvature `c` is described by the
//! generalized sine `s_c` and cotangent `ct_c`:
//!
//! ```text
//!   s_c(r)  = sin(√c r)/√c,   r,   sinh(√-c r)/√-c
//!   ct_c(r) = √c cot(√c r),   1/r, √-c coth(√-c r)
//! ```
//!
//! for `c > 0`, `c = 0` and `c < 0` respectively. `s_c` is the radial Jacobi
//! field of the model, so geodesic spheres have area `|S^{n-1}| s_c(r)^{n-1}`
//! and `Δ d = (n-1) ct_c(d)` for the distance from a point.
//!
//! All functions here are continuous in `c` through zero: when the
//! dimensionless parameter `c r²` is tiny a Taylor series replaces the
//! trigonometric/hyperbolic closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `|c| r²` the series branches are used for `s_c` and `ct_c`.
const SERIES_THRESHOLD: f64 = 1e-8;

/// `D_c` loses relative accuracy to cancellation well before `|c| r² = 1e-8`,
/// so its series branch (five terms) covers a wider range.
const D_SERIES_THRESHOLD: f64 = 1e-3;

/// Sectional curvature of a model space (units 1/length²).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() {
            Ok(Curvature(c))
        } else {
            Err(Error::domain("Curvature::new", format!("curvature {c} is not finite")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_flat(self) -> bool {
        self.0 == 0.0
    }

    pub fn is_spherical(self) -> bool {
        self.0 > 0.0
    }

    pub fn is_hyperbolic(self) -> bool {
        self.0 < 0.0
    }

    /// `π/√c` for `c > 0` (the conjugate radius), `+∞` otherwise.
    pub fn conjugate_radius(self) -> f64 {
        if self.0 > 0.0 {
            PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Unchecked `s_c(r)`; callers guarantee `0 <= r < π/√c`.
    #[inline]
    pub fn sn(self, r: f64) -> f64 {
        let c = self.0;
        let x = c * r * r;
        if x.abs() < SERIES_THRESHOLD {
            r * (1.0 - x / 6.0 + x * x / 120.0)
        } else if c > 0.0 {
            let k = c.sqrt();
            (k * r).sin() / k
        } else {
            let k = (-c).sqrt();
            (k * r).sinh() / k
        }
    }

    /// Unchecked `ct_c(r)`; callers guarantee `0 < r < π/√c`.
    #[inline]
    pub fn ct(self, r: f64) -> f64 {
        let c = self.0;
        let x = c * r * r;
        if x.abs() < SERIES_THRESHOLD {
            (1.0 - x / 3.0 - x * x / 45.0) / r
        } else if c > 0.0 {
            let k = c.sqrt();
            k / (k * r).tan()
        } else {
            let k = (-c).sqrt();
            k / (k * r).tanh()
        }
    }

    /// Unchecked `D_c(r) = r ct_c(r) - 1`, with `D_c(0) = 0`.
    #[inline]
    pub fn d_fn(self, r: f64) -> f64 {
        let c = self.0;
        let x = c * r * r;
        if x.abs() < D_SERIES_THRESHOLD {
            // y cot y - 1 in powers of x = y²
            -x * (1.0 / 3.0
                + x * (1.0 / 45.0 + x * (2.0 / 945.0 + x * (1.0 / 4725.0 + x * 2.0 / 93555.0))))
        } else if c > 0.0 {
            let y = c.sqrt() * r;
            y / y.tan() - 1.0
        } else {
            let y = (-c).sqrt() * r;
            y / y.tanh() - 1.0
        }
    }

    /// `1 - cos(√c r)` (or `cosh(√-c r) - 1` with the sign of `-c`) written as
    /// `2c s_c(r/2)²`, free of cancellation.
    #[inline]
    pub(crate) fn versine(self, r: f64) -> f64 {
        let h = self.sn(0.5 * r);
        2.0 * self.0 * h * h
    }

    /// `cos(√c r)` / `1` / `cosh(√-c r)`.
    #[inline]
    pub(crate) fn cs(self, r: f64) -> f64 {
        1.0 - self.versine(r)
    }

    fn check_radius(self, op: &'static str, r: f64, allow_zero: bool) -> Result<()> {
        if !r.is_finite() || r < 0.0 || (!allow_zero && r == 0.0) {
            return Err(Error::domain(op, format!("radius {r} outside domain")));
        }
        if self.0 > 0.0 && r >= self.conjugate_radius() {
            return Err(Error::domain(
                op,
                format!("radius {r} >= π/√c = {}", self.conjugate_radius()),
            ));
        }
        Ok(())
    }
}

/// Generalized sine `s_c(r)` (strict domain checking).
pub fn s_c(c: Curvature, r: f64) -> Result<f64> {
    c.check_radius("s_c", r, true)?;
    Ok(c.sn(r))
}

/// Generalized cotangent `ct_c(r) = s_c'(r)/s_c(r)`; undefined at the pole.
pub fn ct_c(c: Curvature, r: f64) -> Result<f64> {
    c.check_radius("ct_c", r, false)?;
    Ok(c.ct(r))
}

/// `D_c(r) = r ct_c(r) - 1`, extended by `D_c(0) = 0`.
///
/// On a space form `d Δd - (n-1) = (n-1) D_c(d)`. For `c <= 0` it is
/// nonnegative, for `c > 0` negative on `(0, π/√c)`.
pub fn d_c(c: Curvature, r: f64) -> Result<f64> {
    c.check_radius("d_c", r, true)?;
    Ok(c.d_fn(r))
}

/// Lower bound `3|c| r² / (π² + |c| r²)` for `D_c(r)` when `c <= 0`.
pub fn d_c_lower_bound(c: Curvature, r: f64) -> f64 {
    let x = c.value().abs() * r * r;
    3.0 * x / (PI * PI + x)
}

/// Partial sum `1/t + 2t Σ_{k=1}^{terms} 1/(t² - π²k²)` of the cotangent
/// expansion on `(0, π)`; the truncation error is `≈ 2t/(π² terms)`.
pub fn cot_mittag_leffler(t: f64, terms: usize) -> Result<f64> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::domain("cot_mittag_leffler", format!("t = {t} not in (0, π)")));
    }
    if terms == 0 {
        return Err(Error::domain("cot_mittag_leffler", "at least one term required"));
    }
    let t2 = t * t;
    // smallest terms first
    let tail: f64 = (1..=terms)
        .rev()
        .map(|k| {
            let pk = PI * k as f64;
            1.0 / (t2 - pk * pk)
        })
        .sum();
    Ok(1.0 / t + 2.0 * t * tail)
}

/// `C(n, β) = (n-1)(n-2) (7π² - 3(β+π/2)²) / (2π² (π² - (β+π/2)²))`.
///
/// The additive constant that turns the hemisphere version of the bipolar
/// inequality into a coercive norm; `β` is the largest distance from the
/// north pole to a pole.
pub fn hemisphere_constant(n: usize, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain("hemisphere_constant", format!("dimension {n} < 3")));
    }
    if !(0.0..PI / 2.0).contains(&beta) {
        return Err(Error::domain(
            "hemisphere_constant",
            format!("beta = {beta} not in [0, π/2)"),
        ));
    }
    let shifted = beta + PI / 2.0;
    let pi2 = PI * PI;
    let nn = n as f64;
    Ok((nn - 1.0) * (nn - 2.0) * (7.0 * pi2 - 3.0 * shifted * shifted)
        / (2.0 * pi2 * (pi2 - shifted * shifted)))
}

/// Correction `R_ij(k₀)` of the curved bipolar weight.
///
/// Evaluated through the algebraically equivalent form
/// `(1/d_i - 1/d_j)² - 4 s²((d_i-d_j)/2) / (d_i d_j s(d_i) s(d_j))`, which
/// avoids the `1/k₀` cancellation of the closed form near `k₀ = 0`.
/// Returns exactly `0` for `k₀ = 0`.
pub fn r_ij_correction(k0: Curvature, d_i: f64, d_j: f64) -> Result<f64> {
    k0.check_radius("r_ij_correction", d_i, false)?;
    k0.check_radius("r_ij_correction", d_j, false)?;
    if k0.is_flat() {
        return Ok(0.0);
    }
    let (d_i, d_j) = if d_i <= d_j { (d_i, d_j) } else { (d_j, d_i) };
    let inv = 1.0 / d_i - 1.0 / d_j;
    let h = k0.sn(0.5 * (d_i - d_j).abs());
    Ok(inv * inv - 4.0 * h * h / (d_i * d_j * k0.sn(d_i) * k0.sn(d_j)))
}

/// Area of the unit sphere `S^k ⊂ R^{k+1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_area(k - 2),
    }
}

/// Volume `ω_n` of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    unit_sphere_area(n - 1) / n as f64
}

/// `∫_{r0}^{r1} s_c(r)^k dr` in closed form (reduction formula).
pub fn radial_moment(c: Curvature, k: usize, r0: f64, r1: f64) -> f64 {
    radial_moment_from_zero(c, k, r1) - radial_moment_from_zero(c, k, r0)
}

fn radial_moment_from_zero(c: Curvature, k: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let cv = c.value();
    let x = cv * r * r;
    if x.abs() < 1e-6 {
        let kk = k as f64;
        // s^k = r^k (1 - k x/6 + ...)
        return r.powi(k as i32 + 1) / (kk + 1.0)
            - kk * cv * r.powi(k as i32 + 3) / (6.0 * (kk + 3.0));
    }
    let sq = cv.abs().sqrt();
    let y = sq * r;
    // integral of sin^k or sinh^k over [0, y]
    let mut even = y;
    let mut odd = if cv > 0.0 { 1.0 - y.cos() } else { 2.0 * (0.5 * y).sinh().powi(2) };
    let (s, co) = if cv > 0.0 { (y.sin(), y.cos()) } else { (y.sinh(), y.cosh()) };
    // ∫ sin^j  = -sin^{j-1} cos / j + (j-1)/j ∫ sin^{j-2}
    // ∫ sinh^j =  sinh^{j-1} cosh / j - (j-1)/j ∫ sinh^{j-2}
    let sign = if cv > 0.0 { -1.0 } else { 1.0 };
    let mut acc = if k.is_multiple_of(2) { even } else { odd };
    let mut j = if k.is_multiple_of(2) { 2 } else { 3 };
    while j <= k {
        let jf = j as f64;
        let prev = if j % 2 == 0 { even } else { odd };
        acc = sign * s.powi(j as i32 - 1) * co / jf - sign * (jf - 1.0) / jf * prev;
        if j % 2 == 0 {
            even = acc;
        } else {
            odd = acc;
        }
        j += 2;
    }
    acc / sq.powi(k as i32 + 1)
}

/// Volume of the geodesic annulus `r0 <= d <= r1` in the `n`-dimensional
/// model of curvature `c`.
pub fn geodesic_annulus_volume(n: usize, c: Curvature, r0: f64, r1: f64) -> f64 {
    unit_sphere_area(n - 1) * radial_moment(c, n - 1, r0, r1)
}
