use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::Curvature;
use crate::error::{Error, Result};

/// Allowed drift of the model constraint before a point is rejected.
const CONSTRAINT_TOL: f64 = 1e-9;

/// A simply connected space form of dimension `n >= 3`.
///
/// Points are stored in embedded coordinates: `R^n` for `c = 0`, the sphere of
/// radius `1/√c` in `R^{n+1}` for `c > 0`, and the upper sheet of the
/// hyperboloid `⟨x,x⟩_M = -1/|c|` in Minkowski space `R^{n,1}` for `c < 0`
/// (the last coordinate is the time-like one). With `hemisphere` set, the
/// sphere is restricted to its open upper half `x_{n+1} > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    n: usize,
    c: Curvature,
    hemisphere: bool,
}

/// A point of a [`ModelSpace`] in embedded coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    space: ModelSpace,
    coords: Vec<f64>,
}

impl ModelPoint {
    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl ModelSpace {
    pub fn new(n: usize, c: Curvature) -> Result<Self> {
        if n < 3 {
            return Err(Error::hypothesis(
                format!("dimension {n} < 3"),
                "the manifold has dimension n >= 3",
            ));
        }
        Ok(ModelSpace {
            n,
            c,
            hemisphere: false,
        })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, Curvature::FLAT)
    }

    /// The open upper hemisphere of the unit sphere `S^n`.
    pub fn hemisphere(n: usize) -> Result<Self> {
        let mut s = Self::new(n, Curvature::new(1.0)?)?;
        s.hemisphere = true;
        Ok(s)
    }

    /// Restrict a sphere to its open upper hemisphere.
    pub fn restricted_to_hemisphere(mut self) -> Result<Self> {
        if !self.c.is_spherical() {
            return Err(Error::InvalidConfig(
                "hemisphere restriction needs positive curvature".into(),
            ));
        }
        self.hemisphere = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> Curvature {
        self.c
    }

    pub fn is_hemisphere(&self) -> bool {
        self.hemisphere
    }

    /// Length of the embedded coordinate vectors.
    pub fn ambient_dim(&self) -> usize {
        if self.c.is_flat() {
            self.n
        } else {
            self.n + 1
        }
    }

    /// Radius `1/√|c|` of the embedded model (infinite when flat).
    pub fn model_radius(&self) -> f64 {
        if self.c.is_flat() {
            f64::INFINITY
        } else {
            1.0 / self.c.value().abs().sqrt()
        }
    }

    /// Ambient bilinear form: Euclidean for `c >= 0`, Minkowski for `c < 0`.
    #[inline]
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        if self.c.is_hyperbolic() {
            let l = a.len() - 1;
            s -= 2.0 * a[l] * b[l];
        }
        s
    }

    /// Norm of a tangent vector.
    #[inline]
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// The origin, the north pole `(0,…,0,1/√c)` or the hyperboloid apex.
    pub fn base_point(&self) -> ModelPoint {
        let mut coords = vec![0.0; self.ambient_dim()];
        if !self.c.is_flat() {
            coords[self.n] = self.model_radius();
        }
        ModelPoint {
            space: *self,
            coords,
        }
    }

    /// Unit tangent vector `e_k` at the base point (`k < n`).
    pub fn base_direction(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.ambient_dim()];
        v[k] = 1.0;
        v
    }

    /// Validate embedded coordinates and project onto the model.
    pub fn point(&self, coords: Vec<f64>) -> Result<ModelPoint> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::ShapeMismatch {
                expected: self.ambient_dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let c = self.c.value();
        if c != 0.0 {
            let q = -c.abs().recip() * if c > 0.0 { -1.0 } else { 1.0 };
            // q = 1/c for the sphere, -1/|c| for the hyperboloid
            let form = self.inner(&coords, &coords);
            if ((form - q) / q).abs() > CONSTRAINT_TOL {
                return Err(Error::InvalidPoint(format!(
                    "constraint violated: ⟨x,x⟩ = {form}, expected {q}"
                )));
            }
            if c < 0.0 && coords[self.n] <= 0.0 {
                return Err(Error::InvalidPoint("point on the lower hyperboloid sheet".into()));
            }
        }
        if self.hemisphere && coords[self.n] <= 0.0 {
            return Err(Error::InvalidPoint("point outside the open upper hemisphere".into()));
        }
        Ok(self.project(coords))
    }

    /// Point on the boundary of a hemisphere (or anywhere on the full model),
    /// kept in this space so boundary values of fields can be evaluated.
    pub(crate) fn closure_point(&self, coords: Vec<f64>) -> ModelPoint {
        self.project(coords)
    }

    /// Pull coordinates back onto the model after floating point drift.
    fn project(&self, mut coords: Vec<f64>) -> ModelPoint {
        let c = self.c.value();
        if c > 0.0 {
            let norm: f64 = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = self.model_radius() / norm;
            coords.iter_mut().for_each(|x| *x *= scale);
        } else if c < 0.0 {
            let spatial: f64 = coords[..self.n].iter().map(|x| x * x).sum();
            coords[self.n] = (1.0 / c.abs() + spatial).sqrt();
        }
        ModelPoint {
            space: *self,
            coords,
        }
    }

    fn check_same(&self, x: &ModelPoint) -> Result<()> {
        if x.space != *self {
            Err(Error::MismatchedSpaces)
        } else {
            Ok(())
        }
    }

    /// Squared chord `⟨y-x, y-x⟩` and the chord vector `y - x`.
    #[inline]
    fn chord(&self, x: &ModelPoint, y: &ModelPoint) -> (Vec<f64>, f64) {
        let delta: Vec<f64> = y.coords.iter().zip(&x.coords).map(|(a, b)| a - b).collect();
        let q = self.inner(&delta, &delta).max(0.0);
        (delta, q)
    }

    #[inline]
    fn distance_from_chord(&self, q: f64) -> f64 {
        let chord = q.sqrt();
        let c = self.c.value();
        if c > 0.0 {
            let k = c.sqrt();
            2.0 / k * (0.5 * k * chord).min(1.0).asin()
        } else if c < 0.0 {
            let k = (-c).sqrt();
            2.0 / k * (0.5 * k * chord).asinh()
        } else {
            chord
        }
    }

    /// Geodesic distance, evaluated from the chord length so that nearby
    /// points keep full relative accuracy.
    pub fn distance(&self, x: &ModelPoint, y: &ModelPoint) -> Result<f64> {
        self.check_same(x)?;
        self.check_same(y)?;
        let (_, q) = self.chord(x, y);
        Ok(self.distance_from_chord(q))
    }

    /// Inverse exponential map `exp_x^{-1}(y)` as an ambient tangent vector at `x`.
    ///
    /// With `δ = y - x`, the tangential part of `y` at `x` is
    /// `δ + (c ⟨δ,δ⟩ / 2) x` in every model; rescaling it to length `d(x,y)`
    /// gives the logarithm.
    pub fn log_map(&self, x: &ModelPoint, y: &ModelPoint) -> Result<Vec<f64>> {
        self.check_same(x)?;
        self.check_same(y)?;
        let (mut delta, q) = self.chord(x, y);
        if q == 0.0 {
            return Err(Error::CoincidentPoints("log_map"));
        }
        let d = self.distance_from_chord(q);
        let c = self.c.value();
        if c > 0.0 && d >= self.c.conjugate_radius() * (1.0 - 1e-12) {
            return Err(Error::Antipodal);
        }
        if c != 0.0 {
            let k = 0.5 * c * q;
            delta.iter_mut().zip(&x.coords).for_each(|(u, xi)| *u += k * xi);
        }
        let len = self.norm(&delta);
        if len == 0.0 {
            return Err(Error::CoincidentPoints("log_map"));
        }
        let scale = d / len;
        delta.iter_mut().for_each(|u| *u *= scale);
        Ok(delta)
    }

    /// Exponential map along the tangent vector `v` at `x`.
    pub fn exp(&self, x: &ModelPoint, v: &[f64]) -> Result<ModelPoint> {
        self.check_same(x)?;
        let len = self.norm(v);
        if len == 0.0 {
            return Ok(x.clone());
        }
        let cs = self.c.cs(len);
        let sn = self.c.sn(len) / len;
        let coords = x.coords.iter().zip(v).map(|(xi, vi)| cs * xi + sn * vi).collect();
        Ok(self.project(coords))
    }

    /// Orthogonal projection of an ambient vector onto `T_x M`.
    pub fn tangent_projection(&self, x: &ModelPoint, v: &[f64]) -> Vec<f64> {
        let c = self.c.value();
        if c == 0.0 {
            return v.to_vec();
        }
        // ⟨x,x⟩ = 1/c in both curved models (with their own bilinear form)
        let k = c * self.inner(&x.coords, v);
        v.iter().zip(&x.coords).map(|(vi, xi)| vi - k * xi).collect()
    }

    /// Riemannian gradient of a function given by its ambient (Euclidean)
    /// partial derivatives.
    pub fn ambient_gradient(&self, x: &ModelPoint, partials: &[f64]) -> Vec<f64> {
        let mut g = partials.to_vec();
        if self.c.is_hyperbolic() {
            let l = g.len() - 1;
            g[l] = -g[l];
        }
        self.tangent_projection(x, &g)
    }

    /// `∇ d(·, pole)` at `x`: the unit vector `-exp_x^{-1}(pole)/d`.
    pub fn grad_distance(&self, x: &ModelPoint, pole: &ModelPoint) -> Result<Vec<f64>> {
        let mut v = self.log_map(x, pole)?;
        let len = self.norm(&v);
        v.iter_mut().for_each(|u| *u /= -len);
        Ok(v)
    }

    /// Distance together with its unit gradient, sharing one log map.
    pub fn distance_and_gradient(&self, x: &ModelPoint, pole: &ModelPoint) -> Result<(f64, Vec<f64>)> {
        let mut v = self.log_map(x, pole)?;
        let len = self.norm(&v);
        let d = self.distance(x, pole)?;
        v.iter_mut().for_each(|u| *u /= -len);
        Ok((d, v))
    }

    /// `Δ d(·, p) = (n-1) ct_c(d)` at distance `r` from `p`.
    pub fn laplacian_distance(&self, r: f64) -> Result<f64> {
        Ok((self.n as f64 - 1.0) * crate::curvature::ct_c(self.c, r)?)
    }

    /// `⟨∇d_i, ∇d_j⟩` at `x`: the cosine of the angle at `x` in the
    /// geodesic triangle `x_i x x_j`.
    pub fn angle_cosine(&self, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint) -> Result<f64> {
        let gi = self.grad_distance(x, pole_i)?;
        let gj = self.grad_distance(x, pole_j)?;
        Ok(self.inner(&gi, &gj).clamp(-1.0, 1.0))
    }

    /// The angle at `x` of the triangle `x_i x x_j`, computed as
    /// `2 atan2(|g_i - g_j|, |g_i + g_j|)` for accuracy near `0` and `π`.
    pub fn vertex_angle(&self, x: &ModelPoint, pole_i: &ModelPoint, pole_j: &ModelPoint) -> Result<f64> {
        let gi = self.grad_distance(x, pole_i)?;
        let gj = self.grad_distance(x, pole_j)?;
        let diff: Vec<f64> = gi.iter().zip(&gj).map(|(a, b)| a - b).collect();
        let sum: Vec<f64> = gi.iter().zip(&gj).map(|(a, b)| a + b).collect();
        Ok(2.0 * self.norm(&diff).atan2(self.norm(&sum)))
    }

    /// Point at signed geodesic distance `t` from the base point along `e_0`.
    pub fn axis_point(&self, t: f64) -> Result<ModelPoint> {
        let mut v = self.base_direction(0);
        v[0] = t;
        let p = self.exp(&self.base_point(), &v)?;
        self.check_domain(&p)?;
        Ok(p)
    }

    /// Point with geodesic polar coordinates `(r, θ)` about the base point,
    /// `θ` measured from `e_0` inside the `(e_0, e_1)` plane.
    pub fn polar_point(&self, r: f64, theta: f64) -> Result<ModelPoint> {
        let mut v = vec![0.0; self.ambient_dim()];
        v[0] = r * theta.cos();
        v[1] = r * theta.sin();
        self.exp(&self.base_point(), &v)
    }

    /// Reject points outside the open hemisphere when restricted.
    pub fn check_domain(&self, x: &ModelPoint) -> Result<()> {
        if self.hemisphere && x.coords[self.n] <= 0.0 {
            Err(Error::InvalidPoint("point outside the open upper hemisphere".into()))
        } else {
            Ok(())
        }
    }

    /// Random point at geodesic distance `< radius` from `center`
    /// (uniform direction, radius distributed like `radius·U^{1/n}`).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, center: &ModelPoint, radius: f64) -> ModelPoint {
        loop {
            let dir = self.random_unit_tangent(rng, center);
            let r = radius * rng.gen::<f64>().powf(1.0 / self.n as f64);
            let v: Vec<f64> = dir.iter().map(|d| d * r).collect();
            if let Ok(p) = self.exp(center, &v) {
                if self.check_domain(&p).is_ok() {
                    return p;
                }
            }
        }
    }

    /// Uniformly distributed unit tangent vector at `x`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R, x: &ModelPoint) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..self.ambient_dim()).map(|_| gaussian(rng)).collect();
            let t = self.tangent_projection(x, &self.raise(&g));
            let len = self.norm(&t);
            if len > 1e-8 {
                return t.into_iter().map(|u| u / len).collect();
            }
        }
    }

    /// Map a covector to a vector (flip the time-like sign for `c < 0`).
    fn raise(&self, v: &[f64]) -> Vec<f64> {
        let mut v = v.to_vec();
        if self.c.is_hyperbolic() {
            let l = v.len() - 1;
            v[l] = -v[l];
        }
        v
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Half-angle products of a model triangle with sides `d_i`, `d_j` meeting
/// at the vertex and opposite side `d_ij`:
///
/// ```text
///   Q = s((d_ij + d_i - d_j)/2) s((d_ij - d_i + d_j)/2) = s(d_i) s(d_j) sin²(γ/2)
///   P = s((d_i + d_j + d_ij)/2) s((d_i + d_j - d_ij)/2) = s(d_i) s(d_j) cos²(γ/2)
/// ```
///
/// These follow from `s²(a) - s²(b) = s(a+b) s(a-b)` applied to the cosine
/// law and are valid for every curvature.
fn half_angle_products(c: Curvature, d_i: f64, d_j: f64, d_ij: f64) -> Result<(f64, f64)> {
    for (name, d) in [("d_i", d_i), ("d_j", d_j), ("d_ij", d_ij)] {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::DegenerateTriangle(format!("side {name} = {d}")));
        }
    }
    let perimeter = d_i + d_j + d_ij;
    if c.is_spherical() && perimeter >= 2.0 * c.conjugate_radius() {
        return Err(Error::hypothesis(
            format!("perimeter {perimeter} >= 2π/√c"),
            "geodesic triangles in a strictly convex set have perimeter < 2π/√k₀",
        ));
    }
    let slack = 1e-12 * perimeter;
    let a = 0.5 * (d_ij + d_i - d_j);
    let b = 0.5 * (d_ij - d_i + d_j);
    let e = 0.5 * (d_i + d_j - d_ij);
    if a < -slack || b < -slack || e < -slack {
        return Err(Error::DegenerateTriangle(format!(
            "sides ({d_i}, {d_j}, {d_ij}) violate the triangle inequality"
        )));
    }
    let q = c.sn(a.max(0.0)) * c.sn(b.max(0.0));
    let p = c.sn(0.5 * perimeter) * c.sn(e.max(0.0));
    if p + q <= 0.0 {
        return Err(Error::DegenerateTriangle("vanishing half-angle products".into()));
    }
    Ok((q, p))
}

/// `cos γ` at the vertex between sides `d_i` and `d_j` of a triangle with
/// opposite side `d_ij` in the model of curvature `c` (cosine law).
pub fn cosine_law_angle(c: Curvature, d_i: f64, d_j: f64, d_ij: f64) -> Result<f64> {
    let (q, p) = half_angle_products(c, d_i, d_j, d_ij)?;
    Ok((p - q) / (p + q))
}

/// The angle `γ ∈ [0, π]` itself, `2 atan2(√Q, √P)`.
pub fn cosine_law_vertex_angle(c: Curvature, d_i: f64, d_j: f64, d_ij: f64) -> Result<f64> {
    let (q, p) = half_angle_products(c, d_i, d_j, d_ij)?;
    Ok(2.0 * q.sqrt().atan2(p.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize, c: f64) -> ModelSpace {
        ModelSpace::new(n, Curvature::new(c).unwrap()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let e = space(3, 0.0);
        let x = e.point(vec![0.0, 0.0, 0.0]).unwrap();
        let y = e.point(vec![3.0, 4.0, 0.0]).unwrap();
        assert_eq!(e.distance(&x, &y).unwrap(), 5.0);

        let s = space(3, 1.0);
        let north = s.base_point();
        let eq = s.point(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((s.distance(&north, &eq).unwrap() - PI / 2.0).abs() < 1e-15);

        let h = space(3, -1.0);
        let o = h.point(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let p = h.point(vec![1f64.sinh(), 0.0, 0.0, 1f64.cosh()]).unwrap();
        // oracle: arccosh(-⟨x,y⟩_M) = arccosh(cosh 1)
        let oracle = (-h.inner(o.coords(), p.coords())).acosh();
        assert!((oracle - 1.0).abs() < 1e-7);
        assert!((h.distance(&o, &p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_points_rejected() {
        let s = space(3, 1.0);
        assert!(s.point(vec![1.0, 1.0, 0.0, 0.0]).is_err());
        assert!(s.point(vec![1.0, 0.0, 0.0]).is_err());
        let h = space(3, -1.0);
        assert!(h.point(vec![0.0, 0.0, 0.0, -1.0]).is_err());
        let hs = ModelSpace::hemisphere(3).unwrap();
        assert!(hs.point(vec![0.0, 0.0, 0.6, -0.8]).is_err());
        assert!(hs.point(vec![0.0, 0.0, 0.6, 0.8]).is_ok());
        assert!(ModelSpace::euclidean(2).is_err());
        let e = space(3, 0.0);
        assert_eq!(e.distance(&e.base_point(), &s.base_point()), Err(Error::MismatchedSpaces));
    }

    #[test]
    fn log_map_flat_is_difference() {
        let e = space(4, 0.0);
        let x = e.point(vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let y = e.point(vec![0.0, 2.5, 3.0, 0.0]).unwrap();
        let v = e.log_map(&x, &y).unwrap();
        for k in 0..4 {
            assert!((v[k] - (y.coords()[k] - x.coords()[k])).abs() < 1e-14);
        }
    }

    #[test]
    fn log_map_sphere_north_to_equator() {
        let s = space(3, 1.0);
        let north = s.base_point();
        let eq = s.point(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let v = s.log_map(&north, &eq).unwrap();
        assert!((s.norm(&v) - PI / 2.0).abs() < 1e-14);
        assert!(s.inner(&v, north.coords()).abs() < 1e-14);
        assert!((v[1] - PI / 2.0).abs() < 1e-14);
        let back = s.exp(&north, &v).unwrap();
        assert!(s.distance(&back, &eq).unwrap() < 1e-12);
        assert_eq!(s.log_map(&north, &north), Err(Error::CoincidentPoints("log_map")));
        let south = s.point(vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(s.log_map(&north, &south), Err(Error::Antipodal));
    }

    #[test]
    fn log_map_vanishes_continuously() {
        for &c in &[-1.0, 0.0, 1.0] {
            let m = space(3, c);
            let x = m.axis_point(0.3).unwrap();
            for &t in &[1e-3, 1e-6, 1e-9] {
                let y = m.axis_point(0.3 + t).unwrap();
                let v = m.log_map(&x, &y).unwrap();
                assert!((m.norm(&v) - t).abs() < 1e-7 * t.max(1e-9) + 1e-15);
            }
        }
    }

    #[test]
    fn grad_distance_sphere_matches_closed_form() {
        let s = space(3, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = s.base_point();
        for _ in 0..100 {
            let x = s.random_point(&mut rng, &base, 1.2);
            let p = s.random_point(&mut rng, &base, 1.2);
            let d = s.distance(&x, &p).unwrap();
            let g = s.grad_distance(&x, &p).unwrap();
            for k in 0..4 {
                let closed = (x.coords()[k] * d.cos() - p.coords()[k]) / d.sin();
                assert!((g[k] - closed).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eikonal_and_exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &c in &[-2.0, -1.0, 0.0, 1.0, 4.0] {
            let m = space(4, c);
            let base = m.base_point();
            let radius = if c > 0.0 {
                0.45 * PI / c.sqrt()
            } else if c < 0.0 {
                2.0 / (-c).sqrt()
            } else {
                3.0
            };
            for _ in 0..2000 {
                let x = m.random_point(&mut rng, &base, radius);
                let y = m.random_point(&mut rng, &base, radius);
                let g = m.grad_distance(&x, &y).unwrap();
                assert!((m.norm(&g) - 1.0).abs() < 1e-10);
                let v = m.log_map(&x, &y).unwrap();
                let back = m.exp(&x, &v).unwrap();
                let err = m.distance(&back, &y).unwrap();
                assert!(err < 1e-9, "c={c} err={err}");
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        assert!((space(3, 0.0).laplacian_distance(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(space(3, 1.0).laplacian_distance(PI / 2.0).unwrap().abs() < 1e-15);
        let v = space(4, -1.0).laplacian_distance(1.0).unwrap();
        assert!((v - 3.0 * 1f64.cosh() / 1f64.sinh()).abs() < 1e-14);
        assert!(space(3, 0.0).laplacian_distance(0.0).is_err());
    }

    #[test]
    fn angle_cosine_collinear_cases() {
        let e = space(3, 0.0);
        let pi = e.axis_point(-1.0).unwrap();
        let pj = e.axis_point(1.0).unwrap();
        let mid = e.axis_point(0.2).unwrap();
        assert!((e.angle_cosine(&mid, &pi, &pj).unwrap() + 1.0).abs() < 1e-15);
        let beyond = e.axis_point(2.5).unwrap();
        assert!((e.angle_cosine(&beyond, &pi, &pj).unwrap() - 1.0).abs() < 1e-15);
        assert!(e.angle_cosine(&pi, &pi, &pj).is_err());
    }

    #[test]
    fn cosine_law_examples() {
        let flat = Curvature::FLAT;
        assert!(cosine_law_angle(flat, 3.0, 4.0, 5.0).unwrap().abs() < 1e-15);
        assert!((cosine_law_angle(flat, 1.0, 1.0, 2.0).unwrap() + 1.0).abs() < 1e-15);
        let one = Curvature::new(1.0).unwrap();
        // cos(π/2) = cos²(π/2) + sin²(π/2) cos γ  ⇒  cos γ = 0
        assert!(cosine_law_angle(one, PI / 2.0, PI / 2.0, PI / 2.0).unwrap().abs() < 1e-15);
        assert!(cosine_law_angle(flat, 1.0, 1.0, 3.0).is_err());
        assert!(cosine_law_angle(one, 2.5, 2.5, 2.0).is_err());
        assert!(cosine_law_angle(flat, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cosine_law_matches_classical_forms() {
        for &(di, dj, dij) in &[(0.7f64, 1.1f64, 0.9f64), (1.5, 0.4, 1.3), (0.2, 0.25, 0.1)] {
            let k = Curvature::new(-1.0).unwrap();
            let classical = (di.cosh() * dj.cosh() - dij.cosh()) / (di.sinh() * dj.sinh());
            assert!((cosine_law_angle(k, di, dj, dij).unwrap() - classical).abs() < 1e-12);
            let k = Curvature::new(1.0).unwrap();
            let classical = (dij.cos() - di.cos() * dj.cos()) / (di.sin() * dj.sin());
            assert!((cosine_law_angle(k, di, dj, dij).unwrap() - classical).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_cosine_matches_cosine_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &c in &[-1.0, 0.0, 1.0] {
            let m = space(3, c);
            let base = m.base_point();
            for _ in 0..1000 {
                let x = m.random_point(&mut rng, &base, 1.0);
                let a = m.random_point(&mut rng, &base, 1.0);
                let b = m.random_point(&mut rng, &base, 1.0);
                let di = m.distance(&x, &a).unwrap();
                let dj = m.distance(&x, &b).unwrap();
                let dij = m.distance(&a, &b).unwrap();
                let direct = m.angle_cosine(&x, &a, &b).unwrap();
                let law = cosine_law_angle(m.curvature(), di, dj, dij).unwrap();
                assert!((direct - law).abs() < 1e-9, "c={c}: {direct} vs {law}");
            }
        }
    }
}
